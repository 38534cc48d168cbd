#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace tsf::arima {

/// Roots of a0 + a1 z + ... + ak z^k (trailing zero coefficients are ignored).
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
    if (deg <= 1) return {};
    const std::size_t k = deg - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < k; ++i) companion(0, i) = -coeffs[k - 1 - i] / coeffs[k];
    for (std::size_t i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()(i));
    return roots;
}

/// Coefficients (constant first) of prod_k (1 - z / root_k), real parts only.
inline std::vector<double> polynomial_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] / r;
        }
        poly = std::move(next);
    }
    std::vector<double> out;
    for (const auto& c : poly) out.push_back(c.real());
    return out;
}

/// Polynomial 1 - phi_1 z - ... - phi_p z^p.
inline std::vector<double> ar_polynomial(std::span<const double> ar) {
    std::vector<double> poly{1.0};
    for (double a : ar) poly.push_back(-a);
    return poly;
}

/// Polynomial 1 + theta_1 z + ... + theta_q z^q.
inline std::vector<double> ma_polynomial(std::span<const double> ma) {
    std::vector<double> poly{1.0};
    for (double m : ma) poly.push_back(m);
    return poly;
}

/// True when every root of the polynomial lies strictly outside the unit circle.
inline bool roots_outside_unit_circle(std::span<const double> poly) {
    for (const auto& r : polynomial_roots(poly))
        if (std::abs(r) <= 1.0) return false;
    return true;
}

/**
 * Reflects roots on or inside the unit circle to 1/conj(root) and rebuilds the
 * polynomial. Roots exactly on the circle are pulled slightly outside.
 */
inline std::vector<double> reflect_into_stable_region(std::span<const double> poly) {
    auto roots = polynomial_roots(poly);
    bool changed = false;
    for (auto& r : roots) {
        const double mag = std::abs(r);
        if (mag < 1.0) {
            r = 1.0 / std::conj(r);
            changed = true;
        }
        if (std::abs(r) <= 1.0) {
            r *= 1.0 + 1e-6;
            changed = true;
        }
    }
    if (!changed) return {poly.begin(), poly.end()};
    auto rebuilt = polynomial_from_roots(roots);
    rebuilt.resize(poly.size(), 0.0);
    return rebuilt;
}

}  // namespace tsf::arima
