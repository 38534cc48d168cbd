#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "tsf/error.hpp"

namespace tsf::arima {

struct NelderMeadOptions {
    std::size_t max_iterations = 2000;
    /// Converged once (f_worst - f_best) <= tolerance * (|f_best| + tolerance).
    double tolerance = 1e-8;
    /// Initial simplex edge relative to each coordinate (absolute when the coordinate is 0).
    double initial_step = 0.1;
    double zero_step = 0.05;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/**
 * Nelder-Mead downhill simplex with dimension-adaptive coefficients
 * (reflection 1, expansion 1+2/n, contraction 0.75-1/(2n), shrink 1-1/n).
 *
 * Never throws on non-convergence; callers inspect `converged`. The returned
 * point is the best vertex seen, so `value <= f(x0)` always holds.
 */
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const NelderMeadOptions& opts = {}) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    if (n == 0) {
        res.x = x0;
        res.value = eval(x0);
        res.converged = true;
        return res;
    }

    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dn;
    const double rho = 0.75 - 1.0 / (2.0 * dn);
    const double sigma = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        double& c = simplex[i + 1][i];
        c = c != 0.0 ? c * (1.0 + opts.initial_step) : opts.zero_step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto combine = [&](std::vector<double>& out, double t, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
    };

    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        const double spread = fv[worst] - fv[best];
        if (std::isfinite(fv[best]) && spread <= opts.tolerance * (std::abs(fv[best]) + opts.tolerance)) {
            res.converged = true;
            break;
        }
        if (res.iterations >= opts.max_iterations) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        for (double& c : centroid) c /= dn;

        combine(xr, alpha, simplex[worst]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            combine(xe, alpha * gamma, simplex[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        // Outside contraction when the reflection beats the worst vertex, inside otherwise.
        const bool outside = fr < fv[worst];
        combine(xc, outside ? rho * alpha : -rho, simplex[worst]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.value = fv[best];
    return res;
}

}  // namespace tsf::arima
