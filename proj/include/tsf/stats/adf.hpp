#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/error.hpp"

namespace tsf::stats {

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t lags_used = 0;
    std::size_t n_obs = 0;
    bool reject_null = false;  // p_value < 0.05
};

inline constexpr double kAdfSignificance = 0.05;

/// Schwert lag rule floor(12 * (n/100)^(1/4)).
inline std::size_t schwert_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

// Dickey-Fuller tau distribution quantiles for the constant-only regression,
// by sample size. Columns follow kAdfProbabilities; last row is asymptotic.
inline constexpr std::array<double, 8> kAdfProbabilities = {0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99};

struct AdfTableRow {
    double inv_n;
    std::array<double, 8> quantiles;
};

inline constexpr std::array<AdfTableRow, 6> kAdfTable = {{
    {1.0 / 25.0, {-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72}},
    {1.0 / 50.0, {-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66}},
    {1.0 / 100.0, {-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63}},
    {1.0 / 250.0, {-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62}},
    {1.0 / 500.0, {-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61}},
    {0.0, {-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60}},
}};

/// Critical values for a sample of n observations, linear in 1/n between rows.
inline std::array<double, 8> adf_critical_values(std::size_t n) {
    const double x = 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
    if (x >= kAdfTable.front().inv_n) return kAdfTable.front().quantiles;
    for (std::size_t r = 0; r + 1 < kAdfTable.size(); ++r) {
        const auto& hi = kAdfTable[r];
        const auto& lo = kAdfTable[r + 1];
        if (x <= hi.inv_n && x >= lo.inv_n) {
            const double w = (x - lo.inv_n) / (hi.inv_n - lo.inv_n);
            std::array<double, 8> cv{};
            for (std::size_t k = 0; k < cv.size(); ++k) cv[k] = lo.quantiles[k] + w * (hi.quantiles[k] - lo.quantiles[k]);
            return cv;
        }
    }
    return kAdfTable.back().quantiles;
}

}  // namespace detail

/// Critical value at one of the tabulated levels (0.01, 0.025, 0.05, 0.10).
inline double adf_critical_value(std::size_t n, double level) {
    auto cv = detail::adf_critical_values(n);
    for (std::size_t k = 0; k < detail::kAdfProbabilities.size(); ++k)
        if (std::abs(detail::kAdfProbabilities[k] - level) < 1e-12) return cv[k];
    throw InputError("no tabulated ADF critical value at level " + std::to_string(level));
}

/**
 * Left-tail p-value of a tau statistic by piecewise-linear interpolation in
 * the table; extrapolated linearly past the ends and clamped to [0.001, 0.999].
 */
inline double adf_p_value(double statistic, std::size_t n) {
    const auto cv = detail::adf_critical_values(n);
    const auto& p = detail::kAdfProbabilities;
    const std::size_t last = cv.size() - 1;
    auto lerp = [&](std::size_t a, std::size_t b) {
        return p[a] + (statistic - cv[a]) * (p[b] - p[a]) / (cv[b] - cv[a]);
    };
    double pv = 0.0;
    if (statistic <= cv[0]) {
        pv = lerp(0, 1);
    } else if (statistic >= cv[last]) {
        pv = lerp(last - 1, last);
    } else {
        std::size_t k = 0;
        while (statistic > cv[k + 1]) ++k;
        pv = lerp(k, k + 1);
    }
    return std::clamp(pv, 0.001, 0.999);
}

/**
 * Augmented Dickey-Fuller test, constant but no trend.
 *
 * Regresses dx_t on [1, x_{t-1}, dx_{t-1}, ..., dx_{t-L}] by OLS and returns
 * the t-ratio of the x_{t-1} coefficient. `max_lag` = nullopt selects the
 * Schwert rule.
 */
inline AdfResult adf_test(std::span<const double> values, std::optional<std::size_t> max_lag = std::nullopt) {
    const std::size_t n = values.size();
    const std::size_t lags = max_lag ? *max_lag : schwert_max_lag(n);
    if (n < 20 + lags)
        throw SizeError("ADF needs at least " + std::to_string(20 + lags) + " values, got " + std::to_string(n));

    std::vector<double> dx(n - 1);
    for (std::size_t t = 1; t < n; ++t) dx[t - 1] = values[t] - values[t - 1];

    // Row r corresponds to dx[lags + r], i.e. x index t = lags + r + 1.
    const std::size_t rows = dx.size() - lags;
    const std::size_t cols = 2 + lags;
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = lags + r;
        y(r) = dx[i];
        X(r, 0) = 1.0;
        X(r, 1) = values[i];
        for (std::size_t k = 1; k <= lags; ++k) X(r, 1 + k) = dx[i - k];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < cols || rows <= cols)
        throw DegenerateInputError("ADF regression matrix is singular");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(rows - cols);
    const Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(cols);
    e1(1) = 1.0;
    const double var_gamma = sigma2 * ldlt.solve(e1)(1);
    if (!(var_gamma > 0.0) || !std::isfinite(var_gamma))
        throw DegenerateInputError("ADF regression has zero residual variance");

    AdfResult result;
    result.statistic = beta(1) / std::sqrt(var_gamma);
    result.lags_used = lags;
    result.n_obs = rows;
    result.p_value = adf_p_value(result.statistic, rows);
    result.reject_null = result.p_value < kAdfSignificance;
    return result;
}

}  // namespace tsf::stats
