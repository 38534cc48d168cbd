#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tsf/core/price_series.hpp"
#include "tsf/error.hpp"

namespace tsf::stats {

struct CorrelogramResult {
    std::vector<std::size_t> lags;      // 0..max_lag for ACF, 1..max_lag for PACF
    std::vector<double> coefficients;
    double confidence_band = 0.0;       // 1.96 / sqrt(n)
};

namespace detail {

inline void check_correlogram_input(std::span<const double> values, std::size_t max_lag) {
    if (values.size() <= max_lag)
        throw SizeError("correlogram needs more than " + std::to_string(max_lag) + " values, got " +
                        std::to_string(values.size()));
}

/// Autocovariances 0..max_lag with 1/n normalization.
inline std::vector<double> autocovariance(std::span<const double> values, std::size_t max_lag) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    std::vector<double> gamma(max_lag + 1, 0.0);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        double s = 0.0;
        for (std::size_t t = h; t < values.size(); ++t) s += (values[t] - mean) * (values[t - h] - mean);
        gamma[h] = s / n;
    }
    return gamma;
}

}  // namespace detail

/// Sample autocorrelation, lags 0..max_lag. Throws on constant input.
inline CorrelogramResult acf(std::span<const double> values, std::size_t max_lag) {
    detail::check_correlogram_input(values, max_lag);
    auto gamma = detail::autocovariance(values, max_lag);
    if (!(gamma[0] > 0.0)) throw DegenerateInputError("acf: series has zero variance");
    CorrelogramResult r;
    r.confidence_band = 1.96 / std::sqrt(static_cast<double>(values.size()));
    for (std::size_t h = 0; h <= max_lag; ++h) {
        r.lags.push_back(h);
        r.coefficients.push_back(h == 0 ? 1.0 : std::clamp(gamma[h] / gamma[0], -1.0, 1.0));
    }
    return r;
}

/// Partial autocorrelation for lags 1..max_lag via the Durbin-Levinson recursion.
inline CorrelogramResult pacf(std::span<const double> values, std::size_t max_lag) {
    auto rho = acf(values, max_lag).coefficients;
    CorrelogramResult r;
    r.confidence_band = 1.96 / std::sqrt(static_cast<double>(values.size()));

    std::vector<double> phi_prev;
    std::vector<double> phi;
    double v = 1.0;  // normalized prediction-error variance
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = rho[k];
        for (std::size_t j = 1; j < k; ++j) num -= phi_prev[j - 1] * rho[k - j];
        double phikk = v > 0.0 ? num / v : 0.0;
        phikk = std::clamp(phikk, -1.0, 1.0);
        phi.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) phi[j - 1] = phi_prev[j - 1] - phikk * phi_prev[k - j - 1];
        phi[k - 1] = phikk;
        v *= (1.0 - phikk * phikk);
        phi_prev = phi;
        r.lags.push_back(k);
        r.coefficients.push_back(phikk);
    }
    return r;
}

/// CSV `lag,coefficient,band` for plotting.
inline std::string correlogram_csv(const CorrelogramResult& r) {
    std::string out = "lag,coefficient,band\n";
    for (std::size_t i = 0; i < r.lags.size(); ++i)
        out += std::to_string(r.lags[i]) + ',' + tsf::detail::format_double(r.coefficients[i]) + ',' +
               tsf::detail::format_double(r.confidence_band) + '\n';
    return out;
}

}  // namespace tsf::stats
