#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsf/core/price_series.hpp"
#include "tsf/error.hpp"

namespace tsf::baselines {

enum class BaselineKind { Naive, MovingAverage };

struct BaselineSpec {
    BaselineKind kind = BaselineKind::Naive;
    std::size_t window = 1;  // MovingAverage only

    void validate() const {
        if (kind == BaselineKind::MovingAverage && window < 1) throw ConfigError("moving average window must be >= 1");
    }
};

/// Prediction at t is the value at t-1, for t in [test_start, size).
inline std::vector<double> naive_forecast(std::span<const double> values, std::size_t test_start) {
    if (test_start < 1 || test_start > values.size())
        throw RangeError("naive forecast test_start " + std::to_string(test_start) + " outside [1, " +
                         std::to_string(values.size()) + "]");
    return {values.begin() + static_cast<std::ptrdiff_t>(test_start - 1), values.end() - 1};
}

inline constexpr std::size_t kResumInterval = 4096;

/**
 * Trailing k-day mean excluding the target day: prediction at t = mean(values[t-k, t)).
 *
 * Uses a rolling sum that is recomputed from scratch every kResumInterval steps
 * to bound accumulated rounding. k == 1 returns the naive forecast exactly.
 */
inline std::vector<double> moving_average_forecast(std::span<const double> values, std::size_t k,
                                                   std::size_t test_start) {
    if (k < 1) throw RangeError("moving average window must be >= 1");
    if (test_start < k || test_start > values.size())
        throw RangeError("moving average test_start " + std::to_string(test_start) + " needs k=" + std::to_string(k) +
                         " prior values within a series of length " + std::to_string(values.size()));
    if (k == 1) return naive_forecast(values, test_start);

    const double inv_k = 1.0 / static_cast<double>(k);
    auto window_sum = [&](std::size_t t) {
        double s = 0.0;
        for (std::size_t i = t - k; i < t; ++i) s += values[i];
        return s;
    };
    std::vector<double> out;
    out.reserve(values.size() - test_start);
    double sum = 0.0;
    for (std::size_t t = test_start, step = 0; t < values.size(); ++t, ++step) {
        if (step % kResumInterval == 0)
            sum = window_sum(t);
        else
            sum += values[t - 1] - values[t - 1 - k];
        out.push_back(sum * inv_k);
    }
    return out;
}

inline std::vector<double> forecast(const BaselineSpec& spec, std::span<const double> values, std::size_t test_start) {
    spec.validate();
    return spec.kind == BaselineKind::Naive ? naive_forecast(values, test_start)
                                            : moving_average_forecast(values, spec.window, test_start);
}

inline std::vector<double> naive_forecast(const PriceSeries& s, std::size_t test_start) {
    return naive_forecast(std::span<const double>(s.values()), test_start);
}

inline std::vector<double> moving_average_forecast(const PriceSeries& s, std::size_t k, std::size_t test_start) {
    return moving_average_forecast(std::span<const double>(s.values()), k, test_start);
}

}  // namespace tsf::baselines
