#pragma once

#include <cmath>
#include <span>
#include <string>

#include "tsf/error.hpp"

namespace tsf {

struct MetricSet {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

inline MetricSet compute_metrics(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size())
        throw InputError("metrics: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(actuals.size()) + " actuals");
    if (predictions.empty()) throw InputError("metrics: empty input");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - actuals[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const double n = static_cast<double>(predictions.size());
    MetricSet m;
    m.mae = abs_sum / n;
    m.mse = sq_sum / n;
    m.rmse = std::sqrt(m.mse);
    return m;
}

}  // namespace tsf
