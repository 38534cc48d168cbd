#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsf/error.hpp"

namespace tsf::stats {

/// Applies first differencing `order` times; output is shorter by `order`.
inline std::vector<double> difference(std::span<const double> values, std::size_t order) {
    if (order >= values.size() && order > 0)
        throw SizeError("cannot difference " + std::to_string(values.size()) + " values " + std::to_string(order) +
                        " times");
    std::vector<double> out(values.begin(), values.end());
    for (std::size_t k = 0; k < order; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

/**
 * First value of each intermediate differencing level of `values`.
 *
 * Element k is the first entry of difference(values, k); these are exactly the
 * initial values undifference() needs to invert difference(values, order).
 */
inline std::vector<double> difference_heads(std::span<const double> values, std::size_t order) {
    std::vector<double> heads;
    std::vector<double> level(values.begin(), values.end());
    for (std::size_t k = 0; k < order; ++k) {
        if (level.empty()) throw SizeError("series too short for differencing order " + std::to_string(order));
        heads.push_back(level.front());
        level = difference(level, 1);
    }
    return heads;
}

/**
 * Inverts difference().
 *
 * `initial_values[k]` is the first element of the series differenced k times,
 * as returned by difference_heads(). For d == 1 that is just the first value.
 */
inline std::vector<double> undifference(std::span<const double> diffs, std::span<const double> initial_values) {
    if (initial_values.empty()) throw InputError("undifference needs at least one initial value");
    std::vector<double> level(diffs.begin(), diffs.end());
    for (std::size_t k = initial_values.size(); k-- > 0;) {
        std::vector<double> up;
        up.reserve(level.size() + 1);
        up.push_back(initial_values[k]);
        for (double dv : level) up.push_back(up.back() + dv);
        level = std::move(up);
    }
    return level;
}

/// Convenience overload checking the expected order against the initial-value count.
inline std::vector<double> undifference(std::span<const double> diffs, std::span<const double> initial_values,
                                        std::size_t order) {
    if (initial_values.size() != order)
        throw InputError("undifference order " + std::to_string(order) + " needs " + std::to_string(order) +
                         " initial values, got " + std::to_string(initial_values.size()));
    return undifference(diffs, initial_values);
}

}  // namespace tsf::stats
