#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tsf/core/price_series.hpp"
#include "tsf/error.hpp"

namespace tsf {

/// Train/test boundary, both indices exclusive.
struct SplitSpec {
    std::size_t train_end = 0;
    std::size_t test_end = 0;

    /// train_end = floor(ratio * n), test_end = n.
    static SplitSpec from_ratio(std::size_t n, double train_ratio = 0.8) {
        if (!(train_ratio > 0.0 && train_ratio < 1.0))
            throw RangeError("train ratio must lie in (0, 1), got " + std::to_string(train_ratio));
        return SplitSpec{static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n))), n};
    }

    void validate(std::size_t length) const {
        if (!(0 < train_end && train_end < test_end && test_end <= length))
            throw RangeError("split requires 0 < train_end < test_end <= " + std::to_string(length) +
                             ", got train_end=" + std::to_string(train_end) +
                             " test_end=" + std::to_string(test_end));
    }
};

inline std::pair<PriceSeries, PriceSeries> split(const PriceSeries& series, const SplitSpec& spec) {
    spec.validate(series.size());
    return {series.slice(0, spec.train_end), series.slice(spec.train_end, spec.test_end)};
}

/// Dense row-major matrix of doubles, used for windows and targets.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

enum class WindowMode { ToVector, ToSequence };

/**
 * Sliding windows of length W with stride 1.
 *
 * ToVector: target of the window starting at t is value[t+W].
 * ToSequence: target row is the window shifted forward by one step.
 */
struct WindowedDataset {
    Matrix windows;
    Matrix targets;
    std::size_t window_size = 0;
    WindowMode mode = WindowMode::ToVector;

    std::size_t size() const noexcept { return windows.rows; }
};

inline WindowedDataset make_windows(const std::vector<double>& values, std::size_t window_size, WindowMode mode) {
    if (window_size == 0) throw SizeError("window size must be positive");
    if (values.size() <= window_size)
        throw SizeError("series of length " + std::to_string(values.size()) + " too short for window " +
                        std::to_string(window_size));
    const std::size_t n = values.size() - window_size;
    WindowedDataset ds;
    ds.window_size = window_size;
    ds.mode = mode;
    ds.windows = Matrix(n, window_size);
    ds.targets = Matrix(n, mode == WindowMode::ToVector ? 1 : window_size);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < window_size; ++j) {
            ds.windows(i, j) = values[i + j];
            if (mode == WindowMode::ToSequence) ds.targets(i, j) = values[i + j + 1];
        }
        if (mode == WindowMode::ToVector) ds.targets(i, 0) = values[i + window_size];
    }
    return ds;
}

inline WindowedDataset make_windows(const PriceSeries& series, std::size_t window_size, WindowMode mode) {
    return make_windows(series.values(), window_size, mode);
}

}  // namespace tsf
