#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace tsf::synthetic {

/// x_t = x_{t-1} * exp(N(drift, vol)), x_{-1} = start; the first stored value already includes one step.
inline std::vector<double> geometric_random_walk(std::size_t n, std::uint64_t seed, double start = 100.0,
                                                 double drift = 0.0005, double vol = 0.01) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(drift, vol);
    std::vector<double> v(n);
    double x = start;
    for (auto& e : v) {
        x *= std::exp(step(rng));
        e = x;
    }
    return v;
}

/// x_t = x_{t-1} + N(0, sigma), x_{-1} = start.
inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double sigma = 1.0, double start = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, sigma);
    std::vector<double> v(n);
    double x = start;
    for (auto& e : v) {
        x += step(rng);
        e = x;
    }
    return v;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    std::vector<double> v(n);
    for (auto& e : v) e = nd(rng);
    return v;
}

/// amplitude * sin(2 pi t / period), t = 0..n-1.
inline std::vector<double> sine_wave(std::size_t n, double period, double amplitude = 1.0) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t)
        v[t] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    return v;
}

}  // namespace tsf::synthetic
