#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tsf/error.hpp"

namespace tsf::ad {

struct LrRangeResult {
    std::vector<double> learning_rates;
    std::vector<double> losses;
    std::vector<double> smoothed_losses;
    double best_lr = 0.0;
    double suggested_lr = 0.0;
};

/// Geometric schedule from lr_min (step 0) to lr_max (last step).
inline std::vector<double> lr_schedule(double lr_min, double lr_max, std::size_t steps) {
    if (!(lr_min > 0.0 && lr_max > lr_min)) throw RangeError("lr range needs 0 < lr_min < lr_max");
    if (steps < 2) throw RangeError("lr range finder needs at least 2 steps");
    std::vector<double> lrs(steps);
    const double ratio = lr_max / lr_min;
    for (std::size_t i = 0; i < steps; ++i)
        lrs[i] = lr_min * std::pow(ratio, static_cast<double>(i) / static_cast<double>(steps - 1));
    lrs.back() = lr_max;
    return lrs;
}

/**
 * Learning-rate range test.
 *
 * `train_step(lr, i)` performs one mini-batch update at learning rate `lr`
 * and returns that batch's loss. The loss is smoothed with a bias-corrected
 * exponential average; the sweep stops early once the smoothed loss exceeds
 * 4x its minimum or turns non-finite. The suggestion is the learning rate at
 * the smoothed minimum divided by 10.
 */
inline LrRangeResult lr_range_finder(const std::function<double(double, std::size_t)>& train_step, double lr_min,
                                     double lr_max, std::size_t steps, double smoothing = 0.9) {
    LrRangeResult r;
    const auto schedule = lr_schedule(lr_min, lr_max, steps);
    double avg = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < steps; ++i) {
        const double loss = train_step(schedule[i], i);
        if (!std::isfinite(loss)) {
            if (i == 0) throw RangeError("loss diverged at the first step; try a smaller lr_min");
            break;
        }
        avg = smoothing * avg + (1.0 - smoothing) * loss;
        const double smoothed = avg / (1.0 - std::pow(smoothing, static_cast<double>(i + 1)));
        r.learning_rates.push_back(schedule[i]);
        r.losses.push_back(loss);
        r.smoothed_losses.push_back(smoothed);
        if (smoothed < best) {
            best = smoothed;
            r.best_lr = schedule[i];
        }
        if (i > 0 && smoothed > 4.0 * best) break;
    }
    r.suggested_lr = r.best_lr / 10.0;
    return r;
}

}  // namespace tsf::ad
