#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tsf/ad/checkpoint.hpp"
#include "tsf/ad/loss.hpp"
#include "tsf/ad/lr_finder.hpp"
#include "tsf/ad/optim.hpp"
#include "tsf/core/dataset.hpp"
#include "tsf/forecast/config.hpp"
#include "tsf/forecast/network.hpp"

namespace tsf::forecast {

/// Affine input/target scaling; identity unless the config asks to standardize.
struct Scaler {
    double mean = 0.0;
    double scale = 1.0;

    double forward(double v) const { return (v - mean) / scale; }
    double inverse(double v) const { return v * scale + mean; }

    static Scaler fit(const WindowedDataset& ds, bool standardize) {
        if (!standardize) return {};
        double s = 0.0, ss = 0.0;
        const auto& w = ds.windows.data;
        for (double v : w) s += v;
        const double n = static_cast<double>(w.size());
        const double mean = s / n;
        for (double v : w) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / n);
        return {mean, sd > 0.0 ? sd : 1.0};
    }
};

struct TrainedForecaster {
    Network network;
    Scaler scaler;
    std::vector<double> history;  // mean training loss per epoch actually run
    double learning_rate = 0.0;
    std::size_t best_epoch = 0;

    const ForecasterConfig& config() const { return network.config(); }
};

/// Builds an untrained network from a validated config.
inline Network build(const ForecasterConfig& cfg) { return Network(cfg); }

namespace detail {

inline OutputMode training_output(Architecture arch, WindowMode mode) {
    switch (arch) {
        case Architecture::Seq2SeqRNN:
            if (mode != WindowMode::ToSequence) throw ConfigError("seq2seq_rnn trains on ToSequence windows");
            return OutputMode::Sequence;
        case Architecture::Seq2VecRNN:
        case Architecture::LSTMWindow:
            if (mode != WindowMode::ToVector) throw ConfigError(to_string(arch) + " trains on ToVector windows");
            return OutputMode::Final;
        case Architecture::PreprocessCNN:
        case Architecture::FullCNN:
            return mode == WindowMode::ToSequence ? OutputMode::Sequence : OutputMode::Final;
    }
    throw ConfigError("unknown architecture");
}

inline ad::Tensor gather_rows(const Matrix& m, std::span<const std::size_t> rows, const Scaler& sc) {
    ad::Tensor out({rows.size(), m.cols});
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out[r * m.cols + c] = sc.forward(m(rows[r], c));
    return out;
}

/// Runs one mini-batch update and returns its loss.
inline double train_batch(Network& net, ad::Optimizer& opt, const WindowedDataset& ds, const Scaler& sc,
                          std::span<const std::size_t> rows, OutputMode out_mode, std::size_t epoch, std::size_t step) {
    const auto& cfg = net.config();
    ad::Tensor inputs = gather_rows(ds.windows, rows, sc);
    ad::Tensor targets = gather_rows(ds.targets, rows, sc);
    ad::Tape tape;
    ad::Var pred = net.forward(tape, inputs, out_mode);
    ad::Var loss = ad::loss(pred, targets, cfg.loss);
    const double value = loss.value().item();
    if (!std::isfinite(value)) throw TrainingError(epoch, step, "non-finite loss");
    net.params().zero_grad();
    tape.backward(loss);
    if (is_recurrent(cfg.architecture) && cfg.clip_norm > 0.0) net.params().clip_grad_norm(cfg.clip_norm);
    opt.step(net.params(), epoch);
    return value;
}

inline void check_dataset(const ForecasterConfig& cfg, const WindowedDataset& ds) {
    if (ds.window_size != cfg.window_size)
        throw ConfigError("dataset window " + std::to_string(ds.window_size) + " does not match config window " +
                          std::to_string(cfg.window_size));
    if (ds.size() == 0) throw SizeError("empty training dataset");
}

}  // namespace detail

/**
 * Learning-rate range test on a fresh copy of the configured network:
 * one mini-batch per step, learning rate swept geometrically.
 */
inline ad::LrRangeResult find_learning_rate(const ForecasterConfig& cfg, const WindowedDataset& ds,
                                            double lr_min = 1e-5, double lr_max = 1.0, std::size_t steps = 100) {
    detail::check_dataset(cfg, ds);
    const auto out_mode = detail::training_output(cfg.architecture, ds.mode);
    Network net(cfg);
    const Scaler sc = Scaler::fit(ds, cfg.standardize);
    ad::Optimizer opt(ad::OptimizerConfig{cfg.optimizer, lr_min});
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t bs = std::min(cfg.batch_size, ds.size());
    std::size_t cursor = 0;
    return ad::lr_range_finder(
        [&](double lr, std::size_t i) {
            opt.set_learning_rate(lr);
            if (cursor + bs > order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            std::span<const std::size_t> rows(order.data() + cursor, bs);
            cursor += bs;
            try {
                return detail::train_batch(net, opt, ds, sc, rows, out_mode, 0, i);
            } catch (const TrainingError&) {
                return std::numeric_limits<double>::infinity();
            }
        },
        lr_min, lr_max, steps);
}

/**
 * Shuffled mini-batch training. The last partial batch is kept. Training stops
 * early after `patience` epochs without a lower epoch loss, and the
 * parameters of the best epoch are restored. Deterministic for a fixed seed.
 */
inline TrainedForecaster fit(Network net, const WindowedDataset& ds) {
    const ForecasterConfig cfg = net.config();
    detail::check_dataset(cfg, ds);
    const auto out_mode = detail::training_output(cfg.architecture, ds.mode);

    TrainedForecaster tf{std::move(net), Scaler::fit(ds, cfg.standardize), {}, 0.0, 0};
    tf.learning_rate = cfg.learning_rate ? *cfg.learning_rate : find_learning_rate(cfg, ds).suggested_lr;
    if (!(tf.learning_rate > 0.0)) tf.learning_rate = 1e-3;

    ad::Optimizer opt(ad::OptimizerConfig{cfg.optimizer, tf.learning_rate});
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);

    double best = std::numeric_limits<double>::infinity();
    std::vector<ad::Tensor> best_params = tf.network.params().snapshot();
    std::size_t since_best = 0;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - begin);
            std::span<const std::size_t> rows(order.data() + begin, len);
            total += detail::train_batch(tf.network, opt, ds, tf.scaler, rows, out_mode, epoch, step++) *
                     static_cast<double>(len);
        }
        const double epoch_loss = total / static_cast<double>(order.size());
        tf.history.push_back(epoch_loss);
        if (epoch_loss < best) {
            best = epoch_loss;
            best_params = tf.network.params().snapshot();
            tf.best_epoch = epoch;
            since_best = 0;
        } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
            break;
        }
    }
    if (!tf.history.empty()) tf.network.params().restore(best_params);
    return tf;
}

inline TrainedForecaster fit(const ForecasterConfig& cfg, const WindowedDataset& ds) { return fit(Network(cfg), ds); }

/// One-step predictions for a batch of raw windows [B, W], in price units.
inline std::vector<double> predict_windows(const TrainedForecaster& model, const Matrix& windows) {
    const std::size_t W = model.config().window_size;
    if (windows.cols != W) throw ShapeError("prediction windows must have " + std::to_string(W) + " columns");
    std::vector<double> out;
    out.reserve(windows.rows);
    constexpr std::size_t kChunk = 512;
    for (std::size_t begin = 0; begin < windows.rows; begin += kChunk) {
        const std::size_t len = std::min(kChunk, windows.rows - begin);
        ad::Tensor batch({len, W});
        for (std::size_t r = 0; r < len; ++r)
            for (std::size_t c = 0; c < W; ++c) batch[r * W + c] = model.scaler.forward(windows(begin + r, c));
        ad::Tape tape;
        const auto& y = model.network.forward(tape, batch, OutputMode::Final).value();
        for (std::size_t r = 0; r < len; ++r) out.push_back(model.scaler.inverse(y[r]));
    }
    return out;
}

/**
 * Non-autoregressive one-step evaluation: the prediction for index t uses the
 * actual values [t-W, t). Covers t in [begin, end).
 */
inline std::vector<double> predict(const TrainedForecaster& model, std::span<const double> values, std::size_t begin,
                                   std::size_t end) {
    const std::size_t W = model.config().window_size;
    if (begin > end || end > values.size()) throw RangeError("prediction range outside the series");
    if (begin < W)
        throw RangeError("prediction at index " + std::to_string(begin) + " needs " + std::to_string(W) +
                         " values of history");
    Matrix windows(end - begin, W);
    for (std::size_t t = begin; t < end; ++t)
        for (std::size_t j = 0; j < W; ++j) windows(t - begin, j) = values[t - W + j];
    return predict_windows(model, windows);
}

inline std::vector<double> predict(const TrainedForecaster& model, const PriceSeries& series, std::size_t begin,
                                   std::size_t end) {
    return predict(model, std::span<const double>(series.values()), begin, end);
}

/// Training history as CSV `epoch,loss`.
inline std::string history_csv(const TrainedForecaster& model) {
    std::string out = "epoch,loss\n";
    for (std::size_t i = 0; i < model.history.size(); ++i)
        out += std::to_string(i + 1) + ',' + tsf::detail::format_double(model.history[i]) + '\n';
    return out;
}

namespace detail {

inline std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace detail

/// Checkpoint blob: network parameters plus the architecture fields needed to rebuild it.
inline std::string save_forecaster(const TrainedForecaster& model) {
    const auto& c = model.config();
    std::string dil;
    for (std::size_t i = 0; i < c.dilations.size(); ++i) dil += (i ? "," : "") + std::to_string(c.dilations[i]);
    std::map<std::string, std::string> meta{
        {"architecture", to_string(c.architecture)},
        {"window_size", std::to_string(c.window_size)},
        {"hidden_units", std::to_string(c.hidden_units)},
        {"layers", std::to_string(c.layers)},
        {"conv_filters", std::to_string(c.conv_filters)},
        {"conv_kernel", std::to_string(c.conv_kernel)},
        {"dilations", dil},
        {"seed", std::to_string(c.seed)},
        {"scaler_mean", detail::hex(model.scaler.mean)},
        {"scaler_scale", detail::hex(model.scaler.scale)},
    };
    return ad::save_checkpoint(model.network.params(), meta);
}

inline TrainedForecaster load_forecaster(const std::string& text) {
    const auto ck = ad::parse_checkpoint(text);
    auto get = [&](const std::string& key) {
        auto it = ck.meta.find(key);
        if (it == ck.meta.end()) throw InputError("checkpoint missing meta '" + key + "'");
        return it->second;
    };
    auto num = [&](const std::string& key) { return static_cast<std::size_t>(std::stoull(get(key))); };
    ForecasterConfig cfg;
    cfg.architecture = architecture_from_string(get("architecture"));
    cfg.window_size = num("window_size");
    cfg.hidden_units = num("hidden_units");
    cfg.layers = num("layers");
    cfg.conv_filters = num("conv_filters");
    cfg.conv_kernel = num("conv_kernel");
    cfg.seed = num("seed");
    std::stringstream ds(get("dilations"));
    for (std::string item; std::getline(ds, item, ',');)
        if (!item.empty()) cfg.dilations.push_back(std::stoull(item));
    TrainedForecaster tf{Network(cfg), {}, {}, 0.0, 0};
    ad::load_checkpoint(text, tf.network.params());
    tf.scaler.mean = std::strtod(get("scaler_mean").c_str(), nullptr);
    tf.scaler.scale = std::strtod(get("scaler_scale").c_str(), nullptr);
    return tf;
}

}  // namespace tsf::forecast
