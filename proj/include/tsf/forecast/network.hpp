#pragma once

#include <random>
#include <string>
#include <vector>

#include "tsf/ad/kernels.hpp"
#include "tsf/ad/ops.hpp"
#include "tsf/ad/params.hpp"
#include "tsf/ad/tape.hpp"
#include "tsf/forecast/config.hpp"

namespace tsf::forecast {

enum class OutputMode {
    Final,     // [B, 1]: head applied to the last time step only
    Sequence,  // [B, W]: head applied at every time step
};

/// Step t of a [B, T*C] flattened activation, as a [B, C] matrix.
inline ad::Var time_step(ad::Var flat, std::size_t t, std::size_t channels) {
    return ad::slice_cols(flat, t * channels, (t + 1) * channels);
}

/**
 * Parameters and wiring for one of the five forecasting architectures.
 *
 * Input is a [B, W] batch of windows; every architecture produces a per-step
 * output sequence, and OutputMode::Final evaluates the head on the last step
 * only. For recurrent stacks the Final output is computed with exactly the
 * same operations as the last column of the Sequence output.
 */
class Network {
public:
    explicit Network(const ForecasterConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        std::mt19937_64 rng(cfg_.seed);
        const std::size_t H = cfg_.hidden_units;
        switch (cfg_.architecture) {
            case Architecture::Seq2VecRNN:
            case Architecture::Seq2SeqRNN:
                for (std::size_t l = 0; l < cfg_.layers; ++l)
                    rnn_.push_back(ad::RnnCellParams::create(store_, "rnn" + std::to_string(l), l == 0 ? 1 : H, H, 0, rng));
                head_ = ad::DenseParams::create(store_, "head", H, 1, rng);
                break;
            case Architecture::LSTMWindow:
                for (std::size_t l = 0; l < cfg_.layers; ++l)
                    lstm_.push_back(ad::LstmCellParams::create(store_, "lstm" + std::to_string(l), l == 0 ? 1 : H, H, rng));
                head_ = ad::DenseParams::create(store_, "head", H, 1, rng);
                break;
            case Architecture::PreprocessCNN:
                conv_.push_back(ad::ConvParams::create(store_, "conv0", cfg_.conv_kernel, 1, cfg_.conv_filters, 1, rng));
                for (std::size_t l = 0; l < cfg_.layers; ++l)
                    rnn_.push_back(ad::RnnCellParams::create(store_, "rnn" + std::to_string(l),
                                                             l == 0 ? cfg_.conv_filters : H, H, 0, rng));
                head_ = ad::DenseParams::create(store_, "head", H, 1, rng);
                break;
            case Architecture::FullCNN: {
                std::size_t in = 1;
                for (std::size_t l = 0; l < cfg_.dilations.size(); ++l) {
                    conv_.push_back(ad::ConvParams::create(store_, "conv" + std::to_string(l), cfg_.conv_kernel, in,
                                                           cfg_.conv_filters, cfg_.dilations[l], rng));
                    in = cfg_.conv_filters;
                }
                conv_head_ = ad::ConvParams::create(store_, "head", 1, in, 1, 1, rng);
                break;
            }
        }
    }

    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    const ForecasterConfig& config() const noexcept { return cfg_; }
    ad::ParameterStore& params() noexcept { return store_; }
    const ad::ParameterStore& params() const noexcept { return store_; }

    /// Number of past steps (including the current one) that can influence an output; 0 means unbounded.
    std::size_t receptive_field() const {
        if (cfg_.architecture != Architecture::FullCNN) return 0;
        std::size_t rf = 1;
        for (auto d : cfg_.dilations) rf += (cfg_.conv_kernel - 1) * d;
        return rf;
    }

    /// windows: [B, W]. Returns [B, 1] (Final) or [B, W] (Sequence).
    ad::Var forward(ad::Tape& tape, const ad::Tensor& windows, OutputMode mode) const {
        if (windows.rank() != 2)
            throw ShapeError("network input must be [batch, window], got " + ad::shape_string(windows.shape()));
        const std::size_t B = windows.rows(), T = windows.cols();
        ad::Var x = tape.constant(windows);
        switch (cfg_.architecture) {
            case Architecture::Seq2VecRNN:
            case Architecture::Seq2SeqRNN:
                return recurrent(tape, T, mode, [&](std::size_t t) { return ad::slice_cols(x, t, t + 1); }, B);
            case Architecture::LSTMWindow:
                return lstm(tape, x, B, T, mode);
            case Architecture::PreprocessCNN: {
                const std::size_t C = cfg_.conv_filters;
                ad::Var feats = ad::conv_layer(tape, conv_[0], ad::reshape(x, {B, T, 1}));
                ad::Var flat = ad::reshape(feats, {B, T * C});
                return recurrent(tape, T, mode, [&](std::size_t t) { return time_step(flat, t, C); }, B);
            }
            case Architecture::FullCNN: {
                ad::Var h = ad::reshape(x, {B, T, 1});
                for (const auto& layer : conv_) h = ad::relu(ad::conv_layer(tape, layer, h));
                ad::Var out = ad::reshape(ad::conv_layer(tape, conv_head_, h), {B, T});
                return mode == OutputMode::Sequence ? out : ad::slice_cols(out, T - 1, T);
            }
        }
        throw ConfigError("unknown architecture");
    }

private:
    template <class InputAt>
    ad::Var recurrent(ad::Tape& tape, std::size_t T, OutputMode mode, InputAt input_at, std::size_t B) const {
        const std::size_t H = cfg_.hidden_units;
        std::vector<ad::Var> h(rnn_.size(), tape.constant(ad::Tensor({B, H})));
        std::vector<ad::Var> outputs;
        for (std::size_t t = 0; t < T; ++t) {
            ad::Var in = input_at(t);
            for (std::size_t l = 0; l < rnn_.size(); ++l) {
                h[l] = ad::rnn_hidden_step(tape, rnn_[l], in, h[l]);
                in = h[l];
            }
            if (mode == OutputMode::Sequence || t + 1 == T) outputs.push_back(ad::dense(tape, head_, in));
        }
        return outputs.size() == 1 ? outputs.front() : ad::concat_cols(outputs);
    }

    ad::Var lstm(ad::Tape& tape, ad::Var x, std::size_t B, std::size_t T, OutputMode mode) const {
        const std::size_t H = cfg_.hidden_units;
        ad::Var zero = tape.constant(ad::Tensor({B, H}));
        std::vector<ad::LstmState> state(lstm_.size(), ad::LstmState{zero, zero});
        std::vector<ad::Var> outputs;
        for (std::size_t t = 0; t < T; ++t) {
            ad::Var in = ad::slice_cols(x, t, t + 1);
            for (std::size_t l = 0; l < lstm_.size(); ++l) {
                state[l] = ad::lstm_cell_step(tape, lstm_[l], in, state[l].h, state[l].c);
                in = state[l].h;
            }
            if (mode == OutputMode::Sequence || t + 1 == T) outputs.push_back(ad::dense(tape, head_, in));
        }
        return outputs.size() == 1 ? outputs.front() : ad::concat_cols(outputs);
    }

    ForecasterConfig cfg_;
    ad::ParameterStore store_;
    std::vector<ad::RnnCellParams> rnn_;
    std::vector<ad::LstmCellParams> lstm_;
    std::vector<ad::ConvParams> conv_;
    ad::ConvParams conv_head_;
    ad::DenseParams head_;
};

}  // namespace tsf::forecast
