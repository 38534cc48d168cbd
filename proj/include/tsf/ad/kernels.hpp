#pragma once

#include <random>
#include <string>

#include "tsf/ad/ops.hpp"
#include "tsf/ad/params.hpp"

namespace tsf::ad {

/// y = x W + b.
struct DenseParams {
    Parameter* W = nullptr;  // [in, out]
    Parameter* b = nullptr;  // [1, out]

    static DenseParams create(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                              std::mt19937_64& rng) {
        DenseParams p;
        p.W = &store.add(prefix + ".W", glorot_uniform({in, out}, in, out, rng));
        p.b = &store.add(prefix + ".b", Tensor({1, out}));
        return p;
    }
};

inline Var dense(Var x, Var W, Var b) { return add(matmul(x, W), b); }

inline Var dense(Tape& tape, const DenseParams& p, Var x) { return dense(x, tape.parameter(*p.W), tape.parameter(*p.b)); }

/**
 * Simple recurrent cell with input (W), recurrent (U) and output (V) weights
 * shared across time steps: h_t = tanh(x_t W + h_{t-1} U + b), y_t = h_t V + c.
 */
struct RnnCellParams {
    Parameter* W = nullptr;  // [in, hidden]
    Parameter* U = nullptr;  // [hidden, hidden]
    Parameter* b = nullptr;  // [1, hidden]
    Parameter* V = nullptr;  // [hidden, out], optional
    Parameter* c = nullptr;  // [1, out], optional

    static RnnCellParams create(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t hidden,
                                std::size_t out, std::mt19937_64& rng) {
        RnnCellParams p;
        p.W = &store.add(prefix + ".W", glorot_uniform({in, hidden}, in, hidden, rng));
        p.U = &store.add(prefix + ".U", recurrent_uniform({hidden, hidden}, hidden, rng));
        p.b = &store.add(prefix + ".b", Tensor({1, hidden}));
        if (out > 0) {
            p.V = &store.add(prefix + ".V", glorot_uniform({hidden, out}, hidden, out, rng));
            p.c = &store.add(prefix + ".c", Tensor({1, out}));
        }
        return p;
    }

    std::size_t hidden() const { return U->value.dim(0); }
};

inline Var rnn_hidden_step(Var x, Var h_prev, Var W, Var U, Var b) {
    return tanh(add(add(matmul(x, W), matmul(h_prev, U)), b));
}

inline Var rnn_hidden_step(Tape& tape, const RnnCellParams& p, Var x, Var h_prev) {
    return rnn_hidden_step(x, h_prev, tape.parameter(*p.W), tape.parameter(*p.U), tape.parameter(*p.b));
}

struct RnnStep {
    Var h;
    Var y;
};

inline RnnStep rnn_cell_step(Tape& tape, const RnnCellParams& p, Var x, Var h_prev) {
    if (p.V == nullptr) throw ContractError("rnn_cell_step needs output weights V and c");
    Var h = rnn_hidden_step(tape, p, x, h_prev);
    return {h, add(matmul(h, tape.parameter(*p.V)), tape.parameter(*p.c))};
}

/**
 * LSTM cell. The four gate blocks are stored side by side in the order
 * [forget | input | output | candidate], each `hidden` columns wide.
 */
struct LstmCellParams {
    Parameter* Wx = nullptr;  // [in, 4*hidden]
    Parameter* Wh = nullptr;  // [hidden, 4*hidden]
    Parameter* b = nullptr;   // [1, 4*hidden]

    static LstmCellParams create(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t hidden,
                                 std::mt19937_64& rng) {
        LstmCellParams p;
        p.Wx = &store.add(prefix + ".Wx", glorot_uniform({in, 4 * hidden}, in, hidden, rng));
        p.Wh = &store.add(prefix + ".Wh", recurrent_uniform({hidden, 4 * hidden}, hidden, rng));
        p.b = &store.add(prefix + ".b", Tensor({1, 4 * hidden}));
        return p;
    }

    std::size_t hidden() const { return Wh->value.dim(0); }
};

struct LstmState {
    Var h;
    Var c;
};

inline LstmState lstm_cell_step(Var x, Var h_prev, Var c_prev, Var Wx, Var Wh, Var b) {
    const std::size_t H = h_prev.value().cols();
    if (Wx.value().cols() != 4 * H || Wh.value().rows() != H)
        detail::shape_mismatch("lstm_cell_step", Wh.shape(), h_prev.shape());
    Var z = add(add(matmul(x, Wx), matmul(h_prev, Wh)), b);
    Var f = sigmoid(slice_cols(z, 0, H));
    Var i = sigmoid(slice_cols(z, H, 2 * H));
    Var o = sigmoid(slice_cols(z, 2 * H, 3 * H));
    Var g = tanh(slice_cols(z, 3 * H, 4 * H));
    Var c = add(mul(f, c_prev), mul(i, g));
    Var h = mul(o, tanh(c));
    return {h, c};
}

inline LstmState lstm_cell_step(Tape& tape, const LstmCellParams& p, Var x, Var h_prev, Var c_prev) {
    return lstm_cell_step(x, h_prev, c_prev, tape.parameter(*p.Wx), tape.parameter(*p.Wh), tape.parameter(*p.b));
}

/// Causal conv layer: kernel [k, in, out] plus per-channel bias [1, out].
struct ConvParams {
    Parameter* K = nullptr;
    Parameter* b = nullptr;
    std::size_t dilation = 1;

    static ConvParams create(ParameterStore& store, const std::string& prefix, std::size_t kernel, std::size_t in,
                             std::size_t out, std::size_t dilation, std::mt19937_64& rng) {
        ConvParams p;
        p.K = &store.add(prefix + ".K", glorot_uniform({kernel, in, out}, kernel * in, kernel * out, rng));
        p.b = &store.add(prefix + ".b", Tensor({1, out}));
        p.dilation = dilation;
        return p;
    }

    std::size_t kernel_size() const { return K->value.dim(0); }
};

inline Var conv_layer(Tape& tape, const ConvParams& p, Var x) {
    return add(causal_dilated_conv1d(x, tape.parameter(*p.K), p.dilation), tape.parameter(*p.b));
}

}  // namespace tsf::ad
