#pragma once

#include <cmath>
#include <string>

#include "tsf/ad/ops.hpp"

namespace tsf::ad {

enum class LossKind { MSE, MAE, Huber };

struct LossSpec {
    LossKind kind = LossKind::MSE;
    double delta = 1.0;  // Huber only
};

namespace detail {

template <class F, class DF>
Var mean_pointwise_loss(Var pred, const Tensor& target, OpKind kind, F f, DF df) {
    const Tensor& P = pred.value();
    if (P.shape() != target.shape()) shape_mismatch("loss", P.shape(), target.shape());
    const double n = static_cast<double>(P.numel());
    double total = 0.0;
    for (std::size_t i = 0; i < P.numel(); ++i) total += f(P[i] - target[i]);
    return pred.tape->record(kind, {pred.id}, Tensor::scalar(total / n), [target, n, df](Tape& t, std::size_t self) {
        const auto ip = t.inputs(self)[0];
        const double g = t.grad(self)[0] / n;
        const Tensor& P = t.value(ip);
        Tensor& gp = t.grad(ip);
        for (std::size_t i = 0; i < P.numel(); ++i) gp[i] += g * df(P[i] - target[i]);
    });
}

}  // namespace detail

/// Mean over every element, so a [B,T] sequence loss is the mean of T per-step losses.
inline Var mse_loss(Var pred, const Tensor& target) {
    return detail::mean_pointwise_loss(pred, target, OpKind::MseLoss, [](double r) { return r * r; },
                                       [](double r) { return 2.0 * r; });
}

inline Var mae_loss(Var pred, const Tensor& target) {
    return detail::mean_pointwise_loss(pred, target, OpKind::MaeLoss, [](double r) { return std::abs(r); },
                                       [](double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); });
}

inline Var huber_loss(Var pred, const Tensor& target, double delta) {
    if (!(delta > 0.0)) throw ConfigError("huber delta must be positive");
    return detail::mean_pointwise_loss(
        pred, target, OpKind::HuberLoss,
        [delta](double r) { return std::abs(r) <= delta ? 0.5 * r * r : delta * (std::abs(r) - 0.5 * delta); },
        [delta](double r) { return std::abs(r) <= delta ? r : (r > 0.0 ? delta : -delta); });
}

inline Var loss(Var pred, const Tensor& target, const LossSpec& spec) {
    switch (spec.kind) {
        case LossKind::MSE: return mse_loss(pred, target);
        case LossKind::MAE: return mae_loss(pred, target);
        case LossKind::Huber: return huber_loss(pred, target, spec.delta);
    }
    throw ConfigError("unknown loss kind");
}

}  // namespace tsf::ad
