#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tsf/ad/params.hpp"
#include "tsf/error.hpp"

namespace tsf::ad {

enum class OptimizerKind { SGD, Adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double momentum = 0.0;  // SGD
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/**
 * SGD with optional momentum (v = mu v + g; p -= lr v) or Adam with
 * bias-corrected moments. Moment tensors are created lazily to match the
 * parameter store they are first stepped with.
 */
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig cfg = {}) : cfg_(cfg) {}

    const OptimizerConfig& config() const noexcept { return cfg_; }
    std::size_t steps() const noexcept { return t_; }

    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

    /// Applies one update from Parameter::grad. Throws TrainingError on a non-finite gradient.
    void step(ParameterStore& params, std::size_t epoch = 0) {
        for (std::size_t i = 0; i < params.size(); ++i)
            for (double g : params[i].grad.values())
                if (!std::isfinite(g))
                    throw TrainingError(epoch, t_, "non-finite gradient in parameter '" + params[i].name + "'");
        if (m_.empty()) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                m_.emplace_back(params[i].value.shape());
                v_.emplace_back(params[i].value.shape());
            }
        }
        if (m_.size() != params.size()) throw ShapeError("optimizer state does not match parameter store");
        ++t_;
        const double lr = cfg_.learning_rate;
        if (cfg_.kind == OptimizerKind::SGD) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                auto& p = params[i].value.storage();
                const auto& g = params[i].grad.storage();
                auto& vel = m_[i].storage();
                for (std::size_t k = 0; k < p.size(); ++k) {
                    vel[k] = cfg_.momentum * vel[k] + g[k];
                    p[k] -= lr * vel[k];
                }
            }
            return;
        }
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i].value.storage();
            const auto& g = params[i].grad.storage();
            auto& m = m_[i].storage();
            auto& v = v_[i].storage();
            for (std::size_t k = 0; k < p.size(); ++k) {
                m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
                v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
                const double mhat = m[k] / bc1;
                const double vhat = v[k] / bc2;
                p[k] -= lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
            }
        }
    }

private:
    OptimizerConfig cfg_;
    std::size_t t_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

}  // namespace tsf::ad
