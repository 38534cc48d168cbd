#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tsf/ad/tensor.hpp"
#include "tsf/error.hpp"

namespace tsf::ad {

/// Owns parameters with stable addresses, in registration order.
class ParameterStore {
public:
    Parameter& add(std::string name, Tensor value) {
        for (const auto& p : params_)
            if (p->name == name) throw ConfigError("duplicate parameter name '" + name + "'");
        params_.push_back(std::make_unique<Parameter>(std::move(name), std::move(value)));
        return *params_.back();
    }

    std::size_t size() const noexcept { return params_.size(); }
    Parameter& operator[](std::size_t i) { return *params_[i]; }
    const Parameter& operator[](std::size_t i) const { return *params_[i]; }

    Parameter* find(const std::string& name) {
        for (auto& p : params_)
            if (p->name == name) return p.get();
        return nullptr;
    }

    void zero_grad() {
        for (auto& p : params_) p->zero_grad();
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& p : params_) n += p->value.numel();
        return n;
    }

    double grad_norm() const {
        double s = 0.0;
        for (const auto& p : params_)
            for (double g : p->grad.values()) s += g * g;
        return std::sqrt(s);
    }

    /// Rescales all gradients so their global L2 norm is at most max_norm; returns the norm before clipping.
    double clip_grad_norm(double max_norm) {
        const double norm = grad_norm();
        if (max_norm > 0.0 && norm > max_norm) {
            const double s = max_norm / norm;
            for (auto& p : params_)
                for (double& g : p->grad.storage()) g *= s;
        }
        return norm;
    }

    /// Copies values (not gradients) from another store with identical layout.
    void copy_values_from(const ParameterStore& other) {
        if (other.size() != size()) throw ShapeError("parameter stores differ in size");
        for (std::size_t i = 0; i < size(); ++i) {
            if (params_[i]->value.shape() != other[i].value.shape())
                throw ShapeError("parameter '" + params_[i]->name + "' shape mismatch");
            params_[i]->value = other[i].value;
        }
    }

    std::vector<Tensor> snapshot() const {
        std::vector<Tensor> out;
        for (const auto& p : params_) out.push_back(p->value);
        return out;
    }

    void restore(const std::vector<Tensor>& values) {
        if (values.size() != size()) throw ShapeError("snapshot size mismatch");
        for (std::size_t i = 0; i < size(); ++i) params_[i]->value = values[i];
    }

private:
    std::vector<std::unique_ptr<Parameter>> params_;
};

/// Glorot-uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
inline Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    Tensor t(std::move(shape));
    for (double& v : t.storage()) v = dist(rng);
    return t;
}

/// Scaled uniform for recurrent matrices: U(-1/sqrt(h), 1/sqrt(h)).
inline Tensor recurrent_uniform(Shape shape, std::size_t hidden, std::mt19937_64& rng) {
    const double a = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> dist(-a, a);
    Tensor t(std::move(shape));
    for (double& v : t.storage()) v = dist(rng);
    return t;
}

}  // namespace tsf::ad
