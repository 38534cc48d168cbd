#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tsf/ad/tape.hpp"
#include "tsf/ad/tensor.hpp"
#include "tsf/error.hpp"

namespace tsf::ad {

namespace detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

inline ConstMapMat as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
    return ConstMapMat(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
inline MapMat as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
    return MapMat(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

[[noreturn]] inline void shape_mismatch(const char* op, const Shape& a, const Shape& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) + " and " + shape_string(b));
}

inline void require_same_tape(Var a, Var b) {
    if (a.tape != b.tape || a.tape == nullptr) throw ContractError("operands live on different tapes");
}

inline void require_rank2(const char* op, const Tensor& t) {
    if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

template <class F, class DF>
Var unary(Var a, OpKind kind, F f, DF df_from_output) {
    const Tensor& x = a.value();
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) y[i] = f(x[i]);
    return a.tape->record(kind, {a.id}, std::move(y), [df_from_output](Tape& t, std::size_t self) {
        const auto in = t.inputs(self)[0];
        if (!t.requires_grad(in)) return;
        const Tensor& x = t.value(in);
        const Tensor& y = t.value(self);
        const Tensor& g = t.grad(self);
        Tensor& gx = t.grad(in);
        for (std::size_t i = 0; i < g.numel(); ++i) gx[i] += g[i] * df_from_output(x[i], y[i]);
    });
}

}  // namespace detail

/// Matrix product [m,k] x [k,n] -> [m,n].
inline Var matmul(Var a, Var b) {
    detail::require_same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    detail::require_rank2("matmul", A);
    detail::require_rank2("matmul", B);
    if (A.cols() != B.rows()) detail::shape_mismatch("matmul", A.shape(), B.shape());
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    Tensor C({m, n});
    detail::as_matrix(C, m, n).noalias() = detail::as_matrix(A, m, k) * detail::as_matrix(B, k, n);
    return a.tape->record(OpKind::MatMul, {a.id, b.id}, std::move(C), [m, k, n](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0], ib = t.inputs(self)[1];
        const Tensor& g = t.grad(self);
        if (t.requires_grad(ia))
            detail::as_matrix(t.grad(ia), m, k).noalias() +=
                detail::as_matrix(g, m, n) * detail::as_matrix(t.value(ib), k, n).transpose();
        if (t.requires_grad(ib))
            detail::as_matrix(t.grad(ib), k, n).noalias() +=
                detail::as_matrix(t.value(ia), m, k).transpose() * detail::as_matrix(g, m, n);
    });
}

/**
 * Elementwise sum. `b` may equal `a` in shape, or be a row vector whose size
 * matches a's last dimension, in which case it is broadcast over the leading
 * dimensions (bias add).
 */
inline Var add(Var a, Var b) {
    detail::require_same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    const bool same = A.shape() == B.shape();
    const std::size_t last = A.rank() ? A.shape().back() : 1;
    const bool row_broadcast = !same && A.rank() >= 2 && B.numel() == last &&
                               (B.rank() == 1 || (B.rank() == 2 && B.dim(0) == 1));
    if (!same && !row_broadcast) detail::shape_mismatch("add", A.shape(), B.shape());
    Tensor C = A;
    if (same) {
        for (std::size_t i = 0; i < C.numel(); ++i) C[i] += B[i];
    } else {
        for (std::size_t i = 0; i < C.numel(); ++i) C[i] += B[i % last];
    }
    return a.tape->record(OpKind::Add, {a.id, b.id}, std::move(C), [same, last](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0], ib = t.inputs(self)[1];
        const Tensor& g = t.grad(self);
        if (t.requires_grad(ia)) {
            Tensor& ga = t.grad(ia);
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
        }
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);
            if (same) {
                for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i];
            } else {
                for (std::size_t i = 0; i < g.numel(); ++i) gb[i % last] += g[i];
            }
        }
    });
}

inline Var sub(Var a, Var b) {
    detail::require_same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (A.shape() != B.shape()) detail::shape_mismatch("sub", A.shape(), B.shape());
    Tensor C = A;
    for (std::size_t i = 0; i < C.numel(); ++i) C[i] -= B[i];
    return a.tape->record(OpKind::Sub, {a.id, b.id}, std::move(C), [](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0], ib = t.inputs(self)[1];
        const Tensor& g = t.grad(self);
        if (t.requires_grad(ia)) {
            Tensor& ga = t.grad(ia);
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
        }
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);
            for (std::size_t i = 0; i < g.numel(); ++i) gb[i] -= g[i];
        }
    });
}

/// Elementwise (Hadamard) product of equal shapes.
inline Var mul(Var a, Var b) {
    detail::require_same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (A.shape() != B.shape()) detail::shape_mismatch("mul", A.shape(), B.shape());
    Tensor C = A;
    for (std::size_t i = 0; i < C.numel(); ++i) C[i] *= B[i];
    return a.tape->record(OpKind::Mul, {a.id, b.id}, std::move(C), [](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0], ib = t.inputs(self)[1];
        const Tensor& g = t.grad(self);
        if (t.requires_grad(ia)) {
            Tensor& ga = t.grad(ia);
            const Tensor& B = t.value(ib);
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * B[i];
        }
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);
            const Tensor& A = t.value(ia);
            for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i] * A[i];
        }
    });
}

inline Var scale(Var a, double s) {
    Tensor C = a.value();
    for (std::size_t i = 0; i < C.numel(); ++i) C[i] *= s;
    return a.tape->record(OpKind::Scale, {a.id}, std::move(C), [s](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0];
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += s * g[i];
    });
}

inline double sigmoid_value(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Var sigmoid(Var a) {
    return detail::unary(a, OpKind::Sigmoid, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

inline Var tanh(Var a) {
    return detail::unary(a, OpKind::Tanh, [](double x) { return std::tanh(x); },
                         [](double, double y) { return 1.0 - y * y; });
}

inline Var relu(Var a) {
    return detail::unary(a, OpKind::Relu, [](double x) { return x > 0.0 ? x : 0.0; },
                         [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

/// Columns [begin, end) of a matrix.
inline Var slice_cols(Var a, std::size_t begin, std::size_t end) {
    const Tensor& A = a.value();
    detail::require_rank2("slice_cols", A);
    if (begin >= end || end > A.cols())
        throw ShapeError("slice_cols [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_string(A.shape()));
    const std::size_t rows = A.rows(), cols = A.cols(), w = end - begin;
    Tensor C({rows, w});
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < w; ++c) C[r * w + c] = A[r * cols + begin + c];
    return a.tape->record(OpKind::SliceCols, {a.id}, std::move(C), [rows, cols, begin, w](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(t.inputs(self)[0]);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < w; ++c) ga[r * cols + begin + c] += g[r * w + c];
    });
}

/// Horizontal concatenation of matrices with equal row counts.
inline Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of zero tensors");
    const std::size_t rows = parts[0].value().rows();
    std::vector<std::size_t> widths, ids;
    std::size_t total = 0;
    for (const auto& p : parts) {
        detail::require_same_tape(parts[0], p);
        detail::require_rank2("concat_cols", p.value());
        if (p.value().rows() != rows) detail::shape_mismatch("concat_cols", parts[0].shape(), p.shape());
        widths.push_back(p.value().cols());
        ids.push_back(p.id);
        total += widths.back();
    }
    Tensor C({rows, total});
    for (std::size_t r = 0, offset = 0; r < rows; ++r, offset = 0)
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const Tensor& P = parts[k].value();
            for (std::size_t c = 0; c < widths[k]; ++c) C[r * total + offset + c] = P[r * widths[k] + c];
            offset += widths[k];
        }
    return parts[0].tape->record(OpKind::ConcatCols, ids, std::move(C), [rows, total, widths](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        const auto ins = t.inputs(self);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < ins.size(); ++k) {
            if (t.requires_grad(ins[k])) {
                Tensor& gk = t.grad(ins[k]);
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < widths[k]; ++c) gk[r * widths[k] + c] += g[r * total + offset + c];
            }
            offset += widths[k];
        }
    });
}

inline Var reshape(Var a, Shape shape) {
    Tensor C = a.value().reshaped(std::move(shape));
    return a.tape->record(OpKind::Reshape, {a.id}, std::move(C), [](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(t.inputs(self)[0]);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
    });
}

inline Var sum(Var a) {
    double s = 0.0;
    for (double v : a.value().values()) s += v;
    return a.tape->record(OpKind::Sum, {a.id}, Tensor::scalar(s), [](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0];
        Tensor& ga = t.grad(t.inputs(self)[0]);
        for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += g;
    });
}

inline Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().numel())); }

/**
 * Causal dilated 1D convolution, stride 1.
 *
 * input [B,T,Cin] (or [T,Cin]), kernel [k,Cin,Cout] -> [B,T,Cout] (or [T,Cout]):
 * out[t] = sum_j kernel[j] . in[t - (k-1-j)*r], with in[<0] = 0.
 */
inline Var causal_dilated_conv1d(Var input, Var kernel, std::size_t dilation) {
    detail::require_same_tape(input, kernel);
    const Tensor& X = input.value();
    const Tensor& K = kernel.value();
    if (dilation < 1) throw ShapeError("conv1d dilation must be >= 1");
    if (X.rank() != 2 && X.rank() != 3) throw ShapeError("conv1d input must be [T,C] or [B,T,C], got " + shape_string(X.shape()));
    if (K.rank() != 3 || K.dim(0) < 1 || K.dim(1) != X.shape().back())
        detail::shape_mismatch("conv1d", X.shape(), K.shape());
    const bool batched = X.rank() == 3;
    const std::size_t B = batched ? X.dim(0) : 1;
    const std::size_t T = X.dim(batched ? 1 : 0);
    const std::size_t cin = K.dim(1), cout = K.dim(2), k = K.dim(0);

    Shape out_shape = batched ? Shape{B, T, cout} : Shape{T, cout};
    Tensor Y(out_shape);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t shift = (k - 1 - j) * dilation;
        if (shift >= T) continue;
        const auto Kj = detail::ConstMapMat(K.data() + j * cin * cout, static_cast<Eigen::Index>(cin),
                                            static_cast<Eigen::Index>(cout));
        const auto len = static_cast<Eigen::Index>(T - shift);
        for (std::size_t b = 0; b < B; ++b) {
            auto xin = detail::ConstMapMat(X.data() + b * T * cin, len, static_cast<Eigen::Index>(cin));
            auto yout = detail::MapMat(Y.data() + (b * T + shift) * cout, len, static_cast<Eigen::Index>(cout));
            yout.noalias() += xin * Kj;
        }
    }
    return input.tape->record(
        OpKind::Conv1d, {input.id, kernel.id}, std::move(Y), [B, T, cin, cout, k, dilation](Tape& t, std::size_t self) {
            const auto ix = t.inputs(self)[0], ik = t.inputs(self)[1];
            const Tensor& G = t.grad(self);
            const bool need_x = t.requires_grad(ix), need_k = t.requires_grad(ik);
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t shift = (k - 1 - j) * dilation;
                if (shift >= T) continue;
                const auto len = static_cast<Eigen::Index>(T - shift);
                for (std::size_t b = 0; b < B; ++b) {
                    auto g = detail::ConstMapMat(G.data() + (b * T + shift) * cout, len, static_cast<Eigen::Index>(cout));
                    if (need_x) {
                        const Tensor& K = t.value(ik);
                        auto Kj = detail::ConstMapMat(K.data() + j * cin * cout, static_cast<Eigen::Index>(cin),
                                                      static_cast<Eigen::Index>(cout));
                        auto gx = detail::MapMat(t.grad(ix).data() + b * T * cin, len, static_cast<Eigen::Index>(cin));
                        gx.noalias() += g * Kj.transpose();
                    }
                    if (need_k) {
                        const Tensor& X = t.value(ix);
                        auto xin = detail::ConstMapMat(X.data() + b * T * cin, len, static_cast<Eigen::Index>(cin));
                        auto gk = detail::MapMat(t.grad(ik).data() + j * cin * cout, static_cast<Eigen::Index>(cin),
                                                 static_cast<Eigen::Index>(cout));
                        gk.noalias() += xin.transpose() * g;
                    }
                }
            }
        });
}

}  // namespace tsf::ad
