#include <gtest/gtest.h>

#include <random>

#include "gradient_cases.hpp"
#include "test_support.hpp"
#include "tsf/ad/checkpoint.hpp"
#include "tsf/ad/kernels.hpp"
#include "tsf/ad/loss.hpp"
#include "tsf/ad/lr_finder.hpp"
#include "tsf/ad/optim.hpp"
#include "tsf/ad/params.hpp"

using namespace tsf;
using namespace tsf::ad;

TEST(Ops, ForwardExamples) {
    Tape t;
    EXPECT_EQ(relu(t.constant(Tensor::matrix({{-1, 0, 2}}))).value().storage(), (std::vector<double>{0, 0, 2}));
    EXPECT_EQ(sigmoid(t.constant(Tensor::scalar(0))).value().item(), 0.5);
    EXPECT_EQ(tanh(t.constant(Tensor::scalar(0))).value().item(), 0.0);
    auto mm = matmul(t.constant(Tensor::matrix({{1, 2}, {3, 4}})), t.constant(Tensor::matrix({{1}, {1}})));
    EXPECT_EQ(mm.value(), Tensor::matrix({{3}, {7}}));
}

TEST(Ops, SigmoidIsStableForLargeInputs) {
    Tape t;
    auto s = sigmoid(t.constant(Tensor::matrix({{-800, 800}})));
    EXPECT_EQ(s.value()[0], 0.0);
    EXPECT_EQ(s.value()[1], 1.0);
}

TEST(Backward, SquareAndProduct) {
    Parameter w("w", Tensor::scalar(3));
    {
        Tape t;
        Var v = t.parameter(w);
        t.backward(mul(v, v));
    }
    EXPECT_EQ(w.grad.item(), 6.0);

    Tape t;
    Var a = t.variable(Tensor::scalar(2)), b = t.variable(Tensor::scalar(5));
    t.backward(a * b);
    EXPECT_EQ(t.gradient(a).item(), 5.0);
    EXPECT_EQ(t.gradient(b).item(), 2.0);
}

TEST(Backward, NonScalarLossIsContractError) {
    Tape t;
    Var a = t.variable(Tensor::matrix({{1, 2}}));
    EXPECT_THROW(t.backward(a), ContractError);
}

TEST(Backward, ShapeMismatchIsShapeError) {
    Tape t;
    EXPECT_THROW(matmul(t.constant(Tensor({2, 3})), t.constant(Tensor({2, 3}))), ShapeError);
    EXPECT_THROW(add(t.constant(Tensor({2, 3})), t.constant(Tensor({3, 2}))), ShapeError);
}

TEST(Backward, GradientsAccumulateAcrossTapesUntilZeroed) {
    Parameter w("w", Tensor::scalar(2));
    for (int i = 0; i < 2; ++i) {
        Tape t;
        t.backward(scale(t.parameter(w), 3.0));
    }
    EXPECT_EQ(w.grad.item(), 6.0);
    w.zero_grad();
    EXPECT_EQ(w.grad.item(), 0.0);
}

class GradientCheck : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GradientCheck, TwentyRandomConfigurations) {
    const auto c = tsf::testkit::gradient_cases()[GetParam()];
    std::mt19937_64 rng(1000 + GetParam());
    for (int trial = 0; trial < 20; ++trial) {
        auto r = c.run(rng);
        EXPECT_LT(r.max_rel_error, 1e-6) << c.name << " trial " << trial << ": " << r.worst;
        EXPECT_GT(r.entries, 0u);
    }
}

INSTANTIATE_TEST_SUITE_P(AllKernels, GradientCheck,
                         ::testing::Range<std::size_t>(0, tsf::testkit::gradient_cases().size()),
                         [](const auto& info) { return tsf::testkit::gradient_cases()[info.param].name; });

TEST(Conv1d, Examples) {
    Tape t;
    auto conv = [&](std::vector<double> x, std::vector<double> k, std::size_t r) {
        Tensor X({x.size(), 1}, x);
        Tensor K({k.size(), 1, 1}, k);
        return causal_dilated_conv1d(t.constant(X), t.constant(K), r).value().storage();
    };
    EXPECT_EQ(conv({1, 2, 3}, {1, 1}, 1), (std::vector<double>{1, 3, 5}));
    for (std::size_t r : {1u, 2u, 5u}) EXPECT_EQ(conv({4, -1, 2, 7, 3}, {0, 1}, r), (std::vector<double>{4, -1, 2, 7, 3}));
    std::vector<double> ramp{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto y = conv(ramp, {1, 1}, 4);
    for (std::size_t i = 0; i < ramp.size(); ++i) EXPECT_EQ(y[i], ramp[i] + (i >= 4 ? ramp[i - 4] : 0.0));
}

TEST(Conv1dProperty, Causality) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t T = 6 + rng() % 10, k = 1 + rng() % 3, r = 1 + rng() % 4;
        auto X = tsf::testkit::random_tensor({2, T, 2}, rng);
        auto K = tsf::testkit::random_tensor({k, 2, 3}, rng);
        Tape t;
        auto base = causal_dilated_conv1d(t.constant(X), t.constant(K), r).value();
        const std::size_t s = rng() % T;
        X[(1 * T + s) * 2 + 1] += 1.0;
        auto moved = causal_dilated_conv1d(t.constant(X), t.constant(K), r).value();
        for (std::size_t tt = 0; tt < s; ++tt)
            for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(moved[(T + tt) * 3 + c], base[(T + tt) * 3 + c]);
        // batch 0 is untouched
        for (std::size_t i = 0; i < T * 3; ++i) EXPECT_EQ(moved[i], base[i]);
    }
}

TEST(RnnCell, ZeroParametersGiveZeroState) {
    ParameterStore store;
    std::mt19937_64 rng(1);
    auto p = RnnCellParams::create(store, "rnn", 2, 3, 1, rng);
    for (std::size_t i = 0; i < store.size(); ++i) store[i].value.fill(0.0);
    Tape t;
    auto step = rnn_cell_step(t, p, t.constant(Tensor({1, 2})), t.constant(Tensor({1, 3})));
    EXPECT_EQ(step.h.value(), Tensor({1, 3}));
    EXPECT_EQ(step.y.value(), Tensor({1, 1}));
}

TEST(RnnCell, IdentityRecurrenceIsTanhOfPrevious) {
    ParameterStore store;
    std::mt19937_64 rng(1);
    auto p = RnnCellParams::create(store, "rnn", 2, 3, 0, rng);
    p.W->value.fill(0.0);
    p.b->value.fill(0.0);
    p.U->value.fill(0.0);
    for (std::size_t i = 0; i < 3; ++i) p.U->value.at(i, i) = 1.0;
    Tape t;
    auto h_prev = Tensor::matrix({{0.3, -2.0, 1.1}});
    auto h = rnn_hidden_step(t, p, t.constant(Tensor::matrix({{5, -5}})), t.constant(h_prev)).value();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(h[i], std::tanh(h_prev[i]));
}

TEST(LstmCell, ZeroWeightsHalveTheCell) {
    ParameterStore store;
    std::mt19937_64 rng(1);
    auto p = LstmCellParams::create(store, "lstm", 1, 2, rng);
    for (std::size_t i = 0; i < store.size(); ++i) store[i].value.fill(0.0);
    Tape t;
    auto c_prev = Tensor::matrix({{0.8, -1.4}});
    auto st = lstm_cell_step(t, p, t.constant(Tensor::matrix({{3}})), t.constant(Tensor({1, 2})), t.constant(c_prev));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_DOUBLE_EQ(st.c.value()[i], 0.5 * c_prev[i]);
        EXPECT_DOUBLE_EQ(st.h.value()[i], 0.5 * std::tanh(0.5 * c_prev[i]));
    }
}

TEST(LstmCell, SaturatedForgetGateRetainsMemory) {
    ParameterStore store;
    std::mt19937_64 rng(1);
    const std::size_t H = 2;
    auto p = LstmCellParams::create(store, "lstm", 1, H, rng);
    p.Wx->value.fill(0.0);
    p.Wh->value.fill(0.0);
    p.b->value.fill(0.0);
    for (std::size_t j = 0; j < H; ++j) {
        p.b->value[j] = 50.0;       // forget gate open
        p.b->value[H + j] = -50.0;  // input gate closed
    }
    Tape t;
    auto c_prev = Tensor::matrix({{0.8, -1.4}});
    auto st = lstm_cell_step(t, p, t.constant(Tensor::matrix({{3}})), t.constant(Tensor({1, H})), t.constant(c_prev));
    for (std::size_t i = 0; i < H; ++i) EXPECT_NEAR(st.c.value()[i], c_prev[i], 1e-12);
}

TEST(WeightSharing, SharedGradientEqualsSumOfPerStepCopies) {
    std::mt19937_64 rng(3);
    const std::size_t B = 2, in = 2, H = 3, T = 3;
    auto W0 = tsf::testkit::random_tensor({in, H}, rng);
    auto U0 = tsf::testkit::random_tensor({H, H}, rng);
    auto b0 = tsf::testkit::random_tensor({1, H}, rng);
    std::vector<Tensor> xs;
    for (std::size_t s = 0; s < T; ++s) xs.push_back(tsf::testkit::random_tensor({B, in}, rng));
    auto weights = tsf::testkit::random_tensor({B, H}, rng);

    auto run = [&](std::vector<Parameter*> Ws, std::vector<Parameter*> Us, Parameter& b) {
        Tape t;
        Var h = t.constant(Tensor({B, H}));
        for (std::size_t s = 0; s < T; ++s)
            h = rnn_hidden_step(t.constant(xs[s]), h, t.parameter(*Ws[s]), t.parameter(*Us[s]), t.parameter(b));
        t.backward(sum(mul(h, t.constant(weights))));
    };

    Parameter W("W", W0), U("U", U0), b("b", b0);
    run({&W, &W, &W}, {&U, &U, &U}, b);

    Parameter W1("W1", W0), W2("W2", W0), W3("W3", W0), U1("U1", U0), U2("U2", U0), U3("U3", U0), b2("b", b0);
    run({&W1, &W2, &W3}, {&U1, &U2, &U3}, b2);

    for (std::size_t i = 0; i < W.grad.numel(); ++i)
        EXPECT_NEAR(W.grad[i], W1.grad[i] + W2.grad[i] + W3.grad[i], 1e-14);
    for (std::size_t i = 0; i < U.grad.numel(); ++i)
        EXPECT_NEAR(U.grad[i], U1.grad[i] + U2.grad[i] + U3.grad[i], 1e-14);
    // The shared parameter is bound once per tape.
    Tape t;
    EXPECT_EQ(t.parameter(W).id, t.parameter(W).id);
}

TEST(TapeReuse, RepeatedForwardIsIdentical) {
    ParameterStore store;
    std::mt19937_64 rng(2);
    auto p = LstmCellParams::create(store, "lstm", 1, 4, rng);
    auto x = tsf::testkit::random_tensor({3, 1}, rng);
    auto run = [&] {
        Tape t;
        LstmState st{t.constant(Tensor({3, 4})), t.constant(Tensor({3, 4}))};
        for (int s = 0; s < 5; ++s) st = lstm_cell_step(t, p, t.constant(x), st.h, st.c);
        return st.h.value();
    };
    EXPECT_EQ(run(), run());
}

TEST(Losses, Examples) {
    Tape t;
    EXPECT_EQ(mse_loss(t.constant(Tensor::matrix({{1, 2}})), Tensor::matrix({{1, 2}})).value().item(), 0.0);
    EXPECT_EQ(mae_loss(t.constant(Tensor::matrix({{0, 2}})), Tensor::matrix({{1, 1}})).value().item(), 1.0);
    // Huber: quadratic inside delta, linear outside
    EXPECT_DOUBLE_EQ(huber_loss(t.constant(Tensor::matrix({{0.5, 3}})), Tensor::matrix({{0, 0}}), 1.0).value().item(),
                     (0.125 + 2.5) / 2.0);
    EXPECT_THROW(mse_loss(t.constant(Tensor::matrix({{1, 2}})), Tensor::matrix({{1}, {2}})), ShapeError);
}

TEST(Losses, SequenceLossIsMeanOfPerStepLosses) {
    std::mt19937_64 rng(4);
    const std::size_t B = 16, T = 30;
    auto pred = tsf::testkit::random_tensor({B, T}, rng);
    auto target = tsf::testkit::random_tensor({B, T}, rng);
    for (auto kind : {LossKind::MSE, LossKind::MAE, LossKind::Huber}) {
        Tape t;
        Var p = t.constant(pred);
        const double whole = loss(p, target, {kind, 0.5}).value().item();
        double per_step = 0.0;
        for (std::size_t s = 0; s < T; ++s) {
            Tensor col({B, 1});
            for (std::size_t b = 0; b < B; ++b) col[b] = target.at(b, s);
            per_step += loss(slice_cols(p, s, s + 1), col, {kind, 0.5}).value().item();
        }
        EXPECT_NEAR(whole, per_step / T, 1e-14 * std::abs(whole));
    }
}

TEST(Optimizer, SgdExample) {
    ParameterStore store;
    auto& p = store.add("p", Tensor::scalar(1.0));
    p.grad[0] = 2.0;
    Optimizer opt({OptimizerKind::SGD, 0.1});
    opt.step(store);
    EXPECT_DOUBLE_EQ(p.value.item(), 0.8);
}

TEST(Optimizer, SgdMomentumAccumulatesVelocity) {
    ParameterStore store;
    auto& p = store.add("p", Tensor::scalar(0.0));
    OptimizerConfig cfg{OptimizerKind::SGD, 0.1, 0.9};
    Optimizer opt(cfg);
    p.grad[0] = 1.0;
    opt.step(store);
    opt.step(store);
    EXPECT_DOUBLE_EQ(p.value.item(), -0.1 - 0.1 * 1.9);
}

TEST(Optimizer, AdamFirstStepIsLearningRate) {
    for (double g : {1e-3, 0.5, 7.0}) {
        ParameterStore store;
        auto& p = store.add("p", Tensor::scalar(1.0));
        p.grad[0] = g;
        Optimizer opt({OptimizerKind::Adam, 0.01});
        opt.step(store);
        EXPECT_NEAR(p.value.item() - 1.0, -0.01, 0.01 * 1e-5);
    }
}

TEST(Optimizer, AdamSolvesQuadraticBowl) {
    ParameterStore store;
    auto& p = store.add("p", Tensor::scalar(1.0));
    Optimizer opt({OptimizerKind::Adam, 0.1});
    for (int i = 0; i < 200; ++i) {
        store.zero_grad();
        Tape t;
        Var v = t.parameter(p);
        t.backward(mul(v, v));
        opt.step(store);
    }
    EXPECT_LT(std::abs(p.value.item()), 1e-3);
}

TEST(Optimizer, NonFiniteGradientIsTrainingError) {
    ParameterStore store;
    auto& p = store.add("p", Tensor::scalar(1.0));
    p.grad[0] = std::numeric_limits<double>::infinity();
    Optimizer opt;
    try {
        opt.step(store, 7);
        FAIL();
    } catch (const TrainingError& e) {
        EXPECT_EQ(e.epoch(), 7u);
    }
}

TEST(Params, ClipGradNormScalesToLimit) {
    ParameterStore store;
    auto& a = store.add("a", Tensor::matrix({{0, 0}}));
    auto& b = store.add("b", Tensor::scalar(0));
    a.grad[0] = 3;
    a.grad[1] = 0;
    b.grad[0] = 4;
    EXPECT_DOUBLE_EQ(store.clip_grad_norm(1.0), 5.0);
    EXPECT_NEAR(store.grad_norm(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(a.grad[0], 0.6);
    EXPECT_THROW(store.add("a", Tensor::scalar(1)), ConfigError);
}

TEST(Params, InitializersAreSeededAndBounded) {
    std::mt19937_64 r1(9), r2(9);
    auto a = glorot_uniform({10, 20}, 10, 20, r1);
    auto b = glorot_uniform({10, 20}, 10, 20, r2);
    EXPECT_EQ(a, b);
    const double lim = std::sqrt(6.0 / 30.0);
    for (double v : a.values()) EXPECT_LE(std::abs(v), lim);
}

TEST(Checkpoint, RoundTripIsBitExact) {
    ParameterStore a, b;
    std::mt19937_64 rng(6);
    for (auto* s : {&a, &b}) {
        s->add("dense.W", Tensor({3, 4}));
        s->add("conv.K", Tensor({2, 1, 5}));
        s->add("bias", Tensor({1, 1}));
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        for (double& v : a[i].value.storage()) v = std::ldexp(tsf::testkit::random_vector(1, rng)[0], rng() % 200 - 100);
    a[2].value[0] = -0.0;
    const auto blob = save_checkpoint(a, {{"arch", "lstm"}, {"note", "two words"}});
    auto ck = load_checkpoint(blob, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].value, b[i].value);
        for (std::size_t k = 0; k < a[i].value.numel(); ++k)
            EXPECT_EQ(std::signbit(a[i].value[k]), std::signbit(b[i].value[k]));
    }
    EXPECT_EQ(ck.meta.at("arch"), "lstm");
    EXPECT_EQ(ck.meta.at("note"), "two words");
    EXPECT_EQ(save_checkpoint(b, {{"arch", "lstm"}, {"note", "two words"}}), blob);
}

TEST(Checkpoint, RejectsIncompatibleBlobs) {
    ParameterStore a;
    a.add("w", Tensor({2, 2}, {1, 2, 3, 4}));
    const auto blob = save_checkpoint(a);

    ParameterStore wrong_shape;
    wrong_shape.add("w", Tensor({4, 1}));
    EXPECT_THROW(load_checkpoint(blob, wrong_shape), ShapeError);
    ParameterStore wrong_name;
    wrong_name.add("v", Tensor({2, 2}));
    EXPECT_THROW(load_checkpoint(blob, wrong_name), InputError);
    ParameterStore too_many;
    too_many.add("w", Tensor({2, 2}));
    too_many.add("x", Tensor({1}));
    EXPECT_THROW(load_checkpoint(blob, too_many), InputError);

    EXPECT_THROW(parse_checkpoint("not a checkpoint\n"), InputError);
    EXPECT_THROW(parse_checkpoint("tsf-checkpoint 99\nparams 0\nend\n"), InputError);
    EXPECT_THROW(parse_checkpoint(blob.substr(0, blob.size() - 4)), InputError);
}

TEST(LrFinder, ScheduleIsGeometricAndStrictlyIncreasing) {
    auto s = lr_schedule(1e-5, 1.0, 100);
    EXPECT_EQ(s.front(), 1e-5);
    EXPECT_EQ(s.back(), 1.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_GT(s[i], s[i - 1]);
        if (i > 1) EXPECT_NEAR(s[i] / s[i - 1], s[i - 1] / s[i - 2], 1e-9);
    }
    EXPECT_THROW(lr_schedule(1.0, 0.1, 10), RangeError);
    EXPECT_THROW(lr_schedule(0.0, 0.1, 10), RangeError);
}

TEST(LrFinder, SweepUsesScheduleInOrder) {
    std::vector<double> seen;
    auto r = lr_range_finder([&](double lr, std::size_t) { seen.push_back(lr); return 1.0 / (1.0 + lr); }, 1e-3, 1.0, 20);
    EXPECT_EQ(seen, lr_schedule(1e-3, 1.0, 20));
    EXPECT_EQ(r.learning_rates, seen);
    EXPECT_DOUBLE_EQ(r.suggested_lr, r.best_lr / 10.0);
}

TEST(LrFinder, StopsOnDivergence) {
    auto r = lr_range_finder([](double lr, std::size_t) { return lr > 0.1 ? std::nan("") : 1.0 - lr; }, 1e-4, 10.0, 50);
    EXPECT_LT(r.learning_rates.back(), 0.1 + 1e-12);
    EXPECT_THROW(lr_range_finder([](double, std::size_t) { return std::nan(""); }, 1e-4, 10.0, 50), RangeError);
}

TEST(LrFinder, SuggestionTrainsLinearRegressionBetterThanMaximum) {
    std::mt19937_64 rng(8);
    const std::size_t n = 256;
    auto xs = tsf::testkit::random_tensor({n, 1}, rng, -2, 2);
    Tensor ys({n, 1});
    std::normal_distribution<double> noise(0, 0.1);
    for (std::size_t i = 0; i < n; ++i) ys[i] = 3.0 * xs[i] - 1.0 + noise(rng);

    struct Model {
        ParameterStore store;
        DenseParams d;
        explicit Model(std::uint64_t seed) {
            std::mt19937_64 r(seed);
            d = DenseParams::create(store, "d", 1, 1, r);
        }
        double step(Optimizer& opt, const Tensor& x, const Tensor& y) {
            store.zero_grad();
            Tape t;
            Var l = mse_loss(dense(t, d, t.constant(x)), y);
            t.backward(l);
            opt.step(store);
            return l.value().item();
        }
    };
    const double lr_min = 1e-4, lr_max = 10.0;
    Model probe(1);
    Optimizer probe_opt({OptimizerKind::SGD, lr_min});
    auto r = lr_range_finder(
        [&](double lr, std::size_t) {
            probe_opt.set_learning_rate(lr);
            return probe.step(probe_opt, xs, ys);
        },
        lr_min, lr_max, 60);

    auto train = [&](double lr) {
        Model m(1);
        Optimizer opt({OptimizerKind::SGD, lr});
        double last = 0;
        for (int e = 0; e < 50; ++e) {
            try {
                last = m.step(opt, xs, ys);
            } catch (const TrainingError&) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return std::isfinite(last) ? last : std::numeric_limits<double>::infinity();
    };
    EXPECT_LT(train(r.suggested_lr), train(lr_max));
}
