// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: tsf_acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "../gradient_cases.hpp"
#include "../test_support.hpp"
#include "tsf/tsf.hpp"

using namespace tsf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!! ") + what;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mae_of(const std::vector<double>& pred, std::span<const double> actual) { return compute_metrics(pred, actual).mae; }

WindowMode default_mode(forecast::Architecture a) {
    return a == forecast::Architecture::Seq2VecRNN || a == forecast::Architecture::LSTMWindow ? WindowMode::ToVector
                                                                                            : WindowMode::ToSequence;
}

/// Default-config one-step test MAE of one architecture, trained on [0, train_end).
double neural_mae(forecast::Architecture arch, const std::vector<double>& v, std::size_t train_end, std::size_t window,
                  std::uint64_t seed, double* secs = nullptr) {
    auto cfg = forecast::ForecasterConfig::defaults(arch);
    cfg.window_size = window;
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> train(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(train_end));
    auto model = forecast::fit(cfg, make_windows(train, window, default_mode(arch)));
    auto pred = forecast::predict(model, v, train_end, v.size());
    if (secs) *secs = seconds_since(t0);
    return mae_of(pred, std::span<const double>(v).subspan(train_end));
}

// 1. seq2seq beats seq2vec and full CNN beats preprocess CNN on a geometric random walk.
Outcome ordering() {
    using forecast::Architecture;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    int seq_wins = 0, cnn_wins = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto v = synthetic::geometric_random_walk(1500, seed);
        const std::size_t train_end = 1200;
        const double s2v = neural_mae(Architecture::Seq2VecRNN, v, train_end, 30, seed);
        const double s2s = neural_mae(Architecture::Seq2SeqRNN, v, train_end, 30, seed);
        const double pre = neural_mae(Architecture::PreprocessCNN, v, train_end, 30, seed);
        const double full = neural_mae(Architecture::FullCNN, v, train_end, 30, seed);
        seq_wins += s2s < s2v;
        cnn_wins += full < pre;
        o.check(true, fmt("seed %d: s2s %.4f vs s2v %.4f, full %.4f vs pre %.4f", static_cast<int>(seed), s2s, s2v,
                          full, pre));
    }
    const double secs = seconds_since(t0);
    o.check(seq_wins >= 2, fmt("seq2seq < seq2vec in %d/3", seq_wins));
    o.check(cnn_wins >= 2, fmt("full_cnn < preprocess_cnn in %d/3", cnn_wins));
    o.check(secs < 600.0, fmt("%.0fs", secs));
    return o;
}

// 2. Naive and moving-average analytics.
Outcome baseline_analytics() {
    Outcome o;
    const auto rw = synthetic::random_walk(10000, 2024);
    const double mae = mae_of(baselines::naive_forecast(rw, 1), std::span<const double>(rw).subspan(1));
    const double expected = std::sqrt(2.0 / std::numbers::pi);
    o.check(std::abs(mae - expected) <= 0.03, fmt("naive MAE %.4f vs %.4f", mae, expected));

    double worst = 0.0;
    for (double a : {0.5, 2.0}) {
        std::vector<double> ramp;
        for (int t = 0; t < 300; ++t) ramp.push_back(a * t - 3.0);
        for (std::size_t k : {1u, 3u, 10u, 30u}) {
            auto pred = baselines::moving_average_forecast(ramp, k, 40);
            for (std::size_t i = 0; i < pred.size(); ++i)
                worst = std::max(worst, std::abs((ramp[40 + i] - pred[i]) - a * (k + 1) / 2.0));
        }
    }
    o.check(worst < 1e-9, fmt("ramp error deviation %.2e", worst));

    const auto grw = synthetic::geometric_random_walk(5000, 3);
    o.check(baselines::moving_average_forecast(grw, 1, 1) == baselines::naive_forecast(grw, 1), "MA(1) == naive");
    return o;
}

// 3. ARIMA parameter recovery, order selection and the naive equivalence.
Outcome arima_recovery() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto ar = arima::fit_arima(testkit::simulate_arma({0.7}, {}, 5000, 101), {1, 0, 0});
    o.check(std::abs(ar.ar_coeffs[0] - 0.7) <= 0.05, fmt("phi %.4f", ar.ar_coeffs[0]));
    const auto ma = arima::fit_arima(testkit::simulate_arma({}, {0.5}, 5000, 102), {0, 0, 1});
    o.check(std::abs(ma.ma_coeffs[0] - 0.5) <= 0.07, fmt("theta %.4f", ma.ma_coeffs[0]));

    const auto rw = synthetic::random_walk(1000, 103);
    const auto gs = arima::grid_search(rw);
    o.check(gs.model.order.d == 1, "grid search on random walk picks " + gs.model.order.to_string());

    const auto prices = synthetic::geometric_random_walk(1500, 104);
    std::span<const double> all(prices);
    arima::ArimaFitOptions fo;
    fo.include_intercept = false;
    const auto rw_model = arima::fit_arima(all.first(1200), {0, 1, 0}, fo);
    arima::RollingOptions ro;
    ro.fit = fo;
    const auto rolled = arima::rolling_forecast(rw_model, all.first(1200), all.subspan(1200), ro);
    o.check(rolled == baselines::naive_forecast(prices, 1200), "ARIMA(0,1,0) == naive");

    const double secs = seconds_since(t0);
    o.check(secs < 120.0, fmt("%.1fs", secs));
    return o;
}

// 4. ADF decisions over 100 seeds.
Outcome stationarity() {
    Outcome o;
    int noise_rejected = 0, walk_kept = 0, diff_rejected = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        noise_rejected += stats::adf_test(synthetic::white_noise(2000, seed)).reject_null;
        const auto rw = synthetic::random_walk(2000, 1000 + seed);
        walk_kept += !stats::adf_test(rw).reject_null;
        diff_rejected += stats::adf_test(stats::difference(rw, 1)).reject_null;
    }
    o.check(noise_rejected >= 90, fmt("noise rejected %d/100", noise_rejected));
    o.check(walk_kept >= 90, fmt("random walk not rejected %d/100", walk_kept));
    o.check(diff_rejected >= 90, fmt("differenced walk rejected %d/100", diff_rejected));
    return o;
}

// 5. Central-difference gradient checks for every kernel.
Outcome gradients() {
    Outcome o;
    const auto cases = testkit::gradient_cases();
    for (std::size_t c = 0; c < cases.size(); ++c) {
        std::mt19937_64 rng(90000 + c);
        double worst = 0.0;
        int configs = 0;
        for (; configs < 20; ++configs) worst = std::max(worst, cases[c].run(rng).max_rel_error);
        o.check(worst < 1e-6, fmt("%s %.1e", cases[c].name.c_str(), worst));
    }
    return o;
}

// 6. Receptive field, causality and seq2seq/seq2vec equivalence.
Outcome architecture_contracts() {
    using namespace forecast;
    Outcome o;
    Network cnn(ForecasterConfig::defaults(Architecture::FullCNN));
    o.check(cnn.receptive_field() == 64, fmt("receptive field %zu", cnn.receptive_field()));

    std::mt19937_64 rng(6);
    const std::size_t W = 30, B = 2;
    for (auto arch : {Architecture::Seq2VecRNN, Architecture::Seq2SeqRNN, Architecture::LSTMWindow,
                      Architecture::PreprocessCNN, Architecture::FullCNN}) {
        auto cfg = ForecasterConfig::defaults(arch);
        cfg.window_size = W;
        Network net(cfg);
        const auto x = testkit::random_tensor({B, W}, rng);
        ad::Tape t0;
        const auto base = net.forward(t0, x, OutputMode::Sequence).value();
        std::size_t violations = 0;
        for (std::size_t s = 0; s < W; ++s) {
            auto moved = x;
            for (std::size_t b = 0; b < B; ++b) moved[b * W + s] += 1.0;
            ad::Tape t;
            const auto y = net.forward(t, moved, OutputMode::Sequence).value();
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t tt = 0; tt < s; ++tt) violations += y[b * W + tt] != base[b * W + tt];
        }
        o.check(violations == 0, "causal " + to_string(arch));
    }

    Network s2s(ForecasterConfig::defaults(Architecture::Seq2SeqRNN));
    auto v_cfg = ForecasterConfig::defaults(Architecture::Seq2VecRNN);
    v_cfg.seed = 1234;
    Network s2v(v_cfg);
    s2v.params().copy_values_from(s2s.params());
    const auto x = testkit::random_tensor({128, W}, rng, 80, 120);
    ad::Tape t;
    const auto seq = s2s.forward(t, x, OutputMode::Sequence).value();
    const auto fin = s2v.forward(t, x, OutputMode::Final).value();
    std::size_t mismatches = 0;
    for (std::size_t b = 0; b < 128; ++b) mismatches += seq.at(b, W - 1) != fin[b];
    o.check(mismatches == 0, "seq2seq final step == seq2vec");
    return o;
}

// 7. Noiseless sine: every architecture under 0.05 MAE within 100 epochs.
Outcome sine_oracle() {
    using forecast::Architecture;
    Outcome o;
    const auto v = synthetic::sine_wave(2000, 50, 1.0);
    for (auto arch : {Architecture::Seq2VecRNN, Architecture::Seq2SeqRNN, Architecture::LSTMWindow,
                      Architecture::PreprocessCNN, Architecture::FullCNN}) {
        double secs = 0;
        const double mae = neural_mae(arch, v, 1600, 20, 42, &secs);
        o.check(mae < 0.05 && secs < 120.0, fmt("%s %.4f in %.0fs", forecast::to_string(arch).c_str(), mae, secs));
    }
    return o;
}

// 8. Byte-identical reruns and metrics recomputable from the prediction files.
Outcome determinism() {
    using harness::json;
    Outcome o;
    testkit::TempDir dir("acceptance");
    const auto data = dir.path() / "series.csv";
    harness::write_file(data, serialize_ohlcv_csv(PriceSeries::from_values(synthetic::geometric_random_walk(800, 8))));
    const json j = {{"data", data.string()},
                    {"seed", 5},
                    {"models",
                     {{{"name", "naive"}, {"type", "naive"}},
                      {{"name", "ma5"}, {"type", "moving_average"}, {"window", 5}},
                      {{"name", "ma20"}, {"type", "moving_average"}, {"window", 20}},
                      {{"name", "arima"}, {"type", "arima"}, {"auto", true}, {"p_max", 2}, {"q_max", 2}},
                      {{"name", "lstm"}, {"type", "neural"}, {"architecture", "lstm"}, {"window", 20}, {"epochs", 5}},
                      {{"name", "cnn"}, {"type", "neural"}, {"architecture", "full_cnn"}, {"window", 20}, {"epochs", 5}}}}};
    const auto cfg = harness::parse_experiment_config(j);
    std::string boards[2];
    for (int run = 0; run < 2; ++run) {
        const auto out = dir.path() / ("run" + std::to_string(run));
        const auto prepared = harness::prepare_data(cfg);
        const auto reports = harness::run_experiment(cfg, prepared);
        harness::emit_report(reports, out, harness::manifest_json(cfg, prepared, reports, 1));
        boards[run] = harness::read_file(out / "leaderboard.csv");
    }
    o.check(boards[0] == boards[1], "leaderboard byte-identical");
    double worst = 0.0;
    const auto rows = harness::load_run(dir.path() / "run0");
    for (const auto& r : rows) worst = std::max(worst, harness::max_metric_deviation(r));
    o.check(rows.size() == 6 && worst <= 1e-9, fmt("%zu rows, max deviation %.1e", rows.size(), worst));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"ordering reproduction", ordering},
        {"baseline analytics", baseline_analytics},
        {"ARIMA recovery", arima_recovery},
        {"stationarity suite", stationarity},
        {"gradient correctness", gradients},
        {"architecture contracts", architecture_contracts},
        {"sine oracle", sine_oracle},
        {"determinism and self-consistency", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s criterion %d (%s) [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
