#pragma once

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tsf/arima/arima.hpp"
#include "tsf/baselines/baselines.hpp"
#include "tsf/core/dataset.hpp"
#include "tsf/core/metrics.hpp"
#include "tsf/core/price_series.hpp"
#include "tsf/forecast/forecaster.hpp"

namespace tsf::harness {

using nlohmann::json;

struct ArimaEntry {
    std::optional<arima::ArimaOrder> order;  // nullopt: grid search
    arima::GridSearchOptions grid{};
    bool include_intercept = true;
    std::size_t refit_every = 0;
};

using ModelSpec = std::variant<baselines::BaselineSpec, ArimaEntry, forecast::ForecasterConfig>;

struct ModelEntry {
    std::string name;
    ModelSpec spec;
    json echo;  // the entry as written in the config
    /// Windowing used for neural training; ignored by other model kinds.
    WindowMode train_mode = WindowMode::ToVector;
};

/**
 * Experiment description, read from a JSON document (C and C++ style comments allowed):
 *
 *   {
 *     "data": "spy.csv",                  // Yahoo OHLCV export, relative to the config file
 *     "symbol": "SPY",                    // optional
 *     "split": {"train_ratio": 0.8}       // or {"train_end": N, "test_end": M}
 *     "seed": 42,
 *     "workers": 1,                       // TSF_WORKERS overrides
 *     "output_dir": "runs/spy",           // relative to the config file
 *     "metrics": ["mae", "mse", "rmse"],  // optional; all three are always reported
 *     "models": [
 *       {"name": "naive", "type": "naive"},
 *       {"name": "ma5", "type": "moving_average", "window": 5},
 *       {"name": "arima", "type": "arima", "order": [1, 1, 0]},
 *       {"name": "arima_auto", "type": "arima", "auto": true, "p_max": 5, "d_max": 2, "q_max": 5},
 *       {"name": "lstm30", "type": "neural", "architecture": "lstm", "window": 30, "epochs": 100}
 *     ]
 *   }
 *
 * Neural entries accept every ForecasterConfig field by its snake_case name;
 * unspecified fields take the architecture defaults.
 */
struct ExperimentConfig {
    std::filesystem::path data_path;
    std::string symbol;
    std::optional<SplitSpec> split;  // nullopt: ratio policy
    double train_ratio = 0.8;
    std::uint64_t seed = 42;
    std::size_t workers = 1;
    std::filesystem::path output_dir;
    std::vector<ModelEntry> models;
    json echo;

    void validate() const {
        if (data_path.empty()) throw ConfigError("config: 'data' path is empty");
        if (models.empty()) throw ConfigError("config: at least one model is required");
        std::set<std::string> names;
        for (const auto& m : models) {
            if (m.name.empty()) throw ConfigError("config: model with empty name");
            if (!names.insert(m.name).second) throw ConfigError("config: duplicate model name '" + m.name + "'");
        }
    }
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: field '") + key + "': " + e.what());
    }
}

inline ad::LossSpec parse_loss(const json& j) {
    ad::LossSpec spec;
    const auto kind = get_or<std::string>(j, "loss", "mse");
    if (kind == "mse") spec.kind = ad::LossKind::MSE;
    else if (kind == "mae") spec.kind = ad::LossKind::MAE;
    else if (kind == "huber") spec.kind = ad::LossKind::Huber;
    else throw ConfigError("config: unknown loss '" + kind + "'");
    spec.delta = get_or<double>(j, "huber_delta", 1.0);
    return spec;
}

inline forecast::ForecasterConfig parse_neural(const json& j, std::uint64_t seed) {
    const auto arch = forecast::architecture_from_string(get_or<std::string>(j, "architecture", ""));
    auto c = forecast::ForecasterConfig::defaults(arch);
    c.window_size = get_or<std::size_t>(j, "window", c.window_size);
    c.hidden_units = get_or<std::size_t>(j, "hidden_units", c.hidden_units);
    c.layers = get_or<std::size_t>(j, "layers", c.layers);
    c.conv_filters = get_or<std::size_t>(j, "conv_filters", c.conv_filters);
    c.conv_kernel = get_or<std::size_t>(j, "conv_kernel", c.conv_kernel);
    c.dilations = get_or<std::vector<std::size_t>>(j, "dilations", c.dilations);
    c.epochs = get_or<std::size_t>(j, "epochs", c.epochs);
    c.batch_size = get_or<std::size_t>(j, "batch_size", c.batch_size);
    c.patience = get_or<std::size_t>(j, "patience", c.patience);
    c.clip_norm = get_or<double>(j, "clip_norm", c.clip_norm);
    c.standardize = get_or<bool>(j, "standardize", c.standardize);
    c.seed = get_or<std::uint64_t>(j, "seed", seed);
    c.loss = parse_loss(j);
    const auto opt = get_or<std::string>(j, "optimizer", "adam");
    if (opt == "adam") c.optimizer = ad::OptimizerKind::Adam;
    else if (opt == "sgd") c.optimizer = ad::OptimizerKind::SGD;
    else throw ConfigError("config: unknown optimizer '" + opt + "'");
    if (j.contains("learning_rate")) {
        const auto& lr = j.at("learning_rate");
        if (lr.is_string() && lr.get<std::string>() == "auto") c.learning_rate.reset();
        else if (lr.is_number()) c.learning_rate = lr.get<double>();
        else throw ConfigError("config: learning_rate must be a number or \"auto\"");
    }
    c.validate();
    return c;
}

inline ModelEntry parse_model(const json& j, std::uint64_t seed) {
    if (!j.is_object()) throw ConfigError("config: each model entry must be an object");
    ModelEntry e;
    e.echo = j;
    const auto type = get_or<std::string>(j, "type", "");
    e.name = get_or<std::string>(j, "name", type);
    if (type == "naive") {
        e.spec = baselines::BaselineSpec{baselines::BaselineKind::Naive, 1};
    } else if (type == "moving_average") {
        baselines::BaselineSpec s{baselines::BaselineKind::MovingAverage, get_or<std::size_t>(j, "window", 0)};
        s.validate();
        e.spec = s;
    } else if (type == "arima") {
        ArimaEntry a;
        a.include_intercept = get_or<bool>(j, "intercept", true);
        a.refit_every = get_or<std::size_t>(j, "refit_every", 0);
        if (get_or<bool>(j, "auto", false)) {
            a.grid.p_max = get_or<std::size_t>(j, "p_max", a.grid.p_max);
            a.grid.d_max = get_or<std::size_t>(j, "d_max", a.grid.d_max);
            a.grid.q_max = get_or<std::size_t>(j, "q_max", a.grid.q_max);
            a.grid.include_intercept = a.include_intercept;
        } else {
            auto o = get_or<std::vector<std::size_t>>(j, "order", {});
            if (o.size() != 3) throw ConfigError("config: arima 'order' must be [p, d, q] unless \"auto\": true");
            a.order = arima::ArimaOrder{o[0], o[1], o[2]};
            a.order->validate(true);
        }
        e.spec = a;
    } else if (type == "neural") {
        auto cfg = parse_neural(j, seed);
        const auto default_mode =
            cfg.architecture == forecast::Architecture::Seq2VecRNN || cfg.architecture == forecast::Architecture::LSTMWindow
                ? "vector"
                : "sequence";
        const auto mode = get_or<std::string>(j, "train_mode", default_mode);
        if (mode == "vector") e.train_mode = WindowMode::ToVector;
        else if (mode == "sequence") e.train_mode = WindowMode::ToSequence;
        else throw ConfigError("config: train_mode must be \"vector\" or \"sequence\"");
        e.spec = cfg;
    } else {
        throw ConfigError("config: unknown model type '" + type + "'");
    }
    return e;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    c.echo = j;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    const auto data = detail::get_or<std::string>(j, "data", "");
    if (!data.empty()) c.data_path = resolve(data);
    c.symbol = detail::get_or<std::string>(j, "symbol", "");
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    c.workers = detail::get_or<std::size_t>(j, "workers", c.workers);
    c.output_dir = resolve(detail::get_or<std::string>(j, "output_dir", "run"));
    for (const auto& m : detail::get_or<std::vector<std::string>>(j, "metrics", {"mae", "mse", "rmse"}))
        if (m != "mae" && m != "mse" && m != "rmse") throw ConfigError("config: unknown metric '" + m + "'");
    if (j.contains("split")) {
        const auto& s = j.at("split");
        if (s.contains("train_end") || s.contains("test_end")) {
            if (!s.contains("train_end")) throw ConfigError("config: split needs train_end");
            c.split = SplitSpec{detail::get_or<std::size_t>(s, "train_end", 0), detail::get_or<std::size_t>(s, "test_end", 0)};
        } else {
            c.train_ratio = detail::get_or<double>(s, "train_ratio", c.train_ratio);
        }
    }
    if (j.contains("models")) {
        if (!j.at("models").is_array()) throw ConfigError("config: 'models' must be an array");
        for (const auto& m : j.at("models")) c.models.push_back(detail::parse_model(m, c.seed));
    }
    c.validate();
    return c;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << content;
    if (!out) throw IoError(path.string(), "write failed");
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_experiment_config(j, path.parent_path());
}

enum class ReportStatus { Ok, Failed };

struct ForecastReport {
    std::string name;
    ReportStatus status = ReportStatus::Ok;
    std::string error;
    std::vector<Date> dates;
    std::vector<double> actuals;
    std::vector<double> predictions;
    MetricSet metrics;
    double seconds = 0.0;
    json config_echo;
    std::uint64_t data_hash = 0;
    std::string notes;  // e.g. selected ARIMA order, learning rate used
};

/// FNV-1a over the dates and value bits of the train and test arrays.
inline std::uint64_t hash_split(const PriceSeries& train, const PriceSeries& test) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ULL;
    };
    for (const auto* s : {&train, &test}) {
        for (std::size_t i = 0; i < s->size(); ++i) {
            const auto d = s->dates()[i].to_string();
            mix(d.data(), d.size());
            const double v = (*s)[i];
            mix(&v, sizeof v);
        }
        const char sep = '|';
        mix(&sep, 1);
    }
    return h;
}

struct PreparedData {
    PriceSeries series;  // [0, test_end)
    PriceSeries train;
    PriceSeries test;
    SplitSpec split;
    std::size_t dropped_rows = 0;
    std::uint64_t hash = 0;
};

inline PreparedData prepare_data(const ExperimentConfig& cfg) {
    auto ingest = parse_ohlcv_csv(read_file(cfg.data_path), cfg.symbol);
    PreparedData d;
    d.split = cfg.split ? *cfg.split : SplitSpec::from_ratio(ingest.series.size(), cfg.train_ratio);
    d.split.validate(ingest.series.size());
    d.series = ingest.series.slice(0, d.split.test_end);
    std::tie(d.train, d.test) = split(ingest.series, d.split);
    d.dropped_rows = ingest.dropped_count;
    d.hash = hash_split(d.train, d.test);
    return d;
}

namespace detail {

struct ModelOutput {
    std::vector<double> predictions;
    std::string notes;
};

inline ModelOutput run_model(const ModelEntry& entry, const PriceSeries& train, const PriceSeries& test) {
    // Prediction for test index t conditions on train + test[0, t).
    std::vector<double> full = train.values();
    full.insert(full.end(), test.values().begin(), test.values().end());
    const std::size_t start = train.size();
    return std::visit(
        [&](const auto& spec) -> ModelOutput {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, baselines::BaselineSpec>) {
                return {baselines::forecast(spec, full, start), {}};
            } else if constexpr (std::is_same_v<T, ArimaEntry>) {
                arima::ArimaModel model;
                std::string notes;
                if (spec.order) {
                    arima::ArimaFitOptions fo;
                    fo.include_intercept = spec.include_intercept;
                    model = arima::fit_arima(train, *spec.order, fo);
                } else {
                    auto gs = arima::grid_search(train.values(), spec.grid);
                    model = std::move(gs.model);
                }
                notes = "order=" + model.order.to_string() + " aic=" + tsf::detail::format_double(model.aic);
                arima::RollingOptions ro;
                ro.refit_every = spec.refit_every;
                ro.fit.include_intercept = spec.include_intercept;
                return {arima::rolling_forecast(model, train, test, ro), notes};
            } else {
                auto ds = make_windows(train, spec.window_size, entry.train_mode);
                auto trained = forecast::fit(spec, ds);
                auto preds = forecast::predict(trained, full, start, full.size());
                return {std::move(preds), "epochs=" + std::to_string(trained.history.size()) +
                                              " lr=" + tsf::detail::format_double(trained.learning_rate)};
            }
        },
        entry.spec);
}

}  // namespace detail

inline std::size_t resolve_workers(std::size_t configured) {
    if (const char* env = std::getenv("TSF_WORKERS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw ConfigError("TSF_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    }
    return std::max<std::size_t>(1, configured);
}

/// Leaderboard order: successful reports by ascending MAE then name; failures last by name.
inline void sort_reports(std::vector<ForecastReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const ForecastReport& a, const ForecastReport& b) {
        if (a.status != b.status) return a.status == ReportStatus::Ok;
        if (a.status == ReportStatus::Ok && a.metrics.mae != b.metrics.mae) return a.metrics.mae < b.metrics.mae;
        return a.name < b.name;
    });
}

/**
 * Runs every configured model over one shared ingestion and split. A model
 * that throws is recorded as failed and the others continue; data errors
 * abort the run.
 */
inline std::vector<ForecastReport> run_experiment(const ExperimentConfig& cfg, const PreparedData& data) {
    cfg.validate();
    auto run_one = [&](const ModelEntry& entry) {
        ForecastReport r;
        r.name = entry.name;
        r.config_echo = entry.echo;
        r.dates = data.test.dates();
        r.actuals = data.test.values();
        r.data_hash = hash_split(data.train, data.test);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto out = detail::run_model(entry, data.train, data.test);
            if (out.predictions.size() != r.actuals.size())
                throw InputError("model produced " + std::to_string(out.predictions.size()) + " predictions for " +
                                 std::to_string(r.actuals.size()) + " test points");
            r.metrics = compute_metrics(out.predictions, r.actuals);
            r.predictions = std::move(out.predictions);
            r.notes = std::move(out.notes);
        } catch (const std::exception& e) {
            r.status = ReportStatus::Failed;
            r.error = e.what();
            r.predictions.clear();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    std::vector<ForecastReport> reports(cfg.models.size());
    const std::size_t workers = resolve_workers(cfg.workers);
    for (std::size_t begin = 0; begin < cfg.models.size(); begin += workers) {
        const std::size_t end = std::min(cfg.models.size(), begin + workers);
        if (workers == 1) {
            reports[begin] = run_one(cfg.models[begin]);
            continue;
        }
        std::vector<std::future<ForecastReport>> futures;
        for (std::size_t i = begin; i < end; ++i)
            futures.push_back(std::async(std::launch::async, run_one, std::cref(cfg.models[i])));
        for (std::size_t i = begin; i < end; ++i) reports[i] = futures[i - begin].get();
    }
    sort_reports(reports);
    return reports;
}

inline std::vector<ForecastReport> run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, prepare_data(cfg));
}

inline bool any_failed(const std::vector<ForecastReport>& reports) {
    return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.status == ReportStatus::Failed; });
}

}  // namespace tsf::harness
