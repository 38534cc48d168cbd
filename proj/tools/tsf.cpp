// Command-line front end: ingest, analyze, fit-arima, run, report, synth.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 model failure(s).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "tsf/tsf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitModel = 3;

tsf::IngestResult ingest_file(const std::string& path, const std::string& symbol) {
    return tsf::parse_ohlcv_csv(tsf::harness::read_file(path), symbol);
}

void print_summary(const tsf::IngestResult& r) {
    const auto& s = r.series;
    std::printf("rows: %zu\n", s.size());
    std::printf("dropped: %zu", r.dropped_count);
    if (!r.dropped_lines.empty()) {
        std::printf(" (lines");
        for (auto l : r.dropped_lines) std::printf(" %zu", l);
        std::printf(")");
    }
    std::printf("\n");
    if (r.resorted) std::printf("note: rows were out of order and have been sorted by date\n");
    if (s.empty()) return;
    const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
    std::printf("range: %s .. %s\n", s.dates().front().to_string().c_str(), s.dates().back().to_string().c_str());
    std::printf("close: min %.4f max %.4f first %.4f last %.4f\n", *lo, *hi, s.values().front(), s.values().back());
}

int cmd_ingest(const std::string& csv, const std::string& out, const std::string& symbol) {
    const auto r = ingest_file(csv, symbol);
    print_summary(r);
    if (!out.empty()) {
        tsf::harness::write_file(out, tsf::serialize_series_csv(r.series));
        std::printf("wrote %s\n", out.c_str());
    }
    return kExitOk;
}

int cmd_analyze(const std::string& csv, std::size_t max_lag, std::size_t diff, const std::string& out_dir) {
    const auto r = ingest_file(csv, {});
    const auto x = tsf::stats::difference(r.series.values(), diff);
    const auto a = tsf::stats::acf(x, max_lag);
    const auto p = tsf::stats::pacf(x, max_lag);
    const auto adf = tsf::stats::adf_test(x);
    std::printf("series: %zu points, differenced %zu time(s) -> %zu\n", r.series.size(), diff, x.size());
    std::printf("adf: statistic=%.6f p=%.6f lags=%zu n=%zu 5%%-critical=%.4f -> %s\n", adf.statistic, adf.p_value,
                adf.lags_used, adf.n_obs, tsf::stats::adf_critical_value(adf.n_obs, 0.05),
                adf.reject_null ? "stationary" : "unit root not rejected");
    std::printf("confidence band: +/-%.6f\n", a.confidence_band);
    std::printf("%5s %12s %12s\n", "lag", "acf", "pacf");
    for (std::size_t h = 1; h <= max_lag; ++h) {
        const bool sa = std::abs(a.coefficients[h]) > a.confidence_band;
        const bool sp = std::abs(p.coefficients[h - 1]) > p.confidence_band;
        std::printf("%5zu %11.6f%c %11.6f%c\n", h, a.coefficients[h], sa ? '*' : ' ', p.coefficients[h - 1],
                    sp ? '*' : ' ');
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        tsf::harness::write_file(std::filesystem::path(out_dir) / "acf.csv", tsf::stats::correlogram_csv(a));
        tsf::harness::write_file(std::filesystem::path(out_dir) / "pacf.csv", tsf::stats::correlogram_csv(p));
        std::printf("wrote %s/acf.csv and %s/pacf.csv\n", out_dir.c_str(), out_dir.c_str());
    }
    return kExitOk;
}

struct FitArimaArgs {
    std::string csv;
    std::size_t p = 0, d = 1, q = 0;
    bool autoselect = false;
    bool no_intercept = false;
    double train_ratio = 1.0;
    std::string residuals;
    std::size_t workers = 1;
};

int cmd_fit_arima(const FitArimaArgs& a) {
    const auto r = ingest_file(a.csv, {});
    const auto n_train = a.train_ratio >= 1.0 ? r.series.size() : tsf::SplitSpec::from_ratio(r.series.size(), a.train_ratio).train_end;
    const auto train = r.series.slice(0, n_train);
    tsf::arima::ArimaModel model;
    std::vector<tsf::arima::AdfStep> trail;
    if (a.autoselect) {
        tsf::arima::GridSearchOptions g;
        g.include_intercept = !a.no_intercept;
        g.workers = tsf::harness::resolve_workers(a.workers);
        auto gs = tsf::arima::grid_search(train.values(), g);
        model = std::move(gs.model);
        trail = std::move(gs.adf_trail);
        std::printf("candidates: %zu fitted, %zu failed\n", gs.candidates.size() - gs.failures.size(),
                    gs.failures.size());
    } else {
        tsf::arima::ArimaFitOptions o;
        o.include_intercept = !a.no_intercept;
        model = tsf::arima::fit_arima(train, {a.p, a.d, a.q}, o);
    }
    std::fputs(tsf::arima::model_summary(model, trail).c_str(), stdout);
    if (n_train < r.series.size()) {
        const auto test = r.series.slice(n_train, r.series.size());
        const auto pred = tsf::arima::rolling_forecast(model, train, test);
        const auto m = tsf::compute_metrics(pred, test.values());
        std::printf("one-step test (%zu points): mae=%.6f mse=%.6f rmse=%.6f\n", test.size(), m.mae, m.mse, m.rmse);
    }
    if (!a.residuals.empty()) {
        tsf::harness::write_file(a.residuals, tsf::arima::residuals_csv(model));
        std::printf("wrote %s\n", a.residuals.c_str());
    }
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_override, std::size_t workers_override) {
    auto cfg = tsf::harness::load_experiment_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    const auto data = tsf::harness::prepare_data(cfg);
    const auto workers = tsf::harness::resolve_workers(cfg.workers);
    std::printf("data: %zu train / %zu test points (hash %s), %zu model(s), %zu worker(s)\n", data.train.size(),
                data.test.size(), tsf::harness::hex64(data.hash).c_str(), cfg.models.size(), workers);
    const auto reports = tsf::harness::run_experiment(cfg, data);
    tsf::harness::emit_report(reports, cfg.output_dir, tsf::harness::manifest_json(cfg, data, reports, workers));
    std::fputs(tsf::harness::render_leaderboard(reports).c_str(), stdout);
    for (const auto& r : reports)
        if (r.status == tsf::harness::ReportStatus::Failed)
            std::fprintf(stderr, "model %s failed: %s\n", r.name.c_str(), r.error.c_str());
    std::printf("wrote %s\n", cfg.output_dir.string().c_str());
    return tsf::harness::any_failed(reports) ? kExitModel : kExitOk;
}

int cmd_report(const std::string& run_dir, double tolerance) {
    const auto rows = tsf::harness::load_run(run_dir);
    std::fputs(tsf::harness::render_leaderboard(rows).c_str(), stdout);
    bool consistent = true;
    bool failed = false;
    for (const auto& r : rows) {
        if (!r.ok) {
            failed = true;
            continue;
        }
        const double dev = tsf::harness::max_metric_deviation(r);
        if (!(dev <= tolerance)) {
            consistent = false;
            std::fprintf(stderr, "model %s: leaderboard differs from predictions by %.3g\n", r.model.c_str(), dev);
        }
    }
    std::printf("self-consistency: %s (tolerance %.1e)\n", consistent ? "ok" : "MISMATCH", tolerance);
    if (!consistent) return kExitData;
    return failed ? kExitModel : kExitOk;
}

int cmd_synth(const std::string& out, std::size_t n, std::uint64_t seed, double start, double drift, double vol) {
    const auto s = tsf::PriceSeries::from_values(tsf::synthetic::geometric_random_walk(n, seed, start, drift, vol), "SYN",
                                                 tsf::Date(2010, 1, 4));
    tsf::harness::write_file(out, tsf::serialize_ohlcv_csv(s));
    std::printf("wrote %zu rows to %s\n", n, out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tsf: daily close forecasting toolkit and benchmark harness"};
    app.require_subcommand(1);

    std::string csv, out, symbol, config, run_dir;
    std::size_t max_lag = 20, diff = 0, workers = 0;

    auto* ingest = app.add_subcommand("ingest", "Validate and clean an OHLCV export, print a summary");
    ingest->add_option("csv", csv, "OHLCV CSV file")->required();
    ingest->add_option("--out", out, "Write the cleaned date,close series here");
    ingest->add_option("--symbol", symbol, "Symbol label");

    auto* analyze = app.add_subcommand("analyze", "ACF/PACF correlograms and ADF test");
    analyze->add_option("csv", csv, "OHLCV CSV file")->required();
    analyze->add_option("--max-lag", max_lag, "Largest lag")->capture_default_str();
    analyze->add_option("--diff", diff, "Difference the series this many times first")->capture_default_str();
    analyze->add_option("--out", out, "Directory for acf.csv and pacf.csv");

    FitArimaArgs fa;
    auto* fit = app.add_subcommand("fit-arima", "Fit ARIMA(p,d,q) by CSS, or select the order by ADF + AIC");
    fit->add_option("csv", fa.csv, "OHLCV CSV file")->required();
    auto* p_opt = fit->add_option("--p", fa.p, "AR order");
    auto* d_opt = fit->add_option("--d", fa.d, "Differencing order");
    auto* q_opt = fit->add_option("--q", fa.q, "MA order");
    auto* auto_opt = fit->add_flag("--auto", fa.autoselect, "Grid search p,q <= 5 at ADF-chosen d");
    auto_opt->excludes(p_opt)->excludes(d_opt)->excludes(q_opt);
    fit->add_flag("--no-intercept", fa.no_intercept, "Fit without a constant");
    fit->add_option("--train-ratio", fa.train_ratio, "Fit on this leading fraction and score the rest")
        ->check(CLI::Range(0.0, 1.0));
    fit->add_option("--residuals", fa.residuals, "Write index,residual CSV here");
    fit->add_option("--workers", fa.workers, "Parallel candidate fits for --auto");

    auto* run = app.add_subcommand("run", "Run a full experiment from a JSON config");
    run->add_option("config", config, "Experiment config")->required();
    run->add_option("--out", out, "Override output_dir");
    run->add_option("--workers", workers, "Override worker count");

    double tolerance = 1e-9;
    auto* report = app.add_subcommand("report", "Re-render a leaderboard and verify it against the prediction files");
    report->add_option("run_dir", run_dir, "Run output directory")->required();
    report->add_option("--tolerance", tolerance, "Allowed metric deviation")->capture_default_str();

    std::size_t n = 1500;
    std::uint64_t seed = 1;
    double start = 100.0, drift = 0.0005, vol = 0.01;
    auto* synth = app.add_subcommand("synth", "Write a seeded geometric random walk as an OHLCV CSV");
    synth->add_option("out", out, "Output CSV")->required();
    synth->add_option("--n", n, "Number of trading days")->capture_default_str();
    synth->add_option("--seed", seed, "RNG seed")->capture_default_str();
    synth->add_option("--start", start, "Initial price")->capture_default_str();
    synth->add_option("--drift", drift, "Daily log drift")->capture_default_str();
    synth->add_option("--vol", vol, "Daily log volatility")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(csv, out, symbol);
        if (*analyze) return cmd_analyze(csv, max_lag, diff, out);
        if (*fit) return cmd_fit_arima(fa);
        if (*run) return cmd_run(config, out, workers);
        if (*report) return cmd_report(run_dir, tolerance);
        if (*synth) return cmd_synth(out, n, seed, start, drift, vol);
    } catch (const tsf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const tsf::FitError& e) {
        std::fprintf(stderr, "model failure: %s\n", e.what());
        return kExitModel;
    } catch (const tsf::SearchError& e) {
        std::fprintf(stderr, "model failure: %s\n", e.what());
        return kExitModel;
    } catch (const tsf::TrainingError& e) {
        std::fprintf(stderr, "model failure: %s\n", e.what());
        return kExitModel;
    } catch (const tsf::Error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
