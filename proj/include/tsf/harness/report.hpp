#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tsf/core/metrics.hpp"
#include "tsf/core/price_series.hpp"
#include "tsf/harness/experiment.hpp"

namespace tsf::harness {

inline const std::vector<std::string> kLeaderboardColumns = {"rank", "model", "status", "mae", "mse", "rmse"};

/// Characters outside [A-Za-z0-9_.-] become '_'.
inline std::string file_safe(const std::string& name) {
    std::string out = name;
    for (auto& ch : out) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                        ch == '.' || ch == '-';
        if (!ok) ch = '_';
    }
    return out;
}

inline std::string predictions_file_name(const std::string& model) { return "predictions_" + file_safe(model) + ".csv"; }

/// Contains no timing data, so identical runs produce identical bytes.
inline std::string leaderboard_csv(const std::vector<ForecastReport>& reports) {
    std::ostringstream out;
    out << "rank,model,status,mae,mse,rmse\n";
    std::size_t rank = 0;
    for (const auto& r : reports) {
        const bool ok = r.status == ReportStatus::Ok;
        out << (ok ? std::to_string(++rank) : std::string()) << ',' << r.name << ',' << (ok ? "ok" : "failed") << ',';
        if (ok)
            out << tsf::detail::format_double(r.metrics.mae) << ',' << tsf::detail::format_double(r.metrics.mse) << ','
                << tsf::detail::format_double(r.metrics.rmse);
        else
            out << ",,";
        out << '\n';
    }
    return out.str();
}

inline std::string predictions_csv(const ForecastReport& r) {
    std::ostringstream out;
    out << "date,actual,predicted\n";
    for (std::size_t i = 0; i < r.predictions.size(); ++i)
        out << r.dates[i].to_string() << ',' << tsf::detail::format_double(r.actuals[i]) << ','
            << tsf::detail::format_double(r.predictions[i]) << '\n';
    return out.str();
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline json manifest_json(const ExperimentConfig& cfg, const PreparedData& data, const std::vector<ForecastReport>& reports,
                          std::size_t workers) {
    json m;
    m["config"] = cfg.echo;
    m["seed"] = cfg.seed;
    m["workers"] = workers;
    m["data"] = {{"path", cfg.data_path.string()},
                 {"hash", hex64(data.hash)},
                 {"dropped_rows", data.dropped_rows},
                 {"train_end", data.split.train_end},
                 {"test_end", data.split.test_end},
                 {"train_first", data.train.empty() ? "" : data.train.dates().front().to_string()},
                 {"test_first", data.test.empty() ? "" : data.test.dates().front().to_string()},
                 {"test_last", data.test.empty() ? "" : data.test.dates().back().to_string()}};
    json models = json::array();
    for (const auto& r : reports) {
        json e{{"name", r.name},
               {"status", r.status == ReportStatus::Ok ? "ok" : "failed"},
               {"seconds", r.seconds},
               {"data_hash", hex64(r.data_hash)},
               {"config", r.config_echo}};
        if (r.status == ReportStatus::Ok) e["predictions"] = predictions_file_name(r.name);
        if (!r.error.empty()) e["error"] = r.error;
        if (!r.notes.empty()) e["notes"] = r.notes;
        models.push_back(std::move(e));
    }
    m["models"] = std::move(models);
    return m;
}

/**
 * Writes leaderboard.csv, predictions_<model>.csv for every successful model
 * and run_manifest.json into `out_dir` (created if missing). Returns the
 * paths written.
 */
inline std::vector<std::filesystem::path> emit_report(const std::vector<ForecastReport>& reports,
                                                      const std::filesystem::path& out_dir, const json& manifest) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir.string(), ec.message());
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto p = out_dir / name;
        write_file(p, content);
        written.push_back(p);
    };
    put("leaderboard.csv", leaderboard_csv(reports));
    for (const auto& r : reports)
        if (r.status == ReportStatus::Ok) put(predictions_file_name(r.name), predictions_csv(r));
    put("run_manifest.json", manifest.dump(2) + "\n");
    return written;
}

struct LeaderboardRow {
    std::size_t rank = 0;
    std::string model;
    bool ok = false;
    MetricSet stored;
    std::optional<MetricSet> recomputed;  // from the predictions file
    std::size_t points = 0;
};

inline double max_metric_deviation(const LeaderboardRow& row) {
    if (!row.recomputed) return std::numeric_limits<double>::infinity();
    const auto& a = row.stored;
    const auto& b = *row.recomputed;
    return std::max({std::abs(a.mae - b.mae), std::abs(a.mse - b.mse), std::abs(a.rmse - b.rmse)});
}

/// Reads a run directory back and recomputes every model's metrics from its predictions file.
inline std::vector<LeaderboardRow> load_run(const std::filesystem::path& run_dir) {
    const auto board_path = run_dir / "leaderboard.csv";
    const auto text = read_file(board_path);
    const auto lines = tsf::detail::split_lines(text);
    if (lines.empty() || tsf::detail::trim(lines[0]) != "rank,model,status,mae,mse,rmse")
        throw SchemaError(board_path.string() + ": unexpected leaderboard header");
    std::vector<LeaderboardRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (tsf::detail::trim(lines[i]).empty()) continue;
        const auto f = tsf::detail::split_fields(lines[i]);
        if (f.size() != 6) throw ParseError(i + 1, board_path.string() + ": expected 6 fields");
        LeaderboardRow row;
        row.model = std::string(f[1]);
        row.ok = f[2] == "ok";
        if (row.ok) {
            row.rank = static_cast<std::size_t>(std::stoull(std::string(f[0])));
            if (!tsf::detail::parse_double(f[3], row.stored.mae) || !tsf::detail::parse_double(f[4], row.stored.mse) ||
                !tsf::detail::parse_double(f[5], row.stored.rmse))
                throw ParseError(i + 1, board_path.string() + ": bad metric value");
            const auto pred_path = run_dir / predictions_file_name(row.model);
            const auto ptext = read_file(pred_path);
            const auto plines = tsf::detail::split_lines(ptext);
            if (plines.empty() || tsf::detail::trim(plines[0]) != "date,actual,predicted")
                throw SchemaError(pred_path.string() + ": unexpected predictions header");
            std::vector<double> actual, predicted;
            for (std::size_t k = 1; k < plines.size(); ++k) {
                if (tsf::detail::trim(plines[k]).empty()) continue;
                const auto pf = tsf::detail::split_fields(plines[k]);
                double a = 0, p = 0;
                if (pf.size() != 3 || !tsf::detail::parse_double(pf[1], a) || !tsf::detail::parse_double(pf[2], p))
                    throw ParseError(k + 1, pred_path.string() + ": bad prediction row");
                actual.push_back(a);
                predicted.push_back(p);
            }
            row.points = actual.size();
            row.recomputed = compute_metrics(predicted, actual);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Fixed-width table for terminal output.
inline std::string render_leaderboard(const std::vector<LeaderboardRow>& rows) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-5s %-24s %-7s %14s %14s %14s\n", "rank", "model", "status", "mae", "mse", "rmse");
    out << buf;
    for (const auto& r : rows) {
        if (r.ok)
            std::snprintf(buf, sizeof buf, "%-5zu %-24s %-7s %14.6f %14.6f %14.6f\n", r.rank, r.model.c_str(), "ok",
                          r.stored.mae, r.stored.mse, r.stored.rmse);
        else
            std::snprintf(buf, sizeof buf, "%-5s %-24s %-7s %14s %14s %14s\n", "-", r.model.c_str(), "failed", "-", "-",
                          "-");
        out << buf;
    }
    return out.str();
}

inline std::string render_leaderboard(const std::vector<ForecastReport>& reports) {
    std::vector<LeaderboardRow> rows;
    std::size_t rank = 0;
    for (const auto& r : reports) {
        LeaderboardRow row;
        row.model = r.name;
        row.ok = r.status == ReportStatus::Ok;
        if (row.ok) row.rank = ++rank;
        row.stored = r.metrics;
        rows.push_back(row);
    }
    return render_leaderboard(rows);
}

}  // namespace tsf::harness
