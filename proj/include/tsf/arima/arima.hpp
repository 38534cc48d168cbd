#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/arima/nelder_mead.hpp"
#include "tsf/arima/polynomial.hpp"
#include "tsf/core/price_series.hpp"
#include "tsf/error.hpp"
#include "tsf/stats/adf.hpp"
#include "tsf/stats/differencing.hpp"

namespace tsf::arima {

struct ArimaOrder {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;

    void validate(bool allow_pure_difference = false) const {
        if (d > 2) throw ConfigError("ARIMA differencing order must be <= 2, got " + std::to_string(d));
        if (p + q == 0 && !allow_pure_difference)
            throw ConfigError("ARIMA order (0," + std::to_string(d) + ",0) has no AR or MA terms");
    }

    std::string to_string() const {
        return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
    }

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

struct ArimaFitOptions {
    bool include_intercept = true;
    /// Orders with p + q == 0 are rejected unless this is set.
    bool allow_pure_difference = true;
    NelderMeadOptions optimizer{};
};

/// Fitted ARIMA(p,d,q) by conditional sum of squares on the d-times differenced series.
struct ArimaModel {
    ArimaOrder order;
    bool has_intercept = true;
    double intercept = 0.0;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double sigma2 = 0.0;
    double sse = 0.0;
    std::size_t n_eff = 0;
    double aic = 0.0;
    /// Innovations on the differenced scale, aligned with the differenced series (zeros before max(p,q)).
    std::vector<double> residuals;
    std::size_t iterations = 0;
    bool converged = false;
    double warm_start_objective = 0.0;
    std::vector<std::string> warnings;

    std::size_t free_parameters() const { return order.p + order.q + (has_intercept ? 1 : 0); }
};

inline double aic_from_sse(double sse, std::size_t n_eff, std::size_t k) {
    const double n = static_cast<double>(n_eff);
    return n * std::log(sse / n) + 2.0 * static_cast<double>(k);
}

/// AIC = n_eff * ln(SSE / n_eff) + 2k with k = p + q (+1 for the intercept).
inline double aic(const ArimaModel& model, std::size_t n_eff) {
    return aic_from_sse(model.sse, n_eff, model.free_parameters());
}

namespace detail {

struct CssProblem {
    std::span<const double> y;
    std::size_t p;
    std::size_t q;
    bool intercept;

    std::size_t start() const { return std::max(p, q); }
    std::size_t dims() const { return p + q + (intercept ? 1 : 0); }

    /// Writes innovations into `e` (size y.size()) and returns the SSE.
    double residuals(std::span<const double> theta, std::vector<double>& e) const {
        const double c = intercept ? theta[0] : 0.0;
        const double* ar = theta.data() + (intercept ? 1 : 0);
        const double* ma = ar + p;
        e.assign(y.size(), 0.0);
        double sse = 0.0;
        for (std::size_t t = start(); t < y.size(); ++t) {
            double pred = c;
            for (std::size_t i = 1; i <= p; ++i) pred += ar[i - 1] * y[t - i];
            for (std::size_t j = 1; j <= q; ++j) pred += ma[j - 1] * e[t - j];
            e[t] = y[t] - pred;
            sse += e[t] * e[t];
        }
        return sse;
    }
};

/// OLS of y_t on [1, y_{t-1..p}] over t >= start; MA terms start at zero.
inline std::vector<double> warm_start(const CssProblem& prob) {
    std::vector<double> theta(prob.dims(), 0.0);
    const std::size_t rows = prob.y.size() - prob.start();
    const std::size_t cols = prob.p + (prob.intercept ? 1 : 0);
    if (cols == 0 || rows <= cols) return theta;
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = prob.start() + r;
        target(r) = prob.y[t];
        std::size_t c = 0;
        if (prob.intercept) X(r, c++) = 1.0;
        for (std::size_t i = 1; i <= prob.p; ++i) X(r, c++) = prob.y[t - i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (static_cast<std::size_t>(qr.rank()) < cols) return theta;
    Eigen::VectorXd beta = qr.solve(target);
    for (std::size_t c = 0; c < cols; ++c) theta[c] = beta(c);
    return theta;
}

}  // namespace detail

/**
 * Fits ARIMA(p,d,q) by conditional sum of squares.
 *
 * The series is differenced d times; pre-sample innovations are zero and the
 * recursion starts at t = max(p,q). Nelder-Mead minimizes SSE/n_eff from an
 * OLS warm start. Non-convergence throws FitError with the best point found.
 */
inline ArimaModel fit_arima(std::span<const double> train, const ArimaOrder& order, const ArimaFitOptions& opts = {}) {
    order.validate(opts.allow_pure_difference);
    if (train.size() <= order.d) throw SizeError("training series shorter than differencing order");
    const auto y = stats::difference(train, order.d);
    const std::size_t k = order.p + order.q + 1;
    if (y.size() <= 10 * k)
        throw SizeError("ARIMA" + order.to_string() + " needs more than " + std::to_string(10 * k) +
                        " differenced values, got " + std::to_string(y.size()));
    {
        const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
        if (*lo == *hi) throw DegenerateInputError("differenced series is constant");
    }

    detail::CssProblem prob{y, order.p, order.q, opts.include_intercept};
    const double n_eff = static_cast<double>(y.size() - prob.start());
    std::vector<double> scratch;
    auto objective = [&](const std::vector<double>& theta) { return prob.residuals(theta, scratch) / n_eff; };

    auto theta0 = detail::warm_start(prob);
    const double f0 = objective(theta0);
    auto nm = nelder_mead(objective, theta0, opts.optimizer);
    if (!nm.converged)
        throw FitError("ARIMA" + order.to_string() + " did not converge in " +
                           std::to_string(opts.optimizer.max_iterations) + " iterations",
                       nm.x, nm.value);

    ArimaModel m;
    m.order = order;
    m.has_intercept = opts.include_intercept;
    std::size_t idx = 0;
    if (opts.include_intercept) m.intercept = nm.x[idx++];
    m.ar_coeffs.assign(nm.x.begin() + idx, nm.x.begin() + idx + order.p);
    m.ma_coeffs.assign(nm.x.begin() + idx + order.p, nm.x.end());
    m.sse = prob.residuals(nm.x, m.residuals);
    m.n_eff = y.size() - prob.start();
    m.sigma2 = m.sse / static_cast<double>(m.n_eff);
    m.aic = aic(m, m.n_eff);
    m.iterations = nm.iterations;
    m.converged = nm.converged;
    m.warm_start_objective = f0;
    if (!roots_outside_unit_circle(ar_polynomial(m.ar_coeffs)))
        m.warnings.push_back("AR polynomial has roots inside the unit circle; reflected for forecasting");
    if (!roots_outside_unit_circle(ma_polynomial(m.ma_coeffs)))
        m.warnings.push_back("MA polynomial is not invertible; reflected for forecasting");
    return m;
}

inline ArimaModel fit_arima(const PriceSeries& train, const ArimaOrder& order, const ArimaFitOptions& opts = {}) {
    return fit_arima(std::span<const double>(train.values()), order, opts);
}

struct GridSearchOptions {
    std::size_t p_max = 5;
    std::size_t d_max = 2;
    std::size_t q_max = 5;
    bool include_intercept = true;
    std::optional<std::size_t> adf_max_lag;
    std::size_t workers = 1;
    NelderMeadOptions optimizer{};
};

struct CandidateFit {
    ArimaOrder order;
    bool ok = false;
    double aic = 0.0;
    std::string error;
};

struct AdfStep {
    std::size_t d = 0;
    stats::AdfResult adf;
};

struct GridSearchResult {
    ArimaModel model;
    std::vector<AdfStep> adf_trail;
    std::vector<CandidateFit> candidates;
    std::vector<std::string> failures;
};

/**
 * Picks d as the smallest order whose differenced series the ADF test deems
 * stationary (falls back to d_max), then scans every (p,q) at that d and keeps
 * the minimum-AIC fit. AIC ties go to smaller p+q, then smaller p.
 */
inline GridSearchResult grid_search(std::span<const double> train, const GridSearchOptions& opts = {}) {
    GridSearchResult out;
    std::size_t chosen_d = opts.d_max;
    for (std::size_t d = 0; d <= opts.d_max; ++d) {
        const auto diffed = stats::difference(train, d);
        AdfStep step{d, stats::adf_test(diffed, opts.adf_max_lag)};
        out.adf_trail.push_back(step);
        if (step.adf.reject_null) {
            chosen_d = d;
            break;
        }
    }

    std::vector<ArimaOrder> orders;
    for (std::size_t p = 0; p <= opts.p_max; ++p)
        for (std::size_t q = 0; q <= opts.q_max; ++q) orders.push_back({p, chosen_d, q});

    ArimaFitOptions fit_opts;
    fit_opts.include_intercept = opts.include_intercept;
    fit_opts.allow_pure_difference = true;
    fit_opts.optimizer = opts.optimizer;

    struct Outcome {
        std::optional<ArimaModel> model;
        std::string error;
    };
    auto run = [&](const ArimaOrder& order) {
        Outcome o;
        try {
            o.model = fit_arima(train, order, fit_opts);
        } catch (const Error& e) {
            o.error = e.what();
        }
        return o;
    };

    std::vector<Outcome> outcomes(orders.size());
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    for (std::size_t begin = 0; begin < orders.size(); begin += workers) {
        const std::size_t end = std::min(orders.size(), begin + workers);
        if (workers == 1) {
            outcomes[begin] = run(orders[begin]);
            continue;
        }
        std::vector<std::future<Outcome>> futures;
        for (std::size_t i = begin; i < end; ++i) futures.push_back(std::async(std::launch::async, run, orders[i]));
        for (std::size_t i = begin; i < end; ++i) outcomes[i] = futures[i - begin].get();
    }

    std::optional<std::size_t> best;
    auto better = [&](const ArimaModel& a, const ArimaModel& b) {
        if (a.aic != b.aic) return a.aic < b.aic;
        const auto sa = a.order.p + a.order.q, sb = b.order.p + b.order.q;
        if (sa != sb) return sa < sb;
        return a.order.p < b.order.p;
    };
    for (std::size_t i = 0; i < orders.size(); ++i) {
        CandidateFit c{orders[i], outcomes[i].model.has_value(), 0.0, outcomes[i].error};
        if (c.ok) {
            c.aic = outcomes[i].model->aic;
            if (!best || better(*outcomes[i].model, *outcomes[*best].model)) best = i;
        } else {
            out.failures.push_back("ARIMA" + orders[i].to_string() + ": " + c.error);
        }
        out.candidates.push_back(std::move(c));
    }
    if (!best) throw SearchError("every ARIMA candidate failed", out.failures);
    out.model = std::move(*outcomes[*best].model);
    return out;
}

struct RollingOptions {
    /// Refit coefficients every k steps on the extended history; 0 keeps them fixed.
    std::size_t refit_every = 0;
    ArimaFitOptions fit{};
};

/**
 * One-step-ahead forecasts over `test`, appending each realized value to the
 * history before the next step. Innovations are updated from realized errors.
 * Explosive AR or non-invertible MA polynomials are reflected before use.
 * Predictions are in price units.
 */
inline std::vector<double> rolling_forecast(const ArimaModel& model, std::span<const double> train,
                                            std::span<const double> test, const RollingOptions& opts = {}) {
    if (test.empty()) throw InputError("rolling forecast needs a non-empty test range");
    const std::size_t d = model.order.d;
    if (train.size() <= d) throw SizeError("training history shorter than differencing order");

    auto stable_coeffs = [](const ArimaModel& m) {
        std::vector<double> ar = m.ar_coeffs, ma = m.ma_coeffs;
        if (!roots_outside_unit_circle(ar_polynomial(ar))) {
            auto poly = reflect_into_stable_region(ar_polynomial(ar));
            for (std::size_t i = 0; i < ar.size(); ++i) ar[i] = -poly[i + 1];
        }
        if (!roots_outside_unit_circle(ma_polynomial(ma))) {
            auto poly = reflect_into_stable_region(ma_polynomial(ma));
            for (std::size_t i = 0; i < ma.size(); ++i) ma[i] = poly[i + 1];
        }
        return std::pair{ar, ma};
    };

    ArimaModel current = model;
    auto [ar, ma] = stable_coeffs(current);

    std::vector<double> levels(train.begin(), train.end());
    std::vector<double> y = stats::difference(levels, d);
    std::vector<double> e = current.residuals;
    e.resize(y.size(), 0.0);

    std::vector<double> predictions;
    predictions.reserve(test.size());
    for (std::size_t step = 0; step < test.size(); ++step) {
        if (opts.refit_every > 0 && step > 0 && step % opts.refit_every == 0) {
            auto fit_opts = opts.fit;
            fit_opts.include_intercept = current.has_intercept;
            current = fit_arima(levels, current.order, fit_opts);
            std::tie(ar, ma) = stable_coeffs(current);
            e = current.residuals;
        }

        double yhat = current.has_intercept ? current.intercept : 0.0;
        for (std::size_t i = 1; i <= ar.size() && i <= y.size(); ++i) yhat += ar[i - 1] * y[y.size() - i];
        for (std::size_t j = 1; j <= ma.size() && j <= e.size(); ++j) yhat += ma[j - 1] * e[e.size() - j];

        const std::size_t n = levels.size();
        double xhat = 0.0;
        double yactual = 0.0;
        const double actual = test[step];
        switch (d) {
            case 0:
                xhat = yhat;
                yactual = actual;
                break;
            case 1:
                xhat = levels[n - 1] + yhat;
                yactual = actual - levels[n - 1];
                break;
            default:
                xhat = (2.0 * levels[n - 1] - levels[n - 2]) + yhat;
                yactual = actual - 2.0 * levels[n - 1] + levels[n - 2];
                break;
        }
        predictions.push_back(xhat);
        levels.push_back(actual);
        y.push_back(yactual);
        e.push_back(yactual - yhat);
    }
    return predictions;
}

inline std::vector<double> rolling_forecast(const ArimaModel& model, const PriceSeries& train, const PriceSeries& test,
                                            const RollingOptions& opts = {}) {
    return rolling_forecast(model, std::span<const double>(train.values()), std::span<const double>(test.values()),
                            opts);
}

/// Human-readable model summary; the ADF trail is printed when given.
inline std::string model_summary(const ArimaModel& m, std::span<const AdfStep> trail = {}) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::string s = "ARIMA" + m.order.to_string() + "\n";
    for (const auto& step : trail)
        s += "  adf d=" + std::to_string(step.d) + ": statistic=" + fmt(step.adf.statistic) +
             " p=" + fmt(step.adf.p_value) + " lags=" + std::to_string(step.adf.lags_used) +
             (step.adf.reject_null ? " -> stationary\n" : " -> unit root not rejected\n");
    s += "  intercept: " + (m.has_intercept ? fmt(m.intercept) : std::string("none")) + "\n";
    for (std::size_t i = 0; i < m.ar_coeffs.size(); ++i) s += "  ar[" + std::to_string(i + 1) + "]: " + fmt(m.ar_coeffs[i]) + "\n";
    for (std::size_t i = 0; i < m.ma_coeffs.size(); ++i) s += "  ma[" + std::to_string(i + 1) + "]: " + fmt(m.ma_coeffs[i]) + "\n";
    s += "  sigma2: " + fmt(m.sigma2) + "\n";
    s += "  aic: " + fmt(m.aic) + "\n";
    s += "  n_eff: " + std::to_string(m.n_eff) + "\n";
    for (const auto& w : m.warnings) s += "  warning: " + w + "\n";
    return s;
}

/// CSV `index,residual` over the differenced series.
inline std::string residuals_csv(const ArimaModel& m) {
    std::string out = "index,residual\n";
    for (std::size_t i = 0; i < m.residuals.size(); ++i)
        out += std::to_string(i) + ',' + tsf::detail::format_double(m.residuals[i]) + '\n';
    return out;
}

}  // namespace tsf::arima
