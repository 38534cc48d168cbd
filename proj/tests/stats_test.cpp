#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tsf/core/synthetic.hpp"
#include "tsf/stats/adf.hpp"
#include "tsf/stats/correlogram.hpp"
#include "tsf/stats/differencing.hpp"

using namespace tsf;
using namespace tsf::stats;

TEST(Difference, Examples) {
    EXPECT_EQ(difference(std::vector<double>{1, 3, 6}, 1), (std::vector<double>{2, 3}));
    EXPECT_EQ(difference(std::vector<double>{1, 3, 6, 10}, 2), (std::vector<double>{1, 1}));
    const std::vector<double> v{4, -1, 7};
    EXPECT_EQ(difference(v, 0), v);
    EXPECT_THROW(difference(std::vector<double>{1, 2}, 2), SizeError);
}

TEST(Undifference, Examples) {
    EXPECT_EQ(undifference(std::vector<double>{2, 3}, std::vector<double>{1}), (std::vector<double>{1, 3, 6}));
    EXPECT_EQ(undifference(std::vector<double>{}, std::vector<double>{5}), (std::vector<double>{5}));
    EXPECT_THROW(undifference(std::vector<double>{1}, std::vector<double>{}), InputError);
    EXPECT_THROW(undifference(std::vector<double>{1}, std::vector<double>{1}, 2), InputError);
}

TEST(DifferenceProperty, RoundTripIsIdentity) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 2;
        const std::size_t n = d + 1 + rng() % 60;
        auto v = testkit::random_vector(n, rng, -50, 50);
        auto back = undifference(difference(v, d), difference_heads(v, d), d);
        ASSERT_EQ(back.size(), v.size());
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], v[i], 1e-9);
    }
}

TEST(Acf, LagZeroIsOne) {
    auto v = synthetic::random_walk(300, 2);
    EXPECT_DOUBLE_EQ(acf(v, 5).coefficients[0], 1.0);
}

TEST(Acf, MatchesDirectBiasedFormula) {
    std::mt19937_64 rng(8);
    auto v = testkit::random_vector(57, rng);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    auto gamma = [&](std::size_t h) {
        double s = 0;
        for (std::size_t t = h; t < v.size(); ++t) s += (v[t] - mean) * (v[t - h] - mean);
        return s / v.size();
    };
    auto r = acf(v, 10);
    ASSERT_EQ(r.lags.size(), 11u);
    for (std::size_t h = 0; h <= 10; ++h) EXPECT_NEAR(r.coefficients[h], gamma(h) / gamma(0), 1e-12);
    EXPECT_DOUBLE_EQ(r.confidence_band, 1.96 / std::sqrt(57.0));
}

TEST(Acf, WhiteNoiseIsSmall) {
    auto v = synthetic::white_noise(10000, 42);
    auto r = acf(v, 10);
    for (std::size_t h = 1; h <= 10; ++h) EXPECT_LT(std::abs(r.coefficients[h]), 0.05) << h;
}

TEST(Acf, Ar1LagOne) {
    auto v = testkit::simulate_arma({0.7}, {}, 10000, 4);
    EXPECT_NEAR(acf(v, 3).coefficients[1], 0.7, 0.03);
}

TEST(Acf, Errors) {
    EXPECT_THROW(acf(std::vector<double>(10, 3.0), 2), DegenerateInputError);
    EXPECT_THROW(acf(std::vector<double>{1, 2, 3}, 3), SizeError);
}

TEST(Pacf, LagOneEqualsAcf) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = testkit::random_vector(40 + trial, rng);
        EXPECT_NEAR(pacf(v, 4).coefficients[0], acf(v, 4).coefficients[1], 1e-12);
    }
}

TEST(Pacf, MatchesRegressionOracle) {
    // PACF(h) is the last coefficient of the order-h Yule-Walker system, solved here by Gaussian elimination.
    auto v = testkit::simulate_arma({0.5, -0.2}, {0.3}, 500, 12);
    const std::size_t K = 6;
    auto rho = acf(v, K).coefficients;
    auto p = pacf(v, K).coefficients;
    for (std::size_t h = 1; h <= K; ++h) {
        std::vector<std::vector<double>> A(h, std::vector<double>(h + 1));
        for (std::size_t i = 0; i < h; ++i) {
            for (std::size_t j = 0; j < h; ++j) A[i][j] = rho[i > j ? i - j : j - i];
            A[i][h] = rho[i + 1];
        }
        for (std::size_t c = 0; c < h; ++c)
            for (std::size_t r = c + 1; r < h; ++r) {
                const double f = A[r][c] / A[c][c];
                for (std::size_t k = c; k <= h; ++k) A[r][k] -= f * A[c][k];
            }
        std::vector<double> x(h);
        for (std::size_t r = h; r-- > 0;) {
            double s = A[r][h];
            for (std::size_t k = r + 1; k < h; ++k) s -= A[r][k] * x[k];
            x[r] = s / A[r][r];
        }
        EXPECT_NEAR(p[h - 1], x[h - 1], 1e-10) << h;
    }
}

TEST(Pacf, Ar1CutsOff) {
    auto v = testkit::simulate_arma({0.7}, {}, 10000, 5);
    auto p = pacf(v, 10).coefficients;
    EXPECT_NEAR(p[0], 0.7, 0.03);
    for (std::size_t h = 2; h <= 10; ++h) EXPECT_LT(std::abs(p[h - 1]), 0.05) << h;
}

TEST(Pacf, Ma1DualityPattern) {
    auto v = testkit::simulate_arma({}, {0.5}, 10000, 6);
    auto a = acf(v, 6).coefficients;
    auto p = pacf(v, 6).coefficients;
    // acf cuts off after lag 1 (theoretical rho1 = 0.4)
    EXPECT_NEAR(a[1], 0.4, 0.03);
    for (std::size_t h = 2; h <= 6; ++h) EXPECT_LT(std::abs(a[h]), 0.05);
    // pacf alternates in sign and decays in magnitude over the first lags
    EXPECT_LT(p[1], -0.1);
    EXPECT_GT(p[2], 0.05);
    EXPECT_GT(std::abs(p[0]), std::abs(p[1]));
    EXPECT_GT(std::abs(p[1]), std::abs(p[2]));
}

TEST(CorrelogramProperty, CoefficientsWithinUnitInterval) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = testkit::cumulative_sum(testkit::random_vector(30 + rng() % 200, rng));
        const std::size_t k = 1 + rng() % 20;
        for (double c : acf(v, k).coefficients) EXPECT_LE(std::abs(c), 1.0 + 1e-12);
        for (double c : pacf(v, k).coefficients) EXPECT_LE(std::abs(c), 1.0 + 1e-12);
    }
}

TEST(CorrelogramCsv, Layout) {
    auto csv = correlogram_csv(acf(std::vector<double>{1, 2, 0, 3, 1}, 1));
    EXPECT_EQ(csv.rfind("lag,coefficient,band\n0,1,", 0), 0u);
}

TEST(Adf, SchwertRule) {
    EXPECT_EQ(schwert_max_lag(100), 12u);
    EXPECT_EQ(schwert_max_lag(2000), 25u);
}

TEST(Adf, AsymptoticCriticalValues) {
    EXPECT_NEAR(adf_critical_value(1000000, 0.05), -2.86, 0.01);
    EXPECT_NEAR(adf_critical_value(1000000, 0.01), -3.43, 0.01);
    EXPECT_NEAR(adf_critical_value(1000000, 0.10), -2.57, 0.01);
    EXPECT_NEAR(adf_p_value(adf_critical_value(500, 0.05), 500), 0.05, 1e-12);
}

TEST(Adf, StatisticMatchesSimpleRegressionOracle) {
    // With zero augmentation lags, tau is the t-ratio of b in dx_t = a + b x_{t-1}.
    auto x = synthetic::random_walk(400, 3);
    const std::size_t m = x.size() - 1;
    double sx = 0, sy = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        sx += x[t - 1];
        sy += x[t] - x[t - 1];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        sxx += (x[t - 1] - mx) * (x[t - 1] - mx);
        sxy += (x[t - 1] - mx) * (x[t] - x[t - 1] - my);
    }
    const double b = sxy / sxx, a = my - b * mx;
    double sse = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double e = x[t] - x[t - 1] - a - b * x[t - 1];
        sse += e * e;
    }
    const double tau = b / std::sqrt(sse / (m - 2) / sxx);
    auto r = adf_test(x, 0);
    EXPECT_NEAR(r.statistic, tau, 1e-9 * std::abs(tau));
    EXPECT_EQ(r.lags_used, 0u);
}

TEST(Adf, RandomWalkNotRejected) {
    auto r = adf_test(synthetic::random_walk(2000, 10));
    EXPECT_FALSE(r.reject_null) << r.statistic;
}

TEST(Adf, WhiteNoiseRejected) {
    auto r = adf_test(synthetic::white_noise(2000, 10));
    EXPECT_TRUE(r.reject_null) << r.statistic;
}

TEST(Adf, DifferencedRandomWalkRejected) {
    auto rw = synthetic::random_walk(2000, 10);
    EXPECT_TRUE(adf_test(difference(rw, 1)).reject_null);
}

TEST(Adf, Errors) {
    EXPECT_THROW(adf_test(std::vector<double>(10, 1.0)), SizeError);
    EXPECT_THROW(adf_test(std::vector<double>(200, 1.0), 2), DegenerateInputError);
}

TEST(AdfProperty, DecisionRuleIsPValueBelowFivePercent) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto v = testkit::simulate_arma({0.9 + 0.0025 * seed}, {}, 300, seed);
        auto r = adf_test(v);
        EXPECT_EQ(r.reject_null, r.p_value < 0.05) << seed;
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
    }
}

TEST(AdfProperty, PValueMonotoneInStatistic) {
    double prev = 0.0;
    for (double s = -6.0; s <= 2.0; s += 0.05) {
        const double p = adf_p_value(s, 1000);
        EXPECT_GE(p, prev);
        prev = p;
    }
}
