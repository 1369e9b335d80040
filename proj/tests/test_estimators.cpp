#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "tailex/errors.hpp"
#include "tailex/estimators.hpp"
#include "tailex/generators.hpp"
#include "tailex/heavy_tail.hpp"
#include "tailex/rng.hpp"

using namespace tailex;

TEST_CASE("hill estimate at the hand-computed sample") {
    // Order statistics e^2 >= e >= 1, m = 2: mean log ratio (2 + 1)/2, k = 2/3.
    const std::vector<double> sample{std::exp(1.0), 1.0, std::exp(2.0)};
    CHECK(hill_estimate(sample, 2) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("hill estimate is scale invariant and power equivariant") {
    auto xs = gen_iid_column(5000, ParetoLaw(1.3, 1.0), 101);
    const double base = hill_estimate(xs, 70);

    std::vector<double> scaled(xs), powered(xs);
    for (double& v : scaled) v *= 37.5;
    for (double& v : powered) v = std::pow(v, 2.5);
    CHECK(hill_estimate(scaled, 70) == doctest::Approx(base).epsilon(1e-12));
    CHECK(hill_estimate(powered, 70) == doctest::Approx(base / 2.5).epsilon(1e-9));
}

TEST_CASE("hill estimate recovers the Pareto index across replicates") {
    const std::size_t n = 100000;
    const auto m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    double mean = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        auto xs = gen_iid_column(n, ParetoLaw(1.5, 1.0), derive_seed(500, {static_cast<std::uint64_t>(r)}));
        const double k = hill_estimate(xs, m);
        CHECK(k > 1.0);
        CHECK(k < 2.0);
        mean += k;
    }
    mean /= reps;
    CHECK(mean > 1.4);
    CHECK(mean < 1.6);
}

TEST_CASE("hill estimate rejects degenerate inputs") {
    std::vector<double> ties(100, 3.0);
    CHECK_THROWS_AS(hill_estimate(ties, 10), EstimationError);
    std::vector<double> tiny{1.0, 2.0};
    CHECK_THROWS_AS(hill_estimate(tiny, 2), EstimationError);
    CHECK_THROWS_AS(hill_estimate(tiny, 0), EstimationError);
    std::vector<double> negative{-1.0, -2.0, -3.0};
    CHECK_THROWS_AS(hill_estimate(negative, 1), EstimationError);
}

TEST_CASE("hill plot covers the grid and stabilises near the true index") {
    auto xs = gen_iid_column(50000, ParetoLaw(2.0, 1.0), 911);
    auto grid = default_m_grid(xs.size());
    CHECK(grid.size() > 10);
    CHECK(grid.front() >= 1);
    CHECK(grid.back() < xs.size());
    auto points = hill_plot(xs, grid);
    REQUIRE(points.size() == grid.size());
    // Mid-grid estimates should hover around k = 2.
    const auto& mid = points[points.size() / 2];
    CHECK(mid.k_hat > 1.6);
    CHECK(mid.k_hat < 2.4);

    const std::string path = "test_hill_plot.csv";
    write_hill_plot_csv(points, path);
    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    in.close();
    std::remove(path.c_str());
    CHECK(lines == points.size() + 1);
}

TEST_CASE("empirical quantile picks order statistics") {
    std::vector<double> xs{5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(empirical_quantile(xs, 0.0) == 1.0);
    CHECK(empirical_quantile(xs, 0.2) == 1.0);
    CHECK(empirical_quantile(xs, 0.4) == 2.0);
    CHECK(empirical_quantile(xs, 1.0) == 5.0);
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), std::domain_error);
}

TEST_CASE("intervals estimator on a frozen clustered toy series") {
    // 8 runs of 4 consecutive exceedances starting every 50 steps: the gap
    // multiset is 24 ones and 7 forty-sevens, so the shifted-moment branch
    // gives 2 * 322^2 / (31 * 14490).
    std::vector<double> series(400, 0.0);
    for (int run = 0; run < 8; ++run)
        for (int k = 0; k < 4; ++k) series[10 + 50 * run + k] = 10.0;
    auto est = intervals_theta(series, 5.0);
    CHECK(est.exceedances == 32);
    CHECK(est.raw == doctest::Approx(2.0 * 322.0 * 322.0 / (31.0 * 14490.0)));
    CHECK(est.value == doctest::Approx(0.4616487).epsilon(1e-6));
}

TEST_CASE("intervals estimator clamps the small-gap branch") {
    // Exceedances every second step: all gaps are 2, raw ratio is exactly 2.
    std::vector<double> series(101, 0.0);
    for (std::size_t i = 0; i < series.size(); i += 2) series[i] = 9.0;
    auto est = intervals_theta(series, 5.0);
    CHECK(est.raw == doctest::Approx(2.0));
    CHECK(est.value == 1.0);
}

TEST_CASE("intervals estimator approaches one over the cluster length") {
    // Runs of 4 exceedances separated by geometric gaps with mean 100.
    Rng rng(4242);
    std::vector<double> series;
    series.reserve(220000);
    for (int cluster = 0; cluster < 2000; ++cluster) {
        std::size_t gap = 1;
        while (rng.uniform01() > 0.01) ++gap;
        series.insert(series.end(), gap, 0.0);
        series.insert(series.end(), 4, 10.0);
    }
    auto est = intervals_theta(series, 5.0);
    CHECK(est.value > 0.2);
    CHECK(est.value < 0.3);
}

TEST_CASE("intervals estimator tracks the extremal index of stationary series") {
    auto iid = gen_armax_column(100000, 1.0, 1.0, 640);
    const double u_iid = empirical_quantile(iid, 0.95);
    auto est_iid = intervals_theta(iid, u_iid);
    CHECK(est_iid.value > 0.9);
    CHECK(est_iid.value <= 1.0);

    auto dep = gen_armax_column(100000, 1.0, 0.5, 641);
    const double u_dep = empirical_quantile(dep, 0.95);
    auto est_dep = intervals_theta(dep, u_dep);
    CHECK(est_dep.value > 0.4);
    CHECK(est_dep.value < 0.6);
}

TEST_CASE("intervals estimator needs two exceedances") {
    std::vector<double> series(50, 1.0);
    series[10] = 100.0;
    CHECK_THROWS_AS(intervals_theta(series, 50.0), EstimationError);
}

TEST_CASE("blocks estimator counts blocks against exceedances") {
    std::vector<double> isolated(100, 0.0);
    isolated[5] = 10.0;
    isolated[25] = 10.0;
    isolated[45] = 10.0;
    auto est = blocks_theta(isolated, 5.0, 10);
    CHECK(est.value == doctest::Approx(1.0));
    CHECK(est.exceedances == 3);

    std::vector<double> packed(100, 0.0);
    for (std::size_t i = 40; i < 44; ++i) packed[i] = 10.0;
    auto one_block = blocks_theta(packed, 5.0, 10);
    CHECK(one_block.value == doctest::Approx(0.25));

    CHECK_THROWS_AS(blocks_theta(std::vector<double>(50, 1.0), 5.0, 10), EstimationError);
    CHECK_THROWS_AS(blocks_theta(packed, 5.0, 0), ConfigError);
    CHECK_THROWS_AS(blocks_theta(packed, 5.0, 101), ConfigError);
}

TEST_CASE("blocks estimator tracks the armax extremal index") {
    const std::size_t n = 100000;
    auto xs = gen_armax_column(n, 1.0, 0.25, 642);
    const auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    // Exceedance count matched to the block count; the plain ratio saturates
    // when exceedances outnumber blocks.
    const double u = empirical_quantile(xs, 1.0 - 1.0 / static_cast<double>(b));
    auto est = blocks_theta(xs, u, b);
    CHECK(est.value > 0.15);
    CHECK(est.value < 0.35);
}

TEST_CASE("blocks and intervals estimators agree on stationary input") {
    auto xs = gen_armax_column(100000, 1.0, 0.5, 643);
    auto blocks = blocks_theta(xs, empirical_quantile(xs, 1.0 - 1.0 / 317.0), 317);
    auto intervals = intervals_theta(xs, empirical_quantile(xs, 0.95));
    CHECK(std::abs(blocks.value - intervals.value) <= 0.15);
}

TEST_CASE("definition-1 estimate is one for independent series") {
    std::vector<std::vector<double>> reps;
    reps.reserve(1000);
    for (std::size_t r = 0; r < 1000; ++r)
        reps.push_back(gen_iid_column(2000, ParetoLaw(1.0, 1.0), derive_seed(71, {r})));
    auto res = definition1_theta(reps, 1.0, 1.0);
    CHECK(res.tau_hat == doctest::Approx(1.0).epsilon(0.15));
    CHECK(res.p_hat == doctest::Approx(std::exp(-1.0)).epsilon(0.15));
    CHECK(res.theta_raw == doctest::Approx(1.0).epsilon(0.1));
    CHECK(res.theta > 0.85);
    CHECK(res.theta <= 1.0);
}

TEST_CASE("definition-1 estimate recovers the armax extremal index across levels") {
    std::vector<std::vector<double>> reps;
    reps.reserve(800);
    for (std::size_t r = 0; r < 800; ++r)
        reps.push_back(gen_armax_column(2000, 1.0, 0.5, derive_seed(72, {r})));
    for (double y : {0.8, 1.0, 1.5}) {
        auto res = definition1_theta(reps, 1.0, y);
        CHECK(res.theta > 0.4);
        CHECK(res.theta < 0.6);
    }
}

TEST_CASE("definition-1 error paths") {
    std::vector<std::vector<double>> tiny(50, std::vector<double>(100, 1.0));
    CHECK_THROWS_AS(definition1_theta(tiny, 1.0, 1.0), ConfigError);

    // Constant series never exceed u_n: threshold too high.
    std::vector<std::vector<double>> low(200, std::vector<double>(100, 1.0));
    CHECK_THROWS_AS(definition1_theta(low, 1.0, 1.0), EstimationError);

    // Every replicate exceeds: threshold too low.
    std::vector<std::vector<double>> high(200, std::vector<double>(100, 1e9));
    CHECK_THROWS_AS(definition1_theta(high, 1.0, 1.0), EstimationError);
}

TEST_CASE("ks statistic is zero for identical subsequences") {
    std::vector<double> series;
    for (int i = 0; i < 200; ++i) {
        const double v = 1.0 + 0.01 * i;
        series.push_back(v);
        series.push_back(v);
    }
    auto report = stationarity_diagnostic(series);
    CHECK(report.statistic == doctest::Approx(0.0));
    CHECK_FALSE(report.reject);
}

TEST_CASE("ks handles tied samples without inflating the statistic") {
    auto report = ks_two_sample({5.0}, {5.0, 5.0, 5.0});
    CHECK(report.statistic == doctest::Approx(0.0));
}

TEST_CASE("ks diagnostic rarely rejects stationary series") {
    int rejections = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        auto xs = gen_iid_column(2000, ParetoLaw(1.0, 1.0), derive_seed(73, {static_cast<std::uint64_t>(r)}));
        rejections += stationarity_diagnostic(xs).reject;
    }
    CHECK(rejections <= 10);  // nominal level 0.01, allow slack to 0.05
}

TEST_CASE("ks diagnostic detects alternating distributions") {
    Rng rng(74);
    std::vector<double> series;
    for (int i = 0; i < 5000; ++i) {
        const double x = pareto_quantile(rng.uniform01(), ParetoLaw(1.0, 1.0));
        series.push_back(i % 2 == 0 ? 2.0 * x : x);
    }
    auto report = stationarity_diagnostic(series);
    CHECK(report.reject);
    CHECK(report.p_value < 1e-6);
}

TEST_CASE("stationarity diagnostic needs at least 100 points") {
    std::vector<double> series(99, 1.0);
    CHECK_THROWS_AS(stationarity_diagnostic(series), ConfigError);
}

TEST_CASE("block bootstrap intervals are deterministic and ordered") {
    auto xs = gen_armax_column(5000, 1.5, 0.5, 75);
    auto stat = [](const std::vector<double>& s) { return hill_estimate(s, 70); };
    auto a = block_bootstrap_ci(xs, stat, 200, 0.95, 7);
    auto b = block_bootstrap_ci(xs, stat, 200, 0.95, 7);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
    CHECK(a.lower < a.upper);
    CHECK(a.valid == 200);
    // The interval should bracket the truth loosely on this sample size.
    CHECK(a.lower < 2.2);
    CHECK(a.upper > 1.0);
}

TEST_CASE("block bootstrap surfaces undefined statistics") {
    std::vector<double> flat(200, 1.0);
    auto stat = [](const std::vector<double>& s) {
        return intervals_theta(s, 10.0).value;  // never any exceedances
    };
    CHECK_THROWS_AS(block_bootstrap_ci(flat, stat, 50, 0.95, 1), EstimationError);
}

TEST_CASE("estimate_series composes a consistent report") {
    auto xs = gen_armax_column(20000, 1.0, 0.5, 76);
    EstimationOptions opt;
    opt.bootstrap_resamples = 60;
    opt.seed = 13;
    auto report = estimate_series(xs, opt);

    CHECK(report.n == 20000);
    CHECK(report.k_hat > 0.7);
    CHECK(report.k_hat < 1.4);
    CHECK(report.k_ci.lower <= report.k_hat);
    CHECK(report.k_ci.upper >= report.k_hat);
    CHECK(report.theta_blocks.value >= 0.0);
    CHECK(report.theta_blocks.value <= 1.0);
    CHECK(report.theta_blocks_ci.lower <= report.theta_blocks.value);
    CHECK(report.theta_blocks_ci.upper >= report.theta_blocks.value);
    CHECK(report.theta_intervals_ci.lower <= report.theta_intervals.value);
    CHECK(report.theta_intervals_ci.upper >= report.theta_intervals.value);
    CHECK(report.exceedance_count > 500);

    auto text = to_json_string(report);
    CHECK(text.find("\"tail_index\"") != std::string::npos);
    CHECK(text.find("\"theta_blocks\"") != std::string::npos);
    CHECK(text.find("\"theta_intervals\"") != std::string::npos);
    CHECK(text.find("\"ci_lower\"") != std::string::npos);
}
