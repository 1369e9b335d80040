#include "tailex/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tailex/errors.hpp"
#include "tailex/heavy_tail.hpp"
#include "tailex/rng.hpp"

namespace tailex {

double empirical_quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw std::domain_error("empirical_quantile: empty sample");
    if (!(q >= 0.0) || !(q <= 1.0))
        throw std::domain_error("empirical_quantile: q must lie in [0, 1]");
    std::sort(sample.begin(), sample.end());
    const double pos = q * static_cast<double>(sample.size());
    std::size_t idx = pos <= 1.0 ? 0 : static_cast<std::size_t>(std::ceil(pos)) - 1;
    idx = std::min(idx, sample.size() - 1);
    return sample[idx];
}

double hill_estimate(const std::vector<double>& sample, std::size_t m) {
    const std::size_t n = sample.size();
    if (m < 1 || m >= n)
        throw EstimationError("hill_estimate: need 1 <= m < n, got m=" + std::to_string(m) +
                              " n=" + std::to_string(n));
    std::vector<double> top(sample);
    std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(m + 1), top.end(),
                      std::greater<>());
    const double pivot = top[m];  // X_(m+1)
    if (!(pivot > 0.0))
        throw EstimationError("hill_estimate: order statistic X_(m+1) is not positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::log(top[i] / pivot);
    if (sum <= 0.0)
        throw EstimationError("hill_estimate: top order statistics are tied, estimate undefined");
    return static_cast<double>(m) / sum;
}

std::vector<HillPlotPoint> hill_plot(const std::vector<double>& sample,
                                     const std::vector<std::size_t>& m_grid) {
    std::vector<HillPlotPoint> points;
    points.reserve(m_grid.size());
    for (std::size_t m : m_grid) points.push_back({m, hill_estimate(sample, m)});
    return points;
}

std::vector<std::size_t> default_m_grid(std::size_t n) {
    if (n < 3) throw std::domain_error("default_m_grid: sample too small");
    const std::size_t lo = std::min<std::size_t>(5, n - 2);
    const std::size_t hi = std::max(lo + 1, n / 4);
    const double log_lo = std::log(static_cast<double>(lo));
    const double log_hi = std::log(static_cast<double>(hi));
    std::vector<std::size_t> grid;
    const int points = 25;
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        auto m = static_cast<std::size_t>(std::lround(std::exp(log_lo + t * (log_hi - log_lo))));
        m = std::min(std::max<std::size_t>(m, 1), n - 1);
        if (grid.empty() || grid.back() != m) grid.push_back(m);
    }
    return grid;
}

void write_hill_plot_csv(const std::vector<HillPlotPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "m,k_hat\n";
    char buf[32];
    for (const auto& p : points) {
        auto res = std::to_chars(buf, buf + sizeof buf, p.k_hat);
        out << p.m << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::size_t> exceedance_positions(const std::vector<double>& series, double u) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] > u) pos.push_back(i);
    return pos;
}

ThetaEstimate clamp_theta(double raw, std::size_t exceedances) {
    ThetaEstimate est;
    est.raw = raw;
    est.value = std::min(1.0, std::max(0.0, raw));
    est.exceedances = exceedances;
    return est;
}

}  // namespace

ThetaEstimate intervals_theta(const std::vector<double>& series, double u) {
    const auto pos = exceedance_positions(series, u);
    const std::size_t count = pos.size();
    if (count < 2)
        throw EstimationError("intervals_theta: need >= 2 exceedances, found " +
                              std::to_string(count));
    std::vector<double> gaps(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i)
        gaps[i] = static_cast<double>(pos[i + 1] - pos[i]);

    const double max_gap = *std::max_element(gaps.begin(), gaps.end());
    double raw;
    if (max_gap <= 2.0) {
        double s1 = 0.0, s2 = 0.0;
        for (double t : gaps) {
            s1 += t;
            s2 += t * t;
        }
        raw = 2.0 * s1 * s1 / (static_cast<double>(count - 1) * s2);
    } else {
        double s1 = 0.0, s2 = 0.0;
        for (double t : gaps) {
            s1 += t - 1.0;
            s2 += (t - 1.0) * (t - 2.0);
        }
        raw = 2.0 * s1 * s1 / (static_cast<double>(count - 1) * s2);
    }
    return clamp_theta(raw, count);
}

ThetaEstimate blocks_theta(const std::vector<double>& series, double u, std::size_t block_len) {
    const std::size_t n = series.size();
    if (block_len < 1 || block_len > n)
        throw ConfigError("blocks_theta: need 1 <= block_len <= n");
    std::size_t exceedances = 0, hit_blocks = 0;
    for (std::size_t start = 0; start < n; start += block_len) {
        const std::size_t stop = std::min(start + block_len, n);
        bool hit = false;
        for (std::size_t i = start; i < stop; ++i) {
            if (series[i] > u) {
                ++exceedances;
                hit = true;
            }
        }
        hit_blocks += hit;
    }
    if (exceedances == 0)
        throw EstimationError("blocks_theta: no exceedances above the threshold");
    return clamp_theta(static_cast<double>(hit_blocks) / static_cast<double>(exceedances),
                       exceedances);
}

Definition1Result definition1_from_counts(std::size_t zero_exceedance_replicates,
                                          double total_exceedances, std::size_t replicates,
                                          std::size_t n, double k1, double y) {
    if (replicates < 100)
        throw ConfigError("definition1: need >= 100 replicates, got " +
                          std::to_string(replicates));
    Definition1Result res;
    res.replicates = replicates;
    res.n = n;
    res.y = y;
    res.u = threshold_u(n, ThresholdSequence{y, k1});
    res.p_hat = static_cast<double>(zero_exceedance_replicates) / static_cast<double>(replicates);
    res.tau_hat = total_exceedances / static_cast<double>(replicates);
    if (res.tau_hat == 0.0)
        throw EstimationError("definition1: no exceedances anywhere, threshold too high");
    if (res.p_hat == 0.0)
        throw EstimationError("definition1: every replicate exceeds, threshold too low");
    res.theta_raw = -std::log(res.p_hat) / res.tau_hat;
    res.theta = std::min(1.0, std::max(0.0, res.theta_raw));
    return res;
}

Definition1Result definition1_theta(const std::vector<std::vector<double>>& replicate_series,
                                    double k1, double y) {
    if (replicate_series.empty()) throw ConfigError("definition1: no replicates");
    const std::size_t n = replicate_series.front().size();
    if (n == 0) throw ConfigError("definition1: empty replicate series");
    const double u = threshold_u(n, ThresholdSequence{y, k1});
    std::size_t below = 0;
    double total = 0.0;
    for (const auto& series : replicate_series) {
        if (series.size() != n)
            throw ConfigError("definition1: replicates must share one length");
        std::size_t count = 0;
        for (double x : series) count += x > u;
        below += count == 0;
        total += static_cast<double>(count);
    }
    return definition1_from_counts(below, total, replicate_series.size(), n, k1, y);
}

namespace {

// Asymptotic two-sided KS tail probability Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double ks_tail_probability(double lambda) {
    const double a2 = -2.0 * lambda * lambda;
    double fac = 2.0, sum = 0.0, prev_term = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = fac * std::exp(a2 * static_cast<double>(j) * static_cast<double>(j));
        sum += term;
        if (std::abs(term) <= 0.001 * prev_term || std::abs(term) <= 1e-8 * std::abs(sum))
            return std::min(1.0, std::max(0.0, sum));
        fac = -fac;
        prev_term = std::abs(term);
    }
    return 1.0;  // series failed to converge: no evidence against the null
}

}  // namespace

KsReport ks_two_sample(std::vector<double> first, std::vector<double> second) {
    if (first.empty() || second.empty())
        throw std::domain_error("ks_two_sample: both samples must be nonempty");
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    const auto n1 = static_cast<double>(first.size());
    const auto n2 = static_cast<double>(second.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < first.size() && j < second.size()) {
        // Evaluate both empirical CDFs exactly at the next merged value, so
        // tied runs of unequal multiplicity do not inflate the statistic.
        const double x = std::min(first[i], second[j]);
        while (i < first.size() && first[i] <= x) ++i;
        while (j < second.size() && second[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }
    KsReport report;
    report.statistic = d;
    report.n_first = first.size();
    report.n_second = second.size();
    const double ne = n1 * n2 / (n1 + n2);
    const double sqrt_ne = std::sqrt(ne);
    report.p_value = ks_tail_probability((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
    report.reject = report.p_value < 0.01;
    return report;
}

KsReport stationarity_diagnostic(const std::vector<double>& series) {
    if (series.size() < 100)
        throw ConfigError("stationarity_diagnostic: need at least 100 observations");
    std::vector<double> odd, even;
    odd.reserve((series.size() + 1) / 2);
    even.reserve(series.size() / 2);
    for (std::size_t i = 0; i < series.size(); ++i)
        (i % 2 == 0 ? odd : even).push_back(series[i]);  // 1-based odd first
    return ks_two_sample(std::move(odd), std::move(even));
}

BootstrapCi block_bootstrap_ci(const std::vector<double>& series, const SeriesStatistic& stat,
                               std::size_t resamples, double confidence, std::uint64_t seed,
                               std::size_t block_len) {
    const std::size_t n = series.size();
    if (n < 2) throw ConfigError("block_bootstrap_ci: series too short");
    if (resamples < 10) throw ConfigError("block_bootstrap_ci: need >= 10 resamples");
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw ConfigError("block_bootstrap_ci: confidence must lie in (0, 1)");
    if (block_len == 0)
        block_len = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    block_len = std::min(block_len, n);

    Rng rng(derive_seed(seed, {stream::kBootstrap}));
    std::vector<double> stats;
    stats.reserve(resamples);
    std::vector<double> resample(n);
    const std::size_t blocks = (n + block_len - 1) / block_len;
    for (std::size_t r = 0; r < resamples; ++r) {
        std::size_t filled = 0;
        for (std::size_t b = 0; b < blocks && filled < n; ++b) {
            const std::size_t start = rng.uniform_index(n);  // circular wrap
            for (std::size_t k = 0; k < block_len && filled < n; ++k)
                resample[filled++] = series[(start + k) % n];
        }
        try {
            stats.push_back(stat(resample));
        } catch (const EstimationError&) {
            // Statistic undefined on this resample (e.g. no exceedances); drop it.
        }
    }
    if (stats.size() < resamples / 2)
        throw EstimationError("block_bootstrap_ci: statistic undefined on most resamples");
    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - confidence) / 2.0;
    auto pick = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        return stats[static_cast<std::size_t>(std::lround(pos))];
    };
    BootstrapCi ci;
    ci.lower = pick(alpha);
    ci.upper = pick(1.0 - alpha);
    ci.valid = stats.size();
    ci.resamples = resamples;
    return ci;
}

namespace {

BootstrapCi cover(BootstrapCi ci, double point) {
    ci.lower = std::min(ci.lower, point);
    ci.upper = std::max(ci.upper, point);
    return ci;
}

}  // namespace

EstimationReport estimate_series(const std::vector<double>& series,
                                 const EstimationOptions& opt) {
    const std::size_t n = series.size();
    if (n < 16) throw ConfigError("estimate_series: series too short");
    EstimationReport report;
    report.n = n;
    const std::size_t hill_m =
        opt.hill_m != 0
            ? opt.hill_m
            : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const std::size_t block_len =
        opt.block_len != 0
            ? opt.block_len
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    report.threshold = empirical_quantile(series, opt.threshold_quantile);
    report.block_count = (n + block_len - 1) / block_len;
    // The ratio version of the blocks estimator saturates once exceedances
    // outnumber blocks, so its threshold keeps the two counts comparable.
    const double blocks_quantile =
        std::max(opt.threshold_quantile, 1.0 - 1.0 / static_cast<double>(block_len));
    report.blocks_threshold = empirical_quantile(series, blocks_quantile);

    report.k_hat = hill_estimate(series, hill_m);
    report.theta_blocks = blocks_theta(series, report.blocks_threshold, block_len);
    report.theta_intervals = intervals_theta(series, report.threshold);
    report.exceedance_count = report.theta_intervals.exceedances;

    const auto resamples = opt.bootstrap_resamples;
    report.k_ci = cover(block_bootstrap_ci(
                            series, [&](const std::vector<double>& s) {
                                return hill_estimate(s, hill_m);
                            },
                            resamples, opt.confidence, derive_seed(opt.seed, {1}), block_len),
                        report.k_hat);
    // Threshold recomputed per resample: the quantile is part of the statistic.
    report.theta_blocks_ci =
        cover(block_bootstrap_ci(
                  series,
                  [&](const std::vector<double>& s) {
                      return blocks_theta(s, empirical_quantile(s, blocks_quantile), block_len)
                          .value;
                  },
                  resamples, opt.confidence, derive_seed(opt.seed, {2}), block_len),
              report.theta_blocks.value);
    report.theta_intervals_ci =
        cover(block_bootstrap_ci(
                  series,
                  [&](const std::vector<double>& s) {
                      return intervals_theta(s, empirical_quantile(s, opt.threshold_quantile))
                          .value;
                  },
                  resamples, opt.confidence, derive_seed(opt.seed, {3}), block_len),
              report.theta_intervals.value);
    return report;
}

std::string to_json_string(const EstimationReport& report, int indent) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["threshold"] = report.threshold;
    j["blocks_threshold"] = report.blocks_threshold;
    j["exceedance_count"] = report.exceedance_count;
    j["block_count"] = report.block_count;
    j["tail_index"] = {{"estimate", report.k_hat},
                       {"ci_lower", report.k_ci.lower},
                       {"ci_upper", report.k_ci.upper}};
    j["theta_blocks"] = {{"estimate", report.theta_blocks.value},
                         {"raw", report.theta_blocks.raw},
                         {"ci_lower", report.theta_blocks_ci.lower},
                         {"ci_upper", report.theta_blocks_ci.upper}};
    j["theta_intervals"] = {{"estimate", report.theta_intervals.value},
                            {"raw", report.theta_intervals.raw},
                            {"ci_lower", report.theta_intervals_ci.lower},
                            {"ci_upper", report.theta_intervals_ci.upper}};
    return j.dump(indent);
}

}  // namespace tailex
