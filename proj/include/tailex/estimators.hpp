#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tailex {

/// Empirical quantile (sorted-order statistic at ceil(q * n)).
double empirical_quantile(std::vector<double> sample, double q);

/// Hill tail-index estimator on the m largest order statistics:
/// k = [ (1/m) sum log(X_(i) / X_(m+1)) ]^(-1), X_(1) >= X_(2) >= ...
double hill_estimate(const std::vector<double>& sample, std::size_t m);

struct HillPlotPoint {
    std::size_t m = 0;
    double k_hat = 0.0;
};

/// Hill estimates across an m-grid; reviewers read the plateau off the plot.
std::vector<HillPlotPoint> hill_plot(const std::vector<double>& sample,
                                     const std::vector<std::size_t>& m_grid);

/// Roughly log-spaced grid between 5 and n/4, deduplicated.
std::vector<std::size_t> default_m_grid(std::size_t n);

void write_hill_plot_csv(const std::vector<HillPlotPoint>& points, const std::string& path);

/// Extremal-index estimate; raw keeps the pre-clamp value for diagnostics.
struct ThetaEstimate {
    double value = 0.0;  // clamped to [0, 1]
    double raw = 0.0;
    std::size_t exceedances = 0;
};

/// Interexceedance-time estimator. With maximal gap <= 2 the uncorrected
/// moment ratio is used, otherwise the shifted variant:
///   2 (sum T_i)^2 / ((N-1) sum T_i^2)            if max T <= 2
///   2 (sum (T_i-1))^2 / ((N-1) sum (T_i-1)(T_i-2)) otherwise
ThetaEstimate intervals_theta(const std::vector<double>& series, double u);

/// Blocks estimator: blocks containing an exceedance over total exceedances.
ThetaEstimate blocks_theta(const std::vector<double>& series, double u, std::size_t block_len);

/// Direct check of the limiting relation P{M_n <= u_n} = exp(-tau theta):
/// p_hat from the replicate maxima, tau_hat from the mean exceedance count.
struct Definition1Result {
    double theta = 0.0;  // clamped
    double theta_raw = 0.0;
    double p_hat = 0.0;
    double tau_hat = 0.0;
    double u = 0.0;
    double y = 0.0;
    std::size_t replicates = 0;
    std::size_t n = 0;
};

Definition1Result definition1_from_counts(std::size_t zero_exceedance_replicates,
                                          double total_exceedances, std::size_t replicates,
                                          std::size_t n, double k1, double y);

Definition1Result definition1_theta(const std::vector<std::vector<double>>& replicate_series,
                                    double k1, double y);

/// Two-sample Kolmogorov-Smirnov with the asymptotic tail probability.
struct KsReport {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;  // at level 0.01
    std::size_t n_first = 0;
    std::size_t n_second = 0;
};

KsReport ks_two_sample(std::vector<double> first, std::vector<double> second);

/// Compares odd-indexed against even-indexed subsequences; a stationary
/// series should not reject.
KsReport stationarity_diagnostic(const std::vector<double>& series);

/// Percentile confidence interval from a circular block bootstrap
/// (block length 0 means ceil(sqrt(n))). Resamples where the statistic is
/// undefined are dropped; fewer than half valid is an estimation error.
struct BootstrapCi {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t valid = 0;
    std::size_t resamples = 0;
};

using SeriesStatistic = std::function<double(const std::vector<double>&)>;

BootstrapCi block_bootstrap_ci(const std::vector<double>& series, const SeriesStatistic& stat,
                               std::size_t resamples, double confidence, std::uint64_t seed,
                               std::size_t block_len = 0);

struct EstimationOptions {
    std::size_t hill_m = 0;            // 0 = floor(sqrt(n))
    double threshold_quantile = 0.95;  // theta estimators exceed this level
    std::size_t block_len = 0;         // 0 = ceil(sqrt(n))
    std::size_t bootstrap_resamples = 200;
    double confidence = 0.95;
    std::uint64_t seed = 1;
};

/// One-stop summary for a single series. Bootstrap intervals are widened,
/// when needed, to contain the point estimate.
struct EstimationReport {
    std::size_t n = 0;
    double threshold = 0.0;         // hill / intervals level
    double blocks_threshold = 0.0;  // raised so exceedances roughly match blocks
    std::size_t exceedance_count = 0;
    std::size_t block_count = 0;
    double k_hat = 0.0;
    BootstrapCi k_ci{};
    ThetaEstimate theta_blocks{};
    BootstrapCi theta_blocks_ci{};
    ThetaEstimate theta_intervals{};
    BootstrapCi theta_intervals_ci{};
};

EstimationReport estimate_series(const std::vector<double>& series,
                                 const EstimationOptions& opt = {});

std::string to_json_string(const EstimationReport& report, int indent = 2);

}  // namespace tailex
