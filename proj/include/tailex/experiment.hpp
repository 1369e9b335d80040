#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tailex/aggregation.hpp"
#include "tailex/estimators.hpp"
#include "tailex/generators.hpp"
#include "tailex/heavy_tail.hpp"
#include "tailex/network.hpp"

namespace tailex {

/// Column tail landscape as configured: d dominating columns at k1 with the
/// listed thetas, the rest at k. columns = 0 sizes the matrix to the row cap.
struct ProfileConfig {
    double k1 = 1.0;
    double k = 3.0;
    std::vector<double> dominating_thetas{0.5};
    std::size_t columns = 0;
    double nondominating_theta = 1.0;
};

struct NetworkConfig {
    std::size_t n_roots = 10000;
    double damping = 0.85;
    std::vector<CommunitySpec> communities;
    RowLengthLaw attachment{1.5, 0, 1};
    PersonalizationLaw personalization{};
    bool force_all_dominating = true;
    bool overlap_alias = true;
};

/// One experiment: scenario geometry, Monte Carlo budget, estimator knobs,
/// and the optional network block. Everything an emitted number depends on
/// lives here or in the seed.
struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind scenario = ScenarioKind::independent;
    std::size_t n = 100000;
    std::size_t replicates = 20;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    ProfileConfig profile;
    double chi = 0.0;            // absolute row-cap exponent; 0 defers to chi_fraction
    double chi_fraction = 0.4;   // fraction of chi_upper_bound(k1, k)
    double row_length_alpha = 6.0;
    std::vector<double> weights;    // dominating-column weights; empty = all ones
    double weight_fill = 1.0;       // weight given to the remaining columns
    std::vector<double> y_grid{0.5, 1.0, 2.0};
    double threshold_quantile = 0.95;
    std::size_t hill_m = 0;  // 0 = floor(sqrt(n))

    /// Replicate-level random dominating-column count (non-existence probes).
    DominatingCountLaw random_d;
    bool has_random_d = false;

    NetworkConfig network;
    bool has_network = false;

    double resolved_chi() const;
    /// Columns the matrix actually carries: profile.columns, or the row cap.
    std::size_t column_budget() const;
    /// Full weight vector over the column budget.
    WeightVector resolved_weights() const;
    TailProfile resolved_profile() const;
    /// Profile with the dominating block truncated to d columns.
    TailProfile resolved_profile(std::size_t d) const;
    RowLengthLaw resolved_row_lengths() const;

    void validate() const;
};

ScenarioConfig config_from_yaml_string(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Stable hash of every semantically relevant config field.
std::uint64_t config_fingerprint(const ScenarioConfig& cfg);

/// out_dir/name_fingerprint; every stage derives its file names from this.
std::string artifact_stem(const ScenarioConfig& cfg);

/// Dominating-column count per replicate: the configured count, or one draw
/// per replicate under random_d.
std::vector<std::size_t> replicate_dominating_counts(const ScenarioConfig& cfg);

/// One checked claim. kind selects the pass rule:
///   abs_diff  |estimate - predicted| <= tolerance
///   at_least  estimate >= predicted
///   at_most   estimate <= predicted
struct Verdict {
    std::string claim;
    std::string kind = "abs_diff";
    double predicted = 0.0;
    double estimate = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

/// Per-replicate estimator row for the CSV table.
struct ReplicateSummary {
    std::string series;  // "sum" or "max"
    std::size_t replicate = 0;
    double k_hat = 0.0;
    double theta_intervals = 0.0;
    double theta_blocks = 0.0;
};

struct VerdictReport {
    std::string scenario_name;
    std::string fingerprint_hex;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t replicates = 0;
    double runtime_seconds = 0.0;  // informational only; never serialized
    std::vector<Verdict> verdicts;
    std::vector<ReplicateSummary> table;
    std::vector<HillPlotPoint> hill_sum;  // replicate 0 diagnostics
    std::vector<HillPlotPoint> hill_max;

    bool all_pass() const;
};

/// Aggregation-side claims: tail-index inheritance, extremal-index
/// predictions, stationarity and overshadowing checks as the scenario
/// warrants. Validates the config (including the domination screen)
/// before generating anything.
VerdictReport run_theorem_pipeline(const ScenarioConfig& cfg);

/// Graph-side claims on the root score sequences; requires the network block.
VerdictReport run_network_pipeline(const ScenarioConfig& cfg);

std::string report_to_json(const VerdictReport& report, int indent = 2);

/// Writes the requested formats ("json" and/or "csv") under cfg.out_dir,
/// names derived from the scenario name and config fingerprint. Returns the
/// paths written.
std::vector<std::string> emit_report(const VerdictReport& report, const ScenarioConfig& cfg,
                                     const std::vector<std::string>& formats);

}  // namespace tailex
