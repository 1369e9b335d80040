#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tailex/generators.hpp"
#include "tailex/heavy_tail.hpp"

namespace tailex {

/// Positive bounded weights, one per column.
struct WeightVector {
    std::vector<double> z;

    /// All weights positive and at least `max_row_len` of them.
    void validate(std::size_t max_row_len) const;

    /// Constant weights, as used by the network application (all z_i = c).
    static WeightVector constant(double c, std::size_t count);
};

/// Row statistics of one matrix: weighted sums and weighted maxima.
struct AggregateSeries {
    std::vector<double> sums;    // z_1 Y_{n,1} + ... + z_{N_n} Y_{n,N_n} (+ Q_n)
    std::vector<double> maxima;  // max(z_1 Y_{n,1}, ..., z_{N_n} Y_{n,N_n}) (v Q_n)
    std::vector<double> weights;
    std::uint64_t source_fingerprint = 0;
};

/// Exact per-row aggregation. With include_q the personalization column
/// enters the sum additively and the max as a final v term.
AggregateSeries row_aggregate(const SeriesMatrix& m, const WeightVector& z,
                              bool include_q = false);

/// Serial reference for row_aggregate; bitwise-identical output.
AggregateSeries row_aggregate_serial(const SeriesMatrix& m, const WeightVector& z,
                                     bool include_q = false);

/// Prefix maxima M_n of a series; nondecreasing.
std::vector<double> running_maxima(const std::vector<double>& series);

/// Closed-form extremal index of the aggregate of d independent dominating
/// columns: theta(z) = sum theta_j z_j^k1 / sum z_j^k1.
double predicted_theta(const std::vector<double>& thetas, const std::vector<double>& zs,
                       double k1);

/// Prediction specialised to the dependence scenario: the convex-combination
/// formula under independence, the shared column's theta when the dominating
/// block is one series in disguise (identical, cumulative). The alternating
/// scenario has no stationary limit and is rejected.
double scenario_theta(const TailProfile& profile, ScenarioKind kind, const WeightVector& z);

using MatrixProvider = std::function<SeriesMatrix(std::size_t replicate)>;

struct Condition11bCell {
    double y = 0.0;
    std::size_t n = 0;
    double lhs = 0.0;         // sum over j < d of P{z_j M^(j) > u_n, z_i M^(i) <= u_n, i > j}
    double rhs = 0.0;         // P{z_d M^(d) <= u_n}
    double ratio = 0.0;       // lhs / rhs; 0 when rhs vanishes
    double half_width = 0.0;  // 95% band on lhs
    bool wide_band = false;
};

struct Condition11bReport {
    std::size_t replicates = 0;
    std::size_t dominating = 0;
    std::vector<Condition11bCell> cells;  // y-major, n_grid order within each y

    const Condition11bCell& cell(double y, std::size_t n) const;
};

/// Monte Carlo check of the negligible-overshadowing condition: both sides
/// estimated per (y, n) over independent replicate matrices. The ratio
/// should trend to 0 when the last dominating column's maximum dominates
/// the earlier ones; it stays positive for independent columns.
Condition11bReport check_condition_11b(const MatrixProvider& make_matrix,
                                       std::size_t replicates, const TailProfile& profile,
                                       const WeightVector& z, const std::vector<double>& y_grid,
                                       const std::vector<std::size_t>& n_grid);

/// Two-column CSV (sum, max) with "# key: value" metadata lines up front.
void write_aggregates_csv(const AggregateSeries& s, const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& metadata = {});

/// Reads the two-column layout back; metadata lines are skipped.
AggregateSeries read_aggregates_csv(const std::string& path);

}  // namespace tailex
