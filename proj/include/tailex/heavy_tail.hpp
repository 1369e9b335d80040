#pragma once

#include <cstddef>
#include <vector>

namespace tailex {

/// Pareto law with survival function (x/scale)^(-tail_index) for x >= scale.
struct ParetoLaw {
    double tail_index = 1.0;
    double scale = 1.0;

    void validate() const;
};

/// Survival probability P{X > x} under `law`; 1 for x inside the scale.
double pareto_survival(double x, const ParetoLaw& law);

/// Quantile of `law` at probability p in [0, 1): scale * (1-p)^(-1/tail_index).
/// p = 1 is rejected rather than mapped to infinity.
double pareto_quantile(double p, const ParetoLaw& law);

/// Growing threshold sequence u_n = y * n^(1/k1).
struct ThresholdSequence {
    double y = 1.0;   // level constant, > 0
    double k1 = 1.0;  // minimum tail index, > 0
};

double threshold_u(std::size_t n, const ThresholdSequence& ts);

/// Per-column tail behaviour: tail index and extremal index.
struct ColumnLaw {
    double tail_index = 1.0;
    double theta = 1.0;
};

/// Tail landscape of a column scheme: d dominating columns sharing the
/// minimum tail index k1, all remaining columns with indices bounded below
/// by k > k1.
struct TailProfile {
    double k1 = 1.0;
    double k = 2.0;
    std::vector<ColumnLaw> per_column;  // dominating columns first

    std::size_t dominating_count() const;
    void validate() const;

    /// Builds a profile with `d` dominating columns carrying `dominating_thetas`
    /// and (total_columns - d) light columns at tail index k with theta
    /// `nondominating_theta`.
    static TailProfile uniform(double k1, double k, const std::vector<double>& dominating_thetas,
                               std::size_t total_columns, double nondominating_theta = 1.0);
};

/// Largest admissible row-cap exponent for a (k1, k) pair:
/// chi0 = (k - k1) / (k1 * (k + 1)). Requires 0 < k1 < k.
double chi_upper_bound(double k1, double k);

/// Row cap l_n = max(1, floor(n^chi)).
std::size_t row_cap(std::size_t n, double chi);

/// As above, but also enforces chi < chi0 for the profile in force.
std::size_t row_cap(std::size_t n, double chi, double chi0);

/// First-order exceedance probability P{z1 * Y > u_n} = (z1/y)^k1 / n for a
/// dominating Pareto(k1) term at threshold u_n = y * n^(1/k1).
double theoretical_exceedance(double z1, double y, double k1, std::size_t n);

}  // namespace tailex
