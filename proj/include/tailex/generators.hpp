#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tailex/heavy_tail.hpp"
#include "tailex/rng.hpp"

namespace tailex {

/// Regularly varying law for the number of active terms per row:
/// P{N > x} = x^(-alpha) exactly at integer x before clamping.
struct RowLengthLaw {
    double alpha = 2.0;
    std::size_t cap = 0;  // 0 = uncapped
    std::size_t min = 1;

    void validate() const;
};

/// Cross-column dependence of the dominating block.
enum class ScenarioKind {
    independent,  // mutually independent dominating columns
    identical,    // dominating columns alias column 1
    cumulative,   // column i is the sum of columns 1..i-1
    alternating,  // odd rows duplicated across dominating columns, even rows independent
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(const std::string& name);

/// Number of dominating columns: a fixed value or a bounded discrete law.
struct DominatingCountLaw {
    std::vector<std::size_t> values{1};
    std::vector<double> probs{1.0};

    bool is_fixed() const { return values.size() == 1; }
    std::size_t max_value() const;
    std::size_t sample(Rng& rng) const;
    void validate(std::size_t column_budget) const;
};

/// Doubly-indexed array of nonnegative values: full column series stored
/// densely, with a per-row active prefix length. Cells beyond the active
/// length are structural zeros for aggregation purposes.
struct SeriesMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;            // rows x cols, row-major
    std::vector<std::uint32_t> row_len;    // active prefix per row, in [1, cols]
    std::vector<double> q;                 // optional personalization column
    std::uint64_t fingerprint = 0;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    bool has_q() const { return !q.empty(); }

    /// Maximum of the full column series over the first `n` rows.
    double column_max(std::size_t c, std::size_t n) const;
};

/// i.i.d. Pareto column; extremal index 1.
std::vector<double> gen_iid_column(std::size_t n, const ParetoLaw& law, std::uint64_t seed);

/// Stationary max-autoregressive column with extremal index `theta` and
/// exactly Pareto(k) marginals. The recursion X_m = max((1-theta) X_{m-1},
/// theta Z_m) runs on standard Frechet innovations (burn-in discards the
/// initialization) and the output is the monotone map of X onto Pareto(k);
/// increasing maps leave exceedance clusters, and hence theta, unchanged.
std::vector<double> gen_armax_column(std::size_t n, double tail_index, double theta,
                                     std::uint64_t seed, double scale = 1.0,
                                     std::size_t burn_in = 1000);

/// Row lengths N_n = ceil(U^(-1/alpha)) clamped to [law.min, law.cap].
std::vector<std::uint32_t> gen_row_lengths(std::size_t n_rows, const RowLengthLaw& law,
                                           std::uint64_t seed);

/// Outcome of the tail-domination screen: with constant slowly varying parts
/// P{N_n > l_n} decays like n^(-chi*alpha) against the n^(-1) exceedance
/// rate of the dominating term, so the screen passes iff chi*alpha > 1.
struct DominationCheck {
    bool pass = false;
    double margin = 0.0;              // chi*alpha - 1
    double row_tail_exponent = 0.0;   // chi*alpha
    double exceedance_exponent = 1.0;
};

DominationCheck check_domination(double k1, double alpha, double chi);

/// Arbitrary coupling between the array and the row lengths: receives the
/// generated values and returns one active length per row.
using RowLengthHook =
    std::function<std::vector<std::uint32_t>(const SeriesMatrix&, std::uint64_t seed)>;

/// Generates the full matrix: one stationary column per profile entry,
/// dominating-block dependence per `kind`, and independent row lengths
/// (or a user-supplied coupling).
SeriesMatrix gen_matrix(const TailProfile& profile, ScenarioKind kind, std::size_t n_rows,
                        const RowLengthLaw& law, std::uint64_t seed,
                        const RowLengthHook& coupling = nullptr);

/// Personalization column for the last column of the array.
struct PersonalizationLaw {
    enum class Kind { none, uniform, pareto } kind = Kind::none;
    double damping = 0.85;    // uniform mode: Q_i = (1 - damping) / rows
    double beta = 4.0;        // pareto mode: tail index, must exceed k1
    double scale = 1.0;

    void validate(double k1) const;
};

std::vector<double> gen_q_column(std::size_t rows, const PersonalizationLaw& law,
                                 std::uint64_t seed);

/// Columnar CSV export: one "row,column,value" line per active cell,
/// 1-based indices; the personalization column, when present, uses column 0.
void write_matrix_csv(const SeriesMatrix& m, const std::string& path);

/// Compact binary layout: header, row-length index block, then the active
/// cells row-major (and the personalization block when present).
void write_matrix_binary(const SeriesMatrix& m, const std::string& path);
SeriesMatrix read_matrix_binary(const std::string& path);

}  // namespace tailex
