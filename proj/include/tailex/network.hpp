#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tailex/aggregation.hpp"
#include "tailex/generators.hpp"

namespace tailex {

/// Directed graph stored by in-adjacency; edge j -> i means j links to i.
struct Digraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> in_edges;  // in_edges[i] lists sources j
    std::vector<std::uint32_t> out_degree;             // D_j

    explicit Digraph(std::size_t vertices = 0)
        : n(vertices), in_edges(vertices), out_degree(vertices, 0) {}

    void add_edge(std::uint32_t src, std::uint32_t dst);
    std::size_t edge_count() const;
};

/// Every ordered pair becomes an edge independently with edge_prob.
Digraph random_digraph(std::size_t n, double edge_prob, std::uint64_t seed);

/// Acyclic variant: edges only run from lower to higher vertex ids.
Digraph random_dag(std::size_t n, double edge_prob, std::uint64_t seed);

struct PageRankConfig {
    double damping = 0.85;  // c in (0, 1)
    std::vector<double> q;  // personalization, q_i >= 0, sums to 1
    double tol = 1e-12;
    std::size_t max_iters = 10000;

    void validate(std::size_t n) const;

    static PageRankConfig uniform(std::size_t n, double damping = 0.85);
};

struct MaxLinearConfig {
    double damping = 0.85;  // c in A_j = c / D_j
    std::vector<double> q;  // Q_i >= 0
    double tol = 1e-12;
    std::size_t max_iters = 10000;

    void validate(std::size_t n) const;
};

struct ScoreVector {
    std::vector<double> scores;
    std::size_t iterations = 0;
    double residual = 0.0;  // sup-norm residual of the returned scores
};

/// R_i = c sum_{j -> i} R_j / D_j + (1 - c) q_i, iterated from R0 = q.
/// Dangling mass is dropped, never redistributed.
ScoreVector pagerank_solve(const Digraph& g, const PageRankConfig& cfg);
ScoreVector pagerank_solve_serial(const Digraph& g, const PageRankConfig& cfg);

/// R_i = max(max_{j -> i} (c / D_j) R_j, Q_i), iterated from R0 = Q;
/// iterates are componentwise nondecreasing and bounded by max Q.
ScoreVector maxlinear_solve(const Digraph& g, const MaxLinearConfig& cfg);
ScoreVector maxlinear_solve_serial(const Digraph& g, const MaxLinearConfig& cfg);

/// One community of member vertices sharing a score law.
struct CommunitySpec {
    std::size_t size = 0;
    double tail_index = 1.0;
    double theta = 1.0;
    /// Fraction of members shared with the previous community in the list.
    double overlap_with_previous = 0.0;
};

struct CommunityGraphOptions {
    RowLengthLaw attachment{1.5, 0, 1};  // raw in-neighbor count per root
    PersonalizationLaw personalization{};
    /// All dominating communities join every root's neighborhood (the
    /// aggregate limits assume rows carry the full dominating block); with
    /// false only one uniformly chosen dominating community is guaranteed.
    bool force_all_dominating = true;
    /// Shared members of overlapping communities are one vertex (alias);
    /// with false each community gets its own copy.
    bool overlap_alias = true;
    std::uint64_t seed = 1;
};

/// Two-level graph: community members link to roots. Roots occupy vertex
/// ids [0, n_roots); members follow. The score matrix holds the aggregation
/// view: row i lists root i's neighbor community series values, dominating
/// communities first.
struct CommunityGraph {
    Digraph graph;
    std::size_t n_roots = 0;
    double k1 = 0.0;
    std::vector<CommunitySpec> specs;
    std::vector<std::vector<std::uint32_t>> members;     // vertex ids per community
    std::vector<std::uint32_t> dominating;               // community indices at k1
    SeriesMatrix score_matrix;                           // rows = roots
    std::vector<std::vector<std::uint32_t>> row_communities;  // slot -> community
    std::vector<std::vector<std::uint32_t>> row_members;      // slot -> member vertex
};

CommunityGraph build_community_graph(std::size_t n_roots,
                                     const std::vector<CommunitySpec>& specs,
                                     const CommunityGraphOptions& opt);

enum class RootSeriesMode {
    one_step_sum,    // c * sum of neighbor values + Q
    one_step_max,    // c * max of neighbor values v Q
    full_solve_sum,  // root scores of the damped linear solver
    full_solve_max,  // root scores of the max-linear solver
};

std::string to_string(RootSeriesMode mode);
RootSeriesMode root_mode_from_string(const std::string& name);

struct RootSeriesOptions {
    double damping = 0.85;
    double tol = 1e-12;
    std::size_t max_iters = 10000;
};

/// Score sequence over roots in root-id order, ready for the estimators.
std::vector<double> root_score_series(const CommunityGraph& g, RootSeriesMode mode,
                                      const RootSeriesOptions& opt = {});

/// "src dst" per line.
void write_graph_edges(const Digraph& g, const std::string& path);
Digraph read_graph_edges(const std::string& path);

/// "vertex community" per line, one line per membership; roots are omitted.
void write_community_sidecar(const CommunityGraph& g, const std::string& path);

/// "vertex,score,community" rows; community -1 marks roots and unaffiliated
/// vertices, overlapping members report their first community.
void write_scores_csv(const CommunityGraph& g, const ScoreVector& scores,
                      const std::string& path);

}  // namespace tailex
