#include "tailex/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tailex/errors.hpp"
#include "tailex/parallel.hpp"
#include "tailex/rng.hpp"

namespace tailex {

void Digraph::add_edge(std::uint32_t src, std::uint32_t dst) {
    if (src >= n || dst >= n) throw ConfigError("Digraph: edge endpoint out of range");
    in_edges[dst].push_back(src);
    ++out_degree[src];
}

std::size_t Digraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& in : in_edges) total += in.size();
    return total;
}

Digraph random_digraph(std::size_t n, double edge_prob, std::uint64_t seed) {
    if (!(edge_prob >= 0.0) || !(edge_prob <= 1.0))
        throw ConfigError("random_digraph: edge_prob must lie in [0, 1]");
    Digraph g(n);
    Rng rng(derive_seed(seed, {stream::kGraph}));
    for (std::uint32_t src = 0; src < n; ++src)
        for (std::uint32_t dst = 0; dst < n; ++dst)
            if (src != dst && rng.uniform01() < edge_prob) g.add_edge(src, dst);
    return g;
}

Digraph random_dag(std::size_t n, double edge_prob, std::uint64_t seed) {
    if (!(edge_prob >= 0.0) || !(edge_prob <= 1.0))
        throw ConfigError("random_dag: edge_prob must lie in [0, 1]");
    Digraph g(n);
    Rng rng(derive_seed(seed, {stream::kGraph}));
    for (std::uint32_t src = 0; src < n; ++src)
        for (std::uint32_t dst = src + 1; dst < n; ++dst)
            if (rng.uniform01() < edge_prob) g.add_edge(src, dst);
    return g;
}

void PageRankConfig::validate(std::size_t n) const {
    if (!(damping > 0.0) || !(damping < 1.0))
        throw ConfigError("PageRankConfig: damping must lie in (0, 1)");
    if (q.size() != n) throw ConfigError("PageRankConfig: q must have one entry per vertex");
    double total = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw ConfigError("PageRankConfig: q entries must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("PageRankConfig: q must sum to 1, got " + std::to_string(total));
    if (!(tol > 0.0)) throw ConfigError("PageRankConfig: tol must be positive");
    if (max_iters < 1) throw ConfigError("PageRankConfig: max_iters must be >= 1");
}

PageRankConfig PageRankConfig::uniform(std::size_t n, double damping) {
    PageRankConfig cfg;
    cfg.damping = damping;
    cfg.q.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    return cfg;
}

void MaxLinearConfig::validate(std::size_t n) const {
    if (!(damping > 0.0) || !(damping < 1.0))
        throw ConfigError("MaxLinearConfig: damping must lie in (0, 1)");
    if (q.size() != n) throw ConfigError("MaxLinearConfig: q must have one entry per vertex");
    for (double v : q)
        if (!(v >= 0.0)) throw ConfigError("MaxLinearConfig: q entries must be nonnegative");
    if (!(tol > 0.0)) throw ConfigError("MaxLinearConfig: tol must be positive");
    if (max_iters < 1) throw ConfigError("MaxLinearConfig: max_iters must be >= 1");
}

namespace {

std::vector<double> inverse_degrees(const Digraph& g) {
    std::vector<double> inv(g.n, 0.0);
    for (std::size_t j = 0; j < g.n; ++j)
        if (g.out_degree[j] > 0) inv[j] = 1.0 / static_cast<double>(g.out_degree[j]);
    return inv;
}

template <typename Loop>
ScoreVector pagerank_impl(const Digraph& g, const PageRankConfig& cfg, Loop&& loop) {
    cfg.validate(g.n);
    const auto inv_deg = inverse_degrees(g);
    const double c = cfg.damping;
    std::vector<double> cur = cfg.q, next(g.n);
    ScoreVector out;
    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        loop(g.n, [&](std::size_t i) {
            double acc = 0.0;
            for (std::uint32_t j : g.in_edges[i]) acc += cur[j] * inv_deg[j];
            next[i] = c * acc + (1.0 - c) * cfg.q[i];
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) diff = std::max(diff, std::abs(next[i] - cur[i]));
        if (diff < cfg.tol) {
            // diff is exactly the equation residual of cur, so return cur.
            out.scores = std::move(cur);
            out.iterations = iter;
            out.residual = diff;
            return out;
        }
        cur.swap(next);
    }
    throw SolverError("pagerank_solve: no convergence within max_iters");
}

template <typename Loop>
ScoreVector maxlinear_impl(const Digraph& g, const MaxLinearConfig& cfg, Loop&& loop) {
    cfg.validate(g.n);
    const auto inv_deg = inverse_degrees(g);
    const double c = cfg.damping;
    std::vector<double> cur = cfg.q, next(g.n);
    ScoreVector out;
    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        loop(g.n, [&](std::size_t i) {
            double best = cfg.q[i];
            for (std::uint32_t j : g.in_edges[i]) best = std::max(best, c * inv_deg[j] * cur[j]);
            next[i] = best;
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            if (next[i] < cur[i])
                throw SolverError("maxlinear_solve: iterates must be nondecreasing");
            diff = std::max(diff, next[i] - cur[i]);
        }
        if (diff < cfg.tol) {
            out.scores = std::move(cur);
            out.iterations = iter;
            out.residual = diff;
            return out;
        }
        cur.swap(next);
    }
    throw SolverError("maxlinear_solve: no convergence within max_iters");
}

}  // namespace

ScoreVector pagerank_solve(const Digraph& g, const PageRankConfig& cfg) {
    return pagerank_impl(g, cfg, [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

ScoreVector pagerank_solve_serial(const Digraph& g, const PageRankConfig& cfg) {
    return pagerank_impl(g, cfg, [](std::size_t n, auto&& body) { serial_for(n, body); });
}

ScoreVector maxlinear_solve(const Digraph& g, const MaxLinearConfig& cfg) {
    return maxlinear_impl(g, cfg, [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

ScoreVector maxlinear_solve_serial(const Digraph& g, const MaxLinearConfig& cfg) {
    return maxlinear_impl(g, cfg, [](std::size_t n, auto&& body) { serial_for(n, body); });
}

namespace {

void validate_specs(const std::vector<CommunitySpec>& specs) {
    if (specs.empty()) throw ConfigError("build_community_graph: no communities");
    for (const auto& s : specs) {
        if (s.size < 1) throw ConfigError("build_community_graph: empty community");
        if (!(s.tail_index > 0.0))
            throw ConfigError("build_community_graph: tail index must be positive");
        if (!(s.theta > 0.0) || !(s.theta <= 1.0))
            throw ConfigError("build_community_graph: theta must lie in (0, 1]");
        if (!(s.overlap_with_previous >= 0.0) || !(s.overlap_with_previous < 1.0))
            throw ConfigError("build_community_graph: overlap must lie in [0, 1)");
    }
}

}  // namespace

CommunityGraph build_community_graph(std::size_t n_roots,
                                     const std::vector<CommunitySpec>& specs,
                                     const CommunityGraphOptions& opt) {
    if (n_roots < 1) throw ConfigError("build_community_graph: need at least one root");
    validate_specs(specs);
    opt.attachment.validate();

    CommunityGraph cg;
    cg.n_roots = n_roots;
    cg.specs = specs;
    cg.k1 = specs.front().tail_index;
    for (const auto& s : specs) cg.k1 = std::min(cg.k1, s.tail_index);
    opt.personalization.validate(cg.k1);

    const std::size_t n_comm = specs.size();
    for (std::uint32_t c = 0; c < n_comm; ++c)
        if (specs[c].tail_index == cg.k1) cg.dominating.push_back(c);

    // Member vertex ids; aliased overlap reuses the previous community's
    // leading members, copies get fresh vertices.
    std::uint32_t next_id = static_cast<std::uint32_t>(n_roots);
    cg.members.resize(n_comm);
    for (std::size_t c = 0; c < n_comm; ++c) {
        std::size_t shared = 0;
        if (c > 0 && opt.overlap_alias) {
            shared = static_cast<std::size_t>(
                std::floor(specs[c].overlap_with_previous *
                           static_cast<double>(specs[c].size)));
            shared = std::min({shared, specs[c].size, cg.members[c - 1].size()});
        }
        for (std::size_t s = 0; s < shared; ++s)
            cg.members[c].push_back(cg.members[c - 1][s]);
        for (std::size_t s = shared; s < specs[c].size; ++s) cg.members[c].push_back(next_id++);
    }
    cg.graph = Digraph(next_id);

    // One stationary score series per community, indexed by root.
    std::vector<std::vector<double>> series(n_comm);
    parallel_for(n_comm, [&](std::size_t c) {
        series[c] = gen_armax_column(n_roots, specs[c].tail_index, specs[c].theta,
                                     derive_seed(opt.seed, {stream::kColumn, c}));
    });

    RowLengthLaw attachment = opt.attachment;
    attachment.cap = attachment.cap == 0 ? n_comm : std::min(attachment.cap, n_comm);
    const auto raw_len =
        gen_row_lengths(n_roots, attachment, derive_seed(opt.seed, {stream::kRowLength}));

    SeriesMatrix& m = cg.score_matrix;
    m.rows = n_roots;
    m.cols = n_comm;
    m.values.assign(n_roots * n_comm, 0.0);
    m.row_len.assign(n_roots, 0);
    std::size_t total_members = 0;
    for (const auto& mem : cg.members) total_members += mem.size();
    m.fingerprint = derive_seed(opt.seed, {n_roots, n_comm, total_members});
    m.q = gen_q_column(n_roots, opt.personalization,
                       derive_seed(opt.seed, {stream::kPersonalization}));

    cg.row_communities.resize(n_roots);
    cg.row_members.resize(n_roots);

    parallel_for(n_roots, [&](std::size_t i) {
        auto& slots = cg.row_communities[i];
        if (opt.force_all_dominating) {
            slots = cg.dominating;
        } else {
            Rng pick(derive_seed(opt.seed, {stream::kDominatingCount, i}));
            slots.push_back(cg.dominating[pick.uniform_index(cg.dominating.size())]);
        }
        const std::size_t forced = slots.size();
        const std::size_t want = std::min<std::size_t>(
            std::max<std::size_t>(raw_len[i], forced), n_comm);

        if (want > forced) {
            std::vector<std::uint32_t> pool;
            pool.reserve(n_comm - forced);
            for (std::uint32_t c = 0; c < n_comm; ++c)
                if (std::find(slots.begin(), slots.end(), c) == slots.end()) pool.push_back(c);
            Rng extra(derive_seed(opt.seed, {stream::kAttachment, i}));
            for (std::size_t s = 0; s < want - forced; ++s) {
                const std::size_t j = s + extra.uniform_index(pool.size() - s);
                std::swap(pool[s], pool[j]);
            }
            std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want - forced));
            slots.insert(slots.end(), pool.begin(),
                         pool.begin() + static_cast<std::ptrdiff_t>(want - forced));
        }

        Rng member_pick(derive_seed(opt.seed, {stream::kMemberPick, i}));
        auto& row_members = cg.row_members[i];
        row_members.reserve(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const auto c = slots[s];
            row_members.push_back(cg.members[c][member_pick.uniform_index(cg.members[c].size())]);
            m.at(i, s) = series[c][i];
        }
        m.row_len[i] = static_cast<std::uint32_t>(slots.size());
    });

    // Edges in root order; construction stays deterministic under threading.
    for (std::size_t i = 0; i < n_roots; ++i)
        for (std::uint32_t member : cg.row_members[i])
            cg.graph.add_edge(member, static_cast<std::uint32_t>(i));
    return cg;
}

std::string to_string(RootSeriesMode mode) {
    switch (mode) {
        case RootSeriesMode::one_step_sum: return "one_step_sum";
        case RootSeriesMode::one_step_max: return "one_step_max";
        case RootSeriesMode::full_solve_sum: return "full_solve_sum";
        case RootSeriesMode::full_solve_max: return "full_solve_max";
    }
    return "unknown";
}

RootSeriesMode root_mode_from_string(const std::string& name) {
    if (name == "one_step_sum") return RootSeriesMode::one_step_sum;
    if (name == "one_step_max") return RootSeriesMode::one_step_max;
    if (name == "full_solve_sum") return RootSeriesMode::full_solve_sum;
    if (name == "full_solve_max") return RootSeriesMode::full_solve_max;
    throw ConfigError("unknown root series mode: " + name);
}

std::vector<double> root_score_series(const CommunityGraph& g, RootSeriesMode mode,
                                      const RootSeriesOptions& opt) {
    switch (mode) {
        case RootSeriesMode::one_step_sum:
        case RootSeriesMode::one_step_max: {
            const auto weights =
                WeightVector::constant(opt.damping, g.score_matrix.cols);
            auto agg = row_aggregate(g.score_matrix, weights, g.score_matrix.has_q());
            return mode == RootSeriesMode::one_step_sum ? std::move(agg.sums)
                                                        : std::move(agg.maxima);
        }
        case RootSeriesMode::full_solve_sum: {
            auto cfg = PageRankConfig::uniform(g.graph.n, opt.damping);
            cfg.tol = opt.tol;
            cfg.max_iters = opt.max_iters;
            auto solved = pagerank_solve(g.graph, cfg);
            solved.scores.resize(g.n_roots);
            return std::move(solved.scores);
        }
        case RootSeriesMode::full_solve_max: {
            MaxLinearConfig cfg;
            cfg.damping = opt.damping;
            cfg.tol = opt.tol;
            cfg.max_iters = opt.max_iters;
            cfg.q.assign(g.graph.n,
                         (1.0 - opt.damping) / static_cast<double>(g.graph.n));
            auto solved = maxlinear_solve(g.graph, cfg);
            solved.scores.resize(g.n_roots);
            return std::move(solved.scores);
        }
    }
    throw ConfigError("root_score_series: unknown mode");
}

void write_graph_edges(const Digraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t dst = 0; dst < g.n; ++dst)
        for (std::uint32_t src : g.in_edges[dst]) out << src << ' ' << dst << '\n';
    if (!out) throw IoError("write failed: " + path);
}

Digraph read_graph_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uint32_t src = 0, dst = 0, max_id = 0;
    while (in >> src >> dst) {
        edges.emplace_back(src, dst);
        max_id = std::max({max_id, src, dst});
    }
    if (!in.eof()) throw IoError("malformed edge list: " + path);
    Digraph g(edges.empty() ? 0 : max_id + 1);
    for (const auto& [s, d] : edges) g.add_edge(s, d);
    return g;
}

void write_community_sidecar(const CommunityGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t c = 0; c < g.members.size(); ++c)
        for (std::uint32_t v : g.members[c]) out << v << ' ' << c << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_scores_csv(const CommunityGraph& g, const ScoreVector& scores,
                      const std::string& path) {
    if (scores.scores.size() != g.graph.n)
        throw ConfigError("write_scores_csv: score vector does not match the graph");
    std::vector<long long> label(g.graph.n, -1);
    for (std::size_t c = g.members.size(); c-- > 0;)
        for (std::uint32_t v : g.members[c]) label[v] = static_cast<long long>(c);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "vertex,score,community\n";
    char buf[32];
    for (std::size_t v = 0; v < g.graph.n; ++v) {
        auto res = std::to_chars(buf, buf + sizeof buf, scores.scores[v]);
        out << v << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ','
            << label[v] << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace tailex
