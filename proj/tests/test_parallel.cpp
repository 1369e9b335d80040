#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "tailex/aggregation.hpp"
#include "tailex/experiment.hpp"
#include "tailex/generators.hpp"
#include "tailex/network.hpp"
#include "tailex/parallel.hpp"

using namespace tailex;

namespace {

/// Runs fn pinned to one thread, then at full width, and hands both results
/// to the caller. Restores the ambient thread count.
template <typename Fn>
auto one_vs_many(Fn&& fn) {
    const int ambient = max_threads();
    set_threads(1);
    auto serial = fn();
    set_threads(ambient > 1 ? ambient : 4);
    auto parallel = fn();
    set_threads(ambient);
    return std::make_pair(std::move(serial), std::move(parallel));
}

}  // namespace

TEST_CASE("matrix generation is schedule independent") {
    const auto profile = TailProfile::uniform(1.0, 3.0, {0.3, 0.7}, 6);
    const RowLengthLaw law(4.0, 6, 1);
    const auto [one, many] = one_vs_many([&] {
        return gen_matrix(profile, ScenarioKind::independent, 20000, law, 515);
    });
    CHECK(one.values == many.values);
    CHECK(one.row_len == many.row_len);
    CHECK(one.fingerprint == many.fingerprint);
}

TEST_CASE("row aggregation matches its serial reference under any width") {
    const auto profile = TailProfile::uniform(1.0, 3.0, {0.5}, 5);
    const auto m = gen_matrix(profile, ScenarioKind::independent, 30000, RowLengthLaw(4.0, 5, 1), 99);
    const WeightVector z{{1.0, 2.0, 0.5, 1.0, 1.0}};
    const auto reference = row_aggregate_serial(m, z);
    const auto [one, many] = one_vs_many([&] { return row_aggregate(m, z); });
    CHECK(one.sums == reference.sums);
    CHECK(many.sums == reference.sums);
    CHECK(many.maxima == reference.maxima);
}

TEST_CASE("graph solvers are schedule independent") {
    const auto g = random_digraph(2000, 0.004, 77);
    const auto cfg = PageRankConfig::uniform(2000, 0.85);
    const auto ref = pagerank_solve_serial(g, cfg);
    const auto [one, many] = one_vs_many([&] { return pagerank_solve(g, cfg); });
    CHECK(one.scores == ref.scores);
    CHECK(many.scores == ref.scores);
    CHECK(many.iterations == ref.iterations);

    MaxLinearConfig ml;
    ml.damping = 0.85;
    ml.q.assign(2000, 0.5);
    const auto mref = maxlinear_solve_serial(g, ml);
    const auto [mone, mmany] = one_vs_many([&] { return maxlinear_solve(g, ml); });
    CHECK(mone.scores == mref.scores);
    CHECK(mmany.scores == mref.scores);
}

TEST_CASE("community graphs ignore the worker count") {
    std::vector<CommunitySpec> specs;
    specs.push_back(CommunitySpec(40, 1.0, 0.5, 0.0));
    specs.push_back(CommunitySpec(25, 2.5, 0.8, 0.0));
    CommunityGraphOptions opt;
    opt.seed = 2024;
    const auto [one, many] = one_vs_many([&] { return build_community_graph(3000, specs, opt); });
    CHECK(one.score_matrix.values == many.score_matrix.values);
    CHECK(one.row_members == many.row_members);
    CHECK(one.graph.in_edges == many.graph.in_edges);
}

TEST_CASE("replicate summaries reduce in a fixed order") {
    const auto cfg = config_from_yaml_string(R"(
name: width_probe
scenario: identical
n: 3000
replicates: 6
seed: 404
profile: {k1: 1.0, k: 3.0, dominating_thetas: [0.6, 0.6]}
)");
    const auto [one, many] = one_vs_many([&] { return run_theorem_pipeline(cfg); });
    CHECK(report_to_json(one) == report_to_json(many));
}
