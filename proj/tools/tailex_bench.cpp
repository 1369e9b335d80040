// Wall-clock comparison of the OpenMP kernels against their serial
// references, with a bitwise equality check on every pair.
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "tailex/aggregation.hpp"
#include "tailex/generators.hpp"
#include "tailex/network.hpp"
#include "tailex/parallel.hpp"

namespace {

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto dt = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        if (dt < best) best = dt;
    }
    return best;
}

void report_row(const std::string& kernel, double serial_ms, double parallel_ms,
                bool identical) {
    std::printf("%-22s %10.1f %12.1f %9.2fx   %s\n", kernel.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "DIFFERS");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel timings"};
    std::size_t rows = 200000;
    std::size_t graph_n = 30000;
    int reps = 3;
    app.add_option("--rows", rows, "matrix rows");
    app.add_option("--graph", graph_n, "graph vertices");
    app.add_option("--reps", reps, "timing repetitions (best is kept)");
    CLI11_PARSE(app, argc, argv);

    const int width = tailex::max_threads();
    std::printf("threads: %d\n", width);
    std::printf("%-22s %10s %12s %10s\n", "kernel", "serial ms", "parallel ms", "speedup");

    const auto profile = tailex::TailProfile::uniform(1.0, 3.0, {0.3, 0.7}, 8);
    const tailex::RowLengthLaw law(4.0, 8, 1);

    tailex::SeriesMatrix serial_m, parallel_m;
    tailex::set_threads(1);
    const double gen_serial = best_of(reps, [&] {
        serial_m = tailex::gen_matrix(profile, tailex::ScenarioKind::independent, rows, law, 7);
    });
    tailex::set_threads(width);
    const double gen_parallel = best_of(reps, [&] {
        parallel_m = tailex::gen_matrix(profile, tailex::ScenarioKind::independent, rows, law, 7);
    });
    report_row("gen_matrix", gen_serial, gen_parallel, serial_m.values == parallel_m.values);

    const auto z = tailex::WeightVector::constant(1.0, 8);
    tailex::AggregateSeries agg_serial, agg_parallel;
    const double agg_serial_ms =
        best_of(reps, [&] { agg_serial = tailex::row_aggregate_serial(parallel_m, z); });
    const double agg_parallel_ms =
        best_of(reps, [&] { agg_parallel = tailex::row_aggregate(parallel_m, z); });
    report_row("row_aggregate", agg_serial_ms, agg_parallel_ms,
               agg_serial.sums == agg_parallel.sums &&
                   agg_serial.maxima == agg_parallel.maxima);

    const auto g = tailex::random_digraph(graph_n, 10.0 / static_cast<double>(graph_n), 11);
    const auto pr_cfg = tailex::PageRankConfig::uniform(graph_n, 0.85);
    tailex::ScoreVector pr_serial, pr_parallel;
    const double pr_serial_ms =
        best_of(reps, [&] { pr_serial = tailex::pagerank_solve_serial(g, pr_cfg); });
    const double pr_parallel_ms =
        best_of(reps, [&] { pr_parallel = tailex::pagerank_solve(g, pr_cfg); });
    report_row("pagerank_solve", pr_serial_ms, pr_parallel_ms,
               pr_serial.scores == pr_parallel.scores);

    tailex::MaxLinearConfig ml_cfg;
    ml_cfg.damping = 0.85;
    ml_cfg.q.assign(graph_n, 1.0);
    tailex::ScoreVector ml_serial, ml_parallel;
    const double ml_serial_ms =
        best_of(reps, [&] { ml_serial = tailex::maxlinear_solve_serial(g, ml_cfg); });
    const double ml_parallel_ms =
        best_of(reps, [&] { ml_parallel = tailex::maxlinear_solve(g, ml_cfg); });
    report_row("maxlinear_solve", ml_serial_ms, ml_parallel_ms,
               ml_serial.scores == ml_parallel.scores);

    return 0;
}
