// Command line front end. Each verb reads and writes files derived from the
// config name and fingerprint, so any stage can be re-run in isolation:
//   generate  -> <stem>.rep<r>.mat (+ replicate 0 as CSV)
//   aggregate -> <stem>.rep<r>.agg.csv
//   estimate  -> <stem>.estimates.csv, <stem>.rep0_{sum,max}.report.json
//   verify    -> <stem>.verdict.json (+ CSV tables), prints the verdicts
//   network   -> same as verify for the graph pipeline
//   report    -> re-reads <stem>.verdict.json and prints it
#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "tailex/errors.hpp"
#include "tailex/experiment.hpp"
#include "tailex/parallel.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t replicates = 0;
    std::string out_dir;
    std::vector<std::string> formats;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_formats) {
    cmd->add_option("--config", args.config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--replicates", args.replicates, "override the replicate count");
    cmd->add_option("--out", args.out_dir, "override the output directory");
    cmd->add_option("--threads", args.threads, "worker threads (0 = library default)");
    if (with_formats)
        cmd->add_option("--format", args.formats, "report formats, repeatable: json, csv");
}

tailex::ScenarioConfig resolve_config(const CommonArgs& args) {
    auto cfg = tailex::load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.replicates > 0) cfg.replicates = args.replicates;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    cfg.validate();
    if (args.threads > 0) tailex::set_threads(args.threads);
    return cfg;
}

std::vector<std::string> resolved_formats(const CommonArgs& args) {
    return args.formats.empty() ? std::vector<std::string>{"json", "csv"} : args.formats;
}

void ensure_out_dir(const tailex::ScenarioConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw tailex::IoError("cannot create output directory: " + cfg.out_dir);
}

int run_generate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    ensure_out_dir(cfg);
    const auto stem = tailex::artifact_stem(cfg);
    const auto rep_d = tailex::replicate_dominating_counts(cfg);
    const auto law = cfg.resolved_row_lengths();
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto m = tailex::gen_matrix(
            cfg.resolved_profile(rep_d[r]), cfg.scenario, cfg.n, law,
            tailex::derive_seed(cfg.seed, {tailex::stream::kReplicate, r}));
        tailex::write_matrix_binary(m, stem + ".rep" + std::to_string(r) + ".mat");
        if (r == 0) tailex::write_matrix_csv(m, stem + ".rep0.csv");
    }
    std::cout << "wrote " << cfg.replicates << " matrices under " << stem << ".rep*.mat\n";
    return 0;
}

int run_aggregate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto stem = tailex::artifact_stem(cfg);
    const auto z = cfg.resolved_weights();
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto rep = std::to_string(r);
        const auto m = tailex::read_matrix_binary(stem + ".rep" + rep + ".mat");
        const auto agg = tailex::row_aggregate(m, z, m.has_q());
        tailex::write_aggregates_csv(agg, stem + ".rep" + rep + ".agg.csv",
                                     {{"scenario", tailex::to_string(cfg.scenario)},
                                      {"replicate", rep}});
    }
    std::cout << "wrote " << cfg.replicates << " aggregate tables under " << stem
              << ".rep*.agg.csv\n";
    return 0;
}

std::string short_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int run_estimate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto stem = tailex::artifact_stem(cfg);
    const std::size_t hill_m =
        cfg.hill_m > 0 ? cfg.hill_m
                       : static_cast<std::size_t>(std::sqrt(static_cast<double>(cfg.n)));

    std::ofstream table(stem + ".estimates.csv", std::ios::binary);
    if (!table) throw tailex::IoError("cannot open for writing: " + stem + ".estimates.csv");
    table << "series,replicate,k_hat,theta_intervals,theta_blocks\n";
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto agg =
            tailex::read_aggregates_csv(stem + ".rep" + std::to_string(r) + ".agg.csv");
        for (const auto* series : {"sum", "max"}) {
            const auto& xs = std::string(series) == "sum" ? agg.sums : agg.maxima;
            const std::size_t block =
                static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(xs.size()))));
            const double u = tailex::empirical_quantile(xs, cfg.threshold_quantile);
            const double matched = tailex::empirical_quantile(
                xs, std::max(cfg.threshold_quantile, 1.0 - 1.0 / static_cast<double>(block)));
            table << series << ',' << r << ',' << short_double(tailex::hill_estimate(xs, hill_m))
                  << ',' << short_double(tailex::intervals_theta(xs, u).value) << ','
                  << short_double(tailex::blocks_theta(xs, matched, block).value) << '\n';
            if (r == 0) {
                tailex::EstimationOptions opt;
                opt.hill_m = cfg.hill_m;
                opt.threshold_quantile = cfg.threshold_quantile;
                opt.seed = cfg.seed;
                const auto report = tailex::estimate_series(xs, opt);
                std::ofstream out(stem + ".rep0_" + series + ".report.json", std::ios::binary);
                if (!out) throw tailex::IoError("cannot write estimator report");
                out << tailex::to_json_string(report);
            }
        }
    }
    std::cout << "wrote " << stem << ".estimates.csv and replicate-0 reports\n";
    return 0;
}

int print_and_grade(const tailex::VerdictReport& report) {
    for (const auto& v : report.verdicts)
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.claim
                  << ": estimate=" << v.estimate << " predicted=" << v.predicted
                  << (v.kind == "abs_diff" ? " tolerance=" + std::to_string(v.tolerance) : "")
                  << '\n';
    std::cout << (report.all_pass() ? "all claims pass" : "some claims FAILED") << '\n';
    return report.all_pass() ? 0 : 1;
}

int run_verify(const CommonArgs& args, bool network) {
    const auto cfg = resolve_config(args);
    const auto report =
        network ? tailex::run_network_pipeline(cfg) : tailex::run_theorem_pipeline(cfg);
    const auto files = tailex::emit_report(report, cfg, resolved_formats(args));
    for (const auto& f : files) std::cout << "wrote " << f << '\n';
    return print_and_grade(report);
}

int run_report(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto path = tailex::artifact_stem(cfg) + ".verdict.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tailex::IoError("no verdict file at " + path + "; run verify first");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw tailex::IoError("unreadable verdict file " + path + ": " + e.what());
    }
    bool all = true;
    for (const auto& v : j.at("verdicts")) {
        const bool pass = v.at("pass").get<bool>();
        all = all && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << v.at("claim").get<std::string>()
                  << ": estimate=" << v.at("estimate").dump()
                  << " predicted=" << v.at("predicted").dump() << '\n';
    }
    std::cout << (all ? "all claims pass" : "some claims FAILED") << '\n';
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-tail aggregation and network score experiments"};
    app.require_subcommand(1);

    CommonArgs generate_args, aggregate_args, estimate_args, verify_args, network_args,
        report_args;
    add_common(app.add_subcommand("generate", "write replicate matrices"), generate_args, false);
    add_common(app.add_subcommand("aggregate", "aggregate stored matrices"), aggregate_args,
               false);
    add_common(app.add_subcommand("estimate", "estimate stored aggregates"), estimate_args,
               false);
    add_common(app.add_subcommand("verify", "run the aggregation pipeline"), verify_args, true);
    add_common(app.add_subcommand("network", "run the graph pipeline"), network_args, true);
    add_common(app.add_subcommand("report", "print a stored verdict file"), report_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("generate")) return run_generate(generate_args);
        if (app.got_subcommand("aggregate")) return run_aggregate(aggregate_args);
        if (app.got_subcommand("estimate")) return run_estimate(estimate_args);
        if (app.got_subcommand("verify")) return run_verify(verify_args, false);
        if (app.got_subcommand("network")) return run_verify(network_args, true);
        if (app.got_subcommand("report")) return run_report(report_args);
    } catch (const tailex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tailex::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
