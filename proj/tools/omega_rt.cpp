// omega-rt: workload driver, report checker, BREX and dispatch front ends.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "omega/brex/matcher.hpp"
#include "omega/harness/benches.hpp"
#include "omega/harness/bounds.hpp"
#include "omega/harness/workload.hpp"

namespace {

using namespace omega;

int write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << text;
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"omega-rt: bounded-pause heap, BREX and dispatch harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a seeded workload and write its report");
    std::string workload_name;
    harness::WorkloadSpec spec;
    std::size_t nursery_kib = spec.heap.nursery_bytes / 1024;
    std::string out_path = "-";
    std::string hist_path;
    run->add_option("--workload", workload_name, "churn|promotion|fragmentation|redos|structures|dispatch")
        ->required();
    run->add_option("--cycles", spec.cycles, "Allocations, rounds or repetitions (see README)");
    run->add_option("--seed", spec.seed);
    run->add_option("--nursery-kib", nursery_kib);
    run->add_option("--dec-budget", spec.heap.dec_budget);
    run->add_option("--defrag-budget", spec.heap.defrag_budget);
    run->add_option("--frag-threshold", spec.heap.frag_threshold);
    run->add_option("--live-target", spec.live_target, "promotion: retained objects");
    run->add_option("--survive", spec.survive_target, "promotion: fraction of allocations retained");
    run->add_option("--frag-leaves", spec.frag_leaves, "fragmentation: leaves per cycle");
    run->add_option("--out", out_path, "Report CSV path, - for stdout");
    run->add_option("--hist", hist_path, "Optional wall-clock pause histogram CSV");

    // check
    auto* check = app.add_subcommand("check", "Re-derive verdicts from a saved report");
    std::string in_path;
    check->add_option("--in", in_path)->required();

    // brex
    auto* brex_cmd = app.add_subcommand("brex", "Pattern matching");
    brex_cmd->require_subcommand(1);
    auto* brex_test = brex_cmd->add_subcommand("test", "Full-input match");
    std::string pattern;
    std::string subject;
    brex_test->add_option("pattern", pattern)->required();
    brex_test->add_option("string", subject)->required();
    auto* brex_search = brex_cmd->add_subcommand("search", "Leftmost-longest match in a file");
    std::string search_file;
    brex_search->add_option("pattern", pattern)->required();
    brex_search->add_option("file", search_file)->required();
    auto* brex_bench = brex_cmd->add_subcommand("bench", "Step counts over a corpus");
    std::string corpus = "redos";
    brex_bench->add_option("--corpus", corpus, "redos|stratified");

    // dispatch
    auto* dispatch_cmd = app.add_subcommand("dispatch", "Call-site resolution");
    dispatch_cmd->require_subcommand(1);
    auto* dispatch_bench = dispatch_cmd->add_subcommand("bench", "Probe counts and resolve time");
    std::size_t sites = 100;
    std::vector<std::size_t> targets;
    std::uint64_t dispatch_seed = 1;
    dispatch_bench->add_option("--sites", sites);
    dispatch_bench->add_option("--targets", targets, "Target counts (default: 1 3 16 64 200 1000)");
    dispatch_bench->add_option("--seed", dispatch_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto kind = harness::parse_workload(workload_name);
            if (!kind) {
                std::cerr << "unknown workload '" << workload_name << "'\n";
                return 2;
            }
            spec.kind = *kind;
            spec.heap.nursery_bytes = nursery_kib * 1024;
            harness::RunResult result = harness::run(spec);
            if (int rc = write_output(out_path, result.report.to_csv()); rc != 0) {
                return rc;
            }
            if (!hist_path.empty()) {
                return write_output(hist_path, result.pause_ns.export_csv());
            }
            return result.report.get("error") ? 3 : 0;
        }
        if (check->parsed()) {
            const harness::RunReport report = harness::RunReport::parse(read_file(in_path));
            try {
                const harness::BoundsVerdict v = harness::check_bounds(report);
                std::cout << v.describe();
                return v.pass() ? 0 : 1;
            } catch (const harness::InsufficientData& e) {
                std::cout << "footprint_fit: insufficient data (" << e.what() << ")\n";
                return 2;
            }
        }
        if (brex_test->parsed()) {
            const auto p = brex::CompiledPattern::compile(pattern);
            std::uint64_t steps = 0;
            const bool ok = p.accepts(subject, &steps);
            std::cout << (ok ? "match" : "no match") << " steps=" << steps << "\n";
            return ok ? 0 : 1;
        }
        if (brex_search->parsed()) {
            const auto p = brex::CompiledPattern::compile(pattern);
            const std::string text = read_file(search_file);
            std::uint64_t steps = 0;
            const auto span = p.search(text, &steps);
            if (!span) {
                std::cout << "no match steps=" << steps << "\n";
                return 1;
            }
            std::cout << span->start << "," << span->end << " steps=" << steps << "\n";
            return 0;
        }
        if (brex_bench->parsed()) {
            std::cout << harness::brex_bench_csv(harness::run_brex_bench(corpus, harness::brex_bench_lengths()));
            return 0;
        }
        if (dispatch_bench->parsed()) {
            if (targets.empty()) {
                targets = {1, 3, 16, 64, 200, 1000};
            }
            std::vector<harness::DispatchBenchRow> rows;
            for (std::size_t k : targets) {
                rows.push_back(harness::run_dispatch_bench(sites, k, dispatch_seed));
            }
            std::cout << harness::dispatch_bench_csv(rows);
            return 0;
        }
    } catch (const brex::BrexError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
