#pragma once

// Seeded workloads. Every random choice comes from one mt19937_64 seeded
// with WorkloadSpec::seed, and report timestamps are a logical clock (the
// allocation count), so a report is a pure function of its WorkloadSpec.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "omega/harness/report.hpp"
#include "omega/memory/heap.hpp"
#include "omega/telemetry/histogram.hpp"

namespace omega::harness {

enum class WorkloadKind { Churn, Promotion, Fragmentation, Redos, Structures, Dispatch };

const char* to_string(WorkloadKind kind);
std::optional<WorkloadKind> parse_workload(std::string_view name);

// churn, promotion 100000; fragmentation 1; redos 1; structures 10000;
// dispatch 100.
std::uint64_t default_cycles(WorkloadKind kind);

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::Churn;
    // churn, promotion: allocations. fragmentation: build/drop rounds.
    // redos, structures, dispatch: bench repetitions. 0 picks
    // default_cycles(kind).
    std::uint64_t cycles = 0;
    std::uint64_t seed = 1;

    // promotion: retained objects and the fraction of allocations kept.
    std::size_t live_target = 10'000;
    double survive_target = 0.2;
    // churn: graphs are dropped after a uniform 1..max_graph allocations.
    std::size_t max_graph = 16;
    // fragmentation: leaves per spine and the budget of each explicit
    // defrag step, and the cap on such steps.
    std::size_t frag_leaves = 24'000;
    std::size_t defrag_step_budget = 1024;
    std::size_t max_defrag_steps = 10'000;
    // fragmentation: leave the collector's own per-collection defrag budget
    // in place. Off by default so the released spine leaves sparse blocks
    // for the explicit steps to repair; the report records the budget used.
    bool frag_collector_defrag = false;

    memory::HeapConfig heap;
};

struct RunResult {
    RunReport report;
    // Wall-clock duration of each collection in ns. Kept out of the report
    // so reports stay reproducible.
    telemetry::LatencyHistogram pause_ns;
};

// Runs the workload. HeapLimitExceeded is caught and recorded in the report
// (`error` metadata plus a final row with the partial statistics).
RunResult run(const WorkloadSpec& spec);

}  // namespace omega::harness
