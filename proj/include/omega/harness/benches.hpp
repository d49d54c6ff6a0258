#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "omega/dispatch/dispatch.hpp"

namespace omega::harness {

// ---- BREX ------------------------------------------------------------------

struct BrexBenchRow {
    std::string pattern;
    std::size_t n = 0;
    std::uint64_t steps = 0;
    bool accepted = false;
};

// Named pattern sets: "redos" (nested quantifiers over "a" x n) and
// "stratified" (negation and conjunction mixed with the same families).
std::vector<std::string> brex_corpus(std::string_view name);
std::vector<std::size_t> brex_bench_lengths();

// Each pattern against "a" x n for every n.
std::vector<BrexBenchRow> run_brex_bench(std::string_view corpus, const std::vector<std::size_t>& lengths);
std::string brex_bench_csv(const std::vector<BrexBenchRow>& rows);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- Dispatch --------------------------------------------------------------

struct DispatchBenchRow {
    dispatch::Strategy strategy = dispatch::Strategy::Monomorphic;
    std::size_t targets = 0;
    std::uint32_t probes_max = 0;
    double probes_mean = 0.0;
    double ns_per_resolve = 0.0;
};

// `sites` random call sites of `targets` targets each. With timing off,
// ns_per_resolve is left at 0 so the rows are reproducible.
DispatchBenchRow run_dispatch_bench(std::size_t sites, std::size_t targets, std::uint64_t seed, bool timed = true);
std::string dispatch_bench_csv(const std::vector<DispatchBenchRow>& rows);

// Random call site with `n` distinct type ids.
dispatch::CallSiteSpec random_call_site(std::uint64_t& state, std::size_t n);

// ---- Structures ------------------------------------------------------------

struct StructuresBenchResult {
    std::uint64_t operations = 0;
    std::uint64_t vector_max_visits = 0;
    std::uint64_t vector_bound_violations = 0;
    std::uint64_t map_max_visits = 0;
    std::uint64_t map_bound_violations = 0;
    std::uint64_t mismatches = 0;
};

// Random vector and map operations checked against std::vector/std::map.
StructuresBenchResult run_structures_bench(std::uint64_t operations, std::uint64_t seed);

}  // namespace omega::harness
