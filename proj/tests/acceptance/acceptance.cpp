// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "omega/brex/matcher.hpp"
#include "omega/brex/parser.hpp"
#include "omega/dispatch/dispatch.hpp"
#include "omega/harness/benches.hpp"
#include "omega/harness/bounds.hpp"
#include "omega/harness/workload.hpp"
#include "omega/memory/heap.hpp"
#include "omega/structures/ordered_map.hpp"
#include "omega/structures/persistent_vector.hpp"
#include "omega/structures/stable_sort.hpp"
#include "omega/telemetry/event_ring.hpp"
#include "omega/telemetry/histogram.hpp"
#include "support/brex_oracles.hpp"
#include "support/heap_test_access.hpp"

using namespace omega;

namespace {

// ---- pinned parameters ------------------------------------------------------

constexpr int kHeapOps = 100'000;
constexpr int kValidateEvery = 1'000;
constexpr int kMaxGraphDepth = 6;
constexpr std::uint64_t kBoundAllocations = 100'000;
constexpr std::uint64_t kPromotionCycles = 1'000'000;
constexpr double kPauseRatioLimit = 1.10;
constexpr double kResidualLimit = 65'536.0;  // one block
constexpr double kPromotionObjectBytes = 32.0;  // header + 2 slots
constexpr double kMCeiling = 2.0 * kPromotionObjectBytes;
constexpr std::uint64_t kSparseBlocksRequired = 10;
constexpr int kStructureOps = 10'000;
constexpr std::size_t kSortN = 100'000;
constexpr int kStratum0Patterns = 10'000;
constexpr int kStringsPerPattern = 24;
constexpr std::size_t kMaxStringLength = 10;
constexpr int kStratum1Patterns = 1'000;
constexpr std::size_t kStratum1Exhaustive = 8;
constexpr double kSlopeLimit = 3.0;
constexpr std::uint64_t kBacktrackerCap = 1'000'000;
constexpr int kDispatchSpecs = 1'000;
constexpr std::size_t kQuantileSamples = 100'000;
constexpr double kQuantileTolerance = 0.02;

// ---- reporting ---------------------------------------------------------------

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            detail << "first failure: " << what << "; ";
        }
        pass = pass && ok;
    }
};

int failures = 0;

void criterion(int number, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += out.pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s (%.2fs) %s\n", number, out.pass ? "PASS" : "FAIL", title, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
}

harness::RunResult run_workload(harness::WorkloadKind kind, std::uint64_t cycles,
                                std::size_t live_target = 10'000) {
    harness::WorkloadSpec spec;
    spec.kind = kind;
    spec.cycles = cycles;
    spec.live_target = live_target;
    return harness::run(spec);
}

// Reports of heap workloads run by earlier criteria, for the barrier check.
std::vector<std::pair<std::string, harness::RunReport>> heap_reports;
memory::BarrierCounters oracle_heap_barriers;

// ---- 1: heap oracle -------------------------------------------------------------

struct HeapOracleRun {
    memory::Heap heap{{.nursery_bytes = 4096, .block_bytes = 4096, .dec_budget = 16, .defrag_budget = 24}};
    memory::TypeId leaf;
    memory::TypeId node;
    std::mt19937_64 rng{20240611};
    std::vector<memory::RootToken> roots;
    std::uint64_t graphs = 0;
    std::uint64_t deepest = 0;

    HeapOracleRun() {
        leaf = heap.register_type({.slot_count = 2, .ref_slots = {}});
        node = heap.register_type({.slot_count = 3, .ref_slots = {0, 2}});
    }

    // Pushes one root holding a fresh graph of depth <= depth. Children are
    // rooted while their siblings are built, so every handle passed to alloc
    // is read after the last safepoint.
    memory::RootToken build(int depth, std::uint64_t level) {
        deepest = std::max(deepest, level);
        if (depth <= 1 || rng() % 4 == 0) {
            const auto v = static_cast<std::int64_t>(rng() % 1000);
            return heap.push_root(heap.alloc(leaf, {v, -v}));
        }
        memory::RootToken child[2];
        for (auto& c : child) {
            const auto choice = rng() % 4;
            if (choice == 0) {
                c = heap.push_root(memory::ObjectHandle{});
            } else if (choice == 1 && !roots.empty()) {
                c = heap.push_root(heap.root(roots[rng() % roots.size()]));  // shared
            } else {
                c = build(depth - 1, level + 1);
            }
        }
        const memory::ObjectHandle made =
            heap.alloc(node, {heap.root(child[0]), static_cast<std::int64_t>(level), heap.root(child[1])});
        heap.pop_root(child[1]);
        heap.pop_root(child[0]);
        return heap.push_root(made);
    }
};

void heap_oracle(Outcome& out) {
    HeapOracleRun run;
    memory::Heap& heap = run.heap;
    int validations = 0;
    std::string first_violation;
    for (int op = 1; op <= kHeapOps; ++op) {
        const auto kind = run.rng() % 100;
        if (kind < 55) {
            memory::RootToken t = run.build(1 + static_cast<int>(run.rng() % kMaxGraphDepth), 1);
            ++run.graphs;
            if (run.roots.size() < 40) {
                run.roots.push_back(t);
            } else {
                heap.pop_root(t);
            }
        } else if (kind < 70) {
            if (!run.roots.empty() && run.roots.size() < 40) {
                run.roots.push_back(heap.push_root(heap.root(run.roots[run.rng() % run.roots.size()])));
            }
        } else if (kind < 85) {
            if (!run.roots.empty()) {
                heap.pop_root(run.roots.back());
                run.roots.pop_back();
            }
        } else if (kind < 95) {
            heap.collect_minor();
        } else {
            heap.defrag_step(1 + run.rng() % 32);
        }
        if (op % kValidateEvery == 0) {
            const memory::ValidationReport report = heap.validate_heap();
            ++validations;
            if (!report.ok() && first_violation.empty()) {
                first_violation = "op " + std::to_string(op) + ": " + report.violations.front();
            }
        }
    }
    out.require(first_violation.empty(), first_violation);
    out.require(run.deepest <= kMaxGraphDepth, "graph deeper than the limit");

    // The detector itself must fire on a wrong count.
    heap.collect_minor();
    bool detector_live = true;
    if (!run.roots.empty()) {
        memory::HeapTestAccess::corrupt_count(heap.root(run.roots.front()));
        detector_live = !heap.validate_heap().ok();
    }
    out.require(detector_live, "corrupted count not detected");
    oracle_heap_barriers = heap.barrier_counters();
    out.detail << "ops=" << kHeapOps << " validations=" << validations << " graphs=" << run.graphs
               << " collections=" << heap.stats().collections_count << " max_depth=" << run.deepest
               << " corrupted_count_detected=" << (detector_live ? "yes" : "no");
}

// ---- 2-4: bounds --------------------------------------------------------------

void pause_bound(Outcome& out) {
    for (auto kind : {harness::WorkloadKind::Churn, harness::WorkloadKind::Promotion}) {
        const harness::RunReport r = run_workload(kind, kBoundAllocations).report;
        const harness::BoundsVerdict v = harness::check_bounds(r);
        out.require(!r.get("error"), "heap error in " + std::string(to_string(kind)));
        out.require(v.pause_pass && !r.rows.empty(), std::string(to_string(kind)) + " pause violation");
        out.detail << to_string(kind) << ": collections=" << r.rows.size() << " max=" << v.pause_max
                   << " bound=" << v.pause_bound << " violations=" << v.pause_violations << "; ";
        heap_reports.emplace_back(to_string(kind), r);
    }
}

std::map<std::size_t, harness::RunReport> promotion_runs;

const harness::RunReport& promotion(std::size_t live) {
    auto it = promotion_runs.find(live);
    if (it == promotion_runs.end()) {
        it = promotion_runs.emplace(live, run_workload(harness::WorkloadKind::Promotion, kPromotionCycles, live).report)
                 .first;
        heap_reports.emplace_back("promotion L=" + std::to_string(live), it->second);
    }
    return it->second;
}

std::uint64_t max_pause(const harness::RunReport& r) {
    std::uint64_t m = 0;
    for (const auto& row : r.rows) {
        m = std::max(m, row.event.pause_work_units);
    }
    return m;
}

void size_independence(Outcome& out) {
    const std::uint64_t small = max_pause(promotion(1'000));
    const std::uint64_t large = max_pause(promotion(100'000));
    const double ratio = static_cast<double>(std::max(small, large)) / static_cast<double>(std::min(small, large));
    out.require(small > 0 && large > 0, "no collections");
    out.require(ratio <= kPauseRatioLimit, "ratio above limit");
    out.detail << "max_pause L=1e3: " << small << " L=1e5: " << large << " ratio=" << harness::format_double(ratio)
               << " limit=" << kPauseRatioLimit;
}

void footprint(Outcome& out) {
    // One point per live size: the mean over the steady-state half of the run.
    std::vector<harness::ReportRow> means;
    std::vector<harness::ReportRow> steady;
    for (std::size_t live : {1'000u, 10'000u, 100'000u}) {
        const harness::RunReport& r = promotion(live);
        out.require(!r.get("error") && r.rows.size() >= 4, "promotion run too short");
        double foot = 0;
        double objs = 0;
        const std::size_t from = r.rows.size() / 2;
        for (std::size_t i = from; i < r.rows.size(); ++i) {
            foot += static_cast<double>(r.rows[i].event.footprint_bytes);
            objs += static_cast<double>(r.rows[i].live_objects);
            steady.push_back(r.rows[i]);
        }
        const double n = static_cast<double>(r.rows.size() - from);
        harness::ReportRow m;
        m.live_objects = static_cast<std::uint64_t>(std::llround(objs / n));
        m.event.footprint_bytes = static_cast<std::uint64_t>(std::llround(foot / n));
        means.push_back(m);
    }
    const harness::FootprintFit fit =
        harness::fit_footprint(means, kResidualLimit, kMCeiling, kPromotionObjectBytes, 65'536.0);
    const harness::FootprintFit per_row =
        harness::fit_footprint(steady, kResidualLimit, kMCeiling, kPromotionObjectBytes, 65'536.0);
    out.require(fit.max_residual <= kResidualLimit, "residual above one block");
    out.require(fit.m <= kMCeiling, "M above ceiling");
    out.require(!fit.m_near_zero, "M near zero over a wide live range");
    out.detail << "K=" << harness::format_double(fit.k) << " M=" << harness::format_double(fit.m)
               << " (ceiling " << kMCeiling << ") residual=" << harness::format_double(fit.max_residual)
               << " (limit " << kResidualLimit << "); per-collection rows: M="
               << harness::format_double(per_row.m) << " residual=" << harness::format_double(per_row.max_residual);
}

// ---- 5-6 ------------------------------------------------------------------------

const harness::RunReport& fragmentation_report() {
    static const harness::RunReport report = [] {
        harness::RunReport r = run_workload(harness::WorkloadKind::Fragmentation, 1).report;
        heap_reports.emplace_back("fragmentation", r);
        return r;
    }();
    return report;
}

void fragmentation(Outcome& out) {
    const harness::RunReport& r = fragmentation_report();
    out.require(!r.get("error"), "heap error");
    out.require(r.get_u64("sparse_blocks_peak") >= kSparseBlocksRequired, "too few sparse blocks");
    out.require(r.get_u64("sparse_blocks_after", 1) == 0, "sparse blocks remain");
    out.require(r.get_flag("defrag_converged") == true, "defrag did not converge");
    out.require(r.get_flag("content_preserved") == true, "content changed");
    out.detail << "sparse_peak=" << r.get_u64("sparse_blocks_peak") << " sparse_after=" << r.get_u64("sparse_blocks_after")
               << " defrag_steps=" << r.get_u64("defrag_steps") << " content_preserved="
               << r.get("content_preserved").value_or("?");
}

void barrier_free(Outcome& out) {
    fragmentation_report();
    out.require(oracle_heap_barriers.count_updates_outside == 0 && oracle_heap_barriers.slot_rewrites_outside == 0,
                "heap oracle run");
    std::uint64_t inside = 0;
    for (const auto& [name, r] : heap_reports) {
        const std::uint64_t counts = r.get_u64("barrier_count_updates_outside", 1);
        const std::uint64_t rewrites = r.get_u64("barrier_slot_rewrites_outside", 1);
        out.require(counts == 0 && rewrites == 0, name);
        inside += r.get_u64("barrier_count_updates_in_collector") + r.get_u64("barrier_slot_rewrites_in_collector");
    }
    out.detail << "runs=" << heap_reports.size() + 1 << " outside=0 required; in-collector events=" << inside;
}

// ---- 7-8: structures ----------------------------------------------------------------

double map_bound(std::size_t n) { return 2.0 * 1.45 * std::log2(static_cast<double>(n) + 2.0); }

void structures_check(Outcome& out) {
    const harness::StructuresBenchResult mixed = harness::run_structures_bench(kStructureOps, 7);
    out.require(mixed.mismatches == 0, "random ops disagree with oracle");
    out.require(mixed.vector_bound_violations == 0, "vector visit bound");
    out.require(mixed.map_bound_violations == 0, "map visit bound (mixed)");

    // Adversarial key orders: each inserts kStructureOps keys, looks them up,
    // then removes them in the same order.
    using Map = structures::OrderedMap<std::int64_t, std::int64_t>;
    const std::vector<std::pair<const char*, std::function<std::int64_t(int)>>> orders = {
        {"ascending", [](int i) { return i; }},
        {"descending", [](int i) { return kStructureOps - i; }},
        {"zigzag", [](int i) { return i % 2 == 0 ? i / 2 : kStructureOps - i / 2; }},
        {"organ-pipe", [](int i) { return i < kStructureOps / 2 ? 2 * i : 2 * (kStructureOps - i) + 1; }},
    };
    std::uint64_t worst_map = mixed.map_max_visits;
    for (const auto& [name, key] : orders) {
        Map map;
        std::map<std::int64_t, std::int64_t> oracle;
        std::uint64_t violations = 0;
        std::uint64_t mismatches = 0;
        auto step = [&](auto&& op) {
            structures::StepCounter c;
            const std::size_t before = map.size();
            op(c);
            worst_map = std::max(worst_map, c.node_visits);
            violations += static_cast<double>(c.node_visits) > map_bound(std::max(before, map.size()));
        };
        for (int i = 0; i < kStructureOps; ++i) {
            step([&](structures::StepCounter& c) { map = map.insert(key(i), i, &c); });
            oracle[key(i)] = i;
        }
        for (int i = 0; i < kStructureOps; ++i) {
            step([&](structures::StepCounter& c) { mismatches += map.find(key(i), &c) != oracle.at(key(i)); });
        }
        for (int i = 0; i < kStructureOps; ++i) {
            step([&](structures::StepCounter& c) { map = map.remove(key(i), &c); });
            oracle.erase(key(i));
            mismatches += map.size() != oracle.size();
        }
        out.require(violations == 0, std::string("map visit bound, ") + name);
        out.require(mismatches == 0, std::string("map oracle, ") + name);
    }

    // Vector grown and shrunk across every trie depth boundary.
    structures::PersistentVector<std::int64_t> vec;
    std::uint64_t vec_violations = 0;
    for (int i = 0; i < kStructureOps; ++i) {
        structures::StepCounter c;
        vec = vec.push_back(i, &c);
        vec_violations += c.node_visits > structures::ceil_log32(vec.size()) + 1;
    }
    for (int i = 0; i < kStructureOps; ++i) {
        structures::StepCounter c;
        const std::size_t n = vec.size();
        auto [next, x] = vec.pop_back(&c);
        vec_violations += c.node_visits > structures::ceil_log32(n) + 1;
        vec_violations += x != kStructureOps - 1 - i;
        vec = std::move(next);
    }
    out.require(vec_violations == 0, "vector grow/shrink");
    out.detail << "random_ops=" << mixed.operations << " mismatches=" << mixed.mismatches
               << " vector_max_visits=" << mixed.vector_max_visits << " map_max_visits=" << worst_map
               << " orders=ascending,descending,zigzag,organ-pipe";
}

void sort_check(Outcome& out) {
    std::mt19937_64 rng(99);
    const std::size_t n = kSortN;
    const auto log2n = static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n))));
    const std::uint64_t bound = n * log2n + n;
    std::vector<std::pair<const char*, std::vector<std::int64_t>>> inputs(4);
    inputs[0].first = "sorted";
    inputs[1].first = "reversed";
    inputs[2].first = "organ-pipe";
    inputs[3].first = "random";
    for (std::size_t i = 0; i < n; ++i) {
        // Keys repeat so stability is exercised on every input.
        const auto k = static_cast<std::int64_t>(i / 4);
        inputs[0].second.push_back(k);
        inputs[1].second.push_back(static_cast<std::int64_t>((n - 1 - i) / 4));
        inputs[2].second.push_back(static_cast<std::int64_t>(i < n / 2 ? i / 4 : (n - 1 - i) / 4));
        inputs[3].second.push_back(static_cast<std::int64_t>(rng() % (n / 8)));
    }
    using Item = std::pair<std::int64_t, std::size_t>;
    for (const auto& [name, keys] : inputs) {
        std::vector<Item> items;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            items.emplace_back(keys[i], i);
        }
        structures::StepCounter c;
        auto by_key = [](const Item& a, const Item& b) { return a.first < b.first; };
        const std::vector<Item> sorted = structures::stable_sort(items, by_key, &c);
        std::vector<Item> want = items;
        std::stable_sort(want.begin(), want.end(), by_key);
        out.require(sorted == want, std::string("order or stability, ") + name);
        out.require(c.comparisons <= bound, std::string("comparison bound, ") + name);
        out.detail << name << "=" << c.comparisons << " ";
    }
    out.detail << "(bound " << bound << ")";
}

// ---- 9-10: BREX ---------------------------------------------------------------------

void brex_differential(Outcome& out) {
    namespace oracle = brex::oracle;
    std::mt19937_64 rng(2024);
    std::uint64_t checked = 0;
    std::uint64_t fallbacks = 0;
    std::string first;
    for (int k = 0; k < kStratum0Patterns && first.empty(); ++k) {
        int budget = 6;
        const std::string text = oracle::random_regular(rng, budget);
        const brex::Ast ast = brex::parse(text);
        const auto compiled = brex::CompiledPattern::compile(ast);
        out.require(compiled.stratum() == 0, "generator produced a stratified pattern");
        for (int s = 0; s < kStringsPerPattern; ++s) {
            std::string input(rng() % (kMaxStringLength + 1), 'a');
            for (char& ch : input) {
                ch = "abc"[rng() % 3];
            }
            // A few random patterns make the backtracker exponential even at
            // length 10; past the cap the memoized span oracle decides.
            bool want = false;
            try {
                oracle::Backtracker bt(ast, input, kBacktrackerCap);
                want = bt.accepts();
            } catch (const oracle::StepLimitExceeded&) {
                want = oracle::SpanOracle(ast, input).accepts();
                ++fallbacks;
            }
            if (compiled.accepts(input) != want) {
                first = "'" + text + "' on '" + input + "'";
                break;
            }
            ++checked;
        }
    }
    out.require(first.empty(), "stratum 0 disagreement " + first);

    const auto strings = oracle::all_strings(kStratum1Exhaustive);
    std::uint64_t checked1 = 0;
    std::string first1;
    for (int k = 0; k < kStratum1Patterns && first1.empty(); ++k) {
        const std::string text = oracle::random_stratified(rng);
        const brex::Ast ast = brex::parse(text);
        const auto compiled = brex::CompiledPattern::compile(ast);
        out.require(compiled.stratum() >= 1, "stratum-1 generator produced a plain pattern");
        const oracle::DfaOracle dfa(ast);
        for (const auto& s : strings) {
            if (compiled.accepts(s) != dfa.accepts(s)) {
                first1 = "'" + text + "' on '" + s + "'";
                break;
            }
            ++checked1;
        }
    }
    out.require(first1.empty(), "stratum 1 disagreement " + first1);
    out.detail << "stratum0: " << kStratum0Patterns << " patterns, " << checked << " (pattern,string) pairs, length <= "
               << kMaxStringLength << " (" << fallbacks << " past the backtracker cap); stratum1: " << kStratum1Patterns << " patterns x all " << strings.size()
               << " strings over {a,b} of length <= " << kStratum1Exhaustive;
}

void redos(Outcome& out) {
    double worst = 0;
    std::string worst_pattern;
    for (const char* corpus : {"redos", "stratified"}) {
        const auto rows = harness::run_brex_bench(corpus, harness::brex_bench_lengths());
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
        for (const auto& row : rows) {
            series[row.pattern].first.push_back(static_cast<double>(row.n));
            series[row.pattern].second.push_back(static_cast<double>(row.steps));
        }
        for (const auto& [pattern, xy] : series) {
            const double slope = harness::loglog_slope(xy.first, xy.second);
            if (slope > worst) {
                worst = slope;
                worst_pattern = pattern;
            }
        }
    }
    out.require(worst <= kSlopeLimit, "slope above limit");

    const brex::Ast ast = brex::parse("(a+)+b");
    const std::string input(32, 'a');
    bool exceeded = false;
    std::uint64_t bt_steps = 0;
    try {
        brex::oracle::Backtracker bt(ast, input, kBacktrackerCap);
        bt.accepts();
        bt_steps = bt.steps();
    } catch (const brex::oracle::StepLimitExceeded&) {
        exceeded = true;
    }
    std::uint64_t engine_steps = 0;
    brex::CompiledPattern::compile(ast).accepts(input, &engine_steps);
    out.require(exceeded, "backtracker finished in " + std::to_string(bt_steps) + " steps");
    out.detail << "max slope=" << harness::format_double(worst) << " (" << worst_pattern << ", limit " << kSlopeLimit
               << "); n=32: backtracker > " << kBacktrackerCap << " steps, engine " << engine_steps << " steps";
}

// ---- 11-13 ---------------------------------------------------------------------

void dispatch_tables(Outcome& out) {
    std::mt19937_64 rng(31);
    std::uint64_t state = 500;
    std::map<dispatch::Strategy, int> tiers;
    std::uint32_t hashed_max = 0;
    for (int k = 0; k < kDispatchSpecs; ++k) {
        std::size_t n = 0;
        switch (k % 4) {
        case 0: n = 1 + rng() % 4; break;
        case 1: n = 5 + rng() % 60; break;
        default: n = 65 + rng() % 2000; break;
        }
        const dispatch::CallSiteSpec spec = harness::random_call_site(state, n);
        const auto table = dispatch::DispatchTable::build(spec);
        ++tiers[table.strategy()];
        bool agree = true;
        std::uint32_t worst = 0;
        for (const auto& target : spec) {
            // Linear oracle.
            dispatch::ImplId want = 0;
            for (const auto& t : spec) {
                if (t.type_id == target.type_id) {
                    want = t.impl_id;
                    break;
                }
            }
            std::uint32_t probes = 0;
            agree = agree && table.resolve(target.type_id, &probes) == want;
            worst = std::max(worst, probes);
        }
        const dispatch::ProbeAudit audit = dispatch::audit(table, spec);
        out.require(agree && audit.all_correct, "resolve disagrees with oracle");
        out.require(worst <= table.worst_case_probes() && audit.max <= table.worst_case_probes(),
                    "probes above worst_case_probes");
        if (table.strategy() == dispatch::Strategy::HashedTable) {
            hashed_max = std::max(hashed_max, audit.max);
            out.require(audit.max <= 2, "hashed probes above 2");
        }
    }
    out.require(tiers.size() == 4, "not every strategy exercised");
    out.detail << "specs=" << kDispatchSpecs;
    for (const auto& [s, count] : tiers) {
        out.detail << " " << dispatch::to_string(s) << "=" << count;
    }
    out.detail << " hashed_max_probes=" << hashed_max;
}

void telemetry_check(Outcome& out) {
    std::mt19937_64 rng(5);
    std::lognormal_distribution<double> dist(10.0, 2.0);
    telemetry::LatencyHistogram h;
    std::vector<std::uint64_t> samples;
    for (std::size_t i = 0; i < kQuantileSamples; ++i) {
        const auto v = static_cast<std::uint64_t>(std::min(dist(rng), 9e9));
        samples.push_back(v);
        h.record(v);
    }
    std::sort(samples.begin(), samples.end());
    for (double q : {0.5, 0.95, 0.99}) {
        const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()))));
        const double exact = static_cast<double>(samples[rank - 1]);
        const double got = static_cast<double>(h.quantile(q));
        const double err = std::abs(got - exact) / exact;
        out.require(err <= kQuantileTolerance, "quantile error above tolerance");
        out.detail << "q" << q << ": " << got << " vs " << exact << " (" << harness::format_double(err * 100) << "%) ";
    }

    auto memory_after = [](std::size_t events) {
        telemetry::LatencyHistogram hist;
        telemetry::GcEventRing ring;
        memory::GcStats stats;
        for (std::size_t i = 0; i < events; ++i) {
            stats.pause_work_units = i % 5000;
            hist.record(i * 7919 % 1'000'000'000);
            ring.push(i, stats, i * 64);
        }
        return std::make_pair(hist.memory_bytes(), ring.memory_bytes());
    };
    const auto small = memory_after(1'000);
    const auto large = memory_after(1'000'000);
    out.require(small == large, "memory grew with run length");
    out.detail << "memory 1e3 vs 1e6 events: histogram " << small.first << "/" << large.first << " B, ring "
               << small.second << "/" << large.second << " B";
}

void determinism(Outcome& out) {
    for (auto kind : {harness::WorkloadKind::Churn, harness::WorkloadKind::Promotion,
                      harness::WorkloadKind::Fragmentation, harness::WorkloadKind::Redos,
                      harness::WorkloadKind::Structures, harness::WorkloadKind::Dispatch}) {
        harness::WorkloadSpec spec;
        spec.kind = kind;
        spec.seed = 17;
        const std::string a = harness::run(spec).report.to_csv();
        const std::string b = harness::run(spec).report.to_csv();
        out.require(a == b, std::string(to_string(kind)) + " differs");
        out.detail << to_string(kind) << "=" << a.size() << "B ";
    }
}

}  // namespace

int main() {
    criterion(1, "heap correctness oracle", heap_oracle);
    criterion(2, "bounded pause", pause_bound);
    criterion(3, "old-generation-size independence", size_independence);
    criterion(4, "footprint fit", footprint);
    criterion(5, "barrier freedom", barrier_free);
    criterion(6, "defragmentation", fragmentation);
    criterion(7, "structures oracle and visit bounds", structures_check);
    criterion(8, "stable sort", sort_check);
    criterion(9, "BREX differential", brex_differential);
    criterion(10, "ReDoS bound", redos);
    criterion(11, "dispatch", dispatch_tables);
    criterion(12, "telemetry", telemetry_check);
    criterion(13, "determinism", determinism);
    std::printf("%s: %d of 13 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
