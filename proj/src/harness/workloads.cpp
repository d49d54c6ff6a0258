#include "omega/harness/workload.hpp"

#include <chrono>
#include <deque>
#include <numeric>
#include <random>
#include <vector>

#include "omega/harness/benches.hpp"

namespace omega::harness {

using memory::Heap;
using memory::ObjectHandle;
using memory::RootToken;
using memory::TypeId;
using memory::Value;

const char* to_string(WorkloadKind kind) {
    switch (kind) {
    case WorkloadKind::Churn: return "churn";
    case WorkloadKind::Promotion: return "promotion";
    case WorkloadKind::Fragmentation: return "fragmentation";
    case WorkloadKind::Redos: return "redos";
    case WorkloadKind::Structures: return "structures";
    case WorkloadKind::Dispatch: return "dispatch";
    }
    return "?";
}

std::optional<WorkloadKind> parse_workload(std::string_view name) {
    for (auto k : {WorkloadKind::Churn, WorkloadKind::Promotion, WorkloadKind::Fragmentation, WorkloadKind::Redos,
                   WorkloadKind::Structures, WorkloadKind::Dispatch}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

namespace {

constexpr std::size_t kDirectorySlots = 254;  // 16 + 8 * 254 = 2048 bytes

// Owns the heap for one run and turns every collection into a report row.
class HeapRun {
public:
    HeapRun(const WorkloadSpec& spec, RunResult& result)
        : spec_(spec), result_(result), heap_(spec.heap), rng_(spec.seed) {
        heap_.set_collection_observer([this](const memory::GcStats& s) { on_collection(s); });
    }

    Heap& heap() { return heap_; }
    std::mt19937_64& rng() { return rng_; }
    void set_cycle(std::uint64_t cycle) { cycle_ = cycle; }
    RunReport& report() { return result_.report; }

    // Runs `f` (which may hit a safepoint) and records its wall time when a
    // collection happened inside it.
    template <typename F>
    auto timed(F&& f) {
        const std::uint64_t before = heap_.stats().collections_count;
        const auto start = std::chrono::steady_clock::now();
        struct Done {
            HeapRun& run;
            std::uint64_t before;
            std::chrono::steady_clock::time_point start;
            ~Done() {
                if (run.heap_.stats().collections_count != before) {
                    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                    run.result_.pause_ns.record(static_cast<std::uint64_t>(ns));
                }
            }
        } done{*this, before, start};
        return f();
    }

    ObjectHandle alloc(TypeId type, std::initializer_list<Value> values) {
        return timed([&] { return heap_.alloc(type, values); });
    }
    ObjectHandle alloc(TypeId type, std::span<const Value> values) {
        return timed([&] { return heap_.alloc(type, values); });
    }
    memory::GcStats collect() {
        return timed([&] { return heap_.collect_minor(); });
    }

    void record_failure(const memory::HeapLimitExceeded& e) {
        RunReport& r = result_.report;
        r.set("error", std::string("HeapLimitExceeded: ") + e.what());
        const memory::GcStats& s = e.partial_stats();
        ReportRow row;
        row.event = {seq_++, heap_.allocations(), s.pause_work_units, s.objects_evacuated, s.decrements_processed,
                     s.objects_released, 0};
        row.workload = to_string(spec_.kind);
        row.cycle = cycle_;
        result_.report.rows.push_back(row);
    }

    void finish() {
        RunReport& r = result_.report;
        const auto& b = heap_.barrier_counters();
        const auto& s = heap_.stats();
        r.set("allocations", heap_.allocations());
        r.set("collections", s.collections_count);
        r.set("objects_evacuated_total", s.objects_evacuated);
        r.set("survive_ratio_measured",
              heap_.allocations() == 0 ? 0.0
                                       : static_cast<double>(s.objects_evacuated) /
                                             static_cast<double>(heap_.allocations()));
        r.set("barrier_count_updates_outside", b.count_updates_outside);
        r.set("barrier_slot_rewrites_outside", b.slot_rewrites_outside);
        r.set("barrier_count_updates_in_collector", b.count_updates_in_collector);
        r.set("barrier_slot_rewrites_in_collector", b.slot_rewrites_in_collector);
        std::uint64_t worst = 0;
        std::uint64_t violations = 0;
        for (const ReportRow& row : r.rows) {
            worst = std::max(worst, row.event.pause_work_units);
            violations += row.event.pause_work_units > heap_.pause_bound();
        }
        r.set("pause_work_max", worst);
        r.set("pause_violations", violations);
    }

private:
    void on_collection(const memory::GcStats& s) {
        const memory::HeapReport h = heap_.heap_report();
        ReportRow row;
        row.event = {seq_++,
                     heap_.allocations(),
                     s.pause_work_units,
                     s.objects_evacuated,
                     s.decrements_processed,
                     s.objects_released,
                     h.footprint_bytes};
        row.workload = to_string(spec_.kind);
        row.cycle = cycle_;
        row.live_objects = h.live_objects;
        result_.report.rows.push_back(std::move(row));
    }

    const WorkloadSpec& spec_;
    RunResult& result_;
    Heap heap_;
    std::mt19937_64 rng_;
    std::uint64_t cycle_ = 0;
    std::uint64_t seq_ = 0;
};

// Replaces the top root; no safepoint inside.
RootToken replace_top(Heap& heap, RootToken top, ObjectHandle value) {
    heap.pop_root(top);
    return heap.push_root(value);
}

// Short-lived DAGs: each node points at the previous one and sometimes at
// the one before that. The graph is dropped after 1..max_graph nodes.
void run_churn(const WorkloadSpec& spec, HeapRun& run) {
    Heap& heap = run.heap();
    const TypeId node = heap.register_type({.slot_count = 3, .ref_slots = {0, 1}});
    RootToken top = heap.push_root(ObjectHandle{});
    std::uint64_t remaining = 0;
    for (std::uint64_t cycle = 0; cycle < spec.cycles; ++cycle) {
        run.set_cycle(cycle);
        if (remaining == 0) {
            top = replace_top(heap, top, ObjectHandle{});
            remaining = 1 + run.rng()() % std::max<std::size_t>(1, spec.max_graph);
        }
        ObjectHandle head = heap.root(top);
        ObjectHandle side = (!head.is_null() && (run.rng()() & 1)) ? heap.read_ref(head, 0) : ObjectHandle{};
        ObjectHandle n = run.alloc(node, {head, side, static_cast<std::int64_t>(cycle)});
        top = replace_top(heap, top, n);
        --remaining;
    }
    heap.pop_root(top);
    run.collect();
}

// Rotating live set. Survivors of one nursery epoch form a cohort (a chain);
// after each collection the cohort is installed in a fresh directory object
// and the oldest cohorts are dropped so the retained total stays near
// live_target. Each collection therefore promotes one cohort and, once the
// live set is full, releases one, whatever the live-set size.
void run_promotion(const WorkloadSpec& spec, HeapRun& run) {
    Heap& heap = run.heap();
    const TypeId object = heap.register_type({.slot_count = 2, .ref_slots = {0}});  // 32 bytes
    std::vector<std::uint32_t> dir_refs(kDirectorySlots);
    std::iota(dir_refs.begin(), dir_refs.end(), 0u);
    const TypeId directory = heap.register_type({.slot_count = kDirectorySlots, .ref_slots = dir_refs});

    RootToken dir_root = heap.push_root(ObjectHandle{});
    RootToken cohort_root = heap.push_root(ObjectHandle{});
    std::size_t cohort_len = 0;
    std::deque<std::size_t> cohorts;  // newest first, parallel to directory slots
    std::size_t retained = 0;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uint64_t seen_collections = heap.stats().collections_count;

    auto install = [&]() {
        if (cohort_len == 0) {
            return;
        }
        cohorts.push_front(cohort_len);
        retained += cohort_len;
        while (cohorts.size() > 1 && (retained - cohorts.back() >= spec.live_target || cohorts.size() > kDirectorySlots)) {
            retained -= cohorts.back();
            cohorts.pop_back();
        }
        std::vector<Value> values(kDirectorySlots, ObjectHandle{});
        values[0] = heap.root(cohort_root);
        ObjectHandle old_dir = heap.root(dir_root);
        for (std::size_t i = 1; i < cohorts.size(); ++i) {
            values[i] = heap.read_ref(old_dir, i - 1);
        }
        ObjectHandle fresh = run.alloc(directory, std::span<const Value>(values));
        heap.pop_root(cohort_root);
        heap.pop_root(dir_root);
        dir_root = heap.push_root(fresh);
        cohort_root = heap.push_root(ObjectHandle{});
        cohort_len = 0;
    };

    for (std::uint64_t cycle = 0; cycle < spec.cycles; ++cycle) {
        run.set_cycle(cycle);
        if (coin(run.rng()) < spec.survive_target) {
            ObjectHandle n = run.alloc(object, {heap.root(cohort_root), static_cast<std::int64_t>(cycle)});
            cohort_root = replace_top(heap, cohort_root, n);
            ++cohort_len;
        } else {
            run.alloc(object, {ObjectHandle{}, static_cast<std::int64_t>(cycle)});
        }
        if (heap.stats().collections_count != seen_collections) {
            seen_collections = heap.stats().collections_count;
            install();
        }
    }
}

// Interleaved spines: per level, spine A holds one leaf and spine B three,
// with leaf sizes drawn from four size classes. Promotion order interleaves
// A and B leaves in the same blocks; dropping B leaves those blocks at about
// a quarter occupancy. Explicit bounded defrag steps then compact them.
void run_fragmentation(const WorkloadSpec& spec, HeapRun& run) {
    Heap& heap = run.heap();
    const TypeId spine_a = heap.register_type({.slot_count = 2, .ref_slots = {0, 1}});
    const TypeId spine_b = heap.register_type({.slot_count = 4, .ref_slots = {0, 1, 2, 3}});
    const TypeId leaves[] = {
        heap.register_type({.slot_count = 2, .ref_slots = {}}),   // 32 bytes
        heap.register_type({.slot_count = 6, .ref_slots = {}}),   // 64
        heap.register_type({.slot_count = 14, .ref_slots = {}}),  // 128
        heap.register_type({.slot_count = 30, .ref_slots = {}}),  // 256
    };
    auto leaf = [&](std::int64_t tag) {
        const TypeId t = leaves[run.rng()() % 4];
        std::vector<Value> values(heap.type_slot_count(t), tag);
        return run.alloc(t, std::span<const Value>(values));
    };
    auto sparse_blocks = [&]() {
        std::size_t n = 0;
        for (const memory::BlockInfo& b : heap.blocks()) {
            n += !b.large && !b.frontier && b.live_objects > 0 && b.occupancy() < 0.5;
        }
        return n;
    };

    std::uint64_t sparse_peak = 0;
    std::uint64_t steps_total = 0;
    bool converged_all = true;
    bool content_equal_all = true;
    std::uint64_t sparse_after_max = 0;
    for (std::uint64_t cycle = 0; cycle < spec.cycles; ++cycle) {
        run.set_cycle(cycle);
        RootToken a_root = heap.push_root(ObjectHandle{});
        RootToken b_root = heap.push_root(ObjectHandle{});
        const std::size_t levels = std::max<std::size_t>(1, spec.frag_leaves / 4);
        for (std::size_t i = 0; i < levels; ++i) {
            const auto tag = static_cast<std::int64_t>(i);
            ObjectHandle la = leaf(tag);
            ObjectHandle a = run.alloc(spine_a, {heap.root(a_root), la});
            ObjectHandle b = heap.root(b_root);
            heap.pop_root(b_root);
            a_root = replace_top(heap, a_root, a);
            b_root = heap.push_root(b);
            // Three leaves must be live at once; start over if a collection
            // moved the first ones.
            ObjectHandle l1;
            ObjectHandle l2;
            ObjectHandle l3;
            for (;;) {
                l1 = leaf(-tag);
                const std::uint64_t c0 = heap.stats().collections_count;
                l2 = leaf(-tag);
                l3 = leaf(-tag);
                if (heap.stats().collections_count == c0) {
                    break;
                }
            }
            ObjectHandle nb = run.alloc(spine_b, {heap.root(b_root), l1, l2, l3});
            b_root = replace_top(heap, b_root, nb);
        }
        run.collect();
        heap.pop_root(b_root);

        // The dropped root is reconciled at the next collection; then drain
        // the decrements that release spine B.
        for (int i = 0; i < 100'000; ++i) {
            run.collect();
            sparse_peak = std::max<std::uint64_t>(sparse_peak, sparse_blocks());
            if (heap.pending_decrements() == 0) {
                break;
            }
        }

        const std::string before = heap.content_serialization();
        std::size_t steps = 0;
        while (steps < spec.max_defrag_steps && (!heap.defrag_idle() || heap.pending_decrements() > 0)) {
            run.timed([&] { return heap.defrag_step(spec.defrag_step_budget); });
            run.collect();
            ++steps;
        }
        steps_total += steps;
        converged_all = converged_all && heap.defrag_idle();
        content_equal_all = content_equal_all && heap.content_serialization() == before;
        sparse_after_max = std::max<std::uint64_t>(sparse_after_max, sparse_blocks());
        // Spine A stays rooted for the rest of the run.
    }
    RunReport& r = run.report();
    r.set("sparse_blocks_peak", sparse_peak);
    r.set("defrag_steps", steps_total);
    r.set("sparse_blocks_after", sparse_after_max);
    r.set_flag("defrag_converged", converged_all);
    r.set_flag("content_preserved", content_equal_all);
}

void run_redos(RunReport& r) {
    double worst_slope = 0.0;
    for (const char* corpus : {"redos", "stratified"}) {
        const auto rows = run_brex_bench(corpus, brex_bench_lengths());
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            xs.push_back(static_cast<double>(rows[i].n));
            ys.push_back(static_cast<double>(rows[i].steps));
            if (i + 1 == rows.size() || rows[i + 1].pattern != rows[i].pattern) {
                worst_slope = std::max(worst_slope, loglog_slope(xs, ys));
                xs.clear();
                ys.clear();
            }
        }
    }
    r.set("brex_max_loglog_slope", worst_slope);
    r.set_flag("brex_slope_within_cubic", worst_slope <= 3.0);
}

void run_structures(const WorkloadSpec& spec, RunReport& r) {
    const StructuresBenchResult s = run_structures_bench(spec.cycles, spec.seed);
    r.set("structure_operations", s.operations);
    r.set("structure_mismatches", s.mismatches);
    r.set("vector_max_visits", s.vector_max_visits);
    r.set("vector_bound_violations", s.vector_bound_violations);
    r.set("map_max_visits", s.map_max_visits);
    r.set("map_bound_violations", s.map_bound_violations);
}

void run_dispatch(const WorkloadSpec& spec, RunReport& r) {
    const std::uint64_t sites = std::max<std::uint64_t>(1, spec.cycles);
    bool within = true;
    for (std::size_t targets : {1u, 3u, 16u, 64u, 200u, 1000u}) {
        const DispatchBenchRow row = run_dispatch_bench(sites, targets, spec.seed + targets, false);
        const std::string key = "dispatch_" + std::to_string(targets);
        r.set(key + "_strategy", std::string(dispatch::to_string(row.strategy)));
        r.set(key + "_probes_max", static_cast<std::uint64_t>(row.probes_max));
        r.set(key + "_probes_mean", row.probes_mean);
        const std::uint32_t bound = targets == 1 ? 0 : targets <= 64 ? static_cast<std::uint32_t>(targets) : 2;
        within = within && row.probes_max <= bound;
    }
    r.set_flag("dispatch_probes_within_bound", within);
}

}  // namespace

std::uint64_t default_cycles(WorkloadKind kind) {
    switch (kind) {
    case WorkloadKind::Fragmentation:
    case WorkloadKind::Redos: return 1;
    case WorkloadKind::Structures: return 10'000;
    case WorkloadKind::Dispatch: return 100;
    default: return 100'000;
    }
}

RunResult run(const WorkloadSpec& requested) {
    WorkloadSpec spec = requested;
    if (spec.cycles == 0) {
        spec.cycles = default_cycles(spec.kind);
    }
    if (spec.kind == WorkloadKind::Fragmentation && !spec.frag_collector_defrag) {
        spec.heap.defrag_budget = 0;
    }
    RunResult result;
    RunReport& r = result.report;
    r.set("workload", std::string(to_string(spec.kind)));
    r.set("seed", spec.seed);
    r.set("cycles", spec.cycles);
    r.set("rng", std::string("mt19937_64"));
    r.set("clock", std::string("logical:allocations"));
    r.set("nursery_bytes", static_cast<std::uint64_t>(spec.heap.nursery_bytes));
    r.set("block_bytes", static_cast<std::uint64_t>(spec.heap.block_bytes));
    r.set("dec_budget", static_cast<std::uint64_t>(spec.heap.dec_budget));
    r.set("defrag_budget", static_cast<std::uint64_t>(spec.heap.defrag_budget));
    r.set("frag_threshold", spec.heap.frag_threshold);
    r.set("max_roots", static_cast<std::uint64_t>(spec.heap.max_roots));

    switch (spec.kind) {
    case WorkloadKind::Redos:
        run_redos(r);
        return result;
    case WorkloadKind::Structures:
        run_structures(spec, r);
        return result;
    case WorkloadKind::Dispatch:
        run_dispatch(spec, r);
        return result;
    default:
        break;
    }

    if (spec.kind == WorkloadKind::Promotion) {
        r.set("live_target", static_cast<std::uint64_t>(spec.live_target));
        r.set("survive_target", spec.survive_target);
        r.set("object_bytes", std::uint64_t{32});
    } else if (spec.kind == WorkloadKind::Churn) {
        r.set("max_graph", static_cast<std::uint64_t>(spec.max_graph));
        r.set("object_bytes", std::uint64_t{40});
    } else {
        r.set("frag_leaves", static_cast<std::uint64_t>(spec.frag_leaves));
        r.set("defrag_step_budget", static_cast<std::uint64_t>(spec.defrag_step_budget));
    }
    HeapRun heap_run(spec, result);
    r.set("pause_bound", static_cast<std::uint64_t>(heap_run.heap().pause_bound()));
    try {
        switch (spec.kind) {
        case WorkloadKind::Churn: run_churn(spec, heap_run); break;
        case WorkloadKind::Promotion: run_promotion(spec, heap_run); break;
        default: run_fragmentation(spec, heap_run); break;
        }
    } catch (const memory::HeapLimitExceeded& e) {
        heap_run.record_failure(e);
    }
    heap_run.finish();
    return result;
}

}  // namespace omega::harness
