#include <doctest.h>

#include <cmath>

#include "omega/harness/benches.hpp"
#include "omega/harness/bounds.hpp"
#include "omega/harness/workload.hpp"

using namespace omega::harness;

namespace {

WorkloadSpec small(WorkloadKind kind) {
    WorkloadSpec spec;
    spec.kind = kind;
    switch (kind) {
    case WorkloadKind::Structures: spec.cycles = 2'000; break;
    case WorkloadKind::Dispatch: spec.cycles = 5; break;
    case WorkloadKind::Fragmentation:
    case WorkloadKind::Redos: spec.cycles = 1; break;
    default: spec.cycles = 100'000;
    }
    spec.frag_leaves = 24'000;
    return spec;
}

ReportRow row(std::uint64_t live, std::uint64_t footprint, std::uint64_t pause = 1) {
    ReportRow r;
    r.live_objects = live;
    r.event.footprint_bytes = footprint;
    r.event.pause_work_units = pause;
    r.workload = "promotion";
    return r;
}

RunReport synthetic(const std::vector<ReportRow>& rows) {
    RunReport r;
    r.set("workload", std::string("promotion"));
    r.set("block_bytes", std::uint64_t{65536});
    r.set("object_bytes", std::uint64_t{32});
    r.set("pause_bound", std::uint64_t{100});
    r.set("barrier_count_updates_outside", std::uint64_t{0});
    r.set("barrier_slot_rewrites_outside", std::uint64_t{0});
    r.rows = rows;
    return r;
}

}  // namespace

TEST_CASE("report metadata and rows survive a round trip") {
    RunReport r;
    r.set("workload", std::string("churn"));
    r.set("seed", std::uint64_t{7});
    r.set("ratio", 0.25);
    r.set_flag("ok", true);
    r.set("seed", std::uint64_t{8});
    ReportRow a = row(10, 4096, 3);
    a.event.seq = 1;
    a.event.timestamp_ns = 500;
    a.cycle = 2;
    r.rows = {a, row(20, 8192)};

    const std::string text = r.to_csv();
    const RunReport back = RunReport::parse(text);
    CHECK(back == r);
    CHECK(back.to_csv() == text);
    CHECK(back.get_u64("seed") == 8);
    CHECK(back.get_double("ratio") == doctest::Approx(0.25));
    CHECK(back.get_flag("ok") == true);
    CHECK_FALSE(back.get("missing"));
    CHECK(r.metadata().size() == 4);
}

TEST_CASE("malformed reports are rejected") {
    CHECK_THROWS_AS(RunReport::parse("# seed=1\nnot,the,header\n"), ReportFormatError);
    CHECK_THROWS_AS(RunReport::parse("# novalue\n" + report_header() + "\n"), ReportFormatError);
    const std::string short_row = report_header() + "\n1,2,3\n";
    CHECK_THROWS_AS(RunReport::parse(short_row), ReportFormatError);
}

TEST_CASE("footprint fit recovers a linear model") {
    std::vector<ReportRow> rows;
    for (std::uint64_t live : {1000u, 5000u, 20000u, 80000u}) {
        rows.push_back(row(live, 300000 + 32 * live));
    }
    const FootprintFit fit = fit_footprint(rows, 65536, 64, 32, 65536);
    CHECK(fit.m == doctest::Approx(32.0));
    CHECK(fit.k == doctest::Approx(300000.0));
    CHECK(fit.max_residual < 1e-6);
    CHECK(fit.pass);
    CHECK_FALSE(fit.m_near_zero);
}

TEST_CASE("constant footprint over a wide live range is flagged") {
    std::vector<ReportRow> rows;
    for (std::uint64_t live : {1000u, 30000u, 90000u}) {
        rows.push_back(row(live, 1 << 20));
    }
    const FootprintFit fit = fit_footprint(rows, 65536, 64, 32, 65536);
    CHECK(fit.m_near_zero);
    CHECK_FALSE(fit.pass);
}

TEST_CASE("narrow live range judges the residual only") {
    std::vector<ReportRow> rows;
    for (std::uint64_t live = 0; live < 16; ++live) {
        rows.push_back(row(live, 300000 + (live % 2) * 1000 + live * 900));
    }
    const FootprintFit fit = fit_footprint(rows, 65536, 64, 40, 65536);
    CHECK(fit.slope_undetermined);
    CHECK(fit.m > 64);
    CHECK(fit.pass);
}

TEST_CASE("too few live sizes is insufficient data") {
    CHECK_THROWS_AS(fit_footprint({}, 65536, 64, 32, 65536), InsufficientData);
    CHECK_THROWS_AS(fit_footprint({row(1, 10), row(2, 20), row(2, 30)}, 65536, 64, 32, 65536), InsufficientData);
    CHECK_THROWS_AS(check_bounds(RunReport{}), InsufficientData);
}

TEST_CASE("pause and barrier verdicts") {
    std::vector<ReportRow> rows{row(100, 300000 + 3200), row(200, 300000 + 6400, 100), row(300, 300000 + 9600)};
    RunReport r = synthetic(rows);
    BoundsVerdict v = check_bounds(r);
    CHECK(v.pass());
    CHECK(v.pause_max == 100);

    r.rows[1].event.pause_work_units = 101;
    v = check_bounds(r);
    CHECK_FALSE(v.pause_pass);
    CHECK(v.pause_violations == 1);
    CHECK_FALSE(v.pass());

    r = synthetic(rows);
    r.set("barrier_slot_rewrites_outside", std::uint64_t{1});
    CHECK_FALSE(check_bounds(r).barrier_pass);
    CHECK(check_bounds(r).describe().find("verdict: fail") != std::string::npos);
}

TEST_CASE("workloads are deterministic for a fixed seed") {
    for (WorkloadKind kind : {WorkloadKind::Churn, WorkloadKind::Promotion, WorkloadKind::Fragmentation,
                              WorkloadKind::Structures, WorkloadKind::Dispatch, WorkloadKind::Redos}) {
        CAPTURE(std::string(to_string(kind)));
        const WorkloadSpec spec = small(kind);
        const std::string a = run(spec).report.to_csv();
        const std::string b = run(spec).report.to_csv();
        CHECK(a == b);
        const RunReport parsed = RunReport::parse(a);
        CHECK(parsed.get("workload") == std::string(to_string(kind)));
        CHECK_FALSE(parsed.get("error"));
    }
    WorkloadSpec other = small(WorkloadKind::Churn);
    other.seed = 2;
    CHECK(run(other).report.to_csv() != run(small(WorkloadKind::Churn)).report.to_csv());
}

TEST_CASE("heap workloads pass their own checks") {
    for (WorkloadKind kind : {WorkloadKind::Churn, WorkloadKind::Promotion, WorkloadKind::Fragmentation}) {
        CAPTURE(std::string(to_string(kind)));
        const RunResult result = run(small(kind));
        const BoundsVerdict v = check_bounds(result.report);
        CAPTURE(v.describe());
        CHECK(v.pass());
        CHECK(result.pause_ns.total() == result.report.rows.size());
    }
}

TEST_CASE("fragmentation leaves sparse blocks and repairs them") {
    const RunReport r = run(small(WorkloadKind::Fragmentation)).report;
    CHECK(r.get_u64("sparse_blocks_peak") >= 10);
    CHECK(r.get_u64("sparse_blocks_after") == 0);
    CHECK(r.get_flag("content_preserved") == true);
    CHECK(r.get_flag("defrag_converged") == true);
    CHECK(r.get_u64("defrag_budget") == 0);
}

TEST_CASE("heap limit is recorded, not thrown") {
    WorkloadSpec spec = small(WorkloadKind::Promotion);
    spec.live_target = 200'000;
    spec.cycles = 400'000;
    spec.heap.max_heap_bytes = 1 << 20;
    RunResult result;
    REQUIRE_NOTHROW(result = run(spec));
    CHECK(result.report.get("error"));
    CHECK_FALSE(result.report.rows.empty());
    const BoundsVerdict v = check_bounds(result.report);
    CHECK_FALSE(v.pass());
}

TEST_CASE("cycles default per workload") {
    CHECK(default_cycles(WorkloadKind::Churn) == 100'000);
    CHECK(default_cycles(WorkloadKind::Fragmentation) == 1);
    WorkloadSpec spec;
    spec.kind = WorkloadKind::Structures;
    CHECK(run(spec).report.get_u64("cycles") == 10'000);
}

TEST_CASE("log-log slope") {
    std::vector<double> x{8, 16, 32, 64};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(5 * v * v);
    }
    CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("bench workloads") {
    const RunReport redos = run(small(WorkloadKind::Redos)).report;
    CHECK(redos.get_double("brex_max_loglog_slope") <= 3.0);
    CHECK(check_bounds(redos).pass());

    const StructuresBenchResult s = run_structures_bench(5'000, 3);
    CHECK(s.mismatches == 0);
    CHECK(s.vector_bound_violations == 0);
    CHECK(s.map_bound_violations == 0);

    const DispatchBenchRow d = run_dispatch_bench(20, 200, 5, false);
    CHECK(d.strategy == omega::dispatch::Strategy::HashedTable);
    CHECK(d.probes_max <= 2);
    CHECK(d.ns_per_resolve == 0.0);
    CHECK(dispatch_bench_csv({d}) == dispatch_bench_csv({run_dispatch_bench(20, 200, 5, false)}));
}
