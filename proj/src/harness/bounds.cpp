#include "omega/harness/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace omega::harness {

FootprintFit fit_footprint(const std::vector<ReportRow>& rows, double residual_limit, double m_ceiling,
                           double object_bytes, double block_bytes) {
    FootprintFit fit;
    std::set<std::uint64_t> sizes;
    for (const ReportRow& r : rows) {
        sizes.insert(r.live_objects);
    }
    fit.points = rows.size();
    fit.distinct_live_sizes = sizes.size();
    if (sizes.size() < 3) {
        throw InsufficientData("footprint fit needs at least 3 distinct live-object counts, have " +
                               std::to_string(sizes.size()));
    }
    // Centered sums keep the normal equations well conditioned.
    double mean_x = 0;
    double mean_y = 0;
    for (const ReportRow& r : rows) {
        mean_x += static_cast<double>(r.live_objects);
        mean_y += static_cast<double>(r.event.footprint_bytes);
    }
    mean_x /= static_cast<double>(rows.size());
    mean_y /= static_cast<double>(rows.size());
    double sxx = 0;
    double sxy = 0;
    for (const ReportRow& r : rows) {
        const double dx = static_cast<double>(r.live_objects) - mean_x;
        sxx += dx * dx;
        sxy += dx * (static_cast<double>(r.event.footprint_bytes) - mean_y);
    }
    fit.m = sxy / sxx;
    fit.k = mean_y - fit.m * mean_x;
    for (const ReportRow& r : rows) {
        const double predicted = fit.k + fit.m * static_cast<double>(r.live_objects);
        fit.max_residual = std::max(fit.max_residual, std::abs(static_cast<double>(r.event.footprint_bytes) - predicted));
    }
    const double span = static_cast<double>(*sizes.rbegin() - *sizes.begin());
    fit.m_near_zero = fit.m < 0.05 * object_bytes && span * object_bytes > 4.0 * block_bytes;
    // A live range smaller than one block cannot move the footprint by a
    // whole block, so the slope says nothing there.
    fit.slope_undetermined = span * object_bytes < block_bytes;
    fit.pass = !fit.m_near_zero && fit.max_residual <= residual_limit && (fit.slope_undetermined || fit.m <= m_ceiling);
    return fit;
}

bool BoundsVerdict::pass() const {
    bool ok = !heap_workload || (pause_pass && (!footprint_applicable || footprint.pass) && barrier_pass);
    for (const auto& [name, value] : workload_checks) {
        ok = ok && value;
    }
    return ok;
}

std::string BoundsVerdict::describe() const {
    std::ostringstream out;
    if (heap_workload) {
        out << "pause_bound: " << (pause_pass ? "pass" : "fail") << " (max " << pause_max << " <= " << pause_bound
            << ", violations " << pause_violations << ")\n";
        if (!footprint_applicable) {
            out << "footprint_fit: not applicable\n";
        } else {
            out << "footprint_fit: " << (footprint.pass ? "pass" : "fail") << " K=" << format_double(footprint.k)
                << " M=" << format_double(footprint.m) << " residual=" << format_double(footprint.max_residual)
                << " points=" << footprint.points << (footprint.m_near_zero ? " M~0" : "")
                << (footprint.slope_undetermined ? " slope-undetermined" : "") << "\n";
        }
        out << "barrier_free: " << (barrier_pass ? "pass" : "fail") << "\n";
    }
    for (const auto& [name, value] : workload_checks) {
        out << name << ": " << (value ? "pass" : "fail") << "\n";
    }
    out << "verdict: " << (pass() ? "pass" : "fail") << "\n";
    return out.str();
}

BoundsVerdict check_bounds(const RunReport& report, CheckOptions options) {
    BoundsVerdict v;
    const std::string workload = report.get("workload").value_or("");
    v.heap_workload = workload != "redos" && workload != "structures" && workload != "dispatch";
    for (const char* flag : {"defrag_converged", "content_preserved", "brex_slope_within_cubic",
                             "dispatch_probes_within_bound"}) {
        if (auto value = report.get_flag(flag)) {
            v.workload_checks.emplace_back(flag, *value);
        }
    }
    if (report.get("sparse_blocks_peak")) {
        v.workload_checks.emplace_back("sparse_blocks_created", report.get_u64("sparse_blocks_peak") >= 10);
    }
    if (report.get("sparse_blocks_after")) {
        v.workload_checks.emplace_back("no_sparse_blocks_after_defrag", report.get_u64("sparse_blocks_after") == 0);
    }
    if (report.get("structure_operations")) {
        v.workload_checks.emplace_back("structures_agree_with_oracle", report.get_u64("structure_mismatches", 1) == 0);
        v.workload_checks.emplace_back("structures_within_bounds",
                                       report.get_u64("vector_bound_violations", 1) == 0 &&
                                           report.get_u64("map_bound_violations", 1) == 0);
    }
    if (report.get("error")) {
        v.workload_checks.emplace_back("no_heap_error", false);
    }
    if (!v.heap_workload) {
        v.footprint_applicable = false;
        return v;
    }

    v.pause_bound = report.get_u64("pause_bound");
    for (const ReportRow& r : report.rows) {
        v.pause_max = std::max(v.pause_max, r.event.pause_work_units);
        v.pause_violations += r.event.pause_work_units > v.pause_bound;
    }
    v.pause_pass = report.get("pause_bound").has_value() && v.pause_violations == 0;
    v.barrier_pass = report.get_u64("barrier_count_updates_outside", 1) == 0 &&
                     report.get_u64("barrier_slot_rewrites_outside", 1) == 0;

    // The fragmentation workload changes its live set on purpose and holds
    // sparse blocks, so the footprint model is not judged there.
    v.footprint_applicable = workload != "fragmentation";
    if (v.footprint_applicable) {
        const double block_bytes = static_cast<double>(report.get_u64("block_bytes", 65536));
        const double object_bytes = static_cast<double>(report.get_u64("object_bytes", 32));
        const double residual_limit = options.residual_limit > 0 ? options.residual_limit : block_bytes;
        const double m_ceiling = options.m_ceiling > 0 ? options.m_ceiling : 2.0 * object_bytes;
        v.footprint = fit_footprint(report.rows, residual_limit, m_ceiling, object_bytes, block_bytes);
    }
    return v;
}

}  // namespace omega::harness
