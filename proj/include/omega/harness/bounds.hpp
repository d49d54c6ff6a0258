#pragma once

// Verdicts computed from a report alone, so a saved report re-checks to the
// same answer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omega/harness/report.hpp"

namespace omega::harness {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FootprintFit {
    double k = 0.0;  // bytes
    double m = 0.0;  // bytes per live object
    double max_residual = 0.0;
    std::size_t points = 0;
    std::size_t distinct_live_sizes = 0;
    bool m_near_zero = false;
    bool slope_undetermined = false;
    bool pass = false;
};

struct CheckOptions {
    // 0: take block_bytes from the report.
    double residual_limit = 0.0;
    // 0: twice the report's object_bytes.
    double m_ceiling = 0.0;
};

// Least squares footprint = K + M * live_objects over the given rows.
// Requires at least three distinct live-object counts. M is flagged as
// near zero when it is under 5% of object_bytes although the live range
// spans more than four blocks' worth of objects. When the live range is
// under one block's worth, only the residual is judged.
FootprintFit fit_footprint(const std::vector<ReportRow>& rows, double residual_limit, double m_ceiling,
                           double object_bytes, double block_bytes);

struct BoundsVerdict {
    // False for the bench workloads (redos, structures, dispatch), which
    // carry only their own flags.
    bool heap_workload = true;
    std::uint64_t pause_bound = 0;
    std::uint64_t pause_max = 0;
    std::uint64_t pause_violations = 0;
    bool pause_pass = false;
    bool footprint_applicable = true;
    FootprintFit footprint;
    bool barrier_pass = false;
    // Workload-specific flags found in the report metadata.
    std::vector<std::pair<std::string, bool>> workload_checks;

    bool pass() const;
    std::string describe() const;
};

// Throws InsufficientData when the footprint fit applies and the report has
// fewer than three distinct live-object counts.
BoundsVerdict check_bounds(const RunReport& report, CheckOptions options = {});

}  // namespace omega::harness
