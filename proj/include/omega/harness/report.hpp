#pragma once

// Run reports: `# key=value` metadata lines, then a CSV table with one row
// per collection. Columns are the event-ring export plus
// workload,cycle,live_objects.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omega/telemetry/event_ring.hpp"

namespace omega::harness {

inline constexpr const char* kReportExtraColumns = "workload,cycle,live_objects";

struct ReportRow {
    telemetry::GcEvent event;
    std::string workload;
    std::uint64_t cycle = 0;
    std::uint64_t live_objects = 0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

class RunReport {
public:
    // Insertion order is kept; setting an existing key replaces its value.
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, std::uint64_t value);
    void set(const std::string& key, double value);
    void set_flag(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

    std::optional<std::string> get(std::string_view key) const;
    std::uint64_t get_u64(std::string_view key, std::uint64_t fallback = 0) const;
    double get_double(std::string_view key, double fallback = 0.0) const;
    std::optional<bool> get_flag(std::string_view key) const;

    const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

    std::vector<ReportRow> rows;

    std::string to_csv() const;
    static RunReport parse(std::string_view text);

    friend bool operator==(const RunReport&, const RunReport&) = default;

private:
    std::vector<std::pair<std::string, std::string>> metadata_;
};

class ReportFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string report_header();

// Fixed six-decimal rendering so reports compare bytewise across runs.
std::string format_double(double value);

}  // namespace omega::harness
