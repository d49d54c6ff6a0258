#pragma once

// Fixed-capacity ring of per-collection snapshots. Once full, each push
// overwrites the oldest entry.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "omega/memory/heap.hpp"

namespace omega::telemetry {

struct GcEvent {
    std::uint64_t seq = 0;
    std::uint64_t timestamp_ns = 0;
    std::uint64_t pause_work_units = 0;
    std::uint64_t objects_evacuated = 0;
    std::uint64_t decrements_processed = 0;
    std::uint64_t objects_released = 0;
    std::uint64_t footprint_bytes = 0;

    friend bool operator==(const GcEvent&, const GcEvent&) = default;
};

inline constexpr const char* kGcEventColumns =
    "seq,timestamp_ns,pause_work_units,objects_evacuated,decrements_processed,objects_released,footprint_bytes";

// One CSV row, no trailing newline.
std::string to_csv(const GcEvent& event);

class GcEventRing {
public:
    explicit GcEventRing(std::size_t capacity = 4096);

    // Assigns the next sequence number and returns the stored event.
    const GcEvent& push(std::uint64_t timestamp_ns, const memory::GcStats& stats, std::uint64_t footprint_bytes);

    std::size_t capacity() const { return slots_.size(); }
    std::size_t size() const { return size_; }
    std::uint64_t pushed() const { return next_seq_; }

    // Oldest first.
    std::vector<GcEvent> events() const;

    std::size_t memory_bytes() const;

    // Header plus one row per retained event, oldest first.
    std::string export_csv() const;

private:
    std::vector<GcEvent> slots_;
    std::size_t head_ = 0;  // next write position
    std::size_t size_ = 0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace omega::telemetry
