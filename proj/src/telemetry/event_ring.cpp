#include "omega/telemetry/event_ring.hpp"

#include <stdexcept>

namespace omega::telemetry {

std::string to_csv(const GcEvent& e) {
    std::string out;
    for (std::uint64_t v : {e.seq, e.timestamp_ns, e.pause_work_units, e.objects_evacuated, e.decrements_processed,
                            e.objects_released, e.footprint_bytes}) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::to_string(v);
    }
    return out;
}

GcEventRing::GcEventRing(std::size_t capacity) : slots_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("event ring capacity must be positive");
    }
}

const GcEvent& GcEventRing::push(std::uint64_t timestamp_ns, const memory::GcStats& stats,
                                 std::uint64_t footprint_bytes) {
    GcEvent& slot = slots_[head_];
    slot = GcEvent{next_seq_++,          timestamp_ns,           stats.pause_work_units, stats.objects_evacuated,
                   stats.decrements_processed, stats.objects_released, footprint_bytes};
    head_ = (head_ + 1) % slots_.size();
    if (size_ < slots_.size()) {
        ++size_;
    }
    return slot;
}

std::vector<GcEvent> GcEventRing::events() const {
    std::vector<GcEvent> out;
    out.reserve(size_);
    const std::size_t first = (head_ + slots_.size() - size_) % slots_.size();
    for (std::size_t i = 0; i < size_; ++i) {
        out.push_back(slots_[(first + i) % slots_.size()]);
    }
    return out;
}

std::size_t GcEventRing::memory_bytes() const { return sizeof(*this) + slots_.capacity() * sizeof(GcEvent); }

std::string GcEventRing::export_csv() const {
    std::string out = kGcEventColumns;
    out += '\n';
    for (const GcEvent& e : events()) {
        out += to_csv(e);
        out += '\n';
    }
    return out;
}

}  // namespace omega::telemetry
