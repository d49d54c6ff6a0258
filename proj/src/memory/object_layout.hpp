#pragma once

#include <cstdint>

#include "omega/memory/heap.hpp"

namespace omega::memory {

// 16-byte object header followed by 8-byte slots. Reference slots hold the
// address of the target header (0 = null).
struct ObjectHeader {
    std::uint16_t type_id;
    Region region;
    ObjectState state;
    std::uint32_t block;
    std::uint64_t meta;
};

static_assert(sizeof(ObjectHeader) == kHeaderBytes);

// Thrown by the block allocator and converted to HeapLimitExceeded by the
// operation that triggered it.
struct OutOfOldSpace {};

inline ObjectHeader* as_object(std::uint64_t word) {
    return reinterpret_cast<ObjectHeader*>(static_cast<std::uintptr_t>(word));
}

inline std::uint64_t as_word(const ObjectHeader* object) {
    return static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(object));
}

inline std::uint64_t as_word(const std::uint64_t* slot) {
    return static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(slot));
}

inline std::uint32_t shared_count(const ObjectHeader* object) {
    return static_cast<std::uint32_t>(object->meta);
}

// Marks the enclosed work as collector work for the barrier counters.
class Heap::CollectorScope {
public:
    explicit CollectorScope(Heap& heap) : heap_(heap), saved_(heap.in_collector_) { heap_.in_collector_ = true; }
    ~CollectorScope() { heap_.in_collector_ = saved_; }

    CollectorScope(const CollectorScope&) = delete;
    CollectorScope& operator=(const CollectorScope&) = delete;

private:
    Heap& heap_;
    bool saved_;
};

}  // namespace omega::memory
