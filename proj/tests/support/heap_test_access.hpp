#pragma once

// Reaches into heap internals for detector sanity checks.

#include "../../src/memory/object_layout.hpp"
#include "omega/memory/heap.hpp"

namespace omega::memory {

struct HeapTestAccess {
    static ObjectHeader* header(ObjectHandle h) { return h.object_; }

    // Bumps a SHARED count (or turns a single-parent object SHARED with a
    // wrong count) without touching any referrer.
    static void corrupt_count(ObjectHandle h) {
        ObjectHeader* object = h.object_;
        if (object->state == ObjectState::Shared) {
            object->meta += 1;
        } else {
            object->state = ObjectState::Shared;
            object->meta = 7;
        }
    }

    static std::uint32_t block_of(ObjectHandle h) { return h.object_->block; }
    static bool same_object(ObjectHandle a, ObjectHandle b) { return a.object_ == b.object_; }
};

}  // namespace omega::memory
