#include <bit>
#include <cassert>
#include <cstring>

#include "object_layout.hpp"
#include "omega/memory/heap.hpp"

namespace omega::memory {

namespace {

// First live cell at or after `from`, or cell_count when none.
template <typename BlockT>
std::uint32_t next_live(const BlockT& b, std::uint32_t from) {
    const std::uint32_t limit = b.carved;
    while (from < limit) {
        const std::uint64_t word = b.live_bits[from >> 6] >> (from & 63);
        if (word != 0) {
            const auto cell = from + static_cast<std::uint32_t>(std::countr_zero(word));
            return cell < limit ? cell : limit;
        }
        from = (from | 63) + 1;
    }
    return limit;
}

}  // namespace

bool Heap::is_source_candidate(std::uint32_t index) const {
    const Block& b = blocks_[index];
    return b.in_use && !b.is_large() && !b.evacuating && b.live_count > 0 &&
           classes_[b.size_class].current != index &&
           static_cast<double>(b.live_bytes) < config_.frag_threshold * static_cast<double>(b.capacity);
}

// Large objects allocated since the last collection carry no counts yet and
// stay put; blocks holding one wait for a later step.
bool Heap::holds_young_large(std::uint32_t index) const {
    for (const YoungLarge& y : young_large_) {
        if (y.object->block == index) {
            return true;
        }
    }
    return false;
}

void Heap::select_sources() {
    for (auto it = sparse_.begin(); it != sparse_.end();) {
        const std::uint32_t index = *it;
        if (!is_source_candidate(index)) {
            it = sparse_.erase(it);
            continue;
        }
        if (holds_young_large(index)) {
            ++it;
            continue;
        }
        Block& b = blocks_[index];
        b.evacuating = true;
        if (b.available) {
            classes_[b.size_class].available.erase(index);
            b.available = false;
        }
        evac_queue_.push_back(index);
        it = sparse_.erase(it);
    }
}

bool Heap::defrag_idle() const {
    if (!evac_queue_.empty() || !relocated_counts_.empty()) {
        return false;
    }
    for (std::uint32_t index : sparse_) {
        if (is_source_candidate(index)) {
            return false;
        }
    }
    return true;
}

std::size_t Heap::relocation_cost(const ObjectHeader* object) const {
    return 1 + type_info(object).ref_slots.size();
}

DefragStats Heap::defrag_step(std::size_t budget_slots) {
    check_usable();
    CollectorScope scope(*this);
    GcStats stats;
    DefragStats result;
    try {
        result = run_defrag(budget_slots, stats);
    } catch (const OutOfOldSpace&) {
        poisoned_ = true;
        cumulative_ += stats;
        throw HeapLimitExceeded("old generation exhausted during defragmentation", stats);
    }
    // Standalone steps contribute work but are not collections.
    stats.pause_work_units = 0;
    cumulative_ += stats;
    return result;
}

DefragStats Heap::run_defrag(std::size_t budget, GcStats& stats) {
    DefragStats result;
    const std::uint64_t released_before = blocks_released_;
    select_sources();

    // Relocation of live objects out of source blocks. A single object whose
    // cost exceeds the remaining budget waits for the next step, unless it is
    // the first item of this step.
    bool progressed = false;
    while (budget > 0 && !evac_queue_.empty()) {
        const std::uint32_t index = evac_queue_.front();
        if (!blocks_[index].in_use || !blocks_[index].evacuating) {
            evac_queue_.pop_front();
            evac_cell_ = 0;
            continue;
        }
        const std::uint32_t cell = next_live(blocks_[index], evac_cell_);
        if (cell >= blocks_[index].carved) {
            evac_queue_.pop_front();
            evac_cell_ = 0;
            continue;
        }
        ObjectHeader* object = blocks_[index].cell_at(cell);
        if (object->state == ObjectState::Relocated) {
            evac_cell_ = cell + 1;
            --budget;
            progressed = true;
            continue;
        }
        const std::size_t cost = relocation_cost(object);
        if (cost > budget && progressed) {
            break;
        }
        evac_cell_ = cell + 1;
        if (has_parent_slot(object)) {
            relocate_eagerly(object, stats);
        } else {
            replicate(object, stats);
        }
        ++result.objects_relocated;
        budget = cost >= budget ? 0 : budget - cost;
        progressed = true;
    }

    if (budget > 0 && !relocated_counts_.empty()) {
        scan_referrers(budget, stats, result);
    }
    fix_moved_references();
    result.blocks_freed = blocks_released_ - released_before;
    return result;
}

// Single-parent objects move outright: copy, redirect the one parent slot,
// free the original.
void Heap::relocate_eagerly(ObjectHeader* object, GcStats& stats) {
    auto* parent_slot = reinterpret_cast<std::uint64_t*>(static_cast<std::uintptr_t>(object->meta));
    assert(*parent_slot == as_word(object));
    const std::size_t size = type_info(object).total_size;
    ObjectHeader* copy = allocate_old(size);
    const std::uint32_t block = copy->block;
    std::memcpy(copy, object, size);
    copy->block = block;
    std::uint64_t* from = slots(object);
    std::uint64_t* to = slots(copy);
    for (std::uint32_t i : type_info(object).ref_slots) {
        ObjectHeader* child = as_object(to[i]);
        if (child == nullptr) {
            continue;
        }
        ObjectHeader* replica = final_replica(child);
        if (replica != child) {
            rewrite_slot(&to[i], replica);
            increment(replica, as_word(&to[i]), stats);
            enqueue_decrement(child);
        } else if (child->state == ObjectState::UniqueParent && child->meta == as_word(&from[i])) {
            child->meta = as_word(&to[i]);
        }
    }
    rewrite_slot(parent_slot, copy);
    moved_[object] = copy;
    free_cell(object);
}

// Shared objects are duplicated; the original stays readable and keeps its
// count until every referrer has been redirected by the scanner.
void Heap::replicate(ObjectHeader* object, GcStats& stats) {
    const std::size_t size = type_info(object).total_size;
    ObjectHeader* replica = allocate_old(size);
    const std::uint32_t block = replica->block;
    std::memcpy(replica, object, size);
    replica->block = block;
    replica->state = ObjectState::UniqueParent;
    replica->meta = kPendingFirstRef;
    std::uint64_t* s = slots(replica);
    for (std::uint32_t i : type_info(object).ref_slots) {
        ObjectHeader* child = as_object(s[i]);
        if (child == nullptr) {
            continue;
        }
        ObjectHeader* target = final_replica(child);
        if (target != child) {
            rewrite_slot(&s[i], target);
        }
        increment(target, as_word(&s[i]), stats);
    }
    relocated_counts_[object] = current_count(object);
    object->state = ObjectState::Relocated;
    object->meta = as_word(replica);
    // The original keeps its replica alive until it dies itself.
    increment(replica, kReplicaOwner, stats);
}

bool Heap::scan_slot(std::uint64_t* slot, bool counted, GcStats& stats) {
    ObjectHeader* target = as_object(*slot);
    if (target == nullptr || target->state != ObjectState::Relocated) {
        return false;
    }
    ObjectHeader* replica = final_replica(target);
    rewrite_slot(slot, replica);
    if (counted) {
        increment(replica, as_word(slot), stats);
        enqueue_decrement(target);
    }
    return true;
}

// Cyclic scan over old-object reference slots, root entries and the root
// epoch list, redirecting references to RELOCATED originals.
void Heap::scan_referrers(std::size_t budget, GcStats& stats, DefragStats& result) {
    using Phase = ScanCursor::Phase;
    bool progressed = false;
    std::size_t wraps = 0;
    while (budget > 0 && !relocated_counts_.empty()) {
        switch (scan_.phase) {
        case Phase::Blocks: {
            if (scan_.block >= blocks_.size()) {
                scan_.phase = Phase::Roots;
                scan_.index = 0;
                break;
            }
            const Block& b = blocks_[scan_.block];
            if (!b.in_use) {
                ++scan_.block;
                scan_.cell = 0;
                break;
            }
            const std::uint32_t cell = next_live(b, scan_.cell);
            if (cell >= b.carved) {
                ++scan_.block;
                scan_.cell = 0;
                break;
            }
            ObjectHeader* object = b.cell_at(cell);
            const auto& refs = type_info(object).ref_slots;
            const std::size_t cost = 1 + refs.size();
            if (cost > budget && progressed) {
                return;
            }
            scan_.cell = cell + 1;
            budget = cost >= budget ? 0 : budget - cost;
            progressed = true;
            if (object->state == ObjectState::Relocated) {
                break;
            }
            bool counted = true;
            for (const YoungLarge& y : young_large_) {
                if (y.object == object) {
                    counted = false;
                }
            }
            std::uint64_t* s = slots(object);
            for (std::uint32_t i : refs) {
                ++result.slots_scanned;
                scan_slot(&s[i], counted, stats);
            }
            break;
        }
        case Phase::Roots:
            if (scan_.index >= roots_.size()) {
                scan_.phase = Phase::Epoch;
                scan_.index = 0;
                break;
            }
            if (ObjectHeader* r = roots_[scan_.index]; r != nullptr && r->state == ObjectState::Relocated) {
                roots_[scan_.index] = final_replica(r);
            }
            ++scan_.index;
            ++result.slots_scanned;
            --budget;
            progressed = true;
            break;
        case Phase::Epoch:
            if (scan_.index >= epoch_prev_.size()) {
                scan_.phase = Phase::Blocks;
                scan_.block = 0;
                scan_.cell = 0;
                scan_.index = 0;
                // An empty heap pass cannot make progress; stop after two.
                if (++wraps > 1 && !progressed) {
                    return;
                }
                break;
            }
            if (ObjectHeader* e = epoch_prev_[scan_.index]; e->state == ObjectState::Relocated) {
                ObjectHeader* replica = final_replica(e);
                increment(replica, kRootParent, stats);
                enqueue_decrement(e);
                epoch_prev_[scan_.index] = replica;
            }
            ++scan_.index;
            ++result.slots_scanned;
            --budget;
            progressed = true;
            break;
        }
    }
}

// Eager moves free the original immediately. Root entries and young objects
// are not counted referrers, so they are patched here.
void Heap::fix_moved_references() {
    if (moved_.empty()) {
        return;
    }
    auto lookup = [this](ObjectHeader* p) -> ObjectHeader* {
        auto it = moved_.find(p);
        return it == moved_.end() ? nullptr : it->second;
    };
    for (ObjectHeader*& r : roots_) {
        if (ObjectHeader* to = r ? lookup(r) : nullptr) {
            r = to;
        }
    }
    auto patch = [&](ObjectHeader* object) {
        std::uint64_t* s = slots(object);
        for (std::uint32_t i : type_info(object).ref_slots) {
            if (ObjectHeader* to = s[i] ? lookup(as_object(s[i])) : nullptr) {
                rewrite_slot(&s[i], to);
            }
        }
    };
    for (std::size_t offset = 0; offset < cursor_;) {
        auto* object = reinterpret_cast<ObjectHeader*>(nursery_.get() + offset);
        patch(object);
        offset += type_info(object).total_size;
    }
    for (const YoungLarge& y : young_large_) {
        patch(y.object);
    }
    moved_.clear();
}

}  // namespace omega::memory
