#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <unordered_set>

#include "object_layout.hpp"
#include "omega/memory/heap.hpp"

namespace omega::memory {

std::size_t Heap::metadata_bytes() const {
    std::size_t bytes = sizeof(Heap);
    bytes += types_.size() * sizeof(TypeInfo);
    bytes += blocks_.size() * sizeof(Block);
    for (const Block& b : blocks_) {
        bytes += b.live_bits.size() * sizeof(std::uint64_t);
    }
    bytes += roots_.size() * sizeof(ObjectHeader*);
    bytes += epoch_prev_.size() * sizeof(ObjectHeader*);
    bytes += dec_queue_.size() * sizeof(ObjectHeader*);
    bytes += relocated_counts_.size() * 2 * sizeof(void*);
    return bytes;
}

HeapReport Heap::heap_report() const {
    HeapReport report;
    report.nursery_capacity = config_.nursery_bytes;
    report.footprint_bytes = config_.nursery_bytes + old_capacity_bytes_ + metadata_bytes();
    report.live_objects = old_live_objects_ + nursery_objects_;
    std::size_t small_capacity = 0;
    std::size_t small_live = 0;
    for (const Block& b : blocks_) {
        if (!b.in_use) {
            continue;
        }
        ++report.block_count;
        if (!b.is_large()) {
            small_capacity += b.capacity;
            small_live += b.live_bytes;
        }
    }
    report.frag_ratio = small_capacity == 0
                            ? 0.0
                            : 1.0 - static_cast<double>(small_live) / static_cast<double>(small_capacity);
    return report;
}

std::vector<BlockInfo> Heap::blocks() const {
    std::vector<BlockInfo> out;
    for (std::uint32_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        if (!b.in_use) {
            continue;
        }
        BlockInfo info;
        info.index = i;
        info.cell_bytes = b.cell_bytes;
        info.capacity_bytes = b.capacity;
        info.live_bytes = b.live_bytes;
        info.live_objects = b.live_count;
        info.large = b.is_large();
        info.evacuating = b.evacuating;
        info.frontier = !b.is_large() && classes_[b.size_class].current == i;
        out.push_back(info);
    }
    return out;
}

namespace {

std::string describe(const ObjectHeader* object, std::uint32_t type) {
    std::ostringstream os;
    os << "object(type=" << type << ", state=" << to_string(object->state) << ", block=" << object->block << ")";
    return os.str();
}

}  // namespace

ValidationReport Heap::validate_heap() const {
    ValidationReport report;
    auto violation = [&report](std::string text) { report.violations.push_back(std::move(text)); };

    std::unordered_set<const ObjectHeader*> young_large;
    for (const YoungLarge& y : young_large_) {
        young_large.insert(y.object);
    }

    // Every allocated old object, with its expected count.
    std::unordered_map<const ObjectHeader*, std::int64_t> expected;
    std::vector<ObjectHeader*> old_objects;
    for (std::uint32_t index = 0; index < blocks_.size(); ++index) {
        const Block& b = blocks_[index];
        if (!b.in_use) {
            continue;
        }
        std::size_t live_bytes = 0;
        std::uint32_t live_count = 0;
        for (std::uint32_t cell = 0; cell < b.carved; ++cell) {
            if (!b.live(cell)) {
                continue;
            }
            ObjectHeader* object = b.cell_at(cell);
            if (object->type_id >= types_.size()) {
                violation("block " + std::to_string(index) + " cell " + std::to_string(cell) + ": bad type id");
                continue;
            }
            live_bytes += type_info(object).total_size;
            ++live_count;
            if (object->block != index) {
                violation(describe(object, object->type_id) + ": header block index mismatch");
            }
            old_objects.push_back(object);
            expected.emplace(object, 0);
        }
        if (live_bytes != b.live_bytes || live_count != b.live_count) {
            violation("block " + std::to_string(index) + ": occupancy counter disagrees with live cells");
        }
    }
    if (old_objects.size() != old_live_objects_) {
        violation("old live object counter " + std::to_string(old_live_objects_) + " != " +
                  std::to_string(old_objects.size()));
    }

    auto is_nursery_object = [this](const ObjectHeader* p) {
        const auto* bytes = reinterpret_cast<const std::byte*>(p);
        return bytes >= nursery_.get() && bytes < nursery_.get() + cursor_;
    };

    // In-degrees from counted referrers.
    for (ObjectHeader* object : old_objects) {
        if (object->region != Region::Old) {
            violation(describe(object, object->type_id) + ": old cell with nursery region flag");
        }
        const bool counted = !young_large.contains(object);
        std::uint64_t* s = slots(object);
        for (std::uint32_t i : type_info(object).ref_slots) {
            const ObjectHeader* target = as_object(s[i]);
            if (target == nullptr) {
                continue;
            }
            if (in_nursery(target)) {
                violation(describe(object, object->type_id) + ": old -> nursery reference");
                continue;
            }
            auto it = expected.find(target);
            if (it == expected.end()) {
                violation(describe(object, object->type_id) + ": reference to freed storage");
                continue;
            }
            if (counted) {
                ++it->second;
            }
        }
    }
    for (ObjectHeader* object : old_objects) {
        if (object->state == ObjectState::Relocated) {
            if (auto it = expected.find(as_object(object->meta)); it != expected.end()) {
                ++it->second;
            }
        }
    }
    for (const ObjectHeader* e : epoch_prev_) {
        auto it = expected.find(e);
        if (it == expected.end()) {
            violation("root epoch entry references freed or nursery storage");
        } else {
            ++it->second;
        }
    }
    for (const ObjectHeader* d : dec_queue_) {
        auto it = expected.find(d);
        if (it == expected.end()) {
            violation("pending decrement targets freed storage");
        } else {
            // Not yet subtracted: the referrer is gone, the count still holds it.
            ++it->second;
        }
    }

    for (ObjectHeader* object : old_objects) {
        const std::int64_t want = expected[object];
        switch (object->state) {
        case ObjectState::UniqueParent:
            if (has_parent_slot(object)) {
                const auto* parent = reinterpret_cast<const std::uint64_t*>(static_cast<std::uintptr_t>(object->meta));
                if (*parent != as_word(object)) {
                    violation(describe(object, object->type_id) + ": parent slot does not reference the object");
                }
            }
            break;
        case ObjectState::Shared:
        case ObjectState::Relocated:
            break;
        default:
            violation(describe(object, object->type_id) + ": illegal state for an old object");
            continue;
        }
        if (young_large.contains(object)) {
            if (object->state != ObjectState::UniqueParent || object->meta != kPendingFirstRef) {
                violation(describe(object, object->type_id) + ": young large object already counted");
            }
            continue;
        }
        if (object->state == ObjectState::Relocated) {
            const ObjectHeader* replica = as_object(object->meta);
            if (!expected.contains(replica)) {
                violation(describe(object, object->type_id) + ": replica is not a live old object");
            }
        }
        const std::uint32_t actual = current_count(object);
        ++report.checked_counts;
        if (actual == kCountSaturated) {
            continue;
        }
        if (static_cast<std::int64_t>(actual) != want) {
            violation(describe(object, object->type_id) + ": count " + std::to_string(actual) +
                      " != expected " + std::to_string(want));
        }
    }

    // Trace from roots: legal states, no dangling references, no cycles.
    enum : std::uint8_t { kGrey = 1, kBlack = 2 };
    std::unordered_map<const ObjectHeader*, std::uint8_t> color;
    struct Frame {
        ObjectHeader* object;
        std::size_t next;
    };
    auto valid_target = [&](const ObjectHeader* target) {
        if (in_nursery(target)) {
            return is_nursery_object(target) && target->state == ObjectState::Plain;
        }
        return expected.contains(target);
    };
    for (ObjectHeader* root : roots_) {
        if (root == nullptr || color.contains(root)) {
            continue;
        }
        if (!valid_target(root)) {
            violation("root references freed or stale storage");
            continue;
        }
        std::vector<Frame> stack{{root, 0}};
        color[root] = kGrey;
        ++report.traced_objects;
        while (!stack.empty()) {
            Frame& frame = stack.back();
            const auto& refs = type_info(frame.object).ref_slots;
            if (frame.next == refs.size()) {
                color[frame.object] = kBlack;
                stack.pop_back();
                continue;
            }
            ObjectHeader* child = as_object(slots(frame.object)[refs[frame.next++]]);
            if (child == nullptr) {
                continue;
            }
            if (!valid_target(child)) {
                violation(describe(frame.object, frame.object->type_id) + ": reference to invalid storage");
                continue;
            }
            auto [it, inserted] = color.emplace(child, kGrey);
            if (!inserted) {
                if (it->second == kGrey) {
                    violation(describe(child, child->type_id) + ": cycle detected");
                }
                continue;
            }
            ++report.traced_objects;
            stack.push_back({child, 0});
        }
    }
    return report;
}

std::string Heap::debug_dump() const {
    std::unordered_map<const ObjectHeader*, std::size_t> ordinal;
    std::vector<ObjectHeader*> order;
    for (ObjectHeader* root : roots_) {
        if (root == nullptr || ordinal.contains(root)) {
            continue;
        }
        std::vector<ObjectHeader*> stack{root};
        while (!stack.empty()) {
            ObjectHeader* object = stack.back();
            stack.pop_back();
            if (!ordinal.emplace(object, order.size()).second) {
                continue;
            }
            order.push_back(object);
            const auto& refs = type_info(object).ref_slots;
            for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
                if (ObjectHeader* child = as_object(slots(object)[*it])) {
                    stack.push_back(child);
                }
            }
        }
    }
    std::ostringstream os;
    for (ObjectHeader* object : order) {
        const TypeInfo& info = type_info(object);
        os << "obj " << ordinal[object] << " type=" << object->type_id << " state=" << to_string(object->state)
           << " meta=" << current_count(object) << " slots=[";
        const std::uint64_t* s = slots(object);
        for (std::size_t i = 0; i < info.slot_count; ++i) {
            if (i > 0) {
                os << ',';
            }
            if (!info.is_ref[i]) {
                os << std::bit_cast<std::int64_t>(s[i]);
            } else if (s[i] == 0) {
                os << "null";
            } else {
                os << '@' << ordinal[as_object(s[i])];
            }
        }
        os << "]\n";
    }
    return os.str();
}

namespace {

// Hash-consing of object content: equal content gets equal ids no matter how
// many copies exist.
class ContentInterner {
public:
    using Key = std::vector<std::uint64_t>;

    std::uint64_t intern(Key key) {
        auto [it, inserted] = ids_.emplace(std::move(key), ids_.size());
        if (inserted) {
            order_.push_back(&it->first);
        }
        return it->second;
    }

    const std::vector<const Key*>& order() const { return order_; }

private:
    std::map<Key, std::uint64_t> ids_;
    std::vector<const Key*> order_;
};

}  // namespace

namespace {

template <typename TypeLookup, typename SlotLookup>
std::uint64_t canonical_id(ObjectHeader* root, ContentInterner& interner,
                           std::unordered_map<const ObjectHeader*, std::uint64_t>& memo, TypeLookup&& type_of,
                           SlotLookup&& slots_of) {
    struct Frame {
        ObjectHeader* object;
        std::size_t next;
    };
    if (auto it = memo.find(root); it != memo.end()) {
        return it->second;
    }
    std::vector<Frame> stack{{root, 0}};
    while (!stack.empty()) {
        Frame& frame = stack.back();
        const auto& info = type_of(frame.object);
        const std::uint64_t* s = slots_of(frame.object);
        bool descended = false;
        while (frame.next < info.ref_slots.size()) {
            ObjectHeader* child = as_object(s[info.ref_slots[frame.next]]);
            ++frame.next;
            if (child != nullptr && !memo.contains(child)) {
                stack.push_back({child, 0});
                descended = true;
                break;
            }
        }
        if (descended) {
            continue;
        }
        ContentInterner::Key key;
        key.reserve(1 + 2 * info.slot_count);
        key.push_back(frame.object->type_id);
        for (std::size_t i = 0; i < info.slot_count; ++i) {
            if (!info.is_ref[i]) {
                key.push_back(0);
                key.push_back(s[i]);
            } else if (s[i] == 0) {
                key.push_back(1);
                key.push_back(0);
            } else {
                key.push_back(2);
                key.push_back(memo.at(as_object(s[i])));
            }
        }
        memo[frame.object] = interner.intern(std::move(key));
        stack.pop_back();
    }
    return memo.at(root);
}

}  // namespace

std::string Heap::content_serialization() const {
    ContentInterner interner;
    std::unordered_map<const ObjectHeader*, std::uint64_t> memo;
    auto type_of = [this](const ObjectHeader* o) -> const TypeInfo& { return type_info(o); };
    auto slots_of = [this](ObjectHeader* o) -> const std::uint64_t* { return slots(o); };
    std::vector<std::string> root_ids;
    for (ObjectHeader* root : roots_) {
        root_ids.push_back(root == nullptr ? "null"
                                           : std::to_string(canonical_id(root, interner, memo, type_of, slots_of)));
    }
    std::ostringstream os;
    std::uint64_t id = 0;
    for (const ContentInterner::Key* key : interner.order()) {
        os << "node " << id++ << " type=" << (*key)[0] << " slots=[";
        for (std::size_t i = 1; i + 1 < key->size(); i += 2) {
            if (i > 1) {
                os << ',';
            }
            switch ((*key)[i]) {
            case 0: os << std::bit_cast<std::int64_t>((*key)[i + 1]); break;
            case 1: os << "null"; break;
            default: os << '#' << (*key)[i + 1]; break;
            }
        }
        os << "]\n";
    }
    os << "roots=[";
    for (std::size_t i = 0; i < root_ids.size(); ++i) {
        os << (i > 0 ? "," : "") << root_ids[i];
    }
    os << "]\n";
    return os.str();
}

bool Heap::structurally_equal(ObjectHandle a, ObjectHandle b) const {
    if (a.is_null() || b.is_null()) {
        return a.is_null() && b.is_null();
    }
    ContentInterner interner;
    std::unordered_map<const ObjectHeader*, std::uint64_t> memo;
    auto type_of = [this](const ObjectHeader* o) -> const TypeInfo& { return type_info(o); };
    auto slots_of = [this](ObjectHeader* o) -> const std::uint64_t* { return slots(o); };
    return canonical_id(checked(a), interner, memo, type_of, slots_of) ==
           canonical_id(checked(b), interner, memo, type_of, slots_of);
}

}  // namespace omega::memory
