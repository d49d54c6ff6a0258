#include "omega/memory/heap.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstring>

#include "object_layout.hpp"

namespace omega::memory {

const char* to_string(ObjectState state) {
    switch (state) {
    case ObjectState::Plain: return "PLAIN";
    case ObjectState::Forwarded: return "FORWARDED";
    case ObjectState::UniqueParent: return "UNIQUE_PARENT";
    case ObjectState::Shared: return "SHARED";
    case ObjectState::Relocated: return "RELOCATED";
    }
    return "?";
}

const char* to_string(HeapErrc code) {
    switch (code) {
    case HeapErrc::InvalidDescriptor: return "InvalidDescriptor";
    case HeapErrc::DuplicateType: return "DuplicateType";
    case HeapErrc::SlotOutOfRange: return "SlotOutOfRange";
    case HeapErrc::UnknownType: return "UnknownType";
    case HeapErrc::ArityMismatch: return "ArityMismatch";
    case HeapErrc::KindMismatch: return "KindMismatch";
    case HeapErrc::InvalidHandle: return "InvalidHandle";
    case HeapErrc::HeapLimitExceeded: return "HeapLimitExceeded";
    case HeapErrc::RootStackViolation: return "RootStackViolation";
    case HeapErrc::RootLimitExceeded: return "RootLimitExceeded";
    }
    return "?";
}

GcStats& GcStats::operator+=(const GcStats& other) {
    objects_evacuated += other.objects_evacuated;
    bytes_promoted += other.bytes_promoted;
    increments_applied += other.increments_applied;
    decrements_processed += other.decrements_processed;
    objects_released += other.objects_released;
    pause_work_units += other.pause_work_units;
    collections_count += other.collections_count;
    return *this;
}

HeapError::HeapError(HeapErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

HeapLimitExceeded::HeapLimitExceeded(const std::string& what, GcStats partial)
    : HeapError(HeapErrc::HeapLimitExceeded, what), partial_(partial) {}

namespace {

std::size_t round_up(std::size_t n, std::size_t to) { return (n + to - 1) / to * to; }

int size_class_for(std::size_t size) {
    std::size_t cls = std::max(kMinSizeClass, std::bit_ceil(size));
    if (cls > kMaxSizeClass) {
        return -1;
    }
    return std::countr_zero(cls) - std::countr_zero(kMinSizeClass);
}

}  // namespace

bool Heap::has_parent_slot(const ObjectHeader* object) {
    return object->state == ObjectState::UniqueParent && object->meta > kReplicaOwner;
}

ObjectHeader* Heap::Block::cell_at(std::uint32_t cell) const {
    return reinterpret_cast<ObjectHeader*>(storage.get() + static_cast<std::size_t>(cell) * cell_bytes);
}

Heap::Heap(HeapConfig config) : config_(config) {
    if (config_.nursery_bytes < 64 || config_.nursery_bytes % kGranule != 0) {
        throw HeapError(HeapErrc::InvalidDescriptor, "nursery_bytes must be a multiple of 8 and at least 64");
    }
    if (config_.block_bytes < kMaxSizeClass || config_.block_bytes % kMaxSizeClass != 0) {
        throw HeapError(HeapErrc::InvalidDescriptor, "block_bytes must be a multiple of 4096");
    }
    if (!(config_.frag_threshold >= 0.0 && config_.frag_threshold <= 1.0)) {
        throw HeapError(HeapErrc::InvalidDescriptor, "frag_threshold must lie in [0, 1]");
    }
    nursery_.reset(new std::byte[config_.nursery_bytes]);
    young_limit_ = config_.nursery_bytes;
}

Heap::~Heap() = default;

void Heap::set_collection_observer(CollectionObserver observer) { observer_ = std::move(observer); }

TypeId Heap::register_type(const TypeDescriptor& descriptor) {
    const auto next = static_cast<TypeId>(types_.size());
    if (descriptor.type_id && *descriptor.type_id != next) {
        if (*descriptor.type_id < next) {
            throw HeapError(HeapErrc::DuplicateType, "type id " + std::to_string(*descriptor.type_id) + " already registered");
        }
        throw HeapError(HeapErrc::InvalidDescriptor, "type ids are dense; expected " + std::to_string(next));
    }
    if (next > 0xFFFFu) {
        throw HeapError(HeapErrc::InvalidDescriptor, "too many types");
    }
    TypeInfo info;
    info.slot_count = descriptor.slot_count;
    info.is_ref.assign(descriptor.slot_count, false);
    for (std::size_t i = 0; i < descriptor.ref_slots.size(); ++i) {
        const std::uint32_t slot = descriptor.ref_slots[i];
        if (slot >= descriptor.slot_count) {
            throw HeapError(HeapErrc::SlotOutOfRange, "ref slot " + std::to_string(slot) + " >= slot count " +
                                                          std::to_string(descriptor.slot_count));
        }
        if (i > 0 && slot <= descriptor.ref_slots[i - 1]) {
            throw HeapError(HeapErrc::InvalidDescriptor, "ref slots must be strictly increasing");
        }
        info.is_ref[slot] = true;
    }
    info.ref_slots = descriptor.ref_slots;
    const std::size_t minimum = kHeaderBytes + kGranule * descriptor.slot_count;
    info.total_size = descriptor.total_size == 0 ? minimum : descriptor.total_size;
    if (info.total_size < minimum || info.total_size % kGranule != 0) {
        throw HeapError(HeapErrc::InvalidDescriptor, "total_size must cover header and slots and be a multiple of 8");
    }
    types_.push_back(std::move(info));
    return next;
}

std::size_t Heap::type_size(TypeId type) const { return type_info(type).total_size; }
std::size_t Heap::type_slot_count(TypeId type) const { return type_info(type).slot_count; }

const Heap::TypeInfo& Heap::type_info(TypeId type) const {
    if (type >= types_.size()) {
        throw HeapError(HeapErrc::UnknownType, "type id " + std::to_string(type));
    }
    return types_[type];
}

const Heap::TypeInfo& Heap::type_info(const ObjectHeader* object) const { return types_[object->type_id]; }

void Heap::check_usable() const {
    if (poisoned_) {
        throw HeapError(HeapErrc::HeapLimitExceeded, "heap is unusable after an exhausted collection");
    }
}

ObjectHeader* Heap::checked(ObjectHandle handle) const {
    ObjectHeader* object = handle.object_;
    if (object == nullptr) {
        throw HeapError(HeapErrc::InvalidHandle, "null handle");
    }
    if (object->type_id >= types_.size() || object->state == ObjectState::Forwarded) {
        throw HeapError(HeapErrc::InvalidHandle, "stale handle");
    }
    return object;
}

bool Heap::in_nursery(const ObjectHeader* object) const {
    const auto* p = reinterpret_cast<const std::byte*>(object);
    return p >= nursery_.get() && p < nursery_.get() + config_.nursery_bytes;
}

std::uint64_t* Heap::slots(ObjectHeader* object) const {
    return reinterpret_cast<std::uint64_t*>(reinterpret_cast<std::byte*>(object) + kHeaderBytes);
}

std::size_t Heap::young_work_capacity() const { return config_.nursery_bytes / kGranule + config_.max_roots; }

std::size_t Heap::pause_bound() const {
    return young_work_capacity() + config_.dec_budget + config_.defrag_budget;
}

// ---------------------------------------------------------------------------
// Allocation

ObjectHandle Heap::alloc(TypeId type, std::span<const Value> values) {
    check_usable();
    const TypeInfo& info = type_info(type);
    if (values.size() != info.slot_count) {
        throw HeapError(HeapErrc::ArityMismatch, "expected " + std::to_string(info.slot_count) + " values, got " +
                                                     std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const bool is_handle = std::holds_alternative<ObjectHandle>(values[i]);
        if (is_handle != info.is_ref[i]) {
            throw HeapError(HeapErrc::KindMismatch, "slot " + std::to_string(i));
        }
        if (is_handle) {
            const ObjectHandle& h = std::get<ObjectHandle>(values[i]);
            if (h) {
                checked(h);
            }
        }
    }
    ++allocations_;
    if (info.total_size > config_.nursery_bytes / 4) {
        return alloc_large(info, type, values);
    }
    return alloc_nursery(info, type, values);
}

ObjectHandle Heap::alloc_nursery(const TypeInfo& info, TypeId id, std::span<const Value> values) {
    const std::size_t size = info.total_size;
    std::vector<ObjectHandle> refreshed;
    if (cursor_ + size > young_limit_) {
        collect_with_protected(values, refreshed);
    }
    auto* object = reinterpret_cast<ObjectHeader*>(nursery_.get() + cursor_);
    cursor_ += size;
    ++nursery_objects_;
    initialize(object, info, id, values, refreshed);
    object->region = Region::Nursery;
    object->state = ObjectState::Plain;
    object->block = kNoBlock;
    return ObjectHandle(object);
}

ObjectHandle Heap::alloc_large(const TypeInfo& info, TypeId id, std::span<const Value> values) {
    const std::size_t size = info.total_size;
    // A directly-old object must not reference the nursery, so any nursery
    // argument forces the young generation out first.
    bool references_nursery = false;
    for (const Value& v : values) {
        if (const auto* h = std::get_if<ObjectHandle>(&v); h != nullptr && *h && in_nursery(h->object_)) {
            references_nursery = true;
        }
    }
    std::vector<ObjectHandle> refreshed;
    if (references_nursery || cursor_ + size > young_limit_) {
        collect_with_protected(values, refreshed);
    }
    ObjectHeader* object = nullptr;
    try {
        object = allocate_old(size);
    } catch (const OutOfOldSpace&) {
        poisoned_ = true;
        throw HeapLimitExceeded("large object of " + std::to_string(size) + " bytes", GcStats{});
    }
    const std::uint32_t block = object->block;
    initialize(object, info, id, values, refreshed);
    object->region = Region::Old;
    object->state = ObjectState::UniqueParent;
    object->meta = kPendingFirstRef;
    object->block = block;
    young_large_.push_back({object, false});
    young_limit_ -= size;
    return ObjectHandle(object);
}

void Heap::initialize(ObjectHeader* object, const TypeInfo& info, TypeId id, std::span<const Value> values,
                      std::span<const ObjectHandle> refreshed) {
    object->type_id = static_cast<std::uint16_t>(id);
    object->meta = 0;
    std::uint64_t* s = slots(object);
    for (std::size_t i = 0; i < info.slot_count; ++i) {
        if (info.is_ref[i]) {
            const ObjectHeader* target = refreshed.empty() ? std::get<ObjectHandle>(values[i]).object_
                                                           : refreshed[i].object_;
            s[i] = as_word(target);
        } else {
            s[i] = std::bit_cast<std::uint64_t>(std::get<std::int64_t>(values[i]));
        }
    }
    const std::size_t used = kHeaderBytes + kGranule * info.slot_count;
    if (info.total_size > used) {
        std::memset(reinterpret_cast<std::byte*>(object) + used, 0, info.total_size - used);
    }
}

// Runs a collection while the handle arguments of a pending allocation are
// pinned as temporary roots; `refreshed` receives their post-collection
// locations indexed by slot.
void Heap::collect_with_protected(std::span<const Value> values, std::vector<ObjectHandle>& refreshed) {
    refreshed.assign(values.size(), ObjectHandle{});
    std::vector<std::pair<std::size_t, RootToken>> pinned;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (const auto* h = std::get_if<ObjectHandle>(&values[i]); h != nullptr && *h) {
            pinned.emplace_back(i, push_root(*h));
        }
    }
    collect_minor();
    for (auto it = pinned.rbegin(); it != pinned.rend(); ++it) {
        refreshed[it->first] = root(it->second);
        pop_root(it->second);
    }
}

Value Heap::read_field(ObjectHandle handle, std::size_t slot) const {
    ObjectHeader* object = checked(handle);
    const TypeInfo& info = type_info(object);
    if (slot >= info.slot_count) {
        throw HeapError(HeapErrc::SlotOutOfRange, "slot " + std::to_string(slot));
    }
    const std::uint64_t word = slots(object)[slot];
    if (info.is_ref[slot]) {
        return ObjectHandle(as_object(word));
    }
    return std::bit_cast<std::int64_t>(word);
}

std::int64_t Heap::read_scalar(ObjectHandle handle, std::size_t slot) const {
    Value v = read_field(handle, slot);
    if (const auto* s = std::get_if<std::int64_t>(&v)) {
        return *s;
    }
    throw HeapError(HeapErrc::KindMismatch, "slot " + std::to_string(slot) + " holds a reference");
}

ObjectHandle Heap::read_ref(ObjectHandle handle, std::size_t slot) const {
    Value v = read_field(handle, slot);
    if (const auto* h = std::get_if<ObjectHandle>(&v)) {
        return *h;
    }
    throw HeapError(HeapErrc::KindMismatch, "slot " + std::to_string(slot) + " holds a scalar");
}

TypeId Heap::type_of(ObjectHandle handle) const { return checked(handle)->type_id; }

// ---------------------------------------------------------------------------
// Roots

RootToken Heap::push_root(ObjectHandle handle) {
    if (roots_.size() >= config_.max_roots) {
        throw HeapError(HeapErrc::RootLimitExceeded, "root registry holds " + std::to_string(roots_.size()));
    }
    if (handle) {
        checked(handle);
    }
    roots_.push_back(handle.object_);
    return RootToken{roots_.size() - 1};
}

void Heap::pop_root(RootToken token) {
    if (roots_.empty() || token.index != roots_.size() - 1) {
        throw HeapError(HeapErrc::RootStackViolation,
                        "pop of root " + std::to_string(token.index) + " with " + std::to_string(roots_.size()) +
                            " entries");
    }
    roots_.pop_back();
}

ObjectHandle Heap::root(RootToken token) const {
    if (token.index >= roots_.size()) {
        throw HeapError(HeapErrc::RootStackViolation, "root " + std::to_string(token.index) + " is not live");
    }
    return ObjectHandle(roots_[token.index]);
}

// ---------------------------------------------------------------------------
// Old-generation storage

std::uint32_t Heap::new_block(std::size_t capacity, std::size_t cell_bytes, int size_class) {
    if (old_capacity_bytes_ + capacity > config_.max_heap_bytes) {
        throw OutOfOldSpace{};
    }
    std::uint32_t index;
    if (!free_block_indices_.empty()) {
        index = *free_block_indices_.begin();
        free_block_indices_.erase(free_block_indices_.begin());
    } else {
        index = static_cast<std::uint32_t>(blocks_.size());
        blocks_.emplace_back();
    }
    Block& b = blocks_[index];
    b.storage.reset(new std::byte[capacity]);
    b.capacity = capacity;
    b.cell_bytes = cell_bytes;
    b.size_class = size_class;
    b.cell_count = cell_bytes == 0 ? 1 : static_cast<std::uint32_t>(capacity / cell_bytes);
    b.carved = 0;
    b.free_head = Block::kNoCell;
    b.live_count = 0;
    b.live_bytes = 0;
    b.live_bits.assign((b.cell_count + 63) / 64, 0);
    b.in_use = true;
    b.evacuating = false;
    b.available = false;
    old_capacity_bytes_ += capacity;
    return index;
}

ObjectHeader* Heap::allocate_old(std::size_t size) {
    const int cls = size_class_for(size);
    ObjectHeader* object = cls < 0 ? allocate_large_span(size) : allocate_in_class(cls, size);
    ++old_live_objects_;
    return object;
}

ObjectHeader* Heap::allocate_in_class(int cls, std::size_t size) {
    SizeClass& sc = classes_[cls];
    for (;;) {
        if (sc.current != kNoBlock && blocks_[sc.current].has_space()) {
            break;
        }
        if (!sc.available.empty()) {
            const std::uint32_t next = *sc.available.begin();
            sc.available.erase(sc.available.begin());
            blocks_[next].available = false;
            sc.current = next;
            continue;
        }
        sc.current = new_block(config_.block_bytes, kMinSizeClass << cls, cls);
    }
    Block& b = blocks_[sc.current];
    std::uint32_t cell;
    if (b.free_head != Block::kNoCell) {
        cell = b.free_head;
        std::memcpy(&b.free_head, b.cell_at(cell), sizeof(std::uint32_t));
    } else {
        cell = b.carved++;
    }
    b.live_bits[cell >> 6] |= std::uint64_t{1} << (cell & 63);
    ++b.live_count;
    b.live_bytes += size;
    ObjectHeader* object = b.cell_at(cell);
    object->block = sc.current;
    return object;
}

ObjectHeader* Heap::allocate_large_span(std::size_t size) {
    const std::size_t capacity = round_up(size, kGranule);
    const std::uint32_t index = new_block(capacity, 0, -1);
    Block& b = blocks_[index];
    b.carved = 1;
    b.live_bits[0] = 1;
    b.live_count = 1;
    b.live_bytes = size;
    ObjectHeader* object = b.cell_at(0);
    object->block = index;
    return object;
}

void Heap::free_cell(ObjectHeader* object) {
    const std::uint32_t index = object->block;
    Block& b = blocks_[index];
    const std::size_t size = type_info(object).total_size;
    --old_live_objects_;
    if (b.is_large()) {
        b.live_bits[0] = 0;
        b.live_count = 0;
        b.live_bytes = 0;
        release_block(index);
        return;
    }
    const auto cell = static_cast<std::uint32_t>((reinterpret_cast<std::byte*>(object) - b.storage.get()) / b.cell_bytes);
    assert(b.live(cell));
    b.live_bits[cell >> 6] &= ~(std::uint64_t{1} << (cell & 63));
    --b.live_count;
    b.live_bytes -= size;
    std::memcpy(object, &b.free_head, sizeof(std::uint32_t));
    b.free_head = cell;
    if (b.live_count == 0) {
        release_block(index);
        return;
    }
    SizeClass& sc = classes_[b.size_class];
    if (!b.evacuating && sc.current != index) {
        if (!b.available) {
            b.available = true;
            sc.available.insert(index);
        }
        if (static_cast<double>(b.live_bytes) < config_.frag_threshold * static_cast<double>(b.capacity)) {
            sparse_.insert(index);
        }
    }
}

void Heap::release_block(std::uint32_t index) {
    Block& b = blocks_[index];
    if (!b.is_large()) {
        SizeClass& sc = classes_[b.size_class];
        sc.available.erase(index);
        if (sc.current == index) {
            sc.current = kNoBlock;
        }
        sparse_.erase(index);
    }
    old_capacity_bytes_ -= b.capacity;
    b.storage.reset();
    b.live_bits.clear();
    b.live_bits.shrink_to_fit();
    b.capacity = 0;
    b.in_use = false;
    b.evacuating = false;
    b.available = false;
    free_block_indices_.insert(index);
    ++blocks_released_;
}

// ---------------------------------------------------------------------------
// Counting

void Heap::note_count_update() {
    if (in_collector_) {
        ++barriers_.count_updates_in_collector;
    } else {
        ++barriers_.count_updates_outside;
    }
}

void Heap::rewrite_slot(std::uint64_t* slot, ObjectHeader* value) {
    *slot = as_word(value);
    if (in_collector_) {
        ++barriers_.slot_rewrites_in_collector;
    } else {
        ++barriers_.slot_rewrites_outside;
    }
}

std::uint32_t Heap::current_count(const ObjectHeader* object) const {
    switch (object->state) {
    case ObjectState::UniqueParent: return object->meta == kPendingFirstRef ? 0 : 1;
    case ObjectState::Shared: return shared_count(object);
    case ObjectState::Relocated: {
        auto it = relocated_counts_.find(const_cast<ObjectHeader*>(object));
        return it == relocated_counts_.end() ? 0 : it->second;
    }
    default: return 0;
    }
}

void Heap::increment(ObjectHeader* target, std::uint64_t referrer, GcStats& stats) {
    note_count_update();
    ++stats.increments_applied;
    switch (target->state) {
    case ObjectState::UniqueParent:
        if (target->meta == kPendingFirstRef) {
            target->meta = referrer;
        } else {
            target->state = ObjectState::Shared;
            target->meta = 2;
        }
        break;
    case ObjectState::Shared:
        if (shared_count(target) != kCountSaturated) {
            target->meta = shared_count(target) + 1;
        }
        break;
    case ObjectState::Relocated: {
        auto& count = relocated_counts_[target];
        if (count != kCountSaturated) {
            ++count;
        }
        break;
    }
    default:
        assert(false && "increment of a nursery object");
    }
}

void Heap::enqueue_decrement(ObjectHeader* target) { dec_queue_.push_back(target); }

void Heap::process_decrements(std::size_t budget, GcStats& stats) {
    while (budget > 0 && !dec_queue_.empty()) {
        ObjectHeader* target = dec_queue_.front();
        dec_queue_.pop_front();
        --budget;
        ++stats.decrements_processed;
        apply_decrement(target, stats);
    }
}

void Heap::apply_decrement(ObjectHeader* target, GcStats& stats) {
    note_count_update();
    switch (target->state) {
    case ObjectState::UniqueParent:
        assert(target->meta != kPendingFirstRef);
        release_object(target, stats);
        break;
    case ObjectState::Shared: {
        const std::uint32_t count = shared_count(target);
        if (count == kCountSaturated) {
            break;
        }
        target->meta = count - 1;
        if (count == 1) {
            release_object(target, stats);
        }
        break;
    }
    case ObjectState::Relocated: {
        auto it = relocated_counts_.find(target);
        assert(it != relocated_counts_.end());
        if (it->second == kCountSaturated) {
            break;
        }
        if (--it->second == 0) {
            release_object(target, stats);
        }
        break;
    }
    default:
        assert(false && "decrement of a nursery object");
    }
}

// Releases a dead object: queue decrements for everything it references,
// including the replica of a RELOCATED original, and return its cell.
void Heap::release_object(ObjectHeader* dead, GcStats& stats) {
    std::uint64_t* s = slots(dead);
    for (std::uint32_t i : type_info(dead).ref_slots) {
        ObjectHeader* child = as_object(s[i]);
        if (child == nullptr) {
            continue;
        }
        if (child->state == ObjectState::UniqueParent && child->meta == as_word(&s[i])) {
            child->meta = kParentDetached;
        }
        enqueue_decrement(child);
    }
    if (dead->state == ObjectState::Relocated) {
        relocated_counts_.erase(dead);
        enqueue_decrement(as_object(dead->meta));
    }
    free_cell(dead);
    ++stats.objects_released;
}

// ---------------------------------------------------------------------------
// Minor collection

ObjectHeader* Heap::final_replica(ObjectHeader* ref) const {
    while (ref->state == ObjectState::Relocated) {
        ref = as_object(ref->meta);
    }
    return ref;
}

ObjectHeader* Heap::evacuate(ObjectHeader* ref, GcStats& stats) {
    if (ref == nullptr) {
        return nullptr;
    }
    if (in_nursery(ref)) {
        if (ref->state == ObjectState::Forwarded) {
            return as_object(ref->meta);
        }
        const std::size_t size = type_info(ref).total_size;
        ObjectHeader* copy = allocate_old(size);
        const std::uint32_t block = copy->block;
        std::memcpy(copy, ref, size);
        copy->block = block;
        copy->region = Region::Old;
        copy->state = ObjectState::UniqueParent;
        copy->meta = kPendingFirstRef;
        ref->state = ObjectState::Forwarded;
        ref->meta = as_word(copy);
        promoted_.push_back(copy);
        ++stats.objects_evacuated;
        stats.bytes_promoted += size;
        return copy;
    }
    for (YoungLarge& y : young_large_) {
        if (y.object == ref) {
            if (!y.reached) {
                y.reached = true;
                promoted_.push_back(ref);
            }
            return ref;
        }
    }
    return final_replica(ref);
}

GcStats Heap::collect_minor() {
    check_usable();
    CollectorScope scope(*this);
    GcStats stats;
    stats.collections_count = 1;
    try {
        promoted_.clear();
        // Evacuation: roots, then Cheney scan over everything promoted.
        for (ObjectHeader*& r : roots_) {
            r = evacuate(r, stats);
        }
        for (std::size_t i = 0; i < promoted_.size(); ++i) {
            ObjectHeader* object = promoted_[i];
            std::uint64_t* s = slots(object);
            for (std::uint32_t slot : type_info(object).ref_slots) {
                ObjectHeader* before = as_object(s[slot]);
                ObjectHeader* after = evacuate(before, stats);
                if (after != before) {
                    rewrite_slot(&s[slot], after);
                }
            }
        }
        for (const YoungLarge& y : young_large_) {
            if (!y.reached) {
                free_cell(y.object);
                ++stats.objects_released;
            }
        }
        young_large_.clear();
        cursor_ = 0;
        nursery_objects_ = 0;
        young_limit_ = config_.nursery_bytes;

        // Counting: every reference held by a newly old object.
        for (ObjectHeader* object : promoted_) {
            std::uint64_t* s = slots(object);
            for (std::uint32_t slot : type_info(object).ref_slots) {
                if (ObjectHeader* target = as_object(s[slot])) {
                    increment(target, as_word(&s[slot]), stats);
                }
            }
        }
        promoted_.clear();

        // Root epoch.
        std::vector<ObjectHeader*> epoch;
        epoch.reserve(roots_.size());
        for (ObjectHeader* r : roots_) {
            if (r != nullptr) {
                epoch.push_back(r);
                increment(r, kRootParent, stats);
            }
        }
        for (ObjectHeader* e : epoch_prev_) {
            enqueue_decrement(e);
        }
        epoch_prev_ = std::move(epoch);

        process_decrements(config_.dec_budget, stats);
        run_defrag(config_.defrag_budget, stats);
    } catch (const OutOfOldSpace&) {
        poisoned_ = true;
        stats.pause_work_units = stats.objects_evacuated + stats.increments_applied + stats.decrements_processed;
        cumulative_ += stats;
        throw HeapLimitExceeded("old generation exhausted during collection", stats);
    }
    stats.pause_work_units = stats.objects_evacuated + stats.increments_applied + stats.decrements_processed;
    cumulative_ += stats;
    if (observer_) {
        observer_(stats);
    }
    return stats;
}

}  // namespace omega::memory
