#pragma once

// Immutable, acyclic object heap.
//
// Objects are bump-allocated in a fixed-size nursery. A minor collection
// evacuates every live nursery object into the old generation (Cheney scan),
// where lifetimes are tracked with reference counts. Because objects never
// change after construction, an old object can only reference objects that
// already existed when it was created, so the graph is acyclic and counts are
// exact without write barriers or remembered sets.
//
// Count maintenance happens only inside the collector:
//   * promotion applies one increment per reference slot of each promoted
//     object;
//   * roots are reconciled per collection epoch (increment the current root
//     targets, enqueue decrements for the previous epoch's targets);
//   * decrements are queued and drained under a fixed per-collection budget.
//
// The old generation is defragmented incrementally. Objects with a single
// recorded parent slot move eagerly. Shared objects are duplicated and the
// original is marked RELOCATED; a budgeted cyclic scan rewrites referring
// slots to the replica until the original's count drains to zero.
//
// Handle validity: only handles reachable through a root token survive a
// safepoint (alloc, collect_minor, defrag_step). Re-read handles through
// root(token) after any safepoint.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace omega::memory {

inline constexpr std::size_t kGranule = 8;
inline constexpr std::size_t kHeaderBytes = 16;
inline constexpr std::size_t kMinSizeClass = 16;
inline constexpr std::size_t kMaxSizeClass = 4096;
inline constexpr std::uint32_t kCountSaturated = 0xFFFFFFFFu;

using TypeId = std::uint32_t;

enum class Region : std::uint8_t { Nursery = 0, Old = 1 };

enum class ObjectState : std::uint8_t {
    Plain = 0,
    Forwarded = 1,
    UniqueParent = 2,
    Shared = 3,
    Relocated = 4,
};

const char* to_string(ObjectState state);

enum class HeapErrc {
    InvalidDescriptor,
    DuplicateType,
    SlotOutOfRange,
    UnknownType,
    ArityMismatch,
    KindMismatch,
    InvalidHandle,
    HeapLimitExceeded,
    RootStackViolation,
    RootLimitExceeded,
};

const char* to_string(HeapErrc code);

struct GcStats {
    std::uint64_t objects_evacuated = 0;
    std::uint64_t bytes_promoted = 0;
    std::uint64_t increments_applied = 0;
    std::uint64_t decrements_processed = 0;
    std::uint64_t objects_released = 0;
    std::uint64_t pause_work_units = 0;
    std::uint64_t collections_count = 0;

    // Evacuations + increments + decrements + releases.
    std::uint64_t total_work() const {
        return objects_evacuated + increments_applied + decrements_processed + objects_released;
    }

    GcStats& operator+=(const GcStats& other);
    friend bool operator==(const GcStats&, const GcStats&) = default;
};

class HeapError : public std::runtime_error {
public:
    HeapError(HeapErrc code, const std::string& what);
    HeapErrc code() const noexcept { return code_; }

private:
    HeapErrc code_;
};

// Raised when the old generation cannot grow. Carries the statistics of the
// collection that was in progress, if any. The heap is unusable afterwards.
class HeapLimitExceeded : public HeapError {
public:
    HeapLimitExceeded(const std::string& what, GcStats partial);
    const GcStats& partial_stats() const noexcept { return partial_; }

private:
    GcStats partial_;
};

struct TypeDescriptor {
    std::size_t slot_count = 0;
    std::vector<std::uint32_t> ref_slots;  // strictly increasing slot indices
    std::size_t total_size = 0;            // 0: header + 8 * slot_count
    // Optional explicit id; must equal the next dense id when given.
    std::optional<TypeId> type_id;
};

struct ObjectHeader;

class ObjectHandle {
public:
    ObjectHandle() = default;

    bool is_null() const noexcept { return object_ == nullptr; }
    explicit operator bool() const noexcept { return object_ != nullptr; }

    // No identity comparison: use Heap::structurally_equal.
    bool operator==(const ObjectHandle&) const = delete;

private:
    friend class Heap;
    friend struct HeapTestAccess;
    explicit ObjectHandle(ObjectHeader* object) : object_(object) {}

    ObjectHeader* object_ = nullptr;
};

using Value = std::variant<std::int64_t, ObjectHandle>;

struct RootToken {
    std::size_t index = 0;
};

struct HeapConfig {
    std::size_t nursery_bytes = 262144;
    std::size_t block_bytes = 65536;
    std::size_t dec_budget = 4096;
    std::size_t defrag_budget = 1024;
    double frag_threshold = 0.5;
    std::size_t max_heap_bytes = std::size_t{1} << 32;
    std::size_t max_roots = 1024;
};

struct DefragStats {
    std::uint64_t objects_relocated = 0;
    std::uint64_t slots_scanned = 0;
    std::uint64_t blocks_freed = 0;

    friend bool operator==(const DefragStats&, const DefragStats&) = default;
};

struct HeapReport {
    std::size_t footprint_bytes = 0;
    std::size_t live_objects = 0;
    std::size_t nursery_capacity = 0;
    std::size_t block_count = 0;
    double frag_ratio = 0.0;
};

struct BlockInfo {
    std::uint32_t index = 0;
    std::size_t cell_bytes = 0;  // 0 for a large-object span
    std::size_t capacity_bytes = 0;
    std::size_t live_bytes = 0;
    std::size_t live_objects = 0;
    bool frontier = false;
    bool evacuating = false;
    bool large = false;

    double occupancy() const {
        return capacity_bytes == 0 ? 0.0 : static_cast<double>(live_bytes) / static_cast<double>(capacity_bytes);
    }
};

// Count-update and slot-rewrite events, split by whether the collector was
// running when they happened. Outside counts must stay zero.
struct BarrierCounters {
    std::uint64_t count_updates_in_collector = 0;
    std::uint64_t count_updates_outside = 0;
    std::uint64_t slot_rewrites_in_collector = 0;
    std::uint64_t slot_rewrites_outside = 0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::size_t traced_objects = 0;
    std::size_t checked_counts = 0;

    bool ok() const { return violations.empty(); }
};

class Heap {
public:
    using CollectionObserver = std::function<void(const GcStats&)>;

    explicit Heap(HeapConfig config = {});
    ~Heap();

    Heap(const Heap&) = delete;
    Heap& operator=(const Heap&) = delete;

    TypeId register_type(const TypeDescriptor& descriptor);
    std::size_t type_size(TypeId type) const;
    std::size_t type_slot_count(TypeId type) const;

    ObjectHandle alloc(TypeId type, std::span<const Value> initial_values);
    ObjectHandle alloc(TypeId type, std::initializer_list<Value> initial_values) {
        return alloc(type, std::span<const Value>(initial_values.begin(), initial_values.size()));
    }

    Value read_field(ObjectHandle handle, std::size_t slot) const;
    std::int64_t read_scalar(ObjectHandle handle, std::size_t slot) const;
    ObjectHandle read_ref(ObjectHandle handle, std::size_t slot) const;
    TypeId type_of(ObjectHandle handle) const;

    RootToken push_root(ObjectHandle handle);
    void pop_root(RootToken token);
    ObjectHandle root(RootToken token) const;
    std::size_t root_count() const { return roots_.size(); }

    GcStats collect_minor();
    DefragStats defrag_step(std::size_t budget_slots);

    // Called after every completed minor collection, including those
    // triggered from inside alloc.
    void set_collection_observer(CollectionObserver observer);

    HeapReport heap_report() const;
    ValidationReport validate_heap() const;

    // One line per reachable object in trace order:
    //   obj <ordinal> type=<id> state=<tag> meta=<n> slots=[...]
    std::string debug_dump() const;

    // Identity-free serialization of everything reachable from the roots.
    // Structurally equal subgraphs map to the same node regardless of
    // sharing, so it is invariant under duplication and relocation.
    std::string content_serialization() const;

    bool structurally_equal(ObjectHandle a, ObjectHandle b) const;

    const GcStats& stats() const { return cumulative_; }
    const BarrierCounters& barrier_counters() const { return barriers_; }
    const HeapConfig& config() const { return config_; }

    // Upper bound on evacuations plus increments one young generation can
    // produce: nursery granules plus root entries.
    std::size_t young_work_capacity() const;
    std::size_t pause_bound() const;

    std::uint64_t allocations() const { return allocations_; }
    std::size_t pending_decrements() const { return dec_queue_.size(); }
    std::size_t relocated_originals() const { return relocated_counts_.size(); }
    bool defrag_idle() const;
    std::vector<BlockInfo> blocks() const;

private:
    friend struct HeapTestAccess;

    struct TypeInfo {
        std::size_t slot_count = 0;
        std::size_t total_size = 0;
        std::vector<std::uint32_t> ref_slots;
        std::vector<bool> is_ref;
    };

    struct Block {
        std::unique_ptr<std::byte[]> storage;
        std::size_t capacity = 0;
        std::size_t cell_bytes = 0;  // 0 marks a large-object span
        int size_class = -1;
        std::uint32_t cell_count = 0;
        std::uint32_t carved = 0;
        std::uint32_t free_head = kNoCell;
        std::uint32_t live_count = 0;
        std::size_t live_bytes = 0;
        std::vector<std::uint64_t> live_bits;
        bool in_use = false;
        bool evacuating = false;
        bool available = false;

        static constexpr std::uint32_t kNoCell = 0xFFFFFFFFu;

        bool is_large() const { return cell_bytes == 0; }
        bool has_space() const { return free_head != kNoCell || carved < cell_count; }
        bool live(std::uint32_t cell) const { return (live_bits[cell >> 6] >> (cell & 63)) & 1u; }
        ObjectHeader* cell_at(std::uint32_t cell) const;
    };

    struct SizeClass {
        std::uint32_t current = kNoBlock;
        std::set<std::uint32_t> available;
    };

    struct YoungLarge {
        ObjectHeader* object = nullptr;
        bool reached = false;
    };

    // Scanner position for the incremental referrer scan.
    struct ScanCursor {
        enum class Phase { Blocks, Roots, Epoch } phase = Phase::Blocks;
        std::uint32_t block = 0;
        std::uint32_t cell = 0;
        std::size_t index = 0;
    };

    static constexpr std::uint32_t kNoBlock = 0xFFFFFFFFu;
    static constexpr int kSizeClassCount = 9;  // 16 .. 4096

    // UNIQUE_PARENT meta sentinels; any other value is the parent slot address.
    static constexpr std::uint64_t kPendingFirstRef = 0;
    static constexpr std::uint64_t kRootParent = 1;
    static constexpr std::uint64_t kParentDetached = 2;
    static constexpr std::uint64_t kReplicaOwner = 3;  // sole referrer is a RELOCATED original

    static bool has_parent_slot(const ObjectHeader* object);

    class CollectorScope;

    const TypeInfo& type_info(TypeId type) const;
    const TypeInfo& type_info(const ObjectHeader* object) const;
    ObjectHeader* checked(ObjectHandle handle) const;
    void check_usable() const;

    bool in_nursery(const ObjectHeader* object) const;
    std::uint64_t* slots(ObjectHeader* object) const;

    ObjectHandle alloc_nursery(const TypeInfo& type, TypeId id, std::span<const Value> values);
    ObjectHandle alloc_large(const TypeInfo& type, TypeId id, std::span<const Value> values);
    void collect_with_protected(std::span<const Value> values, std::vector<ObjectHandle>& refreshed);
    void initialize(ObjectHeader* object, const TypeInfo& type, TypeId id, std::span<const Value> values,
                    std::span<const ObjectHandle> refreshed);

    // Old-generation cells.
    ObjectHeader* allocate_old(std::size_t size);
    ObjectHeader* allocate_in_class(int size_class, std::size_t size);
    ObjectHeader* allocate_large_span(std::size_t size);
    std::uint32_t new_block(std::size_t capacity, std::size_t cell_bytes, int size_class);
    void free_cell(ObjectHeader* object);
    void release_block(std::uint32_t index);

    // Collector internals.
    ObjectHeader* evacuate(ObjectHeader* ref, GcStats& stats);
    ObjectHeader* final_replica(ObjectHeader* ref) const;
    void increment(ObjectHeader* target, std::uint64_t referrer, GcStats& stats);
    void enqueue_decrement(ObjectHeader* target);
    void process_decrements(std::size_t budget, GcStats& stats);
    void apply_decrement(ObjectHeader* target, GcStats& stats);
    void release_object(ObjectHeader* object, GcStats& stats);
    std::uint32_t current_count(const ObjectHeader* object) const;
    void rewrite_slot(std::uint64_t* slot, ObjectHeader* value);
    void note_count_update();

    // Defragmentation internals.
    DefragStats run_defrag(std::size_t budget, GcStats& stats);
    void select_sources();
    bool is_source_candidate(std::uint32_t index) const;
    bool holds_young_large(std::uint32_t index) const;
    std::size_t relocation_cost(const ObjectHeader* object) const;
    void relocate_eagerly(ObjectHeader* object, GcStats& stats);
    void replicate(ObjectHeader* object, GcStats& stats);
    void scan_referrers(std::size_t budget, GcStats& stats, DefragStats& result);
    bool scan_slot(std::uint64_t* slot, bool counted, GcStats& stats);
    void fix_moved_references();

    std::size_t metadata_bytes() const;

    HeapConfig config_;
    std::vector<TypeInfo> types_;

    std::unique_ptr<std::byte[]> nursery_;
    std::size_t cursor_ = 0;
    std::size_t young_limit_ = 0;
    std::size_t nursery_objects_ = 0;
    std::vector<YoungLarge> young_large_;

    std::vector<Block> blocks_;
    std::set<std::uint32_t> free_block_indices_;
    SizeClass classes_[kSizeClassCount];
    std::set<std::uint32_t> sparse_;
    std::size_t old_capacity_bytes_ = 0;
    std::size_t old_live_objects_ = 0;
    std::uint64_t blocks_released_ = 0;

    std::vector<ObjectHeader*> roots_;
    std::vector<ObjectHeader*> epoch_prev_;
    std::deque<ObjectHeader*> dec_queue_;
    std::unordered_map<ObjectHeader*, std::uint32_t> relocated_counts_;

    std::deque<std::uint32_t> evac_queue_;
    std::uint32_t evac_cell_ = 0;
    ScanCursor scan_;
    std::unordered_map<ObjectHeader*, ObjectHeader*> moved_;

    std::vector<ObjectHeader*> promoted_;
    GcStats cumulative_;
    BarrierCounters barriers_;
    std::uint64_t allocations_ = 0;
    CollectionObserver observer_;
    bool in_collector_ = false;
    bool poisoned_ = false;
};

}  // namespace omega::memory
