#pragma once

// Closed-world call-site resolution. A table is built once from the complete
// target set of a call site; resolve is a pure lookup with a static probe
// bound.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omega::dispatch {

using TypeId = std::uint32_t;
using ImplId = std::uint32_t;

struct Target {
    TypeId type_id = 0;
    ImplId impl_id = 0;
};

using CallSiteSpec = std::vector<Target>;

enum class Strategy { Monomorphic, InlineChain, LinearTable, HashedTable };

const char* to_string(Strategy s);

struct Thresholds {
    std::size_t inline_max = 4;
    std::size_t linear_max = 64;
};

inline constexpr std::uint64_t kMaxSeedRetries = 1'000'000;

enum class DispatchErrc { EmptySpec, DuplicateType, HashLayoutFailure, UnknownType };

const char* to_string(DispatchErrc code);

class DispatchError : public std::runtime_error {
public:
    DispatchError(DispatchErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DispatchErrc code() const noexcept { return code_; }

private:
    DispatchErrc code_;
};

class DispatchTable {
public:
    static DispatchTable build(const CallSiteSpec& spec, Thresholds thresholds = {});

    Strategy strategy() const { return strategy_; }
    std::size_t size() const { return count_; }
    std::uint32_t worst_case_probes() const { return worst_; }

    // `probes`, when given, receives the number of type-id comparisons made.
    // A singleton table makes none; its closed-world check is a debug guard
    // and is not counted.
    ImplId resolve(TypeId type_id, std::uint32_t* probes = nullptr) const;

    // HashedTable only: the seed the layout was built with, and how many
    // seeds were tried before it.
    std::uint64_t seed() const { return seed_; }
    std::uint64_t seed_attempts() const { return attempts_; }
    std::size_t slot_count() const { return ids_.size(); }

    friend bool operator==(const DispatchTable&, const DispatchTable&) = default;

private:
    bool place_hashed(const CallSiteSpec& spec, std::uint64_t seed);
    std::size_t slot1(TypeId id) const;
    std::size_t slot2(TypeId id) const;

    Strategy strategy_ = Strategy::Monomorphic;
    std::size_t count_ = 0;
    std::uint32_t worst_ = 0;
    // Chain and linear tiers: entries in target order (chain) or sorted by
    // type id (linear). Hashed tier: slots, with `used_` marking occupancy.
    std::vector<TypeId> ids_;
    std::vector<ImplId> impls_;
    std::vector<bool> used_;
    std::uint64_t seed_ = 0;
    std::uint64_t attempts_ = 0;
    unsigned shift_ = 0;
};

struct ProbeAudit {
    std::uint32_t min = 0;
    std::uint32_t max = 0;
    double mean = 0.0;
    bool all_correct = true;
};

// Resolves every member type id and compares with a plain scan of the targets.
ProbeAudit audit(const DispatchTable& table, const CallSiteSpec& spec);

}  // namespace omega::dispatch
