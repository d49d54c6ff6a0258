#include "omega/dispatch/dispatch.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>
#include <utility>

namespace omega::dispatch {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed derived from the call-site targets alone, order-insensitive.
std::uint64_t spec_seed(const CallSiteSpec& spec) {
    std::vector<std::pair<TypeId, ImplId>> sorted;
    sorted.reserve(spec.size());
    for (const Target& t : spec) {
        sorted.emplace_back(t.type_id, t.impl_id);
    }
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto [type, impl] : sorted) {
        h = mix(h ^ ((std::uint64_t{type} << 32) | impl));
    }
    return h;
}

constexpr std::size_t kMaxKicks = 64;

}  // namespace

const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::Monomorphic: return "Monomorphic";
    case Strategy::InlineChain: return "InlineChain";
    case Strategy::LinearTable: return "LinearTable";
    case Strategy::HashedTable: return "HashedTable";
    }
    return "?";
}

const char* to_string(DispatchErrc code) {
    switch (code) {
    case DispatchErrc::EmptySpec: return "EmptySpec";
    case DispatchErrc::DuplicateType: return "DuplicateType";
    case DispatchErrc::HashLayoutFailure: return "HashLayoutFailure";
    case DispatchErrc::UnknownType: return "UnknownType";
    }
    return "?";
}

std::size_t DispatchTable::slot1(TypeId id) const {
    return static_cast<std::size_t>(mix(seed_ ^ id) >> shift_);
}

std::size_t DispatchTable::slot2(TypeId id) const {
    return static_cast<std::size_t>(mix(~seed_ ^ (std::uint64_t{id} << 32)) >> shift_);
}

// Two-choice placement with bounded eviction chains.
bool DispatchTable::place_hashed(const CallSiteSpec& spec, std::uint64_t seed) {
    seed_ = seed;
    std::fill(used_.begin(), used_.end(), false);
    for (const Target& t : spec) {
        TypeId id = t.type_id;
        ImplId impl = t.impl_id;
        std::size_t slot = slot1(id);
        bool placed = false;
        for (std::size_t kick = 0; kick <= kMaxKicks; ++kick) {
            if (!used_[slot]) {
                used_[slot] = true;
                ids_[slot] = id;
                impls_[slot] = impl;
                placed = true;
                break;
            }
            std::swap(id, ids_[slot]);
            std::swap(impl, impls_[slot]);
            // The evicted entry moves to its other choice.
            slot = slot1(id) == slot ? slot2(id) : slot1(id);
        }
        if (!placed) {
            return false;
        }
    }
    return true;
}

DispatchTable DispatchTable::build(const CallSiteSpec& spec, Thresholds thresholds) {
    if (spec.empty()) {
        throw DispatchError(DispatchErrc::EmptySpec, "call site has no targets");
    }
    std::unordered_set<TypeId> seen;
    for (const Target& t : spec) {
        if (!seen.insert(t.type_id).second) {
            throw DispatchError(DispatchErrc::DuplicateType, "duplicate type id " + std::to_string(t.type_id));
        }
    }

    DispatchTable table;
    table.count_ = spec.size();
    const std::size_t n = spec.size();
    if (n == 1) {
        table.strategy_ = Strategy::Monomorphic;
        table.worst_ = 0;
        table.ids_ = {spec[0].type_id};
        table.impls_ = {spec[0].impl_id};
        return table;
    }
    if (n <= thresholds.linear_max) {
        table.strategy_ = n <= thresholds.inline_max ? Strategy::InlineChain : Strategy::LinearTable;
        CallSiteSpec ordered = spec;
        if (table.strategy_ == Strategy::LinearTable) {
            std::sort(ordered.begin(), ordered.end(),
                      [](const Target& a, const Target& b) { return a.type_id < b.type_id; });
        }
        for (const Target& t : ordered) {
            table.ids_.push_back(t.type_id);
            table.impls_.push_back(t.impl_id);
        }
        table.worst_ = static_cast<std::uint32_t>(n);
        return table;
    }

    table.strategy_ = Strategy::HashedTable;
    table.worst_ = 2;
    const std::size_t slots = std::bit_ceil(2 * n);
    table.shift_ = 64u - static_cast<unsigned>(std::countr_zero(slots));
    table.ids_.assign(slots, 0);
    table.impls_.assign(slots, 0);
    table.used_.assign(slots, false);
    const std::uint64_t base = spec_seed(spec);
    for (std::uint64_t attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
        if (table.place_hashed(spec, mix(base + attempt))) {
            table.attempts_ = attempt + 1;
            return table;
        }
    }
    throw DispatchError(DispatchErrc::HashLayoutFailure,
                        "no two-probe layout for " + std::to_string(n) + " targets after " +
                            std::to_string(kMaxSeedRetries) + " seeds");
}

ImplId DispatchTable::resolve(TypeId type_id, std::uint32_t* probes) const {
    std::uint32_t used = 0;
    auto finish = [&](ImplId impl) {
        if (probes != nullptr) {
            *probes = used;
        }
        return impl;
    };
    auto unknown = [&]() -> ImplId {
        if (probes != nullptr) {
            *probes = used;
        }
        throw DispatchError(DispatchErrc::UnknownType, "type id " + std::to_string(type_id) + " not in call site");
    };
    switch (strategy_) {
    case Strategy::Monomorphic:
        if (type_id != ids_[0]) {
            return unknown();
        }
        return finish(impls_[0]);
    case Strategy::InlineChain:
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            ++used;
            if (ids_[i] == type_id) {
                return finish(impls_[i]);
            }
        }
        return unknown();
    case Strategy::LinearTable:
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            ++used;
            if (ids_[i] == type_id) {
                return finish(impls_[i]);
            }
            if (ids_[i] > type_id) {
                break;
            }
        }
        return unknown();
    case Strategy::HashedTable: {
        const std::size_t a = slot1(type_id);
        ++used;
        if (used_[a] && ids_[a] == type_id) {
            return finish(impls_[a]);
        }
        const std::size_t b = slot2(type_id);
        ++used;
        if (used_[b] && ids_[b] == type_id) {
            return finish(impls_[b]);
        }
        return unknown();
    }
    }
    return unknown();
}

ProbeAudit audit(const DispatchTable& table, const CallSiteSpec& spec) {
    ProbeAudit out;
    out.min = UINT32_MAX;
    double total = 0.0;
    for (const Target& t : spec) {
        std::uint32_t probes = 0;
        const ImplId got = table.resolve(t.type_id, &probes);
        ImplId expected = 0;
        for (const Target& u : spec) {
            if (u.type_id == t.type_id) {
                expected = u.impl_id;
                break;
            }
        }
        out.all_correct = out.all_correct && got == expected;
        out.min = std::min(out.min, probes);
        out.max = std::max(out.max, probes);
        total += probes;
    }
    out.mean = spec.empty() ? 0.0 : total / static_cast<double>(spec.size());
    if (spec.empty()) {
        out.min = 0;
    }
    return out;
}

}  // namespace omega::dispatch
