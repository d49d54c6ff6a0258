#include "omega/harness/benches.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "omega/brex/matcher.hpp"
#include "omega/harness/report.hpp"
#include "omega/structures/ordered_map.hpp"
#include "omega/structures/persistent_vector.hpp"

namespace omega::harness {

std::vector<std::string> brex_corpus(std::string_view name) {
    if (name == "redos") {
        return {"(a+)+b", "(a|a)*b", "(a*)*b", "((a+)+)+b", "(a|aa)+b", "(a*a*)*b", "((a|a)*)*b"};
    }
    if (name == "stratified") {
        return {"(a+)+b & !(b*)", "!(a*b)&(a|a)*", "!((a+)+b)", "((a+)+(?=b))*", "(a|a)*(?<!a)b"};
    }
    throw std::invalid_argument("unknown corpus '" + std::string(name) + "' (expected redos or stratified)");
}

std::vector<std::size_t> brex_bench_lengths() { return {8, 16, 32, 64}; }

std::vector<BrexBenchRow> run_brex_bench(std::string_view corpus, const std::vector<std::size_t>& lengths) {
    std::vector<BrexBenchRow> rows;
    for (const std::string& pattern : brex_corpus(corpus)) {
        const auto compiled = brex::CompiledPattern::compile(pattern);
        for (std::size_t n : lengths) {
            BrexBenchRow row{pattern, n, 0, false};
            row.accepted = compiled.accepts(std::string(n, 'a'), &row.steps);
            rows.push_back(row);
        }
    }
    return rows;
}

std::string brex_bench_csv(const std::vector<BrexBenchRow>& rows) {
    std::ostringstream out;
    out << "pattern,n,steps,accepted\n";
    for (const auto& r : rows) {
        // Patterns never contain commas or quotes; quote anyway for spaces.
        out << '"' << r.pattern << "\"," << r.n << ',' << r.steps << ',' << (r.accepted ? "true" : "false") << '\n';
    }
    return out.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("slope needs at least two paired points");
    }
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

dispatch::CallSiteSpec random_call_site(std::uint64_t& state, std::size_t n) {
    std::mt19937_64 rng(state++);
    std::set<dispatch::TypeId> ids;
    while (ids.size() < n) {
        ids.insert(static_cast<dispatch::TypeId>(rng()));
    }
    dispatch::CallSiteSpec spec;
    for (dispatch::TypeId id : ids) {
        spec.push_back({id, static_cast<dispatch::ImplId>(rng() % 4096)});
    }
    std::shuffle(spec.begin(), spec.end(), rng);
    return spec;
}

DispatchBenchRow run_dispatch_bench(std::size_t sites, std::size_t targets, std::uint64_t seed, bool timed) {
    DispatchBenchRow row;
    row.targets = targets;
    std::uint64_t state = seed;
    double probe_total = 0;
    std::uint64_t resolves = 0;
    double ns_total = 0;
    volatile std::uint64_t sink = 0;
    for (std::size_t s = 0; s < sites; ++s) {
        const auto spec = random_call_site(state, targets);
        const auto table = dispatch::DispatchTable::build(spec);
        row.strategy = table.strategy();
        for (const auto& t : spec) {
            std::uint32_t probes = 0;
            if (table.resolve(t.type_id, &probes) != t.impl_id) {
                throw std::logic_error("dispatch bench: resolve disagrees with spec");
            }
            row.probes_max = std::max(row.probes_max, probes);
            probe_total += probes;
            ++resolves;
        }
        if (timed) {
            constexpr int kRounds = 64;
            const auto start = std::chrono::steady_clock::now();
            for (int r = 0; r < kRounds; ++r) {
                for (const auto& t : spec) {
                    sink = sink + table.resolve(t.type_id);
                }
            }
            const auto stop = std::chrono::steady_clock::now();
            ns_total += static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()) /
                        static_cast<double>(kRounds);
        }
    }
    row.probes_mean = resolves == 0 ? 0.0 : probe_total / static_cast<double>(resolves);
    row.ns_per_resolve = resolves == 0 || !timed ? 0.0 : ns_total / static_cast<double>(resolves);
    return row;
}

std::string dispatch_bench_csv(const std::vector<DispatchBenchRow>& rows) {
    std::ostringstream out;
    out << "strategy,targets,probes_max,probes_mean,ns_per_resolve\n";
    for (const auto& r : rows) {
        out << dispatch::to_string(r.strategy) << ',' << r.targets << ',' << r.probes_max << ','
            << format_double(r.probes_mean) << ',' << format_double(r.ns_per_resolve) << '\n';
    }
    return out.str();
}

StructuresBenchResult run_structures_bench(std::uint64_t operations, std::uint64_t seed) {
    using structures::StepCounter;
    std::mt19937_64 rng(seed);
    StructuresBenchResult out;
    structures::PersistentVector<std::int64_t> vec;
    std::vector<std::int64_t> vec_oracle;
    structures::OrderedMap<std::int64_t, std::int64_t> map;
    std::map<std::int64_t, std::int64_t> map_oracle;
    for (std::uint64_t op = 0; op < operations; ++op) {
        const auto value = static_cast<std::int64_t>(op);
        // Vector side.
        {
            StepCounter c;
            const std::size_t before = vec.size();
            const auto kind = rng() % 10;
            if (kind < 5 || vec_oracle.empty()) {
                vec = vec.push_back(value, &c);
                vec_oracle.push_back(value);
            } else if (kind < 7) {
                auto [next, x] = vec.pop_back(&c);
                out.mismatches += x != vec_oracle.back();
                vec_oracle.pop_back();
                vec = std::move(next);
            } else if (kind < 9) {
                const std::size_t i = rng() % vec_oracle.size();
                out.mismatches += vec.get(i, &c) != vec_oracle[i];
            } else {
                const std::size_t i = rng() % vec_oracle.size();
                vec = vec.set(i, -value, &c);
                vec_oracle[i] = -value;
            }
            const std::size_t n = std::max(before, vec.size());
            out.vector_max_visits = std::max(out.vector_max_visits, c.node_visits);
            out.vector_bound_violations += c.node_visits > structures::ceil_log32(n) + 1;
        }
        // Map side; half the keys arrive in ascending order.
        {
            StepCounter c;
            const std::size_t before = map.size();
            const std::int64_t key =
                (rng() & 1) ? static_cast<std::int64_t>(op) : static_cast<std::int64_t>(rng() % (operations + 1));
            switch (rng() % 3) {
            case 0:
                map = map.insert(key, value, &c);
                map_oracle[key] = value;
                break;
            case 1:
                map = map.remove(key, &c);
                map_oracle.erase(key);
                break;
            default: {
                auto it = map_oracle.find(key);
                const std::optional<std::int64_t> want =
                    it == map_oracle.end() ? std::nullopt : std::optional<std::int64_t>(it->second);
                out.mismatches += map.find(key, &c) != want;
            }
            }
            const double n = static_cast<double>(std::max(before, map.size()));
            out.map_max_visits = std::max(out.map_max_visits, c.node_visits);
            out.map_bound_violations += static_cast<double>(c.node_visits) > 2.0 * 1.45 * std::log2(n + 2.0);
            out.mismatches += map.size() != map_oracle.size();
        }
        ++out.operations;
    }
    if (vec.to_vector() != vec_oracle) {
        ++out.mismatches;
    }
    const auto listed = map.enumerate();
    if (listed.size() != map_oracle.size() || !std::equal(listed.begin(), listed.end(), map_oracle.begin(),
                                                             [](const auto& a, const auto& b) { return a.first == b.first && a.second == b.second; })) {
        ++out.mismatches;
    }
    return out;
}

}  // namespace omega::harness
