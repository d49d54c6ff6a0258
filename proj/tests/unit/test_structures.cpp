#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "omega/structures/ordered_map.hpp"
#include "omega/structures/persistent_vector.hpp"
#include "omega/structures/stable_sort.hpp"

using namespace omega::structures;

TEST_CASE("vector push and get") {
    PersistentVector<int> v;
    for (int i = 0; i < 100; ++i) {
        v = v.push_back(i);
    }
    CHECK(v.size() == 100);
    CHECK(v.get(50) == 50);
    CHECK(v.depth() == 1);
    CHECK_THROWS_AS(v.get(100), StructureError);
}

TEST_CASE("vector depth follows log32") {
    CHECK(trie_depth_for(0) == 0);
    CHECK(trie_depth_for(32) == 0);
    CHECK(trie_depth_for(33) == 1);
    CHECK(trie_depth_for(1024) == 1);
    CHECK(trie_depth_for(1025) == 2);
    CHECK(trie_depth_for(1000000) == 3);
    CHECK(ceil_log32(1000000) == 4);
    CHECK(ceil_log32(1) == 0);
    CHECK(ceil_log32(32) == 1);
}

TEST_CASE("get on a million elements stays within ceil(log32 n) + 1") {
    PersistentVector<int> v;
    for (int i = 0; i < 1000000; ++i) {
        v = v.push_back(i);
    }
    REQUIRE(v.depth() == 3);
    StepCounter c;
    CHECK(v.get(777777, &c) == 777777);
    CHECK(c.node_visits == 4);
    CHECK(c.node_visits <= ceil_log32(v.size()) + 1);
}

TEST_CASE("vector set is persistent") {
    PersistentVector<int> v;
    for (int i = 0; i < 2000; ++i) {
        v = v.push_back(i);
    }
    PersistentVector<int> w = v.set(1500, -1);
    CHECK(w.get(1500) == -1);
    CHECK(v.get(1500) == 1500);
    for (int i = 0; i < 2000; ++i) {
        CHECK(v.get(i) == i);
    }
}

TEST_CASE("vector pop shrinks across depth boundaries") {
    PersistentVector<int> v;
    for (int i = 0; i < 1100; ++i) {
        v = v.push_back(i);
    }
    PersistentVector<int> full = v;
    for (int i = 1099; i >= 0; --i) {
        auto [next, x] = v.pop_back();
        CHECK(x == i);
        CHECK(next.depth() == trie_depth_for(static_cast<std::size_t>(i)));
        v = next;
    }
    CHECK(v.empty());
    CHECK_THROWS_AS(v.pop_back(), StructureError);
    CHECK(full.size() == 1100);
    CHECK(full.get(1099) == 1099);
}

TEST_CASE("vector visits stay within depth plus one") {
    std::mt19937_64 rng(7);
    PersistentVector<int> v;
    std::vector<int> oracle;
    for (int op = 0; op < 20000; ++op) {
        StepCounter c;
        const std::size_t before = v.size();
        const auto kind = rng() % 10;
        if (kind < 5 || oracle.empty()) {
            v = v.push_back(op, &c);
            oracle.push_back(op);
        } else if (kind < 7) {
            auto [next, x] = v.pop_back(&c);
            CHECK(x == oracle.back());
            oracle.pop_back();
            v = next;
        } else if (kind < 9) {
            const std::size_t i = rng() % oracle.size();
            CHECK(v.get(i, &c) == oracle[i]);
        } else {
            const std::size_t i = rng() % oracle.size();
            v = v.set(i, -op, &c);
            oracle[i] = -op;
        }
        const std::size_t n = std::max(before, v.size());
        REQUIRE(c.node_visits <= ceil_log32(n) + 1);
    }
    CHECK(v.to_vector() == oracle);
}

TEST_CASE("map enumerates in key order") {
    OrderedMap<int, std::string> m;
    m = m.insert(3, "c").insert(1, "a").insert(2, "b");
    auto e = m.enumerate();
    REQUIRE(e.size() == 3);
    CHECK(e[0].first == 1);
    CHECK(e[1].first == 2);
    CHECK(e[2].first == 3);
}

TEST_CASE("map insert of existing key replaces") {
    OrderedMap<int, int> m;
    m = m.insert(5, 1);
    OrderedMap<int, int> m2 = m.insert(5, 2);
    CHECK(m2.size() == 1);
    CHECK(*m2.find(5) == 2);
    CHECK(*m.find(5) == 1);
    CHECK_FALSE(m.remove(9).find(9).has_value());
    CHECK(m.remove(9).size() == 1);
}

TEST_CASE("map matches a sorted-list oracle") {
    std::mt19937_64 rng(11);
    OrderedMap<int, int> m;
    std::vector<std::pair<int, int>> oracle;  // sorted by key
    auto oracle_find = [&](int k) -> std::optional<int> {
        for (const auto& [key, value] : oracle) {
            if (key == k) {
                return value;
            }
        }
        return std::nullopt;
    };
    int worst_ratio_violations = 0;
    for (int op = 0; op < 10000; ++op) {
        const int k = static_cast<int>(rng() % 500);
        StepCounter c;
        const std::size_t before = m.size();
        switch (rng() % 3) {
        case 0: {
            m = m.insert(k, op, &c);
            auto it = std::lower_bound(oracle.begin(), oracle.end(), k,
                                       [](const auto& p, int key) { return p.first < key; });
            if (it != oracle.end() && it->first == k) {
                it->second = op;
            } else {
                oracle.insert(it, {k, op});
            }
            break;
        }
        case 1: {
            m = m.remove(k, &c);
            std::erase_if(oracle, [k](const auto& p) { return p.first == k; });
            break;
        }
        default:
            CHECK(m.find(k, &c) == oracle_find(k));
        }
        const double n = static_cast<double>(std::max(before, m.size()));
        if (static_cast<double>(c.node_visits) > 2.0 * 1.45 * std::log2(n + 2.0)) {
            ++worst_ratio_violations;
        }
        REQUIRE(m.size() == oracle.size());
    }
    CHECK(worst_ratio_violations == 0);
    CHECK(m.check_invariants());
    CHECK(m.enumerate() == oracle);
}

TEST_CASE("map stays balanced under sorted insertion") {
    OrderedMap<int, int> m;
    for (int i = 0; i < 4096; ++i) {
        m = m.insert(i, i);
    }
    CHECK(m.check_invariants());
    CHECK(m.height() <= static_cast<int>(1.45 * std::log2(4096 + 2)));
    for (int i = 0; i < 4096; i += 2) {
        m = m.remove(i);
    }
    CHECK(m.check_invariants());
    CHECK(m.size() == 2048);
}

TEST_CASE("stable sort keeps equal keys in input order") {
    using Item = std::pair<int, char>;
    std::vector<Item> items{{2, 'a'}, {1, 'b'}, {2, 'c'}};
    auto sorted = stable_sort(items, [](const Item& x, const Item& y) { return x.first < y.first; });
    CHECK(sorted == std::vector<Item>{{1, 'b'}, {2, 'a'}, {2, 'c'}});
    CHECK(stable_sort(std::vector<int>{}).empty());
}

TEST_CASE("stable sort comparison bound") {
    CHECK(sort_comparison_bound(1) == 1);
    CHECK(sort_comparison_bound(2) == 4);
    CHECK(sort_comparison_bound(5) == 20);
    const std::size_t n = 5000;
    std::vector<int> sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = static_cast<int>(i);
    }
    std::vector<int> reversed(sorted.rbegin(), sorted.rend());
    std::mt19937_64 rng(3);
    std::vector<int> shuffled = sorted;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (const auto& input : {sorted, reversed, shuffled}) {
        StepCounter c;
        auto out = stable_sort(input, std::less<int>{}, &c);
        CHECK(std::is_sorted(out.begin(), out.end()));
        CHECK(c.comparisons <= sort_comparison_bound(n));
    }
}
