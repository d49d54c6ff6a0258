#include "omega/brex/matcher.hpp"

#include <bit>

#include "omega/brex/parser.hpp"

namespace omega::brex {

namespace {

using Words = std::vector<std::uint64_t>;

bool test(const Words& w, std::size_t k) { return (w[k >> 6] >> (k & 63)) & 1u; }
void set(Words& w, std::size_t k) { w[k >> 6] |= std::uint64_t{1} << (k & 63); }

template <typename F>
void for_each_bit(const Words& w, F&& f) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::uint64_t word = w[i];
        while (word != 0) {
            f(i * 64 + static_cast<std::size_t>(std::countr_zero(word)));
            word &= word - 1;
        }
    }
}

}  // namespace

// One evaluation over one input. Position sets are absolute: bit j of
// ends(e, i) means e matches input[i, j).
class Evaluation {
public:
    Evaluation(const CompiledPattern& pattern, std::string_view input)
        : p_(pattern),
          input_(input),
          n_(input.size()),
          words_(input.size() / 64 + 1),
          memo_(pattern.ast_.size()),
          done_(pattern.ast_.size()) {
        runners_.reserve(p_.programs_.size());
        for (const auto& entry : p_.programs_) {
            runners_.emplace_back(*entry.second);
        }
    }

    std::uint64_t steps() const { return steps_; }

    const Words& ends(int node, std::size_t i) {
        auto& slots = memo_[static_cast<std::size_t>(node)];
        auto& flags = done_[static_cast<std::size_t>(node)];
        if (slots.empty()) {
            slots.resize(n_ + 1);
            flags.assign(n_ + 1, false);
        }
        if (!flags[i]) {
            Words result = compute(node, i);
            slots[i] = std::move(result);
            flags[i] = true;
        }
        return slots[i];
    }

private:
    Words empty_set() const { return Words(words_, 0); }

    void unite(Words& into, const Words& from) {
        for (std::size_t w = 0; w < words_; ++w) {
            into[w] |= from[w];
        }
        steps_ += words_;
    }

    Words compute(int index, std::size_t i) {
        ++steps_;
        const int program = p_.program_of_[static_cast<std::size_t>(index)];
        if (program >= 0) {
            Words local;
            runners_[static_cast<std::size_t>(program)].run(input_, i, local, steps_);
            // Shift relative ends to absolute positions.
            Words out = empty_set();
            for_each_bit(local, [&](std::size_t k) { set(out, i + k); });
            steps_ += local.size();
            return out;
        }
        const Node& node = p_.ast_.at(index);
        switch (node.kind) {
        case NodeKind::Concat: {
            Words current = empty_set();
            set(current, i);
            for (int child : node.children) {
                Words next = empty_set();
                for_each_bit(current, [&](std::size_t j) { unite(next, ends(child, j)); });
                current = std::move(next);
            }
            return current;
        }
        case NodeKind::Alt: {
            Words out = empty_set();
            for (int child : node.children) {
                unite(out, ends(child, i));
            }
            return out;
        }
        case NodeKind::Star:
        case NodeKind::Plus: {
            const int body = node.children[0];
            Words reached = empty_set();
            std::vector<std::size_t> work;
            auto add_from = [&](const Words& from) {
                for_each_bit(from, [&](std::size_t j) {
                    ++steps_;
                    if (!test(reached, j)) {
                        set(reached, j);
                        work.push_back(j);
                    }
                });
            };
            if (node.kind == NodeKind::Star) {
                set(reached, i);
                work.push_back(i);
            } else {
                add_from(ends(body, i));
            }
            while (!work.empty()) {
                const std::size_t j = work.back();
                work.pop_back();
                add_from(ends(body, j));
            }
            return reached;
        }
        case NodeKind::Opt: {
            Words out = ends(node.children[0], i);
            set(out, i);
            return out;
        }
        case NodeKind::Conj: {
            Words out = ends(node.children[0], i);
            const Words& other = ends(node.children[1], i);
            for (std::size_t w = 0; w < words_; ++w) {
                out[w] &= other[w];
            }
            steps_ += words_;
            return out;
        }
        case NodeKind::Neg: {
            const Words& inner = ends(node.children[0], i);
            Words out = empty_set();
            for (std::size_t j = i; j <= n_; ++j) {
                if (!test(inner, j)) {
                    set(out, j);
                }
            }
            steps_ += n_ + 1 - i;
            return out;
        }
        case NodeKind::LookAhead: {
            const Words& inner = ends(node.children[0], i);
            bool any = false;
            for (std::uint64_t w : inner) {
                any = any || w != 0;
            }
            steps_ += words_;
            Words out = empty_set();
            if (any == node.positive) {
                set(out, i);
            }
            return out;
        }
        case NodeKind::LookBehind: {
            bool any = false;
            for (std::size_t j = 0; j <= i && !any; ++j) {
                ++steps_;
                any = test(ends(node.children[0], j), i);
            }
            Words out = empty_set();
            if (any == node.positive) {
                set(out, i);
            }
            return out;
        }
        default:
            // Leaves are always part of a stratum-0 component.
            return empty_set();
        }
    }

    const CompiledPattern& p_;
    std::string_view input_;
    std::size_t n_;
    std::size_t words_;
    std::vector<NfaRunner> runners_;
    std::vector<std::vector<Words>> memo_;
    std::vector<std::vector<bool>> done_;
    std::uint64_t steps_ = 0;
};

CompiledPattern CompiledPattern::compile(std::string_view pattern) { return compile(parse(pattern)); }

CompiledPattern CompiledPattern::compile(const Ast& ast) {
    CompiledPattern out;
    out.ast_ = expand_repeats(ast);
    out.program_of_.assign(out.ast_.size(), -1);
    // Maximal stratum-0 subtrees: stratum-0 nodes whose parent is not.
    std::vector<int> parent(out.ast_.size(), -1);
    for (std::size_t i = 0; i < out.ast_.size(); ++i) {
        for (int c : out.ast_.nodes[i].children) {
            parent[static_cast<std::size_t>(c)] = static_cast<int>(i);
        }
    }
    for (std::size_t i = 0; i < out.ast_.size(); ++i) {
        const int up = parent[i];
        const bool reachable = static_cast<int>(i) == out.ast_.root || up >= 0;
        if (!reachable || out.ast_.nodes[i].stratum != 0) {
            continue;
        }
        if (up >= 0 && out.ast_.at(up).stratum == 0) {
            continue;
        }
        out.program_of_[i] = static_cast<int>(out.programs_.size());
        out.programs_.emplace_back(static_cast<int>(i),
                                   std::make_unique<NfaProgram>(build_nfa(out.ast_, static_cast<int>(i))));
    }
    return out;
}

std::size_t CompiledPattern::total_states() const {
    std::size_t n = 0;
    for (const auto& entry : programs_) {
        n += entry.second->state_count();
    }
    return n;
}

bool CompiledPattern::accepts(std::string_view input, std::uint64_t* steps) const {
    std::uint64_t local = 0;
    bool result;
    if (program_of_[static_cast<std::size_t>(ast_.root)] >= 0) {
        NfaRunner runner(*programs_[0].second);
        result = runner.accepts(input, local);
    } else {
        Evaluation eval(*this, input);
        result = test(eval.ends(ast_.root, 0), input.size());
        local = eval.steps();
    }
    if (steps != nullptr) {
        *steps += local;
    }
    return result;
}

std::optional<Span> CompiledPattern::search(std::string_view input, std::uint64_t* steps) const {
    std::uint64_t local = 0;
    std::optional<Span> found;
    auto longest = [](const Words& w) -> std::optional<std::size_t> {
        for (std::size_t k = w.size(); k-- > 0;) {
            if (w[k] != 0) {
                return k * 64 + 63 - static_cast<std::size_t>(std::countl_zero(w[k]));
            }
        }
        return std::nullopt;
    };
    if (program_of_[static_cast<std::size_t>(ast_.root)] >= 0) {
        // Plain regular pattern: one NFA run per start, no memo needed.
        NfaRunner runner(*programs_[0].second);
        Words ends;
        for (std::size_t s = 0; s <= input.size() && !found; ++s) {
            runner.run(input, s, ends, local);
            if (auto k = longest(ends)) {
                found = Span{s, s + *k};
            }
        }
    } else {
        Evaluation eval(*this, input);
        for (std::size_t s = 0; s <= input.size() && !found; ++s) {
            if (auto j = longest(eval.ends(ast_.root, s))) {
                found = Span{s, *j};
            }
        }
        local = eval.steps();
    }
    if (steps != nullptr) {
        *steps += local;
    }
    return found;
}

}  // namespace omega::brex
