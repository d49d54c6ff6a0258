#include "omega/brex/nfa.hpp"

#include <cassert>

namespace omega::brex {

std::size_t NfaProgram::transition_count() const {
    std::size_t n = 0;
    for (const NfaState& s : states) {
        n += s.epsilon.size() + (s.symbol_target >= 0 ? 1 : 0);
    }
    return n;
}

namespace {

struct Fragment {
    int start;
    int accept;
};

class Builder {
public:
    Builder(const Ast& ast, NfaProgram& program) : ast_(ast), program_(program) {}

    Fragment build(int index) {
        const Node& node = ast_.at(index);
        assert(node.stratum == 0);
        switch (node.kind) {
        case NodeKind::Literal:
        case NodeKind::CharClass: {
            const int s = state();
            const int t = state();
            program_.states[s].symbols = node.chars;
            program_.states[s].symbol_target = t;
            return {s, t};
        }
        case NodeKind::Epsilon: {
            const int s = state();
            return {s, s};
        }
        case NodeKind::Concat: {
            Fragment whole = build(node.children[0]);
            for (std::size_t i = 1; i < node.children.size(); ++i) {
                Fragment next = build(node.children[i]);
                link(whole.accept, next.start);
                whole.accept = next.accept;
            }
            return whole;
        }
        case NodeKind::Alt: {
            const int s = state();
            const int t = state();
            for (int child : node.children) {
                Fragment f = build(child);
                link(s, f.start);
                link(f.accept, t);
            }
            return {s, t};
        }
        case NodeKind::Star: {
            const int s = state();
            const int t = state();
            Fragment f = build(node.children[0]);
            link(s, f.start);
            link(s, t);
            link(f.accept, f.start);
            link(f.accept, t);
            return {s, t};
        }
        case NodeKind::Plus: {
            const int s = state();
            const int t = state();
            Fragment f = build(node.children[0]);
            link(s, f.start);
            link(f.accept, f.start);
            link(f.accept, t);
            return {s, t};
        }
        case NodeKind::Opt: {
            const int s = state();
            const int t = state();
            Fragment f = build(node.children[0]);
            link(s, f.start);
            link(s, t);
            link(f.accept, t);
            return {s, t};
        }
        default:
            throw BrexError(BrexErrc::StratificationError, 0,
                            std::string("operator ") + to_string(node.kind) + " inside a stratum-0 component");
        }
    }

private:
    int state() {
        program_.states.emplace_back();
        return static_cast<int>(program_.states.size()) - 1;
    }

    void link(int from, int to) { program_.states[from].epsilon.push_back(to); }

    const Ast& ast_;
    NfaProgram& program_;
};

}  // namespace

NfaProgram build_nfa(const Ast& ast, int root) {
    NfaProgram program;
    Fragment f = Builder(ast, program).build(root);
    program.start = f.start;
    program.accept = f.accept;
    return program;
}

NfaRunner::NfaRunner(const NfaProgram& program) : program_(program), mark_(program.states.size(), 0) {}

// Epsilon closure in place; `set` holds distinct states marked with the
// current generation.
void NfaRunner::close(std::vector<int>& set, std::uint64_t& steps) {
    stack_.assign(set.begin(), set.end());
    while (!stack_.empty()) {
        const int s = stack_.back();
        stack_.pop_back();
        ++steps;
        for (int t : program_.states[s].epsilon) {
            if (mark_[t] != generation_) {
                mark_[t] = generation_;
                set.push_back(t);
                stack_.push_back(t);
            }
        }
    }
}

void NfaRunner::run(std::string_view input, std::size_t from, std::vector<std::uint64_t>& ends, std::uint64_t& steps) {
    const std::size_t span = input.size() - from;
    ends.assign(span / 64 + 1, 0);
    ++generation_;
    current_.clear();
    current_.push_back(program_.start);
    mark_[program_.start] = generation_;
    close(current_, steps);
    for (std::size_t k = 0;; ++k) {
        if (mark_[program_.accept] == generation_) {
            ends[k >> 6] |= std::uint64_t{1} << (k & 63);
        }
        if (k == span || current_.empty()) {
            break;
        }
        const auto c = static_cast<unsigned char>(input[from + k]);
        ++generation_;
        next_.clear();
        for (int s : current_) {
            ++steps;
            const NfaState& st = program_.states[s];
            if (st.symbol_target >= 0 && st.symbols.test(c) && mark_[st.symbol_target] != generation_) {
                mark_[st.symbol_target] = generation_;
                next_.push_back(st.symbol_target);
            }
        }
        close(next_, steps);
        current_.swap(next_);
    }
}

bool NfaRunner::accepts(std::string_view input, std::uint64_t& steps) {
    std::vector<std::uint64_t> ends;
    run(input, 0, ends, steps);
    const std::size_t k = input.size();
    return (ends[k >> 6] >> (k & 63)) & 1u;
}

}  // namespace omega::brex
