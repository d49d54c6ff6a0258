#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "omega/brex/ast.hpp"

namespace omega::brex {

// Thompson automaton for a stratum-0 subtree. Each state has at most one
// symbol edge (on a character set) and any number of epsilon edges.
struct NfaState {
    int symbol_target = -1;
    CharSet symbols;
    std::vector<int> epsilon;
};

struct NfaProgram {
    std::vector<NfaState> states;
    int start = 0;
    int accept = 0;

    std::size_t state_count() const { return states.size(); }
    std::size_t transition_count() const;
};

// Requires every node under `root` to be stratum 0 and repeat-free.
NfaProgram build_nfa(const Ast& ast, int root);

// Active-state-set simulation starting at `from`. Bit k of the result (for
// k = 0 .. input.size() - from) is set when input[from, from + k) is
// accepted. `steps` grows by one per state touched.
class NfaRunner {
public:
    explicit NfaRunner(const NfaProgram& program);

    void run(std::string_view input, std::size_t from, std::vector<std::uint64_t>& ends, std::uint64_t& steps);

    // Whole-input acceptance.
    bool accepts(std::string_view input, std::uint64_t& steps);

private:
    void close(std::vector<int>& set, std::uint64_t& steps);

    const NfaProgram& program_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t generation_ = 0;
    std::vector<int> current_;
    std::vector<int> next_;
    std::vector<int> stack_;
};

}  // namespace omega::brex
