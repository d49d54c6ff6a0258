#pragma once

// Pattern evaluation over spans of the input.
//
// Every maximal stratum-0 subtree is compiled to a Thompson NFA. Nodes above
// stratum 0 are evaluated as end-position sets: for node e and start i,
// ends(e, i) = { j : e matches input[i, j) }. These sets are memoized per
// (node, start), so each is computed once per input, and building one costs
// O(n^2 / 64) word operations at most. Total work is O(|ast| n^3) for any
// pattern.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omega/brex/ast.hpp"
#include "omega/brex/nfa.hpp"

namespace omega::brex {

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

class CompiledPattern {
public:
    static CompiledPattern compile(const Ast& ast);
    static CompiledPattern compile(std::string_view pattern);

    const Ast& expanded() const { return ast_; }
    // Node count after repeat expansion.
    std::size_t size() const { return ast_.size(); }
    int stratum() const { return ast_.at(ast_.root).stratum; }

    // Stratum-0 components in node order: (root node, program).
    std::size_t component_count() const { return programs_.size(); }
    const NfaProgram& component(std::size_t i) const { return *programs_[i].second; }
    std::size_t total_states() const;

    bool accepts(std::string_view input, std::uint64_t* steps = nullptr) const;
    // Leftmost start; longest end among matches at that start.
    std::optional<Span> search(std::string_view input, std::uint64_t* steps = nullptr) const;

private:
    friend class Evaluation;

    Ast ast_;
    std::vector<std::pair<int, std::unique_ptr<NfaProgram>>> programs_;
    std::vector<int> program_of_;  // node -> index into programs_, or -1
};

}  // namespace omega::brex
