#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omega::brex {

using CharSet = std::bitset<256>;

enum class NodeKind : std::uint8_t {
    Literal,
    CharClass,
    Epsilon,
    Concat,
    Alt,
    Star,
    Plus,
    Opt,
    Repeat,
    Conj,
    Neg,
    LookAhead,
    LookBehind,
};

const char* to_string(NodeKind kind);

inline constexpr int kMaxRepeat = 1024;
inline constexpr int kMaxLookaroundDepth = 3;
// Upper limit on the node count after repeat expansion.
inline constexpr std::size_t kMaxExpandedNodes = std::size_t{1} << 20;

struct Node {
    NodeKind kind = NodeKind::Epsilon;
    CharSet chars;          // Literal (single bit) and CharClass (already complemented when negated)
    bool negated = false;   // CharClass written as [^...]
    bool positive = true;   // lookaround polarity
    int min = 0;            // Repeat
    int max = 0;            // Repeat
    std::vector<int> children;
    int stratum = 0;
    int look_depth = 0;     // lookaround nesting depth of this subtree
};

// Nodes live in an arena; children refer to earlier entries by index.
struct Ast {
    std::vector<Node> nodes;
    int root = -1;

    const Node& at(int index) const { return nodes[static_cast<std::size_t>(index)]; }
    std::size_t size() const { return nodes.size(); }

    int add(Node node);
};

enum class BrexErrc { SyntaxError, StratificationError, RepeatTooLarge };

const char* to_string(BrexErrc code);

class BrexError : public std::runtime_error {
public:
    BrexError(BrexErrc code, std::size_t position, const std::string& what);
    BrexErrc code() const noexcept { return code_; }
    std::size_t position() const noexcept { return position_; }

private:
    BrexErrc code_;
    std::size_t position_;
};

// Fills in stratum and look_depth bottom-up; throws StratificationError when
// lookaround nesting exceeds kMaxLookaroundDepth.
void compute_strata(Ast& ast);

// Concat[Star(Lit a), Lit b] style rendering, strata omitted.
std::string describe(const Ast& ast);
std::string describe(const Ast& ast, int node);

// Copy of the tree with every Repeat replaced by duplication:
// e{m,n} -> e ... e (m copies) followed by n-m nested optional copies.
Ast expand_repeats(const Ast& ast);

}  // namespace omega::brex
