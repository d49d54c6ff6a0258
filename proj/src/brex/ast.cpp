#include "omega/brex/ast.hpp"

#include <algorithm>
#include <functional>

namespace omega::brex {

const char* to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Literal: return "Lit";
    case NodeKind::CharClass: return "Class";
    case NodeKind::Epsilon: return "Eps";
    case NodeKind::Concat: return "Concat";
    case NodeKind::Alt: return "Alt";
    case NodeKind::Star: return "Star";
    case NodeKind::Plus: return "Plus";
    case NodeKind::Opt: return "Opt";
    case NodeKind::Repeat: return "Repeat";
    case NodeKind::Conj: return "Conj";
    case NodeKind::Neg: return "Neg";
    case NodeKind::LookAhead: return "LookAhead";
    case NodeKind::LookBehind: return "LookBehind";
    }
    return "?";
}

const char* to_string(BrexErrc code) {
    switch (code) {
    case BrexErrc::SyntaxError: return "SyntaxError";
    case BrexErrc::StratificationError: return "StratificationError";
    case BrexErrc::RepeatTooLarge: return "RepeatTooLarge";
    }
    return "?";
}

BrexError::BrexError(BrexErrc code, std::size_t position, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " at " + std::to_string(position) + ": " + what),
      code_(code),
      position_(position) {}

int Ast::add(Node node) {
    nodes.push_back(std::move(node));
    return static_cast<int>(nodes.size()) - 1;
}

void compute_strata(Ast& ast) {
    // Children always precede their parent in the arena.
    for (Node& node : ast.nodes) {
        int stratum = 0;
        int depth = 0;
        for (int c : node.children) {
            stratum = std::max(stratum, ast.nodes[static_cast<std::size_t>(c)].stratum);
            depth = std::max(depth, ast.nodes[static_cast<std::size_t>(c)].look_depth);
        }
        switch (node.kind) {
        case NodeKind::Conj:
        case NodeKind::Neg:
            ++stratum;
            break;
        case NodeKind::LookAhead:
        case NodeKind::LookBehind:
            ++stratum;
            ++depth;
            break;
        default:
            break;
        }
        if (depth > kMaxLookaroundDepth) {
            throw BrexError(BrexErrc::StratificationError, 0,
                            "lookaround nested deeper than " + std::to_string(kMaxLookaroundDepth));
        }
        node.stratum = stratum;
        node.look_depth = depth;
    }
}

namespace {

std::string describe_chars(const CharSet& chars) {
    std::string out;
    for (int c = 0; c < 256; ++c) {
        if (!chars.test(static_cast<std::size_t>(c))) {
            continue;
        }
        int end = c;
        while (end + 1 < 256 && chars.test(static_cast<std::size_t>(end + 1))) {
            ++end;
        }
        auto render = [](int ch) {
            return (ch >= 0x21 && ch < 0x7f) ? std::string(1, static_cast<char>(ch)) : "\\x" + std::to_string(ch);
        };
        out += render(c);
        if (end > c + 1) {
            out += "-" + render(end);
        } else if (end == c + 1) {
            out += "," + render(end);
        }
        out += ",";
        c = end;
    }
    if (!out.empty()) {
        out.pop_back();
    }
    return out;
}

}  // namespace

std::string describe(const Ast& ast, int index) {
    const Node& node = ast.at(index);
    auto list = [&](char open, char close) {
        std::string out = std::string(to_string(node.kind)) + open;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            out += (i > 0 ? ", " : "") + describe(ast, node.children[i]);
        }
        return out + close;
    };
    switch (node.kind) {
    case NodeKind::Literal:
        return "Lit " + describe_chars(node.chars);
    case NodeKind::CharClass:
        return std::string(node.negated ? "Class^{" : "Class{") + describe_chars(node.negated ? ~node.chars : node.chars) + "}";
    case NodeKind::Epsilon:
        return "Eps";
    case NodeKind::Concat:
    case NodeKind::Alt:
        return list('[', ']');
    case NodeKind::Repeat:
        return "Repeat(" + describe(ast, node.children[0]) + ", " + std::to_string(node.min) + ", " +
               std::to_string(node.max) + ")";
    case NodeKind::LookAhead:
    case NodeKind::LookBehind:
        return std::string(to_string(node.kind)) + (node.positive ? "(+, " : "(-, ") + describe(ast, node.children[0]) + ")";
    default:
        return list('(', ')');
    }
}

std::string describe(const Ast& ast) { return ast.root < 0 ? "" : describe(ast, ast.root); }

namespace {

class Expander {
public:
    explicit Expander(const Ast& in) : in_(in) {}

    Ast run() {
        out_.root = copy(in_.root);
        compute_strata(out_);
        return std::move(out_);
    }

private:
    int emit(Node node) {
        if (out_.nodes.size() >= kMaxExpandedNodes) {
            throw BrexError(BrexErrc::RepeatTooLarge, 0,
                            "pattern expands past " + std::to_string(kMaxExpandedNodes) + " nodes");
        }
        return out_.add(std::move(node));
    }

    int copy(int index) {
        const Node& node = in_.at(index);
        if (node.kind == NodeKind::Repeat) {
            return expand(node);
        }
        Node fresh = node;
        fresh.children.clear();
        for (int c : node.children) {
            fresh.children.push_back(copy(c));
        }
        return emit(std::move(fresh));
    }

    int expand(const Node& repeat) {
        const int body = repeat.children[0];
        Node concat;
        concat.kind = NodeKind::Concat;
        for (int i = 0; i < repeat.min; ++i) {
            concat.children.push_back(copy(body));
        }
        // (e(e(e)?)?)? for the optional tail.
        int tail = -1;
        for (int i = repeat.min; i < repeat.max; ++i) {
            Node opt;
            opt.kind = NodeKind::Opt;
            if (tail < 0) {
                opt.children.push_back(copy(body));
            } else {
                Node inner;
                inner.kind = NodeKind::Concat;
                inner.children = {copy(body), tail};
                opt.children.push_back(emit(std::move(inner)));
            }
            tail = emit(std::move(opt));
        }
        if (tail >= 0) {
            concat.children.push_back(tail);
        }
        if (concat.children.empty()) {
            Node eps;
            eps.kind = NodeKind::Epsilon;
            return emit(std::move(eps));
        }
        if (concat.children.size() == 1) {
            return concat.children[0];
        }
        return emit(std::move(concat));
    }

    const Ast& in_;
    Ast out_;
};

}  // namespace

Ast expand_repeats(const Ast& ast) { return Expander(ast).run(); }

}  // namespace omega::brex
