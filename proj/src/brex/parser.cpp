#include "omega/brex/parser.hpp"

#include <cctype>
#include <string>

namespace omega::brex {

namespace {

bool is_meta(char c) {
    switch (c) {
    case '\\': case '*': case '+': case '?': case '(': case ')': case '[': case ']':
    case '{': case '}': case '!': case '&': case '|':
        return true;
    default:
        return false;
    }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Ast run() {
        ast_.root = conj();
        skip_space();
        if (pos_ < text_.size()) {
            fail(text_[pos_] == ')' ? "unbalanced ')'" : "unexpected character");
        }
        compute_strata(ast_);
        return std::move(ast_);
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw BrexError(BrexErrc::SyntaxError, pos_, what); }

    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) {
            ++pos_;
        }
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    int make(NodeKind kind, std::vector<int> children) {
        Node node;
        node.kind = kind;
        node.children = std::move(children);
        return ast_.add(std::move(node));
    }

    int conj() {
        int left = alt();
        while (accept('&')) {
            int right = alt();
            left = make(NodeKind::Conj, {left, right});
        }
        return left;
    }

    int alt() {
        std::vector<int> branches{concat()};
        while (accept('|')) {
            branches.push_back(concat());
        }
        return branches.size() == 1 ? branches[0] : make(NodeKind::Alt, std::move(branches));
    }

    bool at_concat_end() {
        skip_space();
        return pos_ >= text_.size() || text_[pos_] == ')' || text_[pos_] == '|' || text_[pos_] == '&';
    }

    int concat() {
        std::vector<int> items;
        while (!at_concat_end()) {
            items.push_back(unary());
        }
        if (items.empty()) {
            return make(NodeKind::Epsilon, {});
        }
        return items.size() == 1 ? items[0] : make(NodeKind::Concat, std::move(items));
    }

    int unary() {
        if (accept('!')) {
            return make(NodeKind::Neg, {unary()});
        }
        return postfix();
    }

    int number() {
        skip_space();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + (text_[pos_] - '0');
            if (value > 1'000'000) {
                throw BrexError(BrexErrc::RepeatTooLarge, start, "repeat bound too large");
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail("expected a number");
        }
        return static_cast<int>(value);
    }

    int postfix() {
        int node = atom();
        for (;;) {
            if (accept('*')) {
                node = make(NodeKind::Star, {node});
            } else if (accept('+')) {
                node = make(NodeKind::Plus, {node});
            } else if (accept('?')) {
                node = make(NodeKind::Opt, {node});
            } else if (peek('{')) {
                const std::size_t at = pos_;
                ++pos_;
                const int lo = number();
                int hi = lo;
                if (accept(',')) {
                    if (peek('}')) {
                        throw BrexError(BrexErrc::RepeatTooLarge, at, "unbounded counted repeat");
                    }
                    hi = number();
                }
                expect('}');
                if (hi < lo) {
                    throw BrexError(BrexErrc::SyntaxError, at, "repeat bounds out of order");
                }
                if (hi > kMaxRepeat) {
                    throw BrexError(BrexErrc::RepeatTooLarge, at,
                                    "repeat bound " + std::to_string(hi) + " > " + std::to_string(kMaxRepeat));
                }
                Node repeat;
                repeat.kind = NodeKind::Repeat;
                repeat.children = {node};
                repeat.min = lo;
                repeat.max = hi;
                node = ast_.add(std::move(repeat));
            } else {
                return node;
            }
        }
    }

    // One character of a literal or class item, escapes resolved.
    unsigned char literal_char(bool in_class) {
        if (pos_ >= text_.size()) {
            fail("unexpected end of pattern");
        }
        char c = text_[pos_];
        if (c == '\\') {
            ++pos_;
            if (pos_ >= text_.size()) {
                fail("dangling escape");
            }
            c = text_[pos_];
            if (!is_meta(c) && !(in_class && (c == '-' || c == '^'))) {
                fail(std::string("unknown escape \\") + c);
            }
        } else if (!in_class && is_meta(c)) {
            fail(std::string("unexpected '") + c + "'");
        }
        ++pos_;
        return static_cast<unsigned char>(c);
    }

    int char_class() {
        // '[' already consumed.
        Node node;
        node.kind = NodeKind::CharClass;
        if (pos_ < text_.size() && text_[pos_] == '^') {
            node.negated = true;
            ++pos_;
        }
        while (pos_ < text_.size() && text_[pos_] != ']') {
            const unsigned char lo = literal_char(true);
            unsigned char hi = lo;
            if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] != ']') {
                ++pos_;
                hi = literal_char(true);
                if (hi < lo) {
                    fail("class range out of order");
                }
            }
            for (int c = lo; c <= hi; ++c) {
                node.chars.set(static_cast<std::size_t>(c));
            }
        }
        if (pos_ >= text_.size()) {
            fail("unterminated class");
        }
        ++pos_;
        if (node.negated) {
            node.chars.flip();
        }
        return ast_.add(std::move(node));
    }

    int atom() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of pattern");
        }
        const char c = text_[pos_];
        if (c == '[') {
            ++pos_;
            return char_class();
        }
        if (c == '(') {
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '?') {
                ++pos_;
                NodeKind kind = NodeKind::LookAhead;
                if (pos_ < text_.size() && text_[pos_] == '<') {
                    kind = NodeKind::LookBehind;
                    ++pos_;
                }
                bool positive;
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    positive = true;
                } else if (pos_ < text_.size() && text_[pos_] == '!') {
                    positive = false;
                } else {
                    fail("expected '=' or '!' after '(?'");
                }
                ++pos_;
                const int inner = conj();
                expect(')');
                Node node;
                node.kind = kind;
                node.positive = positive;
                node.children = {inner};
                return ast_.add(std::move(node));
            }
            const int inner = conj();
            expect(')');
            return inner;
        }
        Node node;
        node.kind = NodeKind::Literal;
        node.chars.set(literal_char(false));
        return ast_.add(std::move(node));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Ast ast_;
};

}  // namespace

Ast parse(std::string_view pattern) { return Parser(pattern).run(); }

}  // namespace omega::brex
