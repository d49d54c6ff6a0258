#pragma once

#include <string_view>

#include "omega/brex/ast.hpp"

namespace omega::brex {

// Grammar, lowest precedence first:
//   conj    := alt ('&' alt)*
//   alt     := concat ('|' concat)*
//   concat  := unary*
//   unary   := '!' unary | postfix
//   postfix := atom ('*' | '+' | '?' | '{m}' | '{m,n}')*
//   atom    := char | '\' meta | class | '(' conj ')' | '(?=' conj ')' | '(?!' conj ')'
//            | '(?<=' conj ')' | '(?<!' conj ')'
// Whitespace outside a class is ignored; use a class such as [ ] to match it.
Ast parse(std::string_view pattern);

}  // namespace omega::brex
