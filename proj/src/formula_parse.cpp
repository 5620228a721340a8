// Recursive-descent parser for the formula grammar:
//   or    := and ('|' and)*
//   and   := unary ('&' unary)*
//   unary := '!' unary | atom
//   atom  := '(' or ')' | 'true' | 'false' | identifier

#include <cctype>

#include "tpc/formula.hpp"

namespace tpc {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const Universe* fixed, Universe* interning)
      : text_(text), fixed_(fixed), interning_(interning) {}

  Formula parse() {
    auto f = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(0, "formula column " + std::to_string(pos_ + 1) + ": " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept('|')) parts.push_back(parse_and());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept('&')) parts.push_back(parse_unary());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_unary() {
    if (accept('!')) {
      return Formula::negation(parse_unary());
    }
    return parse_atom();
  }

  Formula parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    if (accept('(')) {
      auto inner = parse_or();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = text_[pos_];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected '") + c + "'");
    const auto start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const auto ident = text_.substr(start, pos_ - start);
    if (ident == "true") return Formula::top();
    if (ident == "false") return Formula::bottom();
    if (interning_ != nullptr) {
      const VarId id = interning_->intern(ident);
      return Formula::literal((*interning_)[id]);
    }
    auto id = fixed_->find(ident);
    if (!id) fail("unknown variable '" + std::string(ident) + "'");
    return Formula::literal((*fixed_)[*id]);
  }

  std::string_view text_;
  const Universe* fixed_;
  Universe* interning_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const Universe& universe) {
  return Parser(text, &universe, nullptr).parse();
}

Formula parse_formula_interning(std::string_view text, Universe& universe) {
  return Parser(text, nullptr, &universe).parse();
}

}  // namespace tpc
