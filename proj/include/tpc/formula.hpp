#pragma once

// Propositional formulas over Boolean variables, partial/total assignments,
// and the exhaustive model enumerator every other module uses as an oracle.

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tpc/error.hpp"

namespace tpc {

using VarId = std::uint32_t;

struct Var {
  VarId id = 0;
  std::string name;

  friend bool operator==(const Var&, const Var&) = default;
};

/// Maximum number of variables enumerated exhaustively.
inline constexpr std::size_t kMaxEnumerationVars = 20;

/// An ordered table of uniquely named variables; ids are table positions.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::span<const std::string> names);

  /// Adds a new variable. Throws PreconditionError on an empty or duplicate name.
  VarId add(std::string name);
  /// Returns the existing id for `name` or adds it.
  VarId intern(std::string_view name);

  std::optional<VarId> find(std::string_view name) const;
  /// Like find() but throws PreconditionError naming the unknown variable.
  VarId at(std::string_view name) const;

  const Var& operator[](VarId id) const { return vars_.at(id); }
  std::size_t size() const noexcept { return vars_.size(); }
  bool empty() const noexcept { return vars_.empty(); }
  std::span<const Var> vars() const noexcept { return vars_; }

  friend bool operator==(const Universe& a, const Universe& b) { return a.vars_ == b.vars_; }

 private:
  std::vector<Var> vars_;
  std::unordered_map<std::string, VarId> by_name_;
};

/// A set of (variable, value) pairs with no variable repeated. Entries are
/// kept sorted by variable id.
class Assignment {
 public:
  using Entry = std::pair<VarId, bool>;

  Assignment() = default;
  Assignment(std::initializer_list<Entry> entries);

  /// Adds var=value. Throws PreconditionError if `var` is already assigned.
  void set(VarId var, bool value);
  std::optional<bool> get(VarId var) const;
  bool contains(VarId var) const { return get(var).has_value(); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// True when no variable is assigned by both.
  bool disjoint(const Assignment& other) const;
  /// True when every shared variable has the same value.
  bool consistent(const Assignment& other) const;
  /// Union of two disjoint assignments.
  Assignment merged(const Assignment& other) const;
  /// True when `this` assigns every variable of `universe`.
  bool covers(std::span<const Var> universe) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Renders `A=1,B=0` using names from `universe`.
std::string to_string(const Assignment& a, const Universe& universe);

/// Parses `name=0|1` comma lists against `universe`. An empty or
/// whitespace-only string gives the empty assignment.
Assignment parse_assignment(std::string_view text, const Universe& universe);

/// Immutable propositional formula. Copies share structure.
class Formula {
 public:
  enum class Kind : std::uint8_t { True, False, Literal, Not, And, Or };

  static Formula top();
  static Formula bottom();
  static Formula literal(Var var, bool positive = true);
  /// Negating a literal flips it; a double negation collapses.
  static Formula negation(Formula child);
  /// n-ary conjunction. No children gives ⊤, one child gives that child.
  static Formula conjunction(std::vector<Formula> children);
  /// n-ary disjunction. No children gives ⊥, one child gives that child.
  static Formula disjunction(std::vector<Formula> children);

  Kind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == Kind::True || kind() == Kind::False; }
  bool is_literal() const noexcept { return kind() == Kind::Literal; }
  bool is_connective() const noexcept { return kind() == Kind::And || kind() == Kind::Or; }

  /// Literal only.
  const Var& var() const;
  /// Literal only.
  bool positive() const;
  /// Not, And and Or. Empty for the other kinds.
  std::span<const Formula> children() const noexcept;

  /// Identity of the shared node; equal pointers imply equal formulas.
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Evaluates with a `bool(VarId)` lookup. The lookup decides how unassigned
/// variables are treated.
template <typename Lookup>
bool evaluate_with(const Formula& f, const Lookup& value_of) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Literal:
      return value_of(f.var().id) == f.positive();
    case Formula::Kind::Not:
      return !evaluate_with(f.children()[0], value_of);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!evaluate_with(c, value_of)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (evaluate_with(c, value_of)) return true;
      return false;
  }
  return false;
}

/// Truth value under `a`. Throws UnassignedVariable for a missing variable.
bool evaluate(const Formula& f, const Assignment& a);

/// Variables occurring in `f`, sorted by id, without duplicates.
std::vector<Var> variables(const Formula& f);

/// All total assignments over `universe` that satisfy `f`, in lexicographic
/// order with the lowest-id variable most significant. Throws BoundExceeded
/// above kMaxEnumerationVars and PreconditionError if `f` mentions a
/// variable outside `universe`.
std::vector<Assignment> models(const Formula& f, std::span<const Var> universe);

/// Constant propagation to fixpoint: x∧⊥→⊥, x∧⊤→x, x∨⊥→x, x∨⊤→⊤, ¬⊤→⊥,
/// ¬⊥→⊤. Connectives left with one operand collapse to it. Nesting is
/// otherwise preserved.
Formula simplify(const Formula& f);

/// Replaces assigned literals by constants and simplifies.
Formula substitute(const Formula& f, const Assignment& partial);

/// Negation normal form: negation only on literals.
Formula to_nnf(const Formula& f);

/// Shape consumed by the SEM compiler: every conjunction has exactly two
/// operands (left-nested), directly nested disjunctions are flattened.
Formula binarize(const Formula& f);

/// Number of binary connectives, counting an n-ary connective as n-1.
std::size_t binary_connective_count(const Formula& f);

/// Text form using the CLI grammar. Parenthesizes nested connectives so
/// that parse_formula() restores the same tree.
std::string to_string(const Formula& f);

/// Parses the CLI grammar: identifiers, `!`, `&`, `|`, parentheses, `true`,
/// `false`; precedence ! > & > |. Unknown identifiers are an error.
Formula parse_formula(std::string_view text, const Universe& universe);
/// As above but adds unknown identifiers to `universe`.
Formula parse_formula_interning(std::string_view text, Universe& universe);

}  // namespace tpc
