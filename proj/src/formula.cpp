#include "tpc/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "tpc/kernels.hpp"

namespace tpc {

// ---------------------------------------------------------------- Universe

Universe::Universe(std::span<const std::string> names) {
  for (const auto& n : names) add(n);
}

VarId Universe::add(std::string name) {
  if (name.empty()) throw PreconditionError("variable name must be non-empty");
  if (by_name_.contains(name)) throw PreconditionError("duplicate variable '" + name + "'");
  const auto id = static_cast<VarId>(vars_.size());
  by_name_.emplace(name, id);
  vars_.push_back(Var{id, std::move(name)});
  return id;
}

VarId Universe::intern(std::string_view name) {
  if (auto id = find(name)) return *id;
  return add(std::string(name));
}

std::optional<VarId> Universe::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarId Universe::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw PreconditionError("unknown variable '" + std::string(name) + "'");
}

// -------------------------------------------------------------- Assignment

Assignment::Assignment(std::initializer_list<Entry> entries) {
  for (auto [v, b] : entries) set(v, b);
}

void Assignment::set(VarId var, bool value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, VarId v) { return e.first < v; });
  if (it != entries_.end() && it->first == var)
    throw PreconditionError("variable " + std::to_string(var) + " assigned twice");
  entries_.insert(it, {var, value});
}

std::optional<bool> Assignment::get(VarId var) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, VarId v) { return e.first < v; });
  if (it != entries_.end() && it->first == var) return it->second;
  return std::nullopt;
}

bool Assignment::disjoint(const Assignment& other) const {
  return std::none_of(entries_.begin(), entries_.end(),
                      [&](const Entry& e) { return other.contains(e.first); });
}

bool Assignment::consistent(const Assignment& other) const {
  return std::all_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
    auto v = other.get(e.first);
    return !v || *v == e.second;
  });
}

Assignment Assignment::merged(const Assignment& other) const {
  Assignment out = *this;
  for (auto [v, b] : other) out.set(v, b);
  return out;
}

bool Assignment::covers(std::span<const Var> universe) const {
  return std::all_of(universe.begin(), universe.end(),
                     [&](const Var& v) { return contains(v.id); });
}

std::string to_string(const Assignment& a, const Universe& universe) {
  std::string out;
  for (auto [v, b] : a) {
    if (!out.empty()) out += ',';
    out += universe[v].name;
    out += b ? "=1" : "=0";
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Assignment parse_assignment(std::string_view text, const Universe& universe) {
  Assignment out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(0, "expected name=0|1, got '" + std::string(item) + "'");
    const auto name = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    if (value != "0" && value != "1")
      throw ParseError(0, "value of '" + std::string(name) + "' must be 0 or 1");
    const VarId id = universe.at(name);
    if (out.contains(id)) throw ParseError(0, "variable '" + std::string(name) + "' assigned twice");
    out.set(id, value == "1");
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

// ----------------------------------------------------------------- Formula

struct Formula::Node {
  Kind kind;
  Var var;
  bool positive = true;
  std::vector<Formula> children;
};

Formula Formula::top() {
  static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, true, {}}));
  return t;
}

Formula Formula::bottom() {
  static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, true, {}}));
  return f;
}

Formula Formula::literal(Var var, bool positive) {
  return Formula(std::make_shared<const Node>(Node{Kind::Literal, std::move(var), positive, {}}));
}

Formula Formula::negation(Formula child) {
  if (child.is_literal()) return literal(child.var(), !child.positive());
  if (child.kind() == Kind::Not) return child.children()[0];
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, true, {std::move(child)}}));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) return top();
  if (children.size() == 1) return std::move(children.front());
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, true, std::move(children)}));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) return bottom();
  if (children.size() == 1) return std::move(children.front());
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, true, std::move(children)}));
}

Formula::Kind Formula::kind() const noexcept { return node_->kind; }

const Var& Formula::var() const {
  if (node_->kind != Kind::Literal) throw PreconditionError("var() on a non-literal formula");
  return node_->var;
}

bool Formula::positive() const {
  if (node_->kind != Kind::Literal) throw PreconditionError("positive() on a non-literal formula");
  return node_->positive;
}

std::span<const Formula> Formula::children() const noexcept { return node_->children; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Literal:
      return a.node_->var == b.node_->var && a.node_->positive == b.node_->positive;
    default:
      return std::equal(a.children().begin(), a.children().end(), b.children().begin(),
                        b.children().end());
  }
}

bool evaluate(const Formula& f, const Assignment& a) {
  // Names are only available on literals, so resolve misses here.
  switch (f.kind()) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Literal: {
      auto v = a.get(f.var().id);
      if (!v) throw UnassignedVariable(f.var().name);
      return *v == f.positive();
    }
    case Formula::Kind::Not:
      return !evaluate(f.children()[0], a);
    case Formula::Kind::And: {
      // Evaluate every child so that a missing variable is always reported.
      bool result = true;
      for (const auto& c : f.children()) result = evaluate(c, a) && result;
      return result;
    }
    case Formula::Kind::Or: {
      bool result = false;
      for (const auto& c : f.children()) result = evaluate(c, a) || result;
      return result;
    }
  }
  return false;
}

namespace {

void collect_vars(const Formula& f, std::map<VarId, Var>& out) {
  if (f.is_literal()) {
    out.emplace(f.var().id, f.var());
    return;
  }
  for (const auto& c : f.children()) collect_vars(c, out);
}

}  // namespace

std::vector<Var> variables(const Formula& f) {
  std::map<VarId, Var> seen;
  collect_vars(f, seen);
  std::vector<Var> out;
  out.reserve(seen.size());
  for (auto& [id, v] : seen) out.push_back(v);
  return out;
}

std::vector<Assignment> models(const Formula& f, std::span<const Var> universe) {
  if (universe.size() > kMaxEnumerationVars)
    throw BoundExceeded("model enumeration over " + std::to_string(universe.size()) +
                        " variables exceeds the bound of " + std::to_string(kMaxEnumerationVars));
  std::vector<Var> sorted(universe.begin(), universe.end());
  std::sort(sorted.begin(), sorted.end(), [](const Var& a, const Var& b) { return a.id < b.id; });
  for (const auto& v : variables(f)) {
    if (std::none_of(sorted.begin(), sorted.end(), [&](const Var& u) { return u.id == v.id; }))
      throw PreconditionError("formula mentions '" + v.name + "' outside the universe");
  }
  const auto table = kernels::truth_table(f, sorted, kernels::Execution::parallel);
  std::vector<Assignment> out;
  const std::size_t n = sorted.size();
  for (std::size_t world = 0; world < table.size(); ++world) {
    if (!table[world]) continue;
    Assignment a;
    for (std::size_t i = 0; i < n; ++i) a.set(sorted[i].id, (world >> (n - 1 - i)) & 1U);
    out.push_back(std::move(a));
  }
  return out;
}

Formula simplify(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Literal:
      return f;
    case Formula::Kind::Not: {
      auto c = simplify(f.children()[0]);
      if (c.kind() == Formula::Kind::True) return Formula::bottom();
      if (c.kind() == Formula::Kind::False) return Formula::top();
      if (c == f.children()[0]) return f;
      return Formula::negation(std::move(c));
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const bool is_and = f.kind() == Formula::Kind::And;
      const auto absorbing = is_and ? Formula::Kind::False : Formula::Kind::True;
      const auto neutral = is_and ? Formula::Kind::True : Formula::Kind::False;
      std::vector<Formula> kept;
      bool changed = false;
      for (const auto& child : f.children()) {
        auto c = simplify(child);
        if (c.kind() == absorbing) return is_and ? Formula::bottom() : Formula::top();
        if (c.kind() == neutral) {
          changed = true;
          continue;
        }
        if (!(c.identity() == child.identity())) changed = true;
        kept.push_back(std::move(c));
      }
      if (!changed) return f;
      return is_and ? Formula::conjunction(std::move(kept)) : Formula::disjunction(std::move(kept));
    }
  }
  return f;
}

namespace {

Formula substitute_rec(const Formula& f, const Assignment& partial) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return f;
    case Formula::Kind::Literal: {
      auto v = partial.get(f.var().id);
      if (!v) return f;
      return *v == f.positive() ? Formula::top() : Formula::bottom();
    }
    case Formula::Kind::Not:
      return Formula::negation(substitute_rec(f.children()[0], partial));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(substitute_rec(c, partial));
      return f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(cs))
                                            : Formula::disjunction(std::move(cs));
    }
  }
  return f;
}

Formula nnf_rec(const Formula& f, bool negate) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return negate ? Formula::bottom() : f;
    case Formula::Kind::False:
      return negate ? Formula::top() : f;
    case Formula::Kind::Literal:
      return negate ? Formula::literal(f.var(), !f.positive()) : f;
    case Formula::Kind::Not:
      return nnf_rec(f.children()[0], !negate);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(nnf_rec(c, negate));
      const bool make_and = (f.kind() == Formula::Kind::And) != negate;
      return make_and ? Formula::conjunction(std::move(cs)) : Formula::disjunction(std::move(cs));
    }
  }
  return f;
}

}  // namespace

Formula substitute(const Formula& f, const Assignment& partial) {
  if (partial.empty()) return simplify(f);
  return simplify(substitute_rec(f, partial));
}

Formula to_nnf(const Formula& f) { return nnf_rec(f, false); }

Formula binarize(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Literal:
      return f;
    case Formula::Kind::Not:
      return Formula::negation(binarize(f.children()[0]));
    case Formula::Kind::And: {
      auto acc = binarize(f.children()[0]);
      for (std::size_t i = 1; i < f.children().size(); ++i)
        acc = Formula::conjunction({std::move(acc), binarize(f.children()[i])});
      return acc;
    }
    case Formula::Kind::Or: {
      std::vector<Formula> flat;
      for (const auto& c : f.children()) {
        auto b = binarize(c);
        if (b.kind() == Formula::Kind::Or) {
          for (const auto& g : b.children()) flat.push_back(g);
        } else {
          flat.push_back(std::move(b));
        }
      }
      return Formula::disjunction(std::move(flat));
    }
  }
  return f;
}

std::size_t binary_connective_count(const Formula& f) {
  std::size_t n = f.is_connective() ? f.children().size() - 1 : 0;
  for (const auto& c : f.children()) n += binary_connective_count(c);
  return n;
}

namespace {

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::True:
      out += "true";
      return;
    case Formula::Kind::False:
      out += "false";
      return;
    case Formula::Kind::Literal:
      if (!f.positive()) out += '!';
      out += f.var().name;
      return;
    case Formula::Kind::Not: {
      const auto& c = f.children()[0];
      out += '!';
      if (c.is_constant()) {
        print(c, out);
      } else {
        out += '(';
        print(c, out);
        out += ')';
      }
      return;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const bool is_and = f.kind() == Formula::Kind::And;
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += is_and ? " & " : " | ";
        first = false;
        const bool wrap = c.kind() == Formula::Kind::Or || (is_and && c.kind() == Formula::Kind::And);
        if (wrap) out += '(';
        print(c, out);
        if (wrap) out += ')';
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

}  // namespace tpc
