#include <doctest.h>

#include <set>
#include <string>

#include "models.hpp"
#include "tpc/fixtures.hpp"
#include "tpc/formula.hpp"
#include "tpc/kernels.hpp"

using namespace tpc;

namespace {

// Models rendered as bit strings in the order of `order`.
std::set<std::string> model_strings(const Formula& f, const Universe& u, const std::vector<std::string>& order) {
  std::set<std::string> out;
  for (const auto& m : models(f, u.vars())) {
    std::string s;
    for (const auto& name : order) s += *m.get(u.at(name)) ? '1' : '0';
    out.insert(s);
  }
  return out;
}

bool same_truth_table(const Formula& a, const Formula& b, const Universe& u) {
  return kernels::truth_table(a, u.vars(), kernels::Execution::serial) ==
         kernels::truth_table(b, u.vars(), kernels::Execution::serial);
}

bool no_inner_negation(const Formula& f) {
  if (f.kind() == Formula::Kind::Not) return false;
  for (const auto& c : f.children())
    if (!no_inner_negation(c)) return false;
  return true;
}

bool binary_conjunctions(const Formula& f) {
  if (f.kind() == Formula::Kind::And && f.children().size() != 2) return false;
  if (f.kind() == Formula::Kind::Or)
    for (const auto& c : f.children())
      if (c.kind() == Formula::Kind::Or) return false;
  for (const auto& c : f.children())
    if (!binary_conjunctions(c)) return false;
  return true;
}

bool no_constants_below(const Formula& f) {
  for (const auto& c : f.children())
    if (c.is_constant() || !no_constants_below(c)) return false;
  return true;
}

}  // namespace

TEST_CASE("universe rejects duplicates and unknown names") {
  Universe u;
  CHECK(u.add("A") == 0);
  CHECK(u.intern("B") == 1);
  CHECK(u.intern("A") == 0);
  CHECK_THROWS_AS(u.add("A"), PreconditionError);
  CHECK_THROWS_AS(u.add(""), PreconditionError);
  CHECK_THROWS_AS(u.at("Z"), PreconditionError);
}

TEST_CASE("assignments") {
  Universe u;
  u.add("A");
  u.add("B");
  u.add("C");
  const auto a = parse_assignment("C=1, A=0", u);
  CHECK(a.size() == 2);
  CHECK(a.get(0) == false);
  CHECK(a.get(2) == true);
  CHECK_FALSE(a.contains(1));
  CHECK(to_string(a, u) == "A=0,C=1");
  CHECK(parse_assignment("  ", u).empty());
  CHECK_THROWS_AS(parse_assignment("A=2", u), ParseError);
  CHECK_THROWS_AS(parse_assignment("A=1,A=0", u), ParseError);
  CHECK_THROWS_AS(parse_assignment("D=1", u), PreconditionError);

  const Assignment b{{1, true}};
  CHECK(a.disjoint(b));
  CHECK(a.merged(b).size() == 3);
  CHECK(a.merged(b).covers(u.vars()));
  CHECK_FALSE(a.consistent(Assignment{{0, true}}));
  Assignment c;
  c.set(0, true);
  CHECK_THROWS_AS(c.set(0, false), PreconditionError);
}

TEST_CASE("evaluation needs every variable") {
  Universe u;
  const auto f = parse_formula_interning("A & !B | C", u);
  CHECK(evaluate(f, {{0, true}, {1, false}, {2, false}}));
  CHECK_FALSE(evaluate(f, {{0, false}, {1, false}, {2, false}}));
  CHECK_THROWS_AS(evaluate(f, {{0, true}}), UnassignedVariable);
}

TEST_CASE("parser precedence and errors") {
  Universe u;
  const auto f = parse_formula_interning("A | B & !C", u);
  REQUIRE(f.kind() == Formula::Kind::Or);
  CHECK(f.children()[1].kind() == Formula::Kind::And);
  CHECK(parse_formula("!!A", u) == Formula::literal(u[0]));
  CHECK(parse_formula("true", u).kind() == Formula::Kind::True);
  CHECK_THROWS_AS(parse_formula("A & (B", u), ParseError);
  CHECK_THROWS_AS(parse_formula("A &", u), ParseError);
  CHECK_THROWS_AS(parse_formula("Q", u), Error);
}

TEST_CASE("course formula has the four expected models") {
  const auto u = fixtures::courses_universe();
  const auto m = model_strings(fixtures::courses_formula(), u, {"L", "K", "P", "A"});
  CHECK(m == std::set<std::string>{"0011", "0111", "1100", "1111"});
  CHECK(binary_connective_count(prepare_for_compilation(fixtures::courses_formula())) == 13);
}

TEST_CASE("raw course formula keeps its extra models through simplification") {
  const auto u = fixtures::courses_universe();
  const auto raw = fixtures::courses_raw_formula();
  const auto order = std::vector<std::string>{"L", "K", "P", "A"};
  const auto raw_models = model_strings(raw, u, order);
  CHECK(raw_models == std::set<std::string>{"0000", "0011", "0100", "0111", "1100", "1111"});
  CHECK(model_strings(simplify(raw), u, order) == raw_models);
  const auto star = model_strings(fixtures::courses_formula(), u, order);
  for (const auto& s : star) CHECK(raw_models.contains(s));
  CHECK(star.size() < raw_models.size());
}

TEST_CASE("printing round-trips through the parser") {
  testing::Rng rng(7);
  const auto u = testing::numbered_universe(5);
  for (int i = 0; i < 200; ++i) {
    const auto f = testing::random_formula(rng, u, 4);
    const auto text = to_string(f);
    CAPTURE(text);
    CHECK(parse_formula(text, u) == f);
  }
}

TEST_CASE("normal forms preserve the truth table") {
  testing::Rng rng(11);
  const auto u = testing::numbered_universe(6);
  for (int i = 0; i < 300; ++i) {
    const auto f = testing::random_formula(rng, u, 4);
    CAPTURE(to_string(f));
    const auto s = simplify(f);
    const auto n = to_nnf(s);
    const auto b = binarize(n);
    CHECK(same_truth_table(f, s, u));
    CHECK(same_truth_table(f, n, u));
    CHECK(same_truth_table(f, b, u));
    CHECK(no_inner_negation(n));
    CHECK(binary_conjunctions(b));
    CHECK(simplify(s) == s);
    if (!s.is_constant()) CHECK(no_constants_below(s));
  }
}

TEST_CASE("substitute fixes variables") {
  Universe u;
  const auto f = parse_formula_interning("A & B | !A & C", u);
  CHECK(to_string(substitute(f, {{0, true}})) == "B");
  CHECK(to_string(substitute(f, {{0, false}})) == "C");
  CHECK(substitute(f, {{0, true}, {1, true}}).kind() == Formula::Kind::True);
}

TEST_CASE("model enumeration bounds") {
  const auto u = testing::numbered_universe(21);
  CHECK_THROWS_AS(models(Formula::top(), u.vars()), BoundExceeded);
  Universe small;
  small.add("A");
  Universe other;
  other.add("A");
  other.add("B");
  CHECK_THROWS_AS(models(Formula::literal(other[1]), small.vars()), PreconditionError);
  CHECK(models(Formula::bottom(), small.vars()).empty());
  CHECK(models(Formula::top(), small.vars()).size() == 2);
}
