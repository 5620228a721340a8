#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "models.hpp"
#include "oracles.hpp"
#include "tpc/fixtures.hpp"
#include "tpc/psdd.hpp"

using namespace tpc;

namespace {

Assignment lkpa(const Psdd& m, const char* bits) {
  Assignment a;
  const char* names[] = {"L", "K", "P", "A"};
  for (int i = 0; i < 4; ++i) a.set(m.universe().at(names[i]), bits[i] == '1');
  return a;
}

// Vtree (A,B) with literal terminals for both variables.
struct Small {
  Vtree vt;
  Small() {
    Vtree::Builder b;
    const auto a = b.leaf("A");
    const auto c = b.leaf("B");
    b.internal(a, c);
    vt = std::move(b).build();
  }
};

bool has_violation(const ValidationReport& r, std::string_view needle) {
  for (const auto& v : r.violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("course PSDD reproduces its table") {
  const auto m = fixtures::courses_psdd();
  REQUIRE(validate(m).ok());
  const std::pair<const char*, double> rows[] = {{"0010", 0.06},  {"0011", 0.54},  {"0111", 0.10},
                                                 {"1000", 0.036}, {"1010", 0.018}, {"1011", 0.006},
                                                 {"1100", 0.144}, {"1110", 0.072}, {"1111", 0.024}};
  double total = 0.0;
  for (auto [bits, p] : rows) {
    CAPTURE(bits);
    CHECK(probability(m, lkpa(m, bits)) == doctest::Approx(p).epsilon(1e-12));
    total += probability(m, lkpa(m, bits));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probability(m, lkpa(m, "0000")) == 0.0);

  const auto& u = m.universe();
  CHECK(marginal(m, {{u.at("P"), true}, {u.at("A"), true}}) == doctest::Approx(0.67).epsilon(1e-12));
  CHECK(marginal(m, {{u.at("L"), false}, {u.at("K"), false}, {u.at("P"), true}}) ==
        doctest::Approx(0.60).epsilon(1e-12));
  CHECK(marginal(m, {}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(conditional(m, {{u.at("L"), false}, {u.at("K"), false}}, {{u.at("P"), true}, {u.at("A"), true}}) ==
        doctest::Approx(0.54 / 0.67).epsilon(1e-12));
}

TEST_CASE("query preconditions") {
  const auto m = fixtures::courses_psdd();
  const auto& u = m.universe();
  CHECK_THROWS_AS(probability(m, {{u.at("L"), true}}), Error);
  CHECK_THROWS_AS(conditional(m, {{u.at("L"), true}}, {{u.at("L"), true}}), PreconditionError);
  // P=0, A=1 never happens.
  CHECK_THROWS_AS(conditional(m, {{u.at("L"), true}}, {{u.at("P"), false}, {u.at("A"), true}}),
                  ZeroProbabilityEvidence);
}

TEST_CASE("base formula of the course PSDD is its support") {
  const auto m = fixtures::courses_psdd();
  const auto f = base(m);
  std::set<std::string> got;
  for (const auto& a : models(f, m.universe().vars())) {
    std::string s;
    for (const char* n : {"L", "K", "P", "A"}) s += *a.get(m.universe().at(n)) ? '1' : '0';
    got.insert(s);
  }
  CHECK(got == std::set<std::string>{"0010", "0011", "0111", "1000", "1010", "1011", "1100", "1110", "1111"});
}

TEST_CASE("text format round-trips") {
  const auto m = fixtures::courses_psdd();
  const auto vt = parse_vtree(serialize(m.vtree()));
  CHECK(vt == m.vtree());
  CHECK(parse_psdd(serialize(m), vt) == m);

  testing::Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const auto r = testing::random_psdd(rng, 1 + i % 6);
    const auto rvt = parse_vtree(serialize(r.vtree()));
    CHECK(parse_psdd(serialize(r), rvt) == r);
  }
}

TEST_CASE("parse errors carry line numbers") {
  const auto vt = fixtures::courses_vtree();
  try {
    parse_psdd("psdd 2\nL 0 1 -L\nD 1 2 1 0 99 1\n", vt);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("unknown node 99") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_psdd("psdd 1\nL 0 1 +K\n", vt), ParseError);
  CHECK_THROWS_AS(parse_psdd("psdd 1\nX 0 1\n", vt), ParseError);
  CHECK_THROWS_AS(parse_psdd("psdd 1\nT 0 1 abc\n", vt), ParseError);
  CHECK_THROWS_AS(parse_vtree("vtree 2\nL 1 A\n"), ParseError);
  CHECK_THROWS_AS(parse_vtree("vtree 3\nL 1 A\nL 2 B\nI 3 1 9\n"), ParseError);
  CHECK_THROWS_AS(parse_vtree("vtree 2\nL 1 A\nL 2 B\n"), ParseError);
}

TEST_CASE("validation catches broken parameters and partitions") {
  Small s;
  const NodeIndex a = 0, b = 1, root = 2;

  SUBCASE("parameters must sum to 1") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 0.5);
    p.decision(root, {{pa, tb, 0.5}, {na, tb, 0.6}});
    CHECK(has_violation(validate(std::move(p).build()), "do not sum to 1"));
  }
  SUBCASE("theta 0 needs a false sub") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 0.5);
    p.decision(root, {{pa, tb, 1.0}, {na, tb, 0.0}});
    CHECK(has_violation(validate(std::move(p).build()), "theta_i = 0 iff s_i = false"));
  }
  SUBCASE("false sub needs theta 0") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 0.5);
    const auto fb = p.bottom(b);
    p.decision(root, {{pa, tb, 0.5}, {na, fb, 0.5}});
    CHECK(has_violation(validate(std::move(p).build()), "theta_i = 0 iff s_i = false"));
  }
  SUBCASE("top theta strictly inside (0,1)") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 1.0);
    p.decision(root, {{pa, tb, 0.5}, {na, tb, 0.5}});
    CHECK_FALSE(validate(std::move(p).build()).ok());
  }
  SUBCASE("overlapping primes") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto ta = p.top(a, 0.5);
    const auto tb = p.top(b, 0.5);
    p.decision(root, {{pa, tb, 0.5}, {ta, tb, 0.5}});
    CHECK_FALSE(validate(std::move(p).build()).ok());
  }
  SUBCASE("primes that miss a world") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto tb = p.top(b, 0.5);
    p.decision(root, {{pa, tb, 1.0}});
    CHECK_FALSE(validate(std::move(p).build()).ok());
  }
  SUBCASE("element normalized for the wrong vtree node") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 0.5);
    p.decision(root, {{tb, pa, 0.5}, {tb, na, 0.5}});
    CHECK_FALSE(validate(std::move(p).build()).ok());
  }
  SUBCASE("a well formed two-variable PSDD") {
    Psdd::Builder p(s.vt);
    const auto pa = p.literal(a, true);
    const auto na = p.literal(a, false);
    const auto tb = p.top(b, 0.3);
    const auto nb = p.literal(b, false);
    p.decision(root, {{pa, tb, 0.4}, {na, nb, 0.6}});
    const auto m = std::move(p).build();
    CHECK(validate(m).ok());
    CHECK(probability(m, {{0, true}, {1, true}}) == doctest::Approx(0.12));
    CHECK(probability(m, {{0, false}, {1, false}}) == doctest::Approx(0.6));
    CHECK(probability(m, {{0, false}, {1, true}}) == 0.0);
  }
}

TEST_CASE("random PSDDs agree with the prime-walking oracle") {
  testing::Rng rng(101);
  for (int i = 0; i < 40; ++i) {
    const auto m = testing::random_psdd(rng, 1 + i % 7);
    REQUIRE(validate(m).ok());
    const testing::PsddOracle oracle(m);
    for (const auto& w : testing::all_worlds(m.universe().vars()))
      CHECK(std::abs(probability(m, w) - oracle.probability(w)) < 1e-12);
    // One random partial assignment per model.
    Assignment partial;
    for (const auto& v : m.universe().vars())
      if (rng() % 2) partial.set(v.id, rng() % 2 == 1);
    CHECK(std::abs(marginal(m, partial) - oracle.marginal(partial)) < 1e-12);
  }
}
