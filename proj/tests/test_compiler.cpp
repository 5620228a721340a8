#include <doctest.h>

#include <cmath>
#include <string>

#include "models.hpp"
#include "tpc/fixtures.hpp"
#include "tpc/sem_compiler.hpp"

using namespace tpc;

namespace {

constexpr const char* kCourseNaming =
    "X_1 = P & A\n"
    "X_2 = !P & !A\n"
    "X_3 = !L & K\n"
    "X_4 = L & K\n"
    "X_5 = !L & !K\n"
    "X_6 = X_1 | X_2\n"
    "X_7 = X_1 & X_3\n"
    "X_8 = X_4 & X_6\n"
    "X_9 = X_1 & X_5\n"
    "X_10 = X_7 | X_8 | X_9\n";

// The root node equals `f` for every value of the hidden variables. `u` is
// the universe `f` was built over; its order matches the originals.
void check_root_matches(const CompilationResult& c, const Formula& f, const Universe& u) {
  const auto root = c.sem.universe().at(c.root_name);
  const std::size_t n = c.originals.size();
  for (std::size_t w = 0; w < (std::size_t{1} << n); ++w) {
    Assignment hidden;
    Assignment original;
    for (std::size_t i = 0; i < n; ++i) {
      const bool bit = ((w >> (n - 1 - i)) & 1U) != 0;
      hidden.set(c.hidden[i].id, bit);
      original.set(u.at(c.originals[i].name), bit);
    }
    const auto solved = solve(c.sem, hidden);
    CHECK(*solved.get(root) == evaluate(f, original));
    // Each augmented node equals the sub-formula it is named after.
    for (const auto& [name, denoted] : c.naming)
      CHECK(*solved.get(c.sem.universe().at(name)) == evaluate(denoted, original));
  }
}

TabularDistribution dist_over(const Universe& u, const TabularDistribution& d) {
  const auto p = d.probabilities();
  return TabularDistribution(std::vector<Var>(u.vars().begin(), u.vars().end()), std::vector<double>(p.begin(), p.end()));
}

}  // namespace

TEST_CASE("course formula compiles to the expected ten equations") {
  const auto c = fixtures::courses_compilation();
  CHECK(naming_sidecar(c) == kCourseNaming);
  CHECK(c.root_name == "X_10");
  const auto& u = c.sem.universe();
  REQUIRE(u.size() == 18);
  const char* names[] = {"H_1", "H_2", "H_3", "H_4", "A",   "L",   "K",   "P",   "X_1",
                         "X_2", "X_3", "X_4", "X_5", "X_6", "X_7", "X_8", "X_9", "X_10"};
  for (VarId v = 0; v < 18; ++v) CHECK(u[v].name == names[v]);
  for (VarId v = 0; v < 4; ++v) CHECK(c.sem.is_exogenous(v));
  CHECK(to_string(c.sem.equation(u.at("A"))) == "H_1");
  CHECK(to_string(c.sem.equation(u.at("P"))) == "H_4");
  check_root_matches(c, fixtures::courses_formula(), fixtures::courses_universe());
}

TEST_CASE("compiled PSDD is consistent with the PSDD") {
  const auto m = fixtures::courses_psdd();
  const auto c = compile_psdd(m);
  CHECK(check_consistency(m, c) < 1e-12);
  CHECK(c.sem.exogenous().size() == 4);
  // The raw base formula has nine models, all of positive probability.
  const auto j = joint(c.sem);
  CHECK(j.probability({{c.sem.universe().at(c.root_name), true}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compiler preconditions") {
  const auto u = fixtures::courses_universe();
  const auto dist = fixtures::courses_distribution();
  CHECK_THROWS_AS(compile_formula(parse_formula("!(A & L)", u), u.vars(), dist), PreconditionError);
  CHECK_THROWS_AS(compile_formula(parse_formula("A & L & K", u), u.vars(), dist), PreconditionError);
  CHECK_THROWS_AS(compile_formula(parse_formula("A & true", u), u.vars(), dist), PreconditionError);
  CHECK_THROWS_AS(compile_formula(parse_formula("A & L", u), u.vars().subspan(0, 3), dist), PreconditionError);

  Universe reserved;
  reserved.add("X_1");
  reserved.add("B");
  testing::Rng rng(1);
  const auto rdist = testing::random_distribution(rng, reserved.vars());
  CHECK_THROWS_AS(compile_formula(parse_formula("X_1 & B", reserved), reserved.vars(), rdist), PreconditionError);

  Universe other;
  other.add("Q");
  CHECK_THROWS_AS(compile_formula(Formula::literal(other[0]), u.vars(), dist), PreconditionError);
}

TEST_CASE("literal and constant formulas give a single node") {
  const auto u = fixtures::courses_universe();
  const auto dist = fixtures::courses_distribution();
  const auto lit = compile_formula(parse_formula("!K", u), u.vars(), dist);
  CHECK(lit.naming.size() == 1);
  CHECK(naming_sidecar(lit) == "X_1 = !K\n");
  const auto top = compile_formula(Formula::top(), u.vars(), dist);
  CHECK(naming_sidecar(top) == "X_1 = true\n");
}

TEST_CASE("shared sub-formulas get one node") {
  Universe u;
  const auto f = prepare_for_compilation(parse_formula_interning("(A & B) & C | (A & B) & !C", u));
  testing::Rng rng(2);
  const auto c = compile_formula(f, u.vars(), testing::random_distribution(rng, u.vars()));
  CHECK(naming_sidecar(c) == "X_1 = A & B\nX_2 = C & X_1\nX_3 = !C & X_1\nX_4 = X_2 | X_3\n");
  check_root_matches(c, f, u);
}

TEST_CASE("random formulas compile to equivalent SEMs") {
  testing::Rng rng(43);
  for (int i = 0; i < 60; ++i) {
    const auto u = testing::numbered_universe(2 + i % 5);
    const auto f = prepare_for_compilation(testing::random_formula(rng, u, 4));
    const auto c = compile_formula(f, u.vars(), testing::random_distribution(rng, u.vars(), 0.3));
    CAPTURE(to_string(f));
    check_root_matches(c, f, u);
    // Originals keep the hidden table as their joint.
    const auto marg = joint(c.sem).marginal(c.originals);
    const auto dist = c.sem.exogenous_distribution();
    for (std::size_t w = 0; w < marg.size(); ++w) CHECK(std::abs(marg[w] - dist[w]) < 1e-12);
    // Deterministic naming.
    CHECK(naming_sidecar(compile_formula(f, u.vars(), dist_over(u, dist))) == naming_sidecar(c));
  }
}

TEST_CASE("random PSDDs compile consistently") {
  testing::Rng rng(47);
  for (int i = 0; i < 25; ++i) {
    const auto m = testing::random_psdd(rng, 1 + i % 5);
    const auto c = compile_psdd(m);
    CHECK(check_consistency(m, c) < 1e-12);
  }
}
