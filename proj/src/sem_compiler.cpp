#include "tpc/sem_compiler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "tpc/kernels.hpp"
#include "tpc/psdd.hpp"

namespace tpc {

namespace {

bool reserved_name(std::string_view name) {
  if (name.size() < 3 || (name[0] != 'X' && name[0] != 'H') || name[1] != '_') return false;
  return std::all_of(name.begin() + 2, name.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

void check_shape(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Not:
      throw PreconditionError("formula must be in negation normal form");
    case Formula::Kind::And:
      if (f.children().size() != 2) throw PreconditionError("conjunctions must have exactly two operands");
      break;
    case Formula::Kind::Or:
      if (f.children().size() < 2) throw PreconditionError("disjunction with fewer than two operands");
      break;
    default:
      break;
  }
  for (const auto& c : f.children()) {
    if (c.is_constant()) throw PreconditionError("constants below the root; simplify first");
    check_shape(c);
  }
}

// One distinct compound sub-formula.
struct Compound {
  Formula f;
  std::size_t stratum = 0;
  std::size_t earliest = 0;  // lowest original position in scope
  std::size_t visit = 0;     // first post-order visit
  std::vector<std::size_t> operands;  // indices of compound operands
};

class Collector {
 public:
  explicit Collector(const std::map<std::string, std::size_t>& position) : position_(position) {}

  // Returns (stratum, earliest) of `f`; compounds are registered on first sight.
  std::pair<std::size_t, std::size_t> visit(const Formula& f) {
    if (f.is_literal()) return {0, position_.at(f.var().name)};
    if (f.is_constant()) return {0, std::numeric_limits<std::size_t>::max()};
    const auto key = to_string(f);
    if (auto it = index_.find(key); it != index_.end()) {
      const auto& c = compounds_[it->second];
      return {c.stratum, c.earliest};
    }
    std::size_t top = 0;
    std::size_t earliest = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> operands;
    for (const auto& child : f.children()) {
      auto [s, e] = visit(child);
      top = std::max(top, s);
      earliest = std::min(earliest, e);
      if (child.is_connective()) operands.push_back(index_.at(to_string(child)));
    }
    Compound c{f, f.kind() == Formula::Kind::And ? top + 1 : top, earliest, counter_++, std::move(operands)};
    index_.emplace(key, compounds_.size());
    compounds_.push_back(std::move(c));
    return {compounds_.back().stratum, earliest};
  }

  std::vector<Compound>& compounds() { return compounds_; }
  std::size_t index_of(const Formula& f) const { return index_.at(to_string(f)); }

 private:
  const std::map<std::string, std::size_t>& position_;
  std::map<std::string, std::size_t> index_;
  std::vector<Compound> compounds_;
  std::size_t counter_ = 0;
};

}  // namespace

Formula prepare_for_compilation(const Formula& f) { return binarize(to_nnf(simplify(f))); }

CompilationResult compile_formula(const Formula& f, std::span<const Var> originals, const TabularDistribution& h_dist) {
  if (h_dist.vars().size() != originals.size())
    throw PreconditionError(fmt::format("hidden table covers {} variables, expected {}", h_dist.vars().size(),
                                        originals.size()));
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const auto& name = originals[i].name;
    if (reserved_name(name)) throw PreconditionError("original variable '" + name + "' collides with a generated name");
    if (h_dist.vars()[i].name != name)
      throw PreconditionError("hidden table variable '" + h_dist.vars()[i].name + "' does not match '" + name + "'");
    if (!position.emplace(name, i).second) throw PreconditionError("duplicate original variable '" + name + "'");
  }
  for (const auto& v : variables(f))
    if (!position.contains(v.name)) throw PreconditionError("formula mentions '" + v.name + "', which is not an original");
  check_shape(f);

  Collector collector(position);
  collector.visit(f);
  auto& compounds = collector.compounds();

  // Order: stratum, conjunctions before disjunctions, earliest original, first visit.
  std::vector<std::size_t> order(compounds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = compounds[a];
    const auto& y = compounds[b];
    const bool x_or = x.f.kind() == Formula::Kind::Or;
    const bool y_or = y.f.kind() == Formula::Kind::Or;
    return std::tie(x.stratum, x_or, x.earliest, x.visit) < std::tie(y.stratum, y_or, y.earliest, y.visit);
  });

  Sem::Builder b;
  std::vector<Var> hidden;
  std::vector<Var> orig;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const auto id = b.add_exogenous(fmt::format("H_{}", i + 1));
    hidden.push_back(b.universe()[id]);
  }
  for (const auto& v : originals) orig.push_back(b.universe()[b.add_endogenous(v.name)]);

  const bool trivial = !f.is_connective();
  const std::size_t m = trivial ? 1 : compounds.size();
  std::vector<Var> augmented;
  for (std::size_t k = 0; k < m; ++k) augmented.push_back(b.universe()[b.add_endogenous(fmt::format("X_{}", k + 1))]);
  std::vector<std::size_t> name_of(compounds.size());
  for (std::size_t k = 0; k < order.size(); ++k) name_of[order[k]] = k;

  for (std::size_t i = 0; i < originals.size(); ++i) b.set_equation(orig[i].id, Formula::literal(hidden[i]));

  auto remap = [&](const Formula& lit) -> Formula {
    if (lit.is_constant()) return lit;
    return Formula::literal(orig[position.at(lit.var().name)], lit.positive());
  };

  std::vector<std::pair<std::string, Formula>> naming;
  std::string root_name;
  if (trivial) {
    b.set_equation(augmented[0].id, remap(f));
    naming.emplace_back(augmented[0].name, f);
    root_name = augmented[0].name;
  } else {
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& c = compounds[order[k]];
      // Literal operands keep formula order and come first; node operands ascend.
      std::vector<Formula> ops;
      for (const auto& child : c.f.children())
        if (!child.is_connective()) ops.push_back(remap(child));
      std::vector<std::size_t> nodes;
      for (std::size_t op : c.operands) nodes.push_back(name_of[op]);
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      for (std::size_t n : nodes) ops.push_back(Formula::literal(augmented[n]));
      auto eq = c.f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(ops))
                                                 : Formula::disjunction(std::move(ops));
      b.set_equation(augmented[k].id, std::move(eq));
      naming.emplace_back(augmented[k].name, c.f);
    }
    root_name = augmented[name_of[collector.index_of(f)]].name;
  }
  b.set_exogenous_distribution(std::vector<double>(h_dist.probabilities().begin(), h_dist.probabilities().end()));
  return CompilationResult{std::move(b).build(), std::move(naming), std::move(orig), std::move(hidden),
                           std::move(root_name)};
}

CompilationResult compile_psdd(const Psdd& m) {
  const auto vars = m.universe().vars();
  TabularDistribution dist(std::vector<Var>(vars.begin(), vars.end()),
                           kernels::psdd_joint_table(m, kernels::Execution::parallel));
  return compile_formula(prepare_for_compilation(base(m)), vars, dist);
}

double check_consistency(const Psdd& m, const CompilationResult& c) {
  const auto table = kernels::psdd_joint_table(m, kernels::Execution::parallel);
  const auto sem_table = joint(c.sem).marginal(c.originals);
  if (sem_table.size() != table.size()) throw PreconditionError("PSDD and SEM have different original variables");
  double worst = 0.0;
  for (std::size_t w = 0; w < table.size(); ++w) worst = std::max(worst, std::abs(table[w] - sem_table[w]));
  return worst;
}

std::string naming_sidecar(const CompilationResult& c) {
  std::string out;
  for (const auto& [name, denoted] : c.naming) {
    const auto id = c.sem.universe().at(name);
    out += fmt::format("{} = {}\n", name, to_string(c.sem.equation(id)));
  }
  return out;
}

}  // namespace tpc
