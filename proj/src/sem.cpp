#include "tpc/sem.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "tpc/kernels.hpp"

namespace tpc {

// ----------------------------------------------------------------- Builder

VarId Sem::Builder::add_exogenous(std::string name) {
  const VarId id = universe_.add(std::move(name));
  kinds_.push_back(NodeKind::Exogenous);
  equations_.emplace_back();
  return id;
}

VarId Sem::Builder::add_endogenous(std::string name) {
  const VarId id = universe_.add(std::move(name));
  kinds_.push_back(NodeKind::Endogenous);
  equations_.emplace_back();
  return id;
}

void Sem::Builder::set_equation(VarId var, Formula f) {
  if (var >= kinds_.size()) throw PreconditionError(fmt::format("variable id {} does not exist", var));
  if (kinds_[var] == NodeKind::Exogenous)
    throw PreconditionError("exogenous variable '" + universe_[var].name + "' cannot have an equation");
  if (equations_[var]) throw PreconditionError("variable '" + universe_[var].name + "' already has an equation");
  equations_[var] = std::move(f);
}

void Sem::Builder::set_equation(std::string_view var, std::string_view formula) {
  set_equation(universe_.at(var), parse_formula(formula, universe_));
}

void Sem::Builder::set_exogenous_distribution(std::vector<double> probabilities) {
  std::vector<Var> exo;
  for (VarId v = 0; v < kinds_.size(); ++v)
    if (kinds_[v] == NodeKind::Exogenous) exo.push_back(universe_[v]);
  dist_ = TabularDistribution(std::move(exo), std::move(probabilities));
}

void Sem::Builder::set_exogenous_distribution(TabularDistribution dist) { dist_ = std::move(dist); }

Sem Sem::Builder::build() && {
  if (!dist_) throw PreconditionError("SEM has no exogenous distribution");
  return Sem(std::move(universe_), std::move(kinds_), std::move(equations_), std::move(*dist_));
}

// --------------------------------------------------------------------- Sem

Sem::Sem(Universe universe, std::vector<NodeKind> kinds, std::vector<std::optional<Formula>> equations,
         TabularDistribution dist)
    : universe_(std::move(universe)),
      kinds_(std::move(kinds)),
      equations_(std::move(equations)),
      dist_(std::move(dist)) {
  if (universe_.size() > kMaxSemVars)
    throw BoundExceeded(fmt::format("SEM with {} variables exceeds the limit of {}", universe_.size(), kMaxSemVars));
  for (VarId v = 0; v < universe_.size(); ++v) {
    graph_.add_node(universe_[v].name, kinds_[v]);
    (kinds_[v] == NodeKind::Exogenous ? exogenous_ : endogenous_).push_back(v);
  }
  for (VarId v : endogenous_) {
    if (!equations_[v]) throw PreconditionError("endogenous variable '" + universe_[v].name + "' has no equation");
    for (const auto& p : variables(*equations_[v])) {
      if (p.id >= universe_.size() || universe_[p.id].name != p.name)
        throw PreconditionError("equation of '" + universe_[v].name + "' mentions unknown variable '" + p.name + "'");
      if (p.id == v) throw PreconditionError("equation of '" + universe_[v].name + "' mentions itself");
      try {
        graph_.add_edge(p.id, v);
      } catch (const PreconditionError&) {
        throw PreconditionError("equations of the SEM are cyclic at '" + universe_[v].name + "'");
      }
    }
  }
  const auto dvars = dist_.vars();
  if (dvars.size() != exogenous_.size())
    throw PreconditionError(fmt::format("exogenous table covers {} variables, the SEM has {}", dvars.size(),
                                        exogenous_.size()));
  for (std::size_t i = 0; i < dvars.size(); ++i) {
    if (dvars[i].id != exogenous_[i] || dvars[i].name != universe_[exogenous_[i]].name)
      throw PreconditionError("exogenous table variables do not match the SEM's exogenous variables");
  }
  for (NodeId v : graph_.topological_order())
    if (kinds_[v] == NodeKind::Endogenous) order_.push_back(static_cast<VarId>(v));
}

const Formula& Sem::equation(VarId v) const {
  if (v >= equations_.size() || !equations_[v])
    throw PreconditionError(fmt::format("variable id {} has no structural equation", v));
  return *equations_[v];
}

Sem Sem::with_exogenous_distribution(TabularDistribution dist) const {
  return Sem(universe_, kinds_, equations_, std::move(dist));
}

// ------------------------------------------------------------------ solving

World solve(const Sem& m, std::size_t u_index) {
  World w;
  const auto exo = m.exogenous();
  const std::size_t n = exo.size();
  for (std::size_t i = 0; i < n; ++i)
    if ((u_index >> (n - 1 - i)) & 1U) w.set(exo[i]);
  for (VarId v : m.evaluation_order())
    w.set(v, evaluate_with(m.equation(v), [&](VarId p) { return w.test(p); }));
  return w;
}

Assignment solve(const Sem& m, const Assignment& u) {
  for (VarId v : m.exogenous())
    if (!u.contains(v)) throw UnassignedVariable(m.universe()[v].name);
  for (auto [v, b] : u)
    if (v >= m.universe().size() || !m.is_exogenous(v))
      throw PreconditionError("solve expects an assignment to exogenous variables only");
  const auto w = solve(m, m.exogenous_distribution().index_of(u));
  Assignment out;
  for (VarId v = 0; v < m.universe().size(); ++v) out.set(v, w.test(v));
  return out;
}

JointDistribution joint(const Sem& m) {
  return JointDistribution(m.universe(), kernels::push_forward(m, kernels::Execution::parallel));
}

Sem intervene_surgery(const Sem& m, const Assignment& interventions) {
  auto equations = m.equations_;
  for (auto [v, b] : interventions) {
    if (v >= m.universe().size()) throw PreconditionError(fmt::format("variable id {} does not exist", v));
    if (m.is_exogenous(v))
      throw PreconditionError("cannot intervene on exogenous variable '" + m.universe()[v].name + "'");
    equations[v] = b ? Formula::top() : Formula::bottom();
  }
  return Sem(m.universe_, m.kinds_, std::move(equations), m.dist_);
}

double interventional_surgery_prob(const Sem& m, const Assignment& query, const Assignment& interventions) {
  if (interventions.empty()) return joint(m).probability(query);
  return joint(intervene_surgery(m, interventions)).probability(query);
}

double interventional_adjustment_prob(const Sem& m, VarId y, bool y_value, VarId x, bool x_value) {
  if (x >= m.universe().size() || y >= m.universe().size())
    throw PreconditionError("adjustment query names an unknown variable");
  if (m.is_exogenous(x)) throw PreconditionError("intervention target must be endogenous");
  const auto parents = m.graph().parents(x);
  if (parents.size() > 64) throw BoundExceeded("adjustment over more than 64 parents");

  struct Stratum {
    double parents = 0.0;  // Pr(pa)
    double with_x = 0.0;  // Pr(X=x, pa)
    double with_xy = 0.0;  // Pr(Y=y, X=x, pa)
  };
  std::unordered_map<std::uint64_t, Stratum> strata;
  const auto dist = joint(m);
  for (const auto& row : dist.rows()) {
    std::uint64_t key = 0;
    for (NodeId p : parents) key = (key << 1) | (row.world.test(p) ? 1U : 0U);
    auto& s = strata[key];
    s.parents += row.probability;
    if (row.world.test(x) != x_value) continue;
    s.with_x += row.probability;
    if (row.world.test(y) == y_value) s.with_xy += row.probability;
  }
  double total = 0.0;
  for (const auto& [key, s] : strata) {
    if (s.with_x <= 0.0) continue;
    total += s.with_xy / s.with_x * s.parents;
  }
  return total;
}

TabularDistribution abduct(const Sem& m, const Assignment& evidence) {
  for (auto [v, b] : evidence)
    if (v >= m.universe().size()) throw PreconditionError(fmt::format("variable id {} does not exist", v));
  auto weights = kernels::evidence_weights(m, evidence, kernels::Execution::parallel);
  double mass = 0.0;
  for (double w : weights) mass += w;
  if (mass <= 0.0)
    throw ZeroProbabilityEvidence("evidence '" + to_string(evidence, m.universe()) + "' has probability 0");
  for (double& w : weights) w /= mass;
  const auto vars = m.exogenous_distribution().vars();
  return TabularDistribution(std::vector<Var>(vars.begin(), vars.end()), std::move(weights));
}

double counterfactual(const Sem& m, const Assignment& evidence, const Assignment& interventions,
                      const Assignment& query) {
  auto posterior = abduct(m, evidence);
  const auto acted = intervene_surgery(m, interventions).with_exogenous_distribution(std::move(posterior));
  return joint(acted).probability(query);
}

double cpd(const Sem& m, VarId x, const Assignment& given) {
  const auto& eq = m.equation(x);
  const auto parents = m.graph().parents(x);
  for (auto [v, b] : given) {
    if (std::find(parents.begin(), parents.end(), NodeId{v}) == parents.end())
      throw PreconditionError("'" + (v < m.universe().size() ? m.universe()[v].name : std::to_string(v)) +
                              "' is not a parent of '" + m.universe()[x].name + "'");
  }
  const auto reduced = substitute(eq, given);
  if (reduced.kind() == Formula::Kind::True) return 1.0;
  if (reduced.kind() == Formula::Kind::False) return 0.0;
  double given_mass = 0.0;
  double holds_mass = 0.0;
  const auto dist = joint(m);
  for (const auto& row : dist.rows()) {
    if (!matches(row.world, given)) continue;
    given_mass += row.probability;
    if (evaluate_with(reduced, [&](VarId p) { return row.world.test(p); })) holds_mass += row.probability;
  }
  if (given_mass <= 0.0)
    throw ZeroProbabilityEvidence("parent assignment '" + to_string(given, m.universe()) + "' has probability 0");
  return holds_mass / given_mass;
}

std::string to_dot(const Sem& m) { return to_dot(m.graph(), "sem"); }

}  // namespace tpc
