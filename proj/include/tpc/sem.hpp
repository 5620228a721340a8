#pragma once

// Structural equation models with deterministic Boolean equations and a
// tabular distribution over the exogenous variables.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/causal_graph.hpp"
#include "tpc/distribution.hpp"
#include "tpc/formula.hpp"

namespace tpc {

class Sem {
 public:
  class Builder {
   public:
    VarId add_exogenous(std::string name);
    VarId add_endogenous(std::string name);
    const Universe& universe() const noexcept { return universe_; }

    void set_equation(VarId var, Formula f);
    /// Parses `formula` against the variables declared so far.
    void set_equation(std::string_view var, std::string_view formula);
    /// Table entries indexed over the exogenous variables in declaration order.
    void set_exogenous_distribution(std::vector<double> probabilities);
    void set_exogenous_distribution(TabularDistribution dist);

    Sem build() &&;

   private:
    Universe universe_;
    std::vector<NodeKind> kinds_;
    std::vector<std::optional<Formula>> equations_;
    std::optional<TabularDistribution> dist_;
  };

  const Universe& universe() const noexcept { return universe_; }
  std::span<const VarId> exogenous() const noexcept { return exogenous_; }
  std::span<const VarId> endogenous() const noexcept { return endogenous_; }
  bool is_exogenous(VarId v) const { return kinds_.at(v) == NodeKind::Exogenous; }
  /// Equation of an endogenous variable; PreconditionError for exogenous ones.
  const Formula& equation(VarId v) const;
  /// Node ids equal variable ids.
  const CausalGraph& graph() const noexcept { return graph_; }
  const TabularDistribution& exogenous_distribution() const noexcept { return dist_; }
  /// Endogenous variables in an order where parents come first.
  std::span<const VarId> evaluation_order() const noexcept { return order_; }

  /// Same equations with a different exogenous table.
  Sem with_exogenous_distribution(TabularDistribution dist) const;

 private:
  Sem(Universe universe, std::vector<NodeKind> kinds, std::vector<std::optional<Formula>> equations,
      TabularDistribution dist);

  friend Sem intervene_surgery(const Sem& m, const Assignment& interventions);

  Universe universe_;
  std::vector<NodeKind> kinds_;
  std::vector<std::optional<Formula>> equations_;
  std::vector<VarId> exogenous_;
  std::vector<VarId> endogenous_;
  std::vector<VarId> order_;
  CausalGraph graph_;
  TabularDistribution dist_;
};

/// Values of every variable given exogenous world `u_index` (an index into
/// the exogenous table).
World solve(const Sem& m, std::size_t u_index);
/// Values of every variable given a total exogenous assignment.
Assignment solve(const Sem& m, const Assignment& u);

/// Push-forward of the exogenous table through the equations.
JointDistribution joint(const Sem& m);

/// Replaces each target's equation by its constant. Throws PreconditionError
/// for exogenous targets.
Sem intervene_surgery(const Sem& m, const Assignment& interventions);

/// Pr(query | do(interventions)) under equation replacement.
double interventional_surgery_prob(const Sem& m, const Assignment& query, const Assignment& interventions);

/// Σ_pa Pr(Y=y | X=x, pa)·Pr(pa) over the parents of X. Terms whose
/// conditioning event has probability 0 contribute 0.
double interventional_adjustment_prob(const Sem& m, VarId y, bool y_value, VarId x, bool x_value);

/// Posterior over the exogenous table given endogenous evidence. Throws
/// ZeroProbabilityEvidence when the evidence is impossible.
TabularDistribution abduct(const Sem& m, const Assignment& evidence);

/// Abduction, action (surgery) and prediction.
double counterfactual(const Sem& m, const Assignment& evidence, const Assignment& interventions,
                      const Assignment& query);

/// Pr(X=1 | given) for an assignment to some parents of X. 1 or 0 when the
/// substituted equation is constant; otherwise the probability that it holds
/// given `given`.
double cpd(const Sem& m, VarId x, const Assignment& given);

/// Text format: `var <name> exo|endo`, `eq <name> = <formula>`, then a
/// `dist` line followed by `<bitstring> <probability>` rows over the
/// exogenous variables in declaration order. Unlisted rows have mass 0.
Sem parse_sem(std::string_view text);
std::string serialize(const Sem& m);

std::string to_dot(const Sem& m);

}  // namespace tpc
