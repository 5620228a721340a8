#pragma once

#include <bitset>
#include <cstdint>
#include <span>
#include <vector>

#include "tpc/formula.hpp"

namespace tpc {

/// Dense table over at most kMaxEnumerationVars variables. Entry `index`
/// holds the probability of the world whose bits read vars[0] as the most
/// significant position.
class TabularDistribution {
 public:
  TabularDistribution() = default;
  /// Throws PreconditionError unless probs has 2^|vars| non-negative entries
  /// summing to 1 within 1e-12.
  TabularDistribution(std::vector<Var> vars, std::vector<double> probs);

  std::span<const Var> vars() const noexcept { return vars_; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t world) const { return probs_.at(world); }

  /// Probability of a total assignment over vars().
  double at(const Assignment& total) const;
  /// Sum over the worlds consistent with `partial`. Variables outside vars()
  /// are a PreconditionError.
  double probability(const Assignment& partial) const;

  std::size_t index_of(const Assignment& total) const;
  Assignment assignment_at(std::size_t world) const;

  friend bool operator==(const TabularDistribution&, const TabularDistribution&) = default;

 private:
  std::vector<Var> vars_;
  std::vector<double> probs_;
};

/// Largest absolute entry-wise difference; the tables must share variables.
double max_abs_difference(const TabularDistribution& a, const TabularDistribution& b);

inline constexpr std::size_t kMaxSemVars = 256;
using World = std::bitset<kMaxSemVars>;

/// Sparse distribution over every variable of a SEM: one row per exogenous
/// world of positive mass, holding the solved values of all variables.
class JointDistribution {
 public:
  struct Row {
    World world;
    double probability = 0.0;
  };

  JointDistribution(Universe universe, std::vector<Row> rows);

  const Universe& universe() const noexcept { return universe_; }
  std::span<const Row> rows() const noexcept { return rows_; }

  /// Mass of the event described by `partial`.
  double probability(const Assignment& partial) const;
  /// Pr(query | evidence); ZeroProbabilityEvidence when Pr(evidence) = 0.
  double conditional(const Assignment& query, const Assignment& evidence) const;
  /// Marginal table over `vars` (at most kMaxEnumerationVars).
  TabularDistribution marginal(std::span<const Var> vars) const;

 private:
  Universe universe_;
  std::vector<Row> rows_;
};

bool matches(const World& w, const Assignment& partial);

}  // namespace tpc
