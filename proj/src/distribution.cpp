#include "tpc/distribution.hpp"

#include <cmath>

#include <fmt/format.h>

namespace tpc {

TabularDistribution::TabularDistribution(std::vector<Var> vars, std::vector<double> probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
  if (vars_.size() > kMaxEnumerationVars)
    throw BoundExceeded(fmt::format("table over {} variables exceeds the bound", vars_.size()));
  if (probs_.size() != (std::size_t{1} << vars_.size()))
    throw PreconditionError(fmt::format("table over {} variables needs {} entries, got {}", vars_.size(),
                                        std::size_t{1} << vars_.size(), probs_.size()));
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw PreconditionError(fmt::format("invalid table entry {}", p));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw PreconditionError(fmt::format("table sums to {:.17g}, not 1", total));
}

std::size_t TabularDistribution::index_of(const Assignment& total) const {
  std::size_t index = 0;
  for (const auto& v : vars_) {
    auto b = total.get(v.id);
    if (!b) throw UnassignedVariable(v.name);
    index = (index << 1) | (*b ? 1U : 0U);
  }
  return index;
}

Assignment TabularDistribution::assignment_at(std::size_t world) const {
  Assignment a;
  const std::size_t n = vars_.size();
  for (std::size_t i = 0; i < n; ++i) a.set(vars_[i].id, (world >> (n - 1 - i)) & 1U);
  return a;
}

double TabularDistribution::at(const Assignment& total) const { return probs_[index_of(total)]; }

double TabularDistribution::probability(const Assignment& partial) const {
  const std::size_t n = vars_.size();
  std::size_t mask = 0;
  std::size_t want = 0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto b = partial.get(vars_[i].id);
    if (!b) continue;
    ++found;
    mask |= std::size_t{1} << (n - 1 - i);
    if (*b) want |= std::size_t{1} << (n - 1 - i);
  }
  if (found != partial.size()) throw PreconditionError("assignment mentions a variable outside the table");
  double sum = 0.0;
  for (std::size_t w = 0; w < probs_.size(); ++w)
    if ((w & mask) == want) sum += probs_[w];
  return sum;
}

double max_abs_difference(const TabularDistribution& a, const TabularDistribution& b) {
  if (a.vars().size() != b.vars().size()) throw PreconditionError("tables over different variables");
  for (std::size_t i = 0; i < a.vars().size(); ++i)
    if (a.vars()[i].name != b.vars()[i].name) throw PreconditionError("tables over different variables");
  double worst = 0.0;
  for (std::size_t w = 0; w < a.size(); ++w) worst = std::max(worst, std::abs(a[w] - b[w]));
  return worst;
}

bool matches(const World& w, const Assignment& partial) {
  for (auto [v, b] : partial)
    if (w.test(v) != b) return false;
  return true;
}

JointDistribution::JointDistribution(Universe universe, std::vector<Row> rows)
    : universe_(std::move(universe)), rows_(std::move(rows)) {}

double JointDistribution::probability(const Assignment& partial) const {
  for (auto [v, b] : partial)
    if (v >= universe_.size()) throw PreconditionError(fmt::format("variable id {} outside the model", v));
  double sum = 0.0;
  for (const auto& r : rows_)
    if (matches(r.world, partial)) sum += r.probability;
  return sum;
}

double JointDistribution::conditional(const Assignment& query, const Assignment& evidence) const {
  if (!query.consistent(evidence)) return 0.0;
  const double pe = probability(evidence);
  if (pe <= 0.0) throw ZeroProbabilityEvidence("evidence '" + to_string(evidence, universe_) + "' has probability 0");
  Assignment both = evidence;
  for (auto [v, b] : query)
    if (!both.contains(v)) both.set(v, b);
  return probability(both) / pe;
}

TabularDistribution JointDistribution::marginal(std::span<const Var> vars) const {
  if (vars.size() > kMaxEnumerationVars) throw BoundExceeded("marginal over too many variables");
  std::vector<double> probs(std::size_t{1} << vars.size(), 0.0);
  const std::size_t n = vars.size();
  for (const auto& r : rows_) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < n; ++i) index = (index << 1) | (r.world.test(vars[i].id) ? 1U : 0U);
    probs[index] += r.probability;
  }
  return TabularDistribution(std::vector<Var>(vars.begin(), vars.end()), std::move(probs));
}

}  // namespace tpc
