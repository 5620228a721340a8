#include "tpc/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include "tpc/psdd.hpp"
#include "tpc/sem.hpp"

namespace tpc::kernels {

int parallel_threads() { return omp_get_max_threads(); }

std::vector<std::uint8_t> truth_table(const Formula& f, std::span<const Var> universe, Execution exec) {
  if (universe.size() > kMaxEnumerationVars) throw BoundExceeded("truth table over too many variables");
  const std::size_t n = universe.size();
  VarId max_id = 0;
  for (const auto& v : universe) max_id = std::max(max_id, v.id);
  for (const auto& v : variables(f)) max_id = std::max(max_id, v.id);
  // Bit position of each variable id, counted from the least significant end.
  std::vector<int> shift(max_id + 1, -1);
  for (std::size_t i = 0; i < n; ++i) shift[universe[i].id] = static_cast<int>(n - 1 - i);

  const auto worlds = static_cast<std::int64_t>(std::size_t{1} << n);
  std::vector<std::uint8_t> table(static_cast<std::size_t>(worlds), 0);
  auto eval = [&](std::int64_t w) {
    table[w] = evaluate_with(f, [&](VarId v) { return shift[v] >= 0 && ((w >> shift[v]) & 1) != 0; });
  };
  if (exec == Execution::serial) {
    for (std::int64_t w = 0; w < worlds; ++w) eval(w);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t w = 0; w < worlds; ++w) eval(w);
  }
  return table;
}

namespace {

double psdd_world_probability(const Psdd& m, std::uint64_t world, std::size_t n, std::vector<double>& value) {
  const auto& vt = m.vtree();
  for (NodeIndex i = 0; i < m.nodes().size(); ++i) {
    const auto& node = m.node(i);
    switch (node.kind) {
      case PsddNode::Kind::True: {
        const bool bit = (world >> (n - 1 - *vt.node(node.vtree).var)) & 1U;
        value[i] = bit ? node.theta : 1.0 - node.theta;
        break;
      }
      case PsddNode::Kind::False:
        value[i] = 0.0;
        break;
      case PsddNode::Kind::Literal: {
        const bool bit = (world >> (n - 1 - *vt.node(node.vtree).var)) & 1U;
        value[i] = bit == node.positive ? 1.0 : 0.0;
        break;
      }
      case PsddNode::Kind::Decision: {
        double sum = 0.0;
        for (const auto& e : node.elements)
          if (e.theta != 0.0) sum += e.theta * value[e.prime] * value[e.sub];
        value[i] = sum;
        break;
      }
    }
  }
  return value.back();
}

}  // namespace

std::vector<double> psdd_joint_table(const Psdd& m, Execution exec) {
  const std::size_t n = m.universe().size();
  if (n > kMaxEnumerationVars) throw BoundExceeded("PSDD joint table over too many variables");
  const auto worlds = static_cast<std::int64_t>(std::size_t{1} << n);
  std::vector<double> table(static_cast<std::size_t>(worlds), 0.0);
  if (exec == Execution::serial) {
    std::vector<double> scratch(m.nodes().size());
    for (std::int64_t w = 0; w < worlds; ++w) table[w] = psdd_world_probability(m, w, n, scratch);
  } else {
#pragma omp parallel
    {
      std::vector<double> scratch(m.nodes().size());
#pragma omp for schedule(static)
      for (std::int64_t w = 0; w < worlds; ++w) table[w] = psdd_world_probability(m, w, n, scratch);
    }
  }
  return table;
}

std::vector<JointDistribution::Row> push_forward(const Sem& m, Execution exec) {
  const auto probs = m.exogenous_distribution().probabilities();
  std::vector<std::size_t> support;
  for (std::size_t u = 0; u < probs.size(); ++u)
    if (probs[u] > 0.0) support.push_back(u);
  std::vector<JointDistribution::Row> rows(support.size());
  const auto count = static_cast<std::int64_t>(support.size());
  if (exec == Execution::serial) {
    for (std::int64_t k = 0; k < count; ++k) rows[k] = {solve(m, support[k]), probs[support[k]]};
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) rows[k] = {solve(m, support[k]), probs[support[k]]};
  }
  return rows;
}

std::vector<double> evidence_weights(const Sem& m, const Assignment& evidence, Execution exec) {
  const auto probs = m.exogenous_distribution().probabilities();
  std::vector<double> weights(probs.size(), 0.0);
  const auto count = static_cast<std::int64_t>(probs.size());
  auto weigh = [&](std::int64_t u) {
    if (probs[u] > 0.0 && matches(solve(m, static_cast<std::size_t>(u)), evidence)) weights[u] = probs[u];
  };
  if (exec == Execution::serial) {
    for (std::int64_t u = 0; u < count; ++u) weigh(u);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < count; ++u) weigh(u);
  }
  return weights;
}

}  // namespace tpc::kernels
