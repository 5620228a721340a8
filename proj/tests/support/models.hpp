#pragma once

// Seeded random models for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "tpc/causal_graph.hpp"
#include "tpc/formula.hpp"
#include "tpc/psdd.hpp"
#include "tpc/sem_compiler.hpp"
#include "tpc/spn.hpp"

namespace tpc::testing {

using Rng = std::mt19937_64;

/// Universe V0..V{n-1}.
Universe numbered_universe(std::size_t n, const char* prefix = "V");

/// Random vtree over `universe` (random split points over a shuffled order).
Vtree random_vtree(Rng& rng, const Universe& universe);

/// A valid PSDD over `vtree` whose support is a random nonempty set of
/// worlds. Every element with a satisfiable sub gets positive θ.
Psdd random_psdd(Rng& rng, const Vtree& vtree);
Psdd random_psdd(Rng& rng, std::size_t n_vars);

/// Complete and decomposable; sums have 2 or 3 children.
Spn random_spn(Rng& rng, std::size_t n_vars);
/// Complete, decomposable and selective (sums split on one variable).
Spn random_selective_spn(Rng& rng, std::size_t n_vars);

/// DAG over nodes 0..n-1 where every edge points from a lower to a higher id.
struct Bayesnet {
  CausalGraph graph;
  /// cpt[v][k] = Pr(v=1 | parents in ascending order read as bits of k,
  /// first parent most significant).
  std::vector<std::vector<double>> cpt;

  /// Exact joint over all nodes, node 0 most significant.
  std::vector<double> joint() const;
};
Bayesnet random_bayesnet(Rng& rng, std::size_t n_nodes, double edge_probability);

/// Random formula over `universe` with up to `depth` levels of connectives.
Formula random_formula(Rng& rng, const Universe& universe, int depth);

/// Random strictly positive distribution over `vars`.
TabularDistribution random_distribution(Rng& rng, std::span<const Var> vars, double zero_fraction = 0.0);

/// Compiled SEM of a random formula with a random hidden table.
CompilationResult random_compilation(Rng& rng, std::size_t n_vars);

}  // namespace tpc::testing
