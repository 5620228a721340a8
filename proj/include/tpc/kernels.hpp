#pragma once

// Exhaustive world-enumeration loops. Every kernel has a serial reference
// path and an OpenMP path; both produce identical per-world results.

#include <cstdint>
#include <span>
#include <vector>

#include "tpc/distribution.hpp"
#include "tpc/formula.hpp"

namespace tpc {
class Psdd;
class Sem;
}  // namespace tpc

namespace tpc::kernels {

enum class Execution { serial, parallel };

/// Entry w is 1 iff `f` holds in world w over `universe` (first variable
/// most significant).
std::vector<std::uint8_t> truth_table(const Formula& f, std::span<const Var> universe, Execution exec);

/// Pr(w) for every total assignment over the PSDD universe in id order.
std::vector<double> psdd_joint_table(const Psdd& m, Execution exec);

/// Solved worlds of every exogenous world with positive mass, in table order.
std::vector<JointDistribution::Row> push_forward(const Sem& m, Execution exec);

/// prior(u) when solve(u) satisfies `evidence`, else 0. Not normalized.
std::vector<double> evidence_weights(const Sem& m, const Assignment& evidence, Execution exec);

/// Number of OpenMP threads the parallel path uses.
int parallel_threads();

}  // namespace tpc::kernels
