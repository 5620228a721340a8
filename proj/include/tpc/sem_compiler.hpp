#pragma once

// Compiles a propositional formula (or a PSDD's base formula) into a SEM
// with one hidden variable per original variable and one endogenous node per
// distinct compound sub-formula. The root node holds in every solved world
// exactly when the formula holds.

#include <string>
#include <utility>
#include <vector>

#include "tpc/distribution.hpp"
#include "tpc/formula.hpp"
#include "tpc/sem.hpp"

namespace tpc {

class Psdd;

struct CompilationResult {
  Sem sem;
  /// Augmented node name and the sub-formula it denotes over the originals,
  /// in X_1, X_2, ... order.
  std::vector<std::pair<std::string, Formula>> naming;
  /// Original variables as they appear in `sem` (X_k = H_k each).
  std::vector<Var> originals;
  /// Hidden exogenous variables H_1..H_n.
  std::vector<Var> hidden;
  /// Node equivalent to the compiled formula.
  std::string root_name;
};

/// simplify, then NNF, then binarize: the shape compile_formula() accepts.
Formula prepare_for_compilation(const Formula& f);

/// `f` must be in the prepared shape (no Not, binary conjunctions) and only
/// mention `originals`. `h_dist` is a table over `originals` in that order;
/// it becomes the table of H_1..H_n. Throws PreconditionError on a shape
/// violation, a dimension or name mismatch, or an original named X_k / H_k.
CompilationResult compile_formula(const Formula& f, std::span<const Var> originals, const TabularDistribution& h_dist);

/// Compiles the PSDD's base formula with the PSDD's joint as the hidden table.
CompilationResult compile_psdd(const Psdd& m);

/// max over total assignments w of |Pr_psdd(w) - Pr_sem(originals = w)|.
double check_consistency(const Psdd& m, const CompilationResult& c);

/// One `X_k = <equation>` line per augmented node.
std::string naming_sidecar(const CompilationResult& c);

}  // namespace tpc
