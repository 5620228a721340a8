#pragma once

// The course-enrollment example: four Boolean variables A, L, K, P, a
// PSDD over the vtree ((L,K),(P,A)) and the SEM compiled from its formula.

#include <string_view>

#include "tpc/distribution.hpp"
#include "tpc/formula.hpp"
#include "tpc/psdd.hpp"
#include "tpc/sem.hpp"
#include "tpc/sem_compiler.hpp"

namespace tpc::fixtures {

/// A, L, K, P in that order.
Universe courses_universe();

/// (¬L∧K)∧(P∧A) ∨ (L∧K)∧((¬P∧¬A)∨(P∧A)) ∨ (¬L∧¬K)∧(P∧A)
std::string_view courses_formula_text();
Formula courses_formula();

/// The unsimplified base formula read off the PSDD, with its ⊤/⊥ terminals.
std::string_view courses_raw_formula_text();
Formula courses_raw_formula();

/// Joint over (A, L, K, P), first variable most significant.
TabularDistribution courses_distribution();

Vtree courses_vtree();
Psdd courses_psdd();

CompilationResult courses_compilation();
Sem courses_sem();

}  // namespace tpc::fixtures
