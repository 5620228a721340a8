#include "tpc/fixtures.hpp"

#include <array>
#include <string>

namespace tpc::fixtures {

Universe courses_universe() {
  const std::array<std::string, 4> names{"A", "L", "K", "P"};
  return Universe(names);
}

std::string_view courses_formula_text() {
  return "(!L & K) & (P & A) | (L & K) & (!P & !A | P & A) | (!L & !K) & (P & A)";
}

Formula courses_formula() { return parse_formula(courses_formula_text(), courses_universe()); }

std::string_view courses_raw_formula_text() {
  return "((!L & K) | (L & false)) & ((P & A) | (!P & false)) | "
         "((L & K) | (!L & true)) & ((!P & !A) | (P & A)) | "
         "((!L & !K) | (L & false)) & ((P & A) | (!P & false))";
}

Formula courses_raw_formula() { return parse_formula(courses_raw_formula_text(), courses_universe()); }

TabularDistribution courses_distribution() {
  struct Row {
    const char* lkpa;
    double p;
  };
  constexpr std::array<Row, 9> rows{{{"0010", 0.06},
                                     {"0011", 0.54},
                                     {"0111", 0.10},
                                     {"1000", 0.036},
                                     {"1010", 0.018},
                                     {"1011", 0.006},
                                     {"1100", 0.144},
                                     {"1110", 0.072},
                                     {"1111", 0.024}}};
  std::vector<double> probs(16, 0.0);
  for (const auto& r : rows) {
    const auto bit = [&](int i) { return static_cast<std::size_t>(r.lkpa[i] == '1'); };
    // Reorder L K P A into A L K P.
    probs[bit(3) << 3 | bit(0) << 2 | bit(1) << 1 | bit(2)] = r.p;
  }
  const auto u = courses_universe();
  return TabularDistribution(std::vector<Var>(u.vars().begin(), u.vars().end()), std::move(probs));
}

Vtree courses_vtree() {
  Vtree::Builder b;
  const auto l = b.leaf("L", 1);
  const auto k = b.leaf("K", 3);
  const auto lk = b.internal(l, k, 2);
  const auto p = b.leaf("P", 5);
  const auto a = b.leaf("A", 7);
  const auto pa = b.internal(p, a, 6);
  b.internal(lk, pa, 4);
  return std::move(b).build();
}

Psdd courses_psdd() {
  const auto vt = courses_vtree();
  const NodeIndex l = 0, k = 1, lk = 2, p = 3, a = 4, pa = 5, root = 6;
  Psdd::Builder b(vt);
  const auto not_l = b.literal(l, false);
  const auto pos_l = b.literal(l, true);
  const auto not_k = b.literal(k, false);
  const auto pos_k = b.literal(k, true);
  const auto false_k = b.bottom(k);
  const auto top_k = b.top(k, 0.8);
  const auto lk00 = b.decision(lk, {{not_l, not_k, 1.0}, {pos_l, false_k, 0.0}});
  const auto lk01 = b.decision(lk, {{not_l, pos_k, 1.0}, {pos_l, false_k, 0.0}});
  const auto lk1 = b.decision(lk, {{pos_l, top_k, 1.0}, {not_l, false_k, 0.0}});

  const auto pos_p = b.literal(p, true);
  const auto not_p = b.literal(p, false);
  const auto pos_a = b.literal(a, true);
  const auto not_a = b.literal(a, false);
  const auto false_a = b.bottom(a);
  const auto top_a_high = b.top(a, 0.9);
  const auto top_a_low = b.top(a, 0.25);
  const auto pa00 = b.decision(pa, {{pos_p, top_a_high, 1.0}, {not_p, false_a, 0.0}});
  const auto pa01 = b.decision(pa, {{pos_p, pos_a, 1.0}, {not_p, false_a, 0.0}});
  const auto pa1 = b.decision(pa, {{pos_p, top_a_low, 0.4}, {not_p, not_a, 0.6}});

  b.decision(root, {{lk00, pa00, 0.6}, {lk01, pa01, 0.1}, {lk1, pa1, 0.3}});
  return std::move(b).build();
}

CompilationResult courses_compilation() {
  const auto u = courses_universe();
  return compile_formula(prepare_for_compilation(courses_formula()), u.vars(), courses_distribution());
}

Sem courses_sem() { return courses_compilation().sem; }

}  // namespace tpc::fixtures
