#include "models.hpp"

#include <algorithm>
#include <map>
#include <string>

#include <fmt/format.h>

namespace tpc::testing {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

void normalize(std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
}

// Worlds are bitmasks over variable ids (bit i = variable id i).
using Mask = std::uint64_t;

class PsddMaker {
 public:
  PsddMaker(Rng& rng, const Vtree& vt) : rng_(rng), vt_(vt), b_(vt) {
    masks_.resize(vt.nodes().size(), 0);
    for (NodeIndex i = 0; i < vt.nodes().size(); ++i)
      for (const auto& v : vt.vars_under(i)) masks_[i] |= Mask{1} << v.id;
  }

  // Identical (vtree node, support) requests share one node, which keeps the
  // circuit small the way compiled PSDDs are.
  NodeIndex make(NodeIndex v, std::vector<Mask> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    auto key = std::make_pair(v, support);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const auto made = fresh(v, support);
    memo_.emplace(std::move(key), made);
    return made;
  }

 private:
  NodeIndex fresh(NodeIndex v, const std::vector<Mask>& support) {
    const auto& node = vt_.node(v);
    if (node.var) {
      const Mask bit = Mask{1} << *node.var;
      const bool has1 = std::any_of(support.begin(), support.end(), [&](Mask s) { return (s & bit) != 0; });
      const bool has0 = std::any_of(support.begin(), support.end(), [&](Mask s) { return (s & bit) == 0; });
      if (has1 && has0) return b_.top(v, uniform(rng_, 0.05, 0.95));
      return b_.literal(v, has1);
    }
    const Mask lmask = masks_[node.left];
    std::map<Mask, std::vector<Mask>> subs_of;
    for (Mask s : support) subs_of[s & lmask].push_back(s & ~lmask);
    std::map<std::vector<Mask>, std::vector<Mask>> primes_of;
    for (auto& [l, rs] : subs_of) {
      std::sort(rs.begin(), rs.end());
      rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
      primes_of[rs].push_back(l);
    }

    std::vector<PsddElement> elements;
    for (auto& [rs, ls] : primes_of) {
      // Occasionally split a group so that several primes share a sub.
      std::vector<std::vector<Mask>> groups{ls};
      if (ls.size() >= 2 && coin(rng_, 0.3)) {
        std::shuffle(ls.begin(), ls.end(), rng_);
        const auto cut = pick(rng_, 1, ls.size() - 1);
        groups = {std::vector<Mask>(ls.begin(), ls.begin() + cut), std::vector<Mask>(ls.begin() + cut, ls.end())};
      }
      for (const auto& g : groups) {
        const auto prime = make(node.left, g);
        const auto sub = make(node.right, rs);
        elements.push_back({prime, sub, uniform(rng_, 0.1, 1.0)});
      }
    }
    std::vector<Mask> rest;
    for (Mask l = lmask;; l = (l - 1) & lmask) {
      if (!subs_of.contains(l)) rest.push_back(l);
      if (l == 0) break;
    }
    double total = 0.0;
    for (const auto& e : elements) total += e.theta;
    for (auto& e : elements) e.theta /= total;
    if (!rest.empty()) elements.push_back({make(node.left, rest), b_.bottom(node.right), 0.0});
    std::shuffle(elements.begin(), elements.end(), rng_);
    return b_.decision(v, std::move(elements));
  }

 public:
  Psdd build() && { return std::move(b_).build(); }

 private:
  Rng& rng_;
  const Vtree& vt_;
  Psdd::Builder b_;
  std::vector<Mask> masks_;
  std::map<std::pair<NodeIndex, std::vector<Mask>>, NodeIndex> memo_;
};

Vtree::Builder& grow(Vtree::Builder& b, std::vector<std::string>& names, std::size_t lo, std::size_t hi, Rng& rng,
                     NodeIndex& out) {
  if (hi - lo == 1) {
    out = b.leaf(names[lo]);
    return b;
  }
  const auto cut = pick(rng, lo + 1, hi - 1);
  NodeIndex l = 0;
  NodeIndex r = 0;
  grow(b, names, lo, cut, rng, l);
  grow(b, names, cut, hi, rng, r);
  out = b.internal(l, r);
  return b;
}

class SpnMaker {
 public:
  SpnMaker(Rng& rng, Universe u) : rng_(rng), b_(std::move(u)) {}

  SpnIndex bernoulli(const std::string& x) {
    if (coin(rng_, 0.3)) return b_.indicator(x, coin(rng_));
    const double w = uniform(rng_, 0.05, 0.95);
    return b_.sum({b_.indicator(x, true), b_.indicator(x, false)}, {w, 1.0 - w});
  }

  std::vector<std::vector<std::string>> split(std::vector<std::string> scope) {
    std::shuffle(scope.begin(), scope.end(), rng_);
    const std::size_t parts = scope.size() >= 3 && coin(rng_, 0.3) ? 3 : 2;
    std::vector<std::size_t> cuts{0};
    std::vector<std::size_t> inner(scope.size() - 1);
    for (std::size_t i = 0; i < inner.size(); ++i) inner[i] = i + 1;
    std::shuffle(inner.begin(), inner.end(), rng_);
    inner.resize(parts - 1);
    std::sort(inner.begin(), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(scope.size());
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      out.emplace_back(scope.begin() + cuts[i], scope.begin() + cuts[i + 1]);
    return out;
  }

  SpnIndex general(const std::vector<std::string>& scope, int depth) {
    if (scope.size() == 1) return bernoulli(scope[0]);
    if (depth >= 3 || coin(rng_)) {
      std::vector<SpnIndex> children;
      for (const auto& part : split(scope)) children.push_back(general(part, depth + 1));
      return b_.product(std::move(children));
    }
    const auto k = pick(rng_, 2, 3);
    std::vector<SpnIndex> children;
    std::vector<double> w;
    for (std::size_t i = 0; i < k; ++i) {
      children.push_back(general(scope, depth + 1));
      w.push_back(uniform(rng_, 0.1, 1.0));
    }
    normalize(w);
    return b_.sum(std::move(children), std::move(w));
  }

  SpnIndex selective(const std::vector<std::string>& scope) {
    if (scope.size() == 1) return bernoulli(scope[0]);
    if (coin(rng_, 0.4)) {
      std::vector<SpnIndex> children;
      for (const auto& part : split(scope)) children.push_back(selective(part));
      return b_.product(std::move(children));
    }
    auto rest = scope;
    const auto at = pick(rng_, 0, rest.size() - 1);
    const auto x = rest[at];
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(at));
    const auto on = b_.product({b_.indicator(x, true), selective(rest)});
    const auto off = b_.product({b_.indicator(x, false), selective(rest)});
    const double w = uniform(rng_, 0.05, 0.95);
    return b_.sum({on, off}, {w, 1.0 - w});
  }

  Spn build() && { return std::move(b_).build(); }

 private:
  Rng& rng_;
  Spn::Builder b_;
};

std::vector<std::string> names_of(const Universe& u) {
  std::vector<std::string> out;
  for (const auto& v : u.vars()) out.push_back(v.name);
  return out;
}

}  // namespace

Universe numbered_universe(std::size_t n, const char* prefix) {
  Universe u;
  for (std::size_t i = 0; i < n; ++i) u.add(fmt::format("{}{}", prefix, i));
  return u;
}

Vtree random_vtree(Rng& rng, const Universe& universe) {
  auto names = names_of(universe);
  std::shuffle(names.begin(), names.end(), rng);
  Vtree::Builder b;
  NodeIndex root = 0;
  grow(b, names, 0, names.size(), rng, root);
  return std::move(b).build();
}

Psdd random_psdd(Rng& rng, const Vtree& vtree) {
  const std::size_t n = vtree.universe().size();
  const double density = uniform(rng, 0.15, 0.9);
  std::vector<Mask> support;
  for (Mask w = 0; w < (Mask{1} << n); ++w)
    if (coin(rng, density)) support.push_back(w);
  if (support.empty()) support.push_back(pick(rng, 0, (std::size_t{1} << n) - 1));
  PsddMaker maker(rng, vtree);
  maker.make(vtree.root(), support);
  return std::move(maker).build();
}

Psdd random_psdd(Rng& rng, std::size_t n_vars) {
  const auto vt = random_vtree(rng, numbered_universe(n_vars));
  return random_psdd(rng, vt);
}

Spn random_spn(Rng& rng, std::size_t n_vars) {
  const auto u = numbered_universe(n_vars);
  SpnMaker maker(rng, u);
  maker.general(names_of(u), 0);
  return std::move(maker).build();
}

Spn random_selective_spn(Rng& rng, std::size_t n_vars) {
  const auto u = numbered_universe(n_vars);
  SpnMaker maker(rng, u);
  maker.selective(names_of(u));
  return std::move(maker).build();
}

std::vector<double> Bayesnet::joint() const {
  const std::size_t n = graph.size();
  std::vector<double> out(std::size_t{1} << n, 1.0);
  for (std::size_t w = 0; w < out.size(); ++w) {
    const auto bit = [&](NodeId v) { return ((w >> (n - 1 - v)) & 1U) != 0; };
    for (NodeId v = 0; v < n; ++v) {
      std::size_t k = 0;
      for (NodeId p : graph.parents(v)) k = (k << 1) | (bit(p) ? 1U : 0U);
      out[w] *= bit(v) ? cpt[v][k] : 1.0 - cpt[v][k];
    }
  }
  return out;
}

Bayesnet random_bayesnet(Rng& rng, std::size_t n_nodes, double edge_probability) {
  Bayesnet bn;
  for (std::size_t i = 0; i < n_nodes; ++i) bn.graph.add_node(fmt::format("B{}", i));
  for (NodeId j = 0; j < n_nodes; ++j)
    for (NodeId i = 0; i < j; ++i)
      if (coin(rng, edge_probability)) bn.graph.add_edge(i, j);
  for (NodeId v = 0; v < n_nodes; ++v) {
    std::vector<double> table(std::size_t{1} << bn.graph.parents(v).size());
    for (double& t : table) t = uniform(rng, 0.05, 0.95);
    bn.cpt.push_back(std::move(table));
  }
  return bn;
}

Formula random_formula(Rng& rng, const Universe& universe, int depth) {
  if (depth == 0 || coin(rng, 0.2)) {
    if (coin(rng, 0.03)) return coin(rng) ? Formula::top() : Formula::bottom();
    return Formula::literal(universe[static_cast<VarId>(pick(rng, 0, universe.size() - 1))], coin(rng));
  }
  if (coin(rng, 0.1)) return Formula::negation(random_formula(rng, universe, depth - 1));
  std::vector<Formula> children;
  const auto k = pick(rng, 2, 3);
  for (std::size_t i = 0; i < k; ++i) children.push_back(random_formula(rng, universe, depth - 1));
  return coin(rng) ? Formula::conjunction(std::move(children)) : Formula::disjunction(std::move(children));
}

TabularDistribution random_distribution(Rng& rng, std::span<const Var> vars, double zero_fraction) {
  std::vector<double> p(std::size_t{1} << vars.size());
  for (double& x : p) x = coin(rng, zero_fraction) ? 0.0 : uniform(rng, 0.05, 1.0);
  if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) p[pick(rng, 0, p.size() - 1)] = 1.0;
  normalize(p);
  return TabularDistribution(std::vector<Var>(vars.begin(), vars.end()), std::move(p));
}

CompilationResult random_compilation(Rng& rng, std::size_t n_vars) {
  const auto u = numbered_universe(n_vars);
  const auto f = prepare_for_compilation(random_formula(rng, u, 3));
  return compile_formula(f, u.vars(), random_distribution(rng, u.vars(), 0.2));
}

}  // namespace tpc::testing
