#include "tpc/psdd.hpp"

#include <cmath>

#include <fmt/format.h>

namespace tpc {

// ------------------------------------------------------------------- Vtree

NodeIndex Vtree::Builder::push(Node n) {
  nodes_.push_back(n);
  return static_cast<NodeIndex>(nodes_.size() - 1);
}

NodeIndex Vtree::Builder::leaf(std::string var_name) {
  return leaf(std::move(var_name), static_cast<int>(nodes_.size()));
}

NodeIndex Vtree::Builder::leaf(std::string var_name, int id) {
  const VarId v = universe_.add(std::move(var_name));
  return push(Node{id, v, 0, 0});
}

NodeIndex Vtree::Builder::internal(NodeIndex left, NodeIndex right) {
  return internal(left, right, static_cast<int>(nodes_.size()));
}

NodeIndex Vtree::Builder::internal(NodeIndex left, NodeIndex right, int id) {
  if (left >= nodes_.size() || right >= nodes_.size())
    throw PreconditionError(fmt::format("vtree node {} references an undefined child", id));
  if (left == right) throw PreconditionError(fmt::format("vtree node {} uses the same child twice", id));
  return push(Node{id, std::nullopt, left, right});
}

Vtree Vtree::Builder::build() && {
  if (nodes_.empty()) throw PreconditionError("empty vtree");
  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    if (n.var) continue;
    ++parents[n.left];
    ++parents[n.right];
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const int expected = i + 1 == nodes_.size() ? 0 : 1;
    if (parents[i] != expected)
      throw PreconditionError(fmt::format("vtree node {} has {} parents, expected {}", nodes_[i].id,
                                          parents[i], expected));
  }
  Vtree v;
  v.universe_ = std::move(universe_);
  v.nodes_ = std::move(nodes_);
  for (NodeIndex i = 0; i < v.nodes_.size(); ++i) {
    if (!v.by_id_.emplace(v.nodes_[i].id, i).second)
      throw PreconditionError(fmt::format("duplicate vtree node id {}", v.nodes_[i].id));
  }
  return v;
}

std::optional<NodeIndex> Vtree::find_id(int id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<Var> Vtree::vars_under(NodeIndex i) const {
  std::vector<Var> out;
  std::vector<NodeIndex> stack{i};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    const auto& n = node(cur);
    if (n.var) {
      out.push_back(universe_[*n.var]);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

// -------------------------------------------------------------------- Psdd

NodeIndex Psdd::Builder::push(PsddNode node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeIndex>(nodes_.size() - 1);
}

NodeIndex Psdd::Builder::top(NodeIndex vtree_node, double theta) {
  PsddNode n;
  n.kind = PsddNode::Kind::True;
  n.id = static_cast<int>(nodes_.size());
  n.vtree = vtree_node;
  n.theta = theta;
  return push(std::move(n));
}

NodeIndex Psdd::Builder::bottom(NodeIndex vtree_node) {
  PsddNode n;
  n.kind = PsddNode::Kind::False;
  n.id = static_cast<int>(nodes_.size());
  n.vtree = vtree_node;
  return push(std::move(n));
}

NodeIndex Psdd::Builder::literal(NodeIndex vtree_node, bool positive) {
  PsddNode n;
  n.kind = PsddNode::Kind::Literal;
  n.id = static_cast<int>(nodes_.size());
  n.vtree = vtree_node;
  n.positive = positive;
  return push(std::move(n));
}

NodeIndex Psdd::Builder::decision(NodeIndex vtree_node, std::vector<PsddElement> elements) {
  PsddNode n;
  n.kind = PsddNode::Kind::Decision;
  n.id = static_cast<int>(nodes_.size());
  n.vtree = vtree_node;
  n.elements = std::move(elements);
  return push(std::move(n));
}

Psdd Psdd::Builder::build() && { return Psdd(std::move(vtree_), std::move(nodes_)); }

Psdd::Psdd(Vtree vtree, std::vector<PsddNode> nodes) : vtree_(std::move(vtree)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw PreconditionError("empty PSDD");
  std::unordered_map<int, NodeIndex> ids;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!ids.emplace(n.id, i).second) throw PreconditionError(fmt::format("duplicate PSDD node id {}", n.id));
    if (n.vtree >= vtree_.nodes().size())
      throw PreconditionError(fmt::format("PSDD node {} references an undefined vtree node", n.id));
    if (n.kind == PsddNode::Kind::Decision) {
      if (n.elements.empty()) throw PreconditionError(fmt::format("decision node {} has no elements", n.id));
      for (const auto& e : n.elements) {
        if (e.prime >= i || e.sub >= i)
          throw PreconditionError(fmt::format("decision node {} references a node not defined before it", n.id));
      }
    }
  }
}

// -------------------------------------------------------------- validation

namespace {

/// Per node: does some assignment consistent with `partial` lie in its base?
/// Exact whenever `partial` assigns every variable under the node's vtree.
std::vector<char> support_values(const Psdd& m, const Assignment& partial, NodeIndex upto) {
  std::vector<char> sat(upto + 1, 0);
  for (NodeIndex i = 0; i <= upto; ++i) {
    const auto& n = m.node(i);
    switch (n.kind) {
      case PsddNode::Kind::True:
        sat[i] = 1;
        break;
      case PsddNode::Kind::False:
        sat[i] = 0;
        break;
      case PsddNode::Kind::Literal: {
        const auto& leaf = m.vtree().node(n.vtree);
        auto v = leaf.var ? partial.get(*leaf.var) : std::nullopt;
        sat[i] = !v || *v == n.positive;
        break;
      }
      case PsddNode::Kind::Decision: {
        char any = 0;
        for (const auto& e : n.elements) any |= static_cast<char>(sat[e.prime] && sat[e.sub]);
        sat[i] = any;
        break;
      }
    }
  }
  return sat;
}

std::vector<char> bottom_valued(const Psdd& m) {
  std::vector<char> bot(m.nodes().size(), 0);
  for (NodeIndex i = 0; i < m.nodes().size(); ++i) {
    const auto& n = m.node(i);
    if (n.kind == PsddNode::Kind::False) {
      bot[i] = 1;
    } else if (n.kind == PsddNode::Kind::Decision) {
      bool all = true;
      for (const auto& e : n.elements) all = all && (bot[e.prime] || bot[e.sub]);
      bot[i] = all;
    }
  }
  return bot;
}

}  // namespace

ValidationReport validate(const Psdd& m) {
  ValidationReport report;
  auto violation = [&](const PsddNode& n, const std::string& what) {
    report.violations.push_back(fmt::format("node {}: {}", n.id, what));
  };
  const auto& vt = m.vtree();
  const auto bot = bottom_valued(m);

  for (NodeIndex i = 0; i < m.nodes().size(); ++i) {
    const auto& n = m.node(i);
    const auto& vnode = vt.node(n.vtree);
    if (n.kind != PsddNode::Kind::Decision) {
      // A false terminal mentions no variable, so any vtree node can host it.
      if (!vnode.var && n.kind != PsddNode::Kind::False)
        violation(n, fmt::format("terminal normalized for internal vtree node {}", vnode.id));
      if (n.kind == PsddNode::Kind::True && !(n.theta > 0.0 && n.theta < 1.0))
        violation(n, fmt::format("terminal parameter {} outside (0, 1)", n.theta));
      continue;
    }
    if (vnode.var) {
      violation(n, fmt::format("decision node normalized for vtree leaf {}", vnode.id));
      continue;
    }
    bool normalized = true;
    double sum = 0.0;
    for (std::size_t k = 0; k < n.elements.size(); ++k) {
      const auto& e = n.elements[k];
      if (m.node(e.prime).vtree != vnode.left) {
        violation(n, fmt::format("prime {} not normalized for left vtree child {}", m.node(e.prime).id,
                                 vt.node(vnode.left).id));
        normalized = false;
      }
      if (m.node(e.sub).vtree != vnode.right) {
        violation(n, fmt::format("sub {} not normalized for right vtree child {}", m.node(e.sub).id,
                                 vt.node(vnode.right).id));
        normalized = false;
      }
      if (!std::isfinite(e.theta) || e.theta < 0.0)
        violation(n, fmt::format("element {} has invalid parameter {}", k, e.theta));
      sum += e.theta;
      if ((e.theta == 0.0) != static_cast<bool>(bot[e.sub]))
        violation(n, fmt::format("element {}: theta_i = 0 iff s_i = false is violated (theta = {}, sub {} is {})", k,
                                 e.theta, m.node(e.sub).id, bot[e.sub] ? "false" : "not false"));
      if (bot[e.prime]) violation(n, fmt::format("element {}: prime {} is unsatisfiable", k, m.node(e.prime).id));
    }
    if (std::abs(sum - 1.0) > 1e-12) violation(n, fmt::format("parameters do not sum to 1 (sum = {:.17g})", sum));
    if (!normalized) continue;

    const auto left_vars = vt.vars_under(vnode.left);
    if (left_vars.size() > kMaxEnumerationVars)
      throw BoundExceeded(fmt::format("partition check of node {} needs {} variables", n.id, left_vars.size()));
    NodeIndex max_prime = 0;
    for (const auto& e : n.elements) max_prime = std::max(max_prime, e.prime);
    const std::size_t count = left_vars.size();
    bool reported_overlap = false;
    bool reported_gap = false;
    for (std::uint64_t world = 0; world < (std::uint64_t{1} << count); ++world) {
      Assignment x;
      for (std::size_t b = 0; b < count; ++b) x.set(left_vars[b].id, (world >> (count - 1 - b)) & 1U);
      const auto sat = support_values(m, x, max_prime);
      int hits = 0;
      for (const auto& e : n.elements) hits += sat[e.prime] ? 1 : 0;
      if (hits > 1 && !reported_overlap) {
        violation(n, "primes are not mutually exclusive at " + to_string(x, m.universe()));
        reported_overlap = true;
      }
      if (hits == 0 && !reported_gap) {
        violation(n, "primes are not exhaustive at " + to_string(x, m.universe()));
        reported_gap = true;
      }
    }
  }
  const auto& root = m.node(m.root());
  if (root.vtree != vt.root())
    report.violations.push_back(fmt::format("root node {} is not normalized for the vtree root", root.id));
  if (bot[m.root()]) report.violations.push_back(fmt::format("root node {} is unsatisfiable", root.id));
  return report;
}

// ----------------------------------------------------------------- queries

std::vector<double> node_values(const Psdd& m, const Assignment& partial) {
  std::vector<double> value(m.nodes().size(), 0.0);
  const auto& vt = m.vtree();
  for (NodeIndex i = 0; i < m.nodes().size(); ++i) {
    const auto& n = m.node(i);
    switch (n.kind) {
      case PsddNode::Kind::True: {
        auto v = partial.get(*vt.node(n.vtree).var);
        value[i] = !v ? 1.0 : (*v ? n.theta : 1.0 - n.theta);
        break;
      }
      case PsddNode::Kind::False:
        value[i] = 0.0;
        break;
      case PsddNode::Kind::Literal: {
        auto v = partial.get(*vt.node(n.vtree).var);
        value[i] = !v || *v == n.positive ? 1.0 : 0.0;
        break;
      }
      case PsddNode::Kind::Decision: {
        double sum = 0.0;
        for (const auto& e : n.elements) {
          if (e.theta == 0.0) continue;
          sum += e.theta * value[e.prime] * value[e.sub];
        }
        value[i] = sum;
        break;
      }
    }
  }
  return value;
}

double probability(const Psdd& m, const Assignment& total) {
  for (const auto& v : m.universe().vars())
    if (!total.contains(v.id)) throw UnassignedVariable(v.name);
  return node_values(m, total).back();
}

double marginal(const Psdd& m, const Assignment& partial) {
  if (partial.empty()) return node_values(m, partial).back();
  for (auto [v, b] : partial) {
    if (v >= m.universe().size()) throw PreconditionError(fmt::format("variable id {} outside the PSDD universe", v));
  }
  return node_values(m, partial).back();
}

double conditional(const Psdd& m, const Assignment& query, const Assignment& evidence) {
  if (!query.disjoint(evidence)) throw PreconditionError("query and evidence assign a common variable");
  const double pe = marginal(m, evidence);
  if (pe <= 0.0)
    throw ZeroProbabilityEvidence("evidence '" + to_string(evidence, m.universe()) + "' has probability 0");
  return marginal(m, query.merged(evidence)) / pe;
}

Formula base(const Psdd& m, NodeIndex target) {
  std::vector<std::optional<Formula>> memo(target + 1);
  const auto& vt = m.vtree();
  for (NodeIndex i = 0; i <= target; ++i) {
    const auto& n = m.node(i);
    switch (n.kind) {
      case PsddNode::Kind::True:
        memo[i] = Formula::top();
        break;
      case PsddNode::Kind::False:
        memo[i] = Formula::bottom();
        break;
      case PsddNode::Kind::Literal:
        memo[i] = Formula::literal(m.universe()[*vt.node(n.vtree).var], n.positive);
        break;
      case PsddNode::Kind::Decision: {
        std::vector<Formula> terms;
        terms.reserve(n.elements.size());
        for (const auto& e : n.elements) terms.push_back(Formula::conjunction({*memo[e.prime], *memo[e.sub]}));
        memo[i] = Formula::disjunction(std::move(terms));
        break;
      }
    }
  }
  return *memo[target];
}

}  // namespace tpc
