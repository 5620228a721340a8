#include "tpc/causal_graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <stdexcept>

#include <fmt/format.h>

namespace tpc {

NodeId CausalGraph::add_node(std::string name, NodeKind kind) {
  if (find(name)) throw PreconditionError("duplicate graph node '" + name + "'");
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
  parents_.emplace_back();
  children_.emplace_back();
  return names_.size() - 1;
}

void CausalGraph::add_edge(NodeId from, NodeId to) {
  if (from >= size() || to >= size()) throw PreconditionError("edge endpoint does not exist");
  if (from == to) throw PreconditionError("self loop on '" + names_[from] + "'");
  if (has_edge(from, to)) return;
  if (reaches(to, from))
    throw PreconditionError("edge " + names_[from] + " -> " + names_[to] + " would create a cycle");
  children_[from].insert(std::lower_bound(children_[from].begin(), children_[from].end(), to), to);
  parents_[to].insert(std::lower_bound(parents_[to].begin(), parents_[to].end(), from), from);
}

std::size_t CausalGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : children_) n += c.size();
  return n;
}

bool CausalGraph::has_edge(NodeId from, NodeId to) const {
  const auto& c = children_.at(from);
  return std::binary_search(c.begin(), c.end(), to);
}

std::optional<NodeId> CausalGraph::find(std::string_view name) const {
  for (NodeId i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

NodeId CausalGraph::at(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw PreconditionError("unknown graph node '" + std::string(name) + "'");
}

std::vector<std::pair<NodeId, NodeId>> CausalGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId v = 0; v < size(); ++v)
    for (NodeId c : children_[v]) out.emplace_back(v, c);
  return out;
}

bool CausalGraph::reaches(NodeId from, NodeId to) const {
  std::vector<bool> seen(size(), false);
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    if (seen[v]) continue;
    seen[v] = true;
    for (NodeId c : children_[v]) stack.push_back(c);
  }
  return false;
}

std::vector<NodeId> CausalGraph::topological_order() const {
  std::vector<std::size_t> indeg(size());
  for (NodeId v = 0; v < size(); ++v) indeg[v] = parents_[v].size();
  std::deque<NodeId> ready;
  for (NodeId v = 0; v < size(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::vector<NodeId> order;
  order.reserve(size());
  while (!ready.empty()) {
    const NodeId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (NodeId c : children_[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return order;
}

std::vector<bool> CausalGraph::ancestors_of(const NodeSet& targets) const {
  std::vector<bool> anc(size(), false);
  std::vector<NodeId> stack;
  for (NodeId t : targets)
    for (NodeId p : parents_.at(t)) stack.push_back(p);
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (anc[v]) continue;
    anc[v] = true;
    for (NodeId p : parents_[v]) stack.push_back(p);
  }
  return anc;
}

std::vector<bool> CausalGraph::descendants_of(NodeId v) const {
  std::vector<bool> desc(size(), false);
  std::vector<NodeId> stack(children_.at(v).begin(), children_.at(v).end());
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (desc[u]) continue;
    desc[u] = true;
    for (NodeId c : children_[u]) stack.push_back(c);
  }
  return desc;
}

NodeSet CausalGraph::nodes_of_kind(NodeKind k) const {
  NodeSet out;
  for (NodeId v = 0; v < size(); ++v)
    if (kinds_[v] == k) out.push_back(v);
  return out;
}

namespace {

std::vector<bool> mask_of(const CausalGraph& g, const NodeSet& s) {
  std::vector<bool> m(g.size(), false);
  for (NodeId v : s) {
    if (v >= g.size()) throw PreconditionError(fmt::format("node id {} does not exist", v));
    m[v] = true;
  }
  return m;
}

void require_disjoint(const CausalGraph& g, std::initializer_list<const NodeSet*> sets) {
  std::vector<int> owner(g.size(), -1);
  int k = 0;
  for (const NodeSet* s : sets) {
    for (NodeId v : *s) {
      if (v >= g.size()) throw PreconditionError(fmt::format("node id {} does not exist", v));
      if (owner[v] != -1 && owner[v] != k)
        throw PreconditionError("node '" + g.name(v) + "' appears in more than one argument set");
      owner[v] = k;
    }
    ++k;
  }
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  require_disjoint(g, {&x, &y, &z});
  if (x.empty() || y.empty()) return true;
  const auto in_z = mask_of(g, z);
  const auto in_y = mask_of(g, y);
  // Colliders are open when they are in Z or have a descendant in Z.
  auto opens_collider = g.ancestors_of(z);
  for (NodeId v : z) opens_collider[v] = true;

  // Reachability over (node, direction): `up` means the trail arrived from a
  // child, `down` means it arrived from a parent.
  enum Dir : int { up = 0, down = 1 };
  std::vector<std::array<bool, 2>> visited(g.size(), {false, false});
  std::vector<std::pair<NodeId, Dir>> stack;
  for (NodeId v : x) stack.emplace_back(v, up);
  while (!stack.empty()) {
    auto [v, dir] = stack.back();
    stack.pop_back();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (!in_z[v] && in_y[v]) return false;
    if (dir == up) {
      if (in_z[v]) continue;
      for (NodeId p : g.parents(v)) stack.emplace_back(p, up);
      for (NodeId c : g.children(v)) stack.emplace_back(c, down);
    } else {
      if (!in_z[v])
        for (NodeId c : g.children(v)) stack.emplace_back(c, down);
      if (opens_collider[v])
        for (NodeId p : g.parents(v)) stack.emplace_back(p, up);
    }
  }
  return true;
}

CausalGraph mutilate(const CausalGraph& g, const NodeSet& remove_into, const NodeSet& remove_out_of) {
  const auto into = mask_of(g, remove_into);
  const auto out_of = mask_of(g, remove_out_of);
  CausalGraph h;
  for (NodeId v = 0; v < g.size(); ++v) h.add_node(g.name(v), g.kind(v));
  for (auto [from, to] : g.edges())
    if (!into[to] && !out_of[from]) h.add_edge(from, to);
  return h;
}

bool rule1_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
  require_disjoint(g, {&x, &y, &z, &w});
  return d_separated(mutilate(g, x, {}), y, z, set_union(x, w));
}

bool rule2_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
  require_disjoint(g, {&x, &y, &z, &w});
  return d_separated(mutilate(g, x, z), y, z, set_union(x, w));
}

bool rule3_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
  require_disjoint(g, {&x, &y, &z, &w});
  const auto g_x = mutilate(g, x, {});
  const auto anc_w = g_x.ancestors_of(w);
  NodeSet z_w;
  for (NodeId v : z)
    if (!anc_w[v]) z_w.push_back(v);
  return d_separated(mutilate(g, set_union(x, z_w), {}), y, z, set_union(x, w));
}

bool satisfies_backdoor(const CausalGraph& g, NodeId x, NodeId y, const NodeSet& z) {
  if (x == y) throw PreconditionError("back-door criterion needs distinct nodes");
  const NodeSet xs{x}, ys{y};
  require_disjoint(g, {&xs, &ys, &z});
  const auto desc = g.descendants_of(x);
  for (NodeId v : z)
    if (desc[v]) return false;
  // Paths with an edge into X are exactly the paths left once X's outgoing
  // edges are removed.
  return d_separated(mutilate(g, {}, xs), xs, ys, z);
}

bool sink_intervention_trivial(const CausalGraph& g, const NodeSet& x) {
  mask_of(g, x);
  for (NodeId v : x)
    if (!g.children(v).empty()) return false;
  const auto in_x = mask_of(g, x);
  NodeSet rest;
  for (NodeId v = 0; v < g.size(); ++v)
    if (!in_x[v]) rest.push_back(v);
  if (!rule3_applies(g, {}, rest, x, {}))
    throw std::logic_error("sink intervention passed the out-degree test but failed rule 3");
  return true;
}

std::string to_dot(const CausalGraph& g, std::string_view graph_name) {
  std::string out = fmt::format("digraph {} {{\n", graph_name);
  for (NodeId v = 0; v < g.size(); ++v) {
    const bool exo = g.kind(v) == NodeKind::Exogenous;
    out += fmt::format("  \"{}\" [shape=ellipse, style={}];\n", g.name(v), exo ? "dashed" : "solid");
  }
  for (auto [from, to] : g.edges()) out += fmt::format("  \"{}\" -> \"{}\";\n", g.name(from), g.name(to));
  out += "}\n";
  return out;
}

}  // namespace tpc
