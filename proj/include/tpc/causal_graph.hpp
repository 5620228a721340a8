#pragma once

// Causal DAGs: d-separation, graph surgery, do-calculus rule predicates, the
// back-door criterion and the sink-intervention check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/error.hpp"

namespace tpc {

using NodeId = std::size_t;
/// Node sets are passed as id lists; order and duplicates are irrelevant.
using NodeSet = std::vector<NodeId>;

enum class NodeKind : std::uint8_t { Endogenous, Exogenous };

class CausalGraph {
 public:
  NodeId add_node(std::string name, NodeKind kind = NodeKind::Endogenous);
  /// Throws PreconditionError on unknown endpoints, self loops or cycles.
  /// Adding an existing edge is a no-op.
  void add_edge(NodeId from, NodeId to);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept;
  const std::string& name(NodeId v) const { return names_.at(v); }
  NodeKind kind(NodeId v) const { return kinds_.at(v); }
  std::span<const NodeId> parents(NodeId v) const { return parents_.at(v); }
  std::span<const NodeId> children(NodeId v) const { return children_.at(v); }
  bool has_edge(NodeId from, NodeId to) const;
  std::optional<NodeId> find(std::string_view name) const;
  NodeId at(std::string_view name) const;

  /// All edges sorted by (from, to).
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  std::vector<NodeId> topological_order() const;
  /// Nodes with a directed path into some member of `targets` (excluding
  /// the targets themselves unless reachable from another target).
  std::vector<bool> ancestors_of(const NodeSet& targets) const;
  std::vector<bool> descendants_of(NodeId v) const;

  NodeSet nodes_of_kind(NodeKind k) const;

  friend bool operator==(const CausalGraph&, const CausalGraph&) = default;

 private:
  bool reaches(NodeId from, NodeId to) const;

  std::vector<std::string> names_;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
};

/// (X ⟂ Y | Z) by d-separation. Throws PreconditionError when the sets
/// overlap or mention unknown nodes. Empty X or Y is trivially separated.
bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// Copy of `g` without edges whose head is in `remove_into` and edges whose
/// tail is in `remove_out_of`.
CausalGraph mutilate(const CausalGraph& g, const NodeSet& remove_into, const NodeSet& remove_out_of);

/// Do-calculus graph conditions. X, Y, Z and W must be pairwise disjoint.
bool rule1_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w);
bool rule2_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w);
bool rule3_applies(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w);

/// Back-door criterion for the pair (x, y) relative to `z`.
bool satisfies_backdoor(const CausalGraph& g, NodeId x, NodeId y, const NodeSet& z);

/// True iff no member of `x` has an outgoing edge. When true, also confirms
/// rule 3 for (∅, everything else, x, ∅) and throws std::logic_error if that
/// cross-check ever fails.
bool sink_intervention_trivial(const CausalGraph& g, const NodeSet& x);

/// Graphviz export with node ids in order; exogenous nodes dashed.
std::string to_dot(const CausalGraph& g, std::string_view graph_name = "G");

}  // namespace tpc
