#pragma once

// Probabilistic sentential decision diagrams: vtrees, nodes, validation,
// exact queries, base formulas and the text file formats.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tpc/formula.hpp"

namespace tpc {

/// Position of a node inside its owning Vtree or Psdd.
using NodeIndex = std::uint32_t;

/// Binary tree over variables. Nodes are stored children-first; the root is
/// the last node.
class Vtree {
 public:
  struct Node {
    int id = 0;  ///< identifier used in files
    std::optional<VarId> var;  ///< set on leaves
    NodeIndex left = 0;
    NodeIndex right = 0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  class Builder {
   public:
    NodeIndex leaf(std::string var_name);
    NodeIndex leaf(std::string var_name, int id);
    NodeIndex internal(NodeIndex left, NodeIndex right);
    NodeIndex internal(NodeIndex left, NodeIndex right, int id);
    /// The last node added becomes the root. Throws PreconditionError unless
    /// every node except the root has exactly one parent.
    Vtree build() &&;

   private:
    NodeIndex push(Node n);
    Universe universe_;
    std::vector<Node> nodes_;
  };

  const Universe& universe() const noexcept { return universe_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  NodeIndex root() const noexcept { return static_cast<NodeIndex>(nodes_.size() - 1); }
  bool is_leaf(NodeIndex i) const { return node(i).var.has_value(); }
  std::optional<NodeIndex> find_id(int id) const;

  /// Variables under `i`, left to right.
  std::vector<Var> vars_under(NodeIndex i) const;

  friend bool operator==(const Vtree& a, const Vtree& b) {
    return a.universe_ == b.universe_ && a.nodes_ == b.nodes_;
  }

 private:
  Universe universe_;
  std::vector<Node> nodes_;
  std::unordered_map<int, NodeIndex> by_id_;
};

struct PsddElement {
  NodeIndex prime = 0;
  NodeIndex sub = 0;
  double theta = 0.0;

  friend bool operator==(const PsddElement&, const PsddElement&) = default;
};

struct PsddNode {
  enum class Kind : std::uint8_t { True, False, Literal, Decision };

  Kind kind = Kind::True;
  int id = 0;  ///< identifier used in files
  NodeIndex vtree = 0;
  double theta = 0.0;  ///< True terminals: Pr(X)
  bool positive = true;  ///< Literal terminals
  std::vector<PsddElement> elements;  ///< Decision nodes

  friend bool operator==(const PsddNode&, const PsddNode&) = default;
};

/// A PSDD over the universe of its vtree. Nodes are stored children-first;
/// the root is the last node. Construction only checks references;
/// validate() checks the semantic invariants.
class Psdd {
 public:
  class Builder {
   public:
    explicit Builder(Vtree vtree) : vtree_(std::move(vtree)) {}

    const Vtree& vtree() const noexcept { return vtree_; }

    NodeIndex top(NodeIndex vtree_node, double theta);
    NodeIndex bottom(NodeIndex vtree_node);
    NodeIndex literal(NodeIndex vtree_node, bool positive);
    NodeIndex decision(NodeIndex vtree_node, std::vector<PsddElement> elements);
    /// Appends a node with an explicit file id.
    NodeIndex push(PsddNode node);
    Psdd build() &&;

   private:
    Vtree vtree_;
    std::vector<PsddNode> nodes_;
  };

  const Vtree& vtree() const noexcept { return vtree_; }
  const Universe& universe() const noexcept { return vtree_.universe(); }
  std::span<const PsddNode> nodes() const noexcept { return nodes_; }
  const PsddNode& node(NodeIndex i) const { return nodes_.at(i); }
  NodeIndex root() const noexcept { return static_cast<NodeIndex>(nodes_.size() - 1); }

  friend bool operator==(const Psdd&, const Psdd&) = default;

 private:
  Psdd(Vtree vtree, std::vector<PsddNode> nodes);

  Vtree vtree_;
  std::vector<PsddNode> nodes_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks normalization, parameter constraints, the θ_i = 0 ⇔ s_i = ⊥
/// condition and that primes partition their vtree's left variables.
/// Throws BoundExceeded when a partition check would enumerate more than
/// kMaxEnumerationVars variables.
ValidationReport validate(const Psdd& m);

/// Pr(a) for a total assignment. Throws UnassignedVariable when partial.
double probability(const Psdd& m, const Assignment& total);

/// Σ over completions of `partial`, in one bottom-up pass.
double marginal(const Psdd& m, const Assignment& partial);

/// Pr(query | evidence). Throws PreconditionError on overlapping assignments
/// and ZeroProbabilityEvidence when Pr(evidence) = 0.
double conditional(const Psdd& m, const Assignment& query, const Assignment& evidence);

/// One bottom-up pass: value of every node under `partial` with unassigned
/// variables summed out.
std::vector<double> node_values(const Psdd& m, const Assignment& partial);

/// Base [n]: ⊤, ⊥ and literals map to themselves, a decision node to the
/// disjunction of [p_i] ∧ [s_i]. Shared nodes share their formula.
Formula base(const Psdd& m, NodeIndex n);
inline Formula base(const Psdd& m) { return base(m, m.root()); }

Vtree parse_vtree(std::string_view text);
Psdd parse_psdd(std::string_view text, Vtree vtree);
std::string serialize(const Vtree& v);
/// Parameters are printed with 17 significant digits.
std::string serialize(const Psdd& m);

}  // namespace tpc
