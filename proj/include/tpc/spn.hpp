#pragma once

// Sum-product networks over Boolean indicators, structural checks, and the
// latent/observable BN topology used to test intervention triviality.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/causal_graph.hpp"
#include "tpc/formula.hpp"

namespace tpc {

using SpnIndex = std::uint32_t;

struct SpnNode {
  enum class Kind : std::uint8_t { Indicator, Product, Sum };

  Kind kind = Kind::Indicator;
  int id = 0;  ///< identifier used in files
  VarId var = 0;  ///< Indicator
  bool positive = true;  ///< Indicator
  std::vector<SpnIndex> children;  ///< Product, Sum
  std::vector<double> weights;  ///< Sum, parallel to children

  friend bool operator==(const SpnNode&, const SpnNode&) = default;
};

/// Rooted DAG stored children-first; the root is the last node. Sum weights
/// must be non-negative and sum to 1.
class Spn {
 public:
  class Builder {
   public:
    Builder() = default;
    explicit Builder(Universe universe) : universe_(std::move(universe)) {}

    Universe& universe() noexcept { return universe_; }

    SpnIndex indicator(std::string_view var, bool positive);
    SpnIndex product(std::vector<SpnIndex> children);
    SpnIndex sum(std::vector<SpnIndex> children, std::vector<double> weights);
    SpnIndex push(SpnNode node);
    /// Throws PreconditionError on unnormalized weights, dangling children or
    /// a root whose scope is not the whole universe.
    Spn build() &&;

   private:
    Universe universe_;
    std::vector<SpnNode> nodes_;
  };

  const Universe& universe() const noexcept { return universe_; }
  std::span<const SpnNode> nodes() const noexcept { return nodes_; }
  const SpnNode& node(SpnIndex i) const { return nodes_.at(i); }
  SpnIndex root() const noexcept { return static_cast<SpnIndex>(nodes_.size() - 1); }

  friend bool operator==(const Spn&, const Spn&) = default;

 private:
  Spn(Universe universe, std::vector<SpnNode> nodes);
  Universe universe_;
  std::vector<SpnNode> nodes_;
};

/// Network polynomial value; indicators of unassigned variables are 1.
double evaluate(const Spn& s, const Assignment& partial);
/// Values of every node, bottom-up.
std::vector<double> node_values(const Spn& s, const Assignment& partial);

/// Variables below `node`, sorted by id.
std::vector<VarId> scope(const Spn& s, SpnIndex node);

struct StructureReport {
  bool complete = false;
  bool decomposable = false;
  /// Unset when the universe is larger than kMaxSelectivityVars.
  std::optional<bool> selective;
};

inline constexpr std::size_t kMaxSelectivityVars = 12;

StructureReport check_structure(const Spn& s);

/// Bipartite latent → observable topology: one observable per variable, one
/// latent per sum node, an edge from a latent to every variable in its scope.
struct BnTopology {
  std::vector<Var> observables;
  std::vector<SpnIndex> latent_sums;  ///< sum node behind each latent
  std::vector<std::pair<std::size_t, std::size_t>> edges;  ///< (latent, observable)

  /// Latents are named h1, h2, ... and are exogenous; observables keep their
  /// variable names and come first.
  CausalGraph graph() const;
};

/// Throws PreconditionError unless `s` is complete and decomposable.
BnTopology to_bn_topology(const Spn& s);

/// Rule-3 condition (X ⟂ everything else) in G with edges into X removed.
/// `x` holds observable names. Throws PreconditionError when `x` is empty,
/// names a latent, or names an unknown node.
bool verify_spn_triviality(const BnTopology& t, std::span<const std::string> x);
/// Same check on an arbitrary graph; exogenous members of `x` are rejected.
bool verify_spn_triviality(const CausalGraph& g, const NodeSet& x);

Spn parse_spn(std::string_view text);
/// Weights are printed with 17 significant digits.
std::string serialize(const Spn& s);

}  // namespace tpc
