#include "tpc/spn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "tpc/text.hpp"

namespace tpc {

SpnIndex Spn::Builder::push(SpnNode node) {
  nodes_.push_back(std::move(node));
  return static_cast<SpnIndex>(nodes_.size() - 1);
}

SpnIndex Spn::Builder::indicator(std::string_view var, bool positive) {
  SpnNode n;
  n.kind = SpnNode::Kind::Indicator;
  n.id = static_cast<int>(nodes_.size());
  n.var = universe_.intern(var);
  n.positive = positive;
  return push(std::move(n));
}

SpnIndex Spn::Builder::product(std::vector<SpnIndex> children) {
  SpnNode n;
  n.kind = SpnNode::Kind::Product;
  n.id = static_cast<int>(nodes_.size());
  n.children = std::move(children);
  return push(std::move(n));
}

SpnIndex Spn::Builder::sum(std::vector<SpnIndex> children, std::vector<double> weights) {
  SpnNode n;
  n.kind = SpnNode::Kind::Sum;
  n.id = static_cast<int>(nodes_.size());
  n.children = std::move(children);
  n.weights = std::move(weights);
  return push(std::move(n));
}

Spn Spn::Builder::build() && { return Spn(std::move(universe_), std::move(nodes_)); }

Spn::Spn(Universe universe, std::vector<SpnNode> nodes) : universe_(std::move(universe)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw PreconditionError("empty SPN");
  std::unordered_map<int, SpnIndex> ids;
  for (SpnIndex i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!ids.emplace(n.id, i).second) throw PreconditionError(fmt::format("duplicate SPN node id {}", n.id));
    if (n.kind == SpnNode::Kind::Indicator) {
      if (n.var >= universe_.size()) throw PreconditionError(fmt::format("indicator {} has an unknown variable", n.id));
      continue;
    }
    if (n.children.empty()) throw PreconditionError(fmt::format("SPN node {} has no children", n.id));
    for (SpnIndex c : n.children)
      if (c >= i) throw PreconditionError(fmt::format("SPN node {} references a node not defined before it", n.id));
    if (n.kind == SpnNode::Kind::Sum) {
      if (n.weights.size() != n.children.size())
        throw PreconditionError(fmt::format("sum node {} has {} children but {} weights", n.id, n.children.size(),
                                            n.weights.size()));
      double total = 0.0;
      for (double w : n.weights) {
        if (!std::isfinite(w) || w < 0.0) throw PreconditionError(fmt::format("sum node {} has weight {}", n.id, w));
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw PreconditionError(fmt::format("sum node {} weights sum to {:.17g}, not 1", n.id, total));
    }
  }
  if (scope(*this, root()).size() != universe_.size())
    throw PreconditionError("root scope does not cover every variable");
}

std::vector<double> node_values(const Spn& s, const Assignment& partial) {
  std::vector<double> value(s.nodes().size(), 0.0);
  for (SpnIndex i = 0; i < s.nodes().size(); ++i) {
    const auto& n = s.node(i);
    switch (n.kind) {
      case SpnNode::Kind::Indicator: {
        auto v = partial.get(n.var);
        value[i] = !v || *v == n.positive ? 1.0 : 0.0;
        break;
      }
      case SpnNode::Kind::Product: {
        double p = 1.0;
        for (SpnIndex c : n.children) p *= value[c];
        value[i] = p;
        break;
      }
      case SpnNode::Kind::Sum: {
        double t = 0.0;
        for (std::size_t k = 0; k < n.children.size(); ++k) t += n.weights[k] * value[n.children[k]];
        value[i] = t;
        break;
      }
    }
  }
  return value;
}

double evaluate(const Spn& s, const Assignment& partial) { return node_values(s, partial).back(); }

namespace {

std::vector<std::vector<VarId>> all_scopes(const Spn& s, SpnIndex upto) {
  std::vector<std::vector<VarId>> sc(upto + 1);
  for (SpnIndex i = 0; i <= upto; ++i) {
    const auto& n = s.node(i);
    if (n.kind == SpnNode::Kind::Indicator) {
      sc[i] = {n.var};
      continue;
    }
    std::vector<VarId> acc;
    for (SpnIndex c : n.children) {
      std::vector<VarId> merged;
      std::set_union(acc.begin(), acc.end(), sc[c].begin(), sc[c].end(), std::back_inserter(merged));
      acc = std::move(merged);
    }
    sc[i] = std::move(acc);
  }
  return sc;
}

}  // namespace

std::vector<VarId> scope(const Spn& s, SpnIndex node) { return all_scopes(s, node)[node]; }

StructureReport check_structure(const Spn& s) {
  const auto sc = all_scopes(s, s.root());
  StructureReport r;
  r.complete = true;
  r.decomposable = true;
  for (const auto& n : s.nodes()) {
    if (n.kind == SpnNode::Kind::Sum) {
      for (SpnIndex c : n.children)
        if (sc[c] != sc[n.children.front()]) r.complete = false;
    } else if (n.kind == SpnNode::Kind::Product) {
      std::vector<VarId> seen;
      for (SpnIndex c : n.children) {
        std::vector<VarId> common;
        std::set_intersection(seen.begin(), seen.end(), sc[c].begin(), sc[c].end(), std::back_inserter(common));
        if (!common.empty()) r.decomposable = false;
        std::vector<VarId> merged;
        std::set_union(seen.begin(), seen.end(), sc[c].begin(), sc[c].end(), std::back_inserter(merged));
        seen = std::move(merged);
      }
    }
  }
  const std::size_t nv = s.universe().size();
  if (nv > kMaxSelectivityVars) return r;
  bool selective = true;
  for (std::uint64_t world = 0; world < (std::uint64_t{1} << nv) && selective; ++world) {
    Assignment a;
    for (std::size_t b = 0; b < nv; ++b) a.set(static_cast<VarId>(b), (world >> (nv - 1 - b)) & 1U);
    const auto value = node_values(s, a);
    for (const auto& n : s.nodes()) {
      if (n.kind != SpnNode::Kind::Sum) continue;
      const auto nonzero =
          std::count_if(n.children.begin(), n.children.end(), [&](SpnIndex c) { return value[c] != 0.0; });
      if (nonzero > 1) {
        selective = false;
        break;
      }
    }
  }
  r.selective = selective;
  return r;
}

CausalGraph BnTopology::graph() const {
  CausalGraph g;
  for (const auto& v : observables) g.add_node(v.name, NodeKind::Endogenous);
  const std::size_t base = g.size();
  for (std::size_t k = 0; k < latent_sums.size(); ++k) g.add_node(fmt::format("h{}", k + 1), NodeKind::Exogenous);
  for (auto [latent, obs] : edges) g.add_edge(base + latent, obs);
  return g;
}

BnTopology to_bn_topology(const Spn& s) {
  const auto report = check_structure(s);
  if (!report.complete) throw PreconditionError("SPN is not complete");
  if (!report.decomposable) throw PreconditionError("SPN is not decomposable");
  const auto sc = all_scopes(s, s.root());
  BnTopology t;
  for (const auto& v : s.universe().vars()) t.observables.push_back(v);
  for (SpnIndex i = 0; i < s.nodes().size(); ++i) {
    if (s.node(i).kind != SpnNode::Kind::Sum) continue;
    const std::size_t latent = t.latent_sums.size();
    t.latent_sums.push_back(i);
    for (VarId v : sc[i]) t.edges.emplace_back(latent, static_cast<std::size_t>(v));
  }
  return t;
}

bool verify_spn_triviality(const CausalGraph& g, const NodeSet& x) {
  if (x.empty()) throw PreconditionError("intervention set must be non-empty");
  std::vector<bool> in_x(g.size(), false);
  for (NodeId v : x) {
    if (v >= g.size()) throw PreconditionError(fmt::format("node id {} does not exist", v));
    if (g.kind(v) == NodeKind::Exogenous)
      throw PreconditionError("'" + g.name(v) + "' is latent; the check concerns observables");
    in_x[v] = true;
  }
  NodeSet rest;
  for (NodeId v = 0; v < g.size(); ++v)
    if (!in_x[v]) rest.push_back(v);
  return rule3_applies(g, {}, rest, x, {});
}

bool verify_spn_triviality(const BnTopology& t, std::span<const std::string> x) {
  const auto g = t.graph();
  NodeSet ids;
  for (const auto& name : x) ids.push_back(g.at(name));
  return verify_spn_triviality(g, ids);
}

// -------------------------------------------------------------------- text

Spn parse_spn(std::string_view input) {
  using text::parse_number;
  const auto lines = text::tokenize(input);
  if (lines.empty()) throw ParseError(0, "empty input, expected 'spn N' header");
  const auto& h = lines.front();
  if (h.tokens.size() != 2 || h.tokens[0] != "spn") throw ParseError(h.number, "expected header 'spn N'");
  const auto count = parse_number<std::size_t>(h, h.tokens[1], "node count");
  if (count != lines.size() - 1)
    throw ParseError(h.number, fmt::format("header declares {} nodes but {} are defined", count, lines.size() - 1));

  Spn::Builder b;
  std::unordered_map<int, SpnIndex> ids;
  auto child = [&](const text::Line& line, std::string_view tok) {
    const auto id = parse_number<int>(line, tok, "node id");
    auto it = ids.find(id);
    if (it == ids.end()) throw ParseError(line.number, fmt::format("unknown node {}", id));
    return it->second;
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.tokens.size() < 3) throw ParseError(line.number, "too few fields");
    SpnNode n;
    n.id = parse_number<int>(line, line.tokens[1], "node id");
    const auto kind = line.tokens[0];
    if (kind == "I") {
      if (line.tokens.size() != 3) throw ParseError(line.number, "expected 'I <id> <+|-><varname>'");
      const auto lit = line.tokens[2];
      if (lit.size() < 2 || (lit[0] != '+' && lit[0] != '-'))
        throw ParseError(line.number, "literal must be +name or -name");
      n.kind = SpnNode::Kind::Indicator;
      n.positive = lit[0] == '+';
      n.var = b.universe().intern(lit.substr(1));
    } else if (kind == "P") {
      n.kind = SpnNode::Kind::Product;
      for (std::size_t t = 2; t < line.tokens.size(); ++t) n.children.push_back(child(line, line.tokens[t]));
    } else if (kind == "S") {
      n.kind = SpnNode::Kind::Sum;
      const auto k_children = parse_number<std::size_t>(line, line.tokens[2], "child count");
      if (line.tokens.size() != 3 + 2 * k_children)
        throw ParseError(line.number, "expected 'S <id> <k> (<child-id> <weight>)*k'");
      for (std::size_t t = 0; t < k_children; ++t) {
        n.children.push_back(child(line, line.tokens[3 + 2 * t]));
        n.weights.push_back(parse_number<double>(line, line.tokens[4 + 2 * t], "weight"));
      }
    } else {
      throw ParseError(line.number, "unknown SPN line kind '" + std::string(kind) + "'");
    }
    const int id = n.id;
    if (ids.contains(id)) throw ParseError(line.number, fmt::format("duplicate node id {}", id));
    ids.emplace(id, b.push(std::move(n)));
  }
  try {
    return std::move(b).build();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize(const Spn& s) {
  std::string out = fmt::format("spn {}\n", s.nodes().size());
  for (const auto& n : s.nodes()) {
    switch (n.kind) {
      case SpnNode::Kind::Indicator:
        out += fmt::format("I {} {}{}\n", n.id, n.positive ? '+' : '-', s.universe()[n.var].name);
        break;
      case SpnNode::Kind::Product:
        out += fmt::format("P {}", n.id);
        for (SpnIndex c : n.children) out += fmt::format(" {}", s.node(c).id);
        out += '\n';
        break;
      case SpnNode::Kind::Sum:
        out += fmt::format("S {} {}", n.id, n.children.size());
        for (std::size_t k = 0; k < n.children.size(); ++k)
          out += fmt::format(" {} {:.17g}", s.node(n.children[k]).id, n.weights[k]);
        out += '\n';
        break;
    }
  }
  return out;
}

}  // namespace tpc
