#include <cctype>
#include <unordered_map>

#include <fmt/format.h>

#include "tpc/psdd.hpp"
#include "tpc/text.hpp"

namespace tpc {

namespace text {

std::vector<Line> tokenize(std::string_view input) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!input.empty()) {
    ++number;
    const auto eol = input.find('\n');
    auto raw = input.substr(0, eol);
    input = eol == std::string_view::npos ? std::string_view{} : input.substr(eol + 1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      const auto start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.push_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace text

namespace {

using text::Line;
using text::parse_number;

std::size_t read_header(const std::vector<Line>& lines, std::string_view keyword) {
  if (lines.empty()) throw ParseError(0, "empty input, expected '" + std::string(keyword) + " N' header");
  const auto& h = lines.front();
  if (h.tokens.size() != 2 || h.tokens[0] != keyword)
    throw ParseError(h.number, "expected header '" + std::string(keyword) + " N'");
  const auto n = parse_number<std::size_t>(h, h.tokens[1], "node count");
  if (n != lines.size() - 1)
    throw ParseError(h.number, fmt::format("header declares {} nodes but {} are defined", n, lines.size() - 1));
  return n;
}

void expect_tokens(const Line& line, std::size_t n, const char* form) {
  if (line.tokens.size() != n) throw ParseError(line.number, std::string("expected '") + form + "'");
}

}  // namespace

Vtree parse_vtree(std::string_view input) {
  const auto lines = text::tokenize(input);
  read_header(lines, "vtree");
  Vtree::Builder b;
  std::unordered_map<int, NodeIndex> ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto kind = line.tokens[0];
    NodeIndex idx = 0;
    int id = 0;
    try {
      if (kind == "L") {
        expect_tokens(line, 3, "L <id> <varname>");
        id = parse_number<int>(line, line.tokens[1], "node id");
        idx = b.leaf(std::string(line.tokens[2]), id);
      } else if (kind == "I") {
        expect_tokens(line, 4, "I <id> <left-id> <right-id>");
        id = parse_number<int>(line, line.tokens[1], "node id");
        const auto l = parse_number<int>(line, line.tokens[2], "node id");
        const auto r = parse_number<int>(line, line.tokens[3], "node id");
        if (!ids.contains(l) || !ids.contains(r)) throw ParseError(line.number, "unknown node");
        idx = b.internal(ids[l], ids[r], id);
      } else {
        throw ParseError(line.number, "unknown vtree line kind '" + std::string(kind) + "'");
      }
    } catch (const PreconditionError& e) {
      throw ParseError(line.number, e.what());
    }
    if (!ids.emplace(id, idx).second) throw ParseError(line.number, fmt::format("duplicate node id {}", id));
  }
  try {
    return std::move(b).build();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
}

Psdd parse_psdd(std::string_view input, Vtree vtree) {
  const auto lines = text::tokenize(input);
  read_header(lines, "psdd");
  std::unordered_map<int, NodeIndex> ids;
  Psdd::Builder b(std::move(vtree));
  const auto& vt = b.vtree();

  auto vtree_ref = [&](const Line& line, std::string_view tok) {
    const auto vid = parse_number<int>(line, tok, "vtree id");
    auto idx = vt.find_id(vid);
    if (!idx) throw ParseError(line.number, fmt::format("unknown vtree node {}", vid));
    return *idx;
  };
  auto node_ref = [&](const Line& line, std::string_view tok) {
    const auto nid = parse_number<int>(line, tok, "node id");
    auto it = ids.find(nid);
    if (it == ids.end()) throw ParseError(line.number, fmt::format("unknown node {}", nid));
    return it->second;
  };
  auto leaf_var = [&](const Line& line, NodeIndex v) {
    if (!vt.is_leaf(v)) throw ParseError(line.number, "terminal must reference a vtree leaf");
    return *vt.node(v).var;
  };

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto kind = line.tokens[0];
    PsddNode node;
    if (line.tokens.size() < 3) throw ParseError(line.number, "too few fields");
    node.id = parse_number<int>(line, line.tokens[1], "node id");
    node.vtree = vtree_ref(line, line.tokens[2]);
    if (kind == "T") {
      expect_tokens(line, 4, "T <id> <vtree-id> <theta>");
      leaf_var(line, node.vtree);
      node.kind = PsddNode::Kind::True;
      node.theta = parse_number<double>(line, line.tokens[3], "parameter");
    } else if (kind == "F") {
      expect_tokens(line, 3, "F <id> <vtree-id>");
      node.kind = PsddNode::Kind::False;
    } else if (kind == "L") {
      if (line.tokens.size() != 3 && line.tokens.size() != 4)
        throw ParseError(line.number, "expected 'L <id> <vtree-id> <+|-><varname>'");
      node.kind = PsddNode::Kind::Literal;
      const VarId var = leaf_var(line, node.vtree);
      // A bare `L <id> <vtree-id>` is the positive literal of the leaf.
      if (line.tokens.size() == 4) {
        const auto lit = line.tokens[3];
        if (lit.size() < 2 || (lit[0] != '+' && lit[0] != '-'))
          throw ParseError(line.number, "literal must be +name or -name");
        node.positive = lit[0] == '+';
        if (lit.substr(1) != vt.universe()[var].name)
          throw ParseError(line.number, fmt::format("literal '{}' does not match vtree leaf variable '{}'",
                                                    lit.substr(1), vt.universe()[var].name));
      }
    } else if (kind == "D") {
      if (line.tokens.size() < 4) throw ParseError(line.number, "expected 'D <id> <vtree-id> <k> ...'");
      node.kind = PsddNode::Kind::Decision;
      const auto count = parse_number<std::size_t>(line, line.tokens[3], "element count");
      if (count == 0) throw ParseError(line.number, "decision node with no elements");
      expect_tokens(line, 4 + 3 * count, "D <id> <vtree-id> <k> (<prime-id> <sub-id> <theta>)*k");
      for (std::size_t e = 0; e < count; ++e) {
        PsddElement el;
        el.prime = node_ref(line, line.tokens[4 + 3 * e]);
        el.sub = node_ref(line, line.tokens[5 + 3 * e]);
        el.theta = parse_number<double>(line, line.tokens[6 + 3 * e], "parameter");
        node.elements.push_back(el);
      }
    } else {
      throw ParseError(line.number, "unknown PSDD line kind '" + std::string(kind) + "'");
    }
    const int id = node.id;
    if (ids.contains(id)) throw ParseError(line.number, fmt::format("duplicate node id {}", id));
    ids.emplace(id, b.push(std::move(node)));
  }
  try {
    return std::move(b).build();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize(const Vtree& v) {
  std::string out = fmt::format("vtree {}\n", v.nodes().size());
  for (const auto& n : v.nodes()) {
    if (n.var) {
      out += fmt::format("L {} {}\n", n.id, v.universe()[*n.var].name);
    } else {
      out += fmt::format("I {} {} {}\n", n.id, v.node(n.left).id, v.node(n.right).id);
    }
  }
  return out;
}

std::string serialize(const Psdd& m) {
  std::string out = fmt::format("psdd {}\n", m.nodes().size());
  const auto& vt = m.vtree();
  for (const auto& n : m.nodes()) {
    const int vid = vt.node(n.vtree).id;
    switch (n.kind) {
      case PsddNode::Kind::True:
        out += fmt::format("T {} {} {:.17g}\n", n.id, vid, n.theta);
        break;
      case PsddNode::Kind::False:
        out += fmt::format("F {} {}\n", n.id, vid);
        break;
      case PsddNode::Kind::Literal:
        out += fmt::format("L {} {} {}{}\n", n.id, vid, n.positive ? '+' : '-',
                           m.universe()[*vt.node(n.vtree).var].name);
        break;
      case PsddNode::Kind::Decision:
        out += fmt::format("D {} {} {}", n.id, vid, n.elements.size());
        for (const auto& e : n.elements)
          out += fmt::format(" {} {} {:.17g}", m.node(e.prime).id, m.node(e.sub).id, e.theta);
        out += '\n';
        break;
    }
  }
  return out;
}

}  // namespace tpc
