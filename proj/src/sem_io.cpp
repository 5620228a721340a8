#include <fmt/format.h>

#include "tpc/sem.hpp"
#include "tpc/text.hpp"

namespace tpc {

Sem parse_sem(std::string_view input) {
  const auto lines = text::tokenize(input);
  Sem::Builder b;
  std::vector<const text::Line*> equations;
  std::size_t k = 0;
  for (; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto kw = line.tokens[0];
    if (kw == "dist") {
      if (line.tokens.size() != 1) throw ParseError(line.number, "'dist' takes no arguments");
      ++k;
      break;
    }
    if (kw == "var") {
      if (line.tokens.size() != 3 || (line.tokens[2] != "exo" && line.tokens[2] != "endo"))
        throw ParseError(line.number, "expected 'var <name> exo|endo'");
      try {
        if (line.tokens[2] == "exo") {
          b.add_exogenous(std::string(line.tokens[1]));
        } else {
          b.add_endogenous(std::string(line.tokens[1]));
        }
      } catch (const PreconditionError& e) {
        throw ParseError(line.number, e.what());
      }
    } else if (kw == "eq") {
      if (line.tokens.size() < 4 || line.tokens[2] != "=") throw ParseError(line.number, "expected 'eq <name> = <formula>'");
      equations.push_back(&line);
    } else {
      throw ParseError(line.number, "unknown SEM line kind '" + std::string(kw) + "'");
    }
  }
  const bool has_dist = k > 0 && k <= lines.size() && lines[k - 1].tokens[0] == "dist";
  if (!has_dist) throw ParseError(0, "missing 'dist' block");

  for (const auto* line : equations) {
    // The formula is everything after '=' on the line, so rejoin the tokens.
    std::string formula;
    for (std::size_t t = 3; t < line->tokens.size(); ++t) {
      if (!formula.empty()) formula += ' ';
      formula += line->tokens[t];
    }
    try {
      b.set_equation(line->tokens[1], formula);
    } catch (const Error& e) {
      throw ParseError(line->number, e.what());
    }
  }

  // Exogenous variables in declaration order define the bit positions.
  std::vector<Var> exo_vars;
  for (std::size_t i = 0; i < lines.size() && lines[i].tokens[0] != "dist"; ++i)
    if (lines[i].tokens[0] == "var" && lines[i].tokens[2] == "exo")
      exo_vars.push_back(b.universe()[b.universe().at(lines[i].tokens[1])]);
  const std::size_t n_exo = exo_vars.size();
  if (n_exo > kMaxEnumerationVars) throw ParseError(0, "too many exogenous variables for a dense table");
  std::vector<double> probs(std::size_t{1} << n_exo, 0.0);
  std::vector<bool> seen(probs.size(), false);
  for (; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.tokens.size() != 2) throw ParseError(line.number, "expected '<bitstring> <probability>'");
    const auto bits = line.tokens[0];
    if (bits.size() != n_exo || bits.find_first_not_of("01") != std::string_view::npos)
      throw ParseError(line.number, fmt::format("bitstring must have {} characters of 0/1", n_exo));
    std::size_t index = 0;
    for (char c : bits) index = (index << 1) | (c == '1' ? 1U : 0U);
    if (seen[index]) throw ParseError(line.number, "duplicate row '" + std::string(bits) + "'");
    seen[index] = true;
    probs[index] = text::parse_number<double>(line, line.tokens[1], "probability");
  }
  try {
    b.set_exogenous_distribution(TabularDistribution(std::move(exo_vars), std::move(probs)));
    return std::move(b).build();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize(const Sem& m) {
  std::string out;
  const auto& u = m.universe();
  for (VarId v = 0; v < u.size(); ++v) out += fmt::format("var {} {}\n", u[v].name, m.is_exogenous(v) ? "exo" : "endo");
  for (VarId v : m.endogenous()) out += fmt::format("eq {} = {}\n", u[v].name, to_string(m.equation(v)));
  out += "dist\n";
  const auto& dist = m.exogenous_distribution();
  const std::size_t n = dist.vars().size();
  for (std::size_t w = 0; w < dist.size(); ++w) {
    if (dist[w] == 0.0) continue;
    std::string bits(n, '0');
    for (std::size_t i = 0; i < n; ++i)
      if ((w >> (n - 1 - i)) & 1U) bits[i] = '1';
    out += fmt::format("{} {:.17g}\n", bits, dist[w]);
  }
  return out;
}

}  // namespace tpc
