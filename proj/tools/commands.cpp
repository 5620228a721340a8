#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tpc/fixtures.hpp"
#include "tpc/psdd.hpp"
#include "tpc/sem.hpp"
#include "tpc/sem_compiler.hpp"
#include "tpc/spn.hpp"

namespace tpc::cli {

namespace fs = std::filesystem;

namespace {

enum class Format { text, tsv };

struct Common {
  double tol = 1e-9;
  std::string format = "text";

  Format fmt() const { return format == "tsv" ? Format::tsv : Format::text; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << contents;
}

// Prefixes parse errors with the file name so the diagnostic stays on one line.
template <typename F>
auto with_path(const std::string& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const ParseError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

std::string extension(const std::string& path) { return fs::path(path).extension().string(); }

Vtree load_vtree(const std::string& path) {
  return with_path(path, [](const std::string& s) { return parse_vtree(s); });
}

Psdd load_psdd(const std::string& path, const std::string& vtree_path) {
  auto vt_path = vtree_path;
  if (vt_path.empty()) vt_path = fs::path(path).replace_extension(".vtree").string();
  auto vt = load_vtree(vt_path);
  return with_path(path, [&](const std::string& s) { return parse_psdd(s, std::move(vt)); });
}

Sem load_sem(const std::string& path) {
  return with_path(path, [](const std::string& s) { return parse_sem(s); });
}

Spn load_spn(const std::string& path) {
  return with_path(path, [](const std::string& s) { return parse_spn(s); });
}

std::string prob(double p) { return fmt::format("{:.12g}", p); }

void print_value(std::ostream& out, Format f, std::string_view label, double p) {
  if (f == Format::tsv) {
    fmt::print(out, "{}\t{}\n", label, prob(p));
  } else {
    fmt::print(out, "{} = {}\n", label, prob(p));
  }
}

std::string pr_label(std::string_view query, std::string_view action, std::string_view evidence) {
  std::string cond;
  if (!action.empty()) cond += fmt::format("do({})", action);
  if (!evidence.empty()) cond += (cond.empty() ? "" : ", ") + std::string(evidence);
  if (cond.empty()) return fmt::format("Pr({})", query);
  return fmt::format("Pr({} | {})", query, cond);
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::vector<std::string>& paths, const std::string& vtree, std::ostream& out) {
  bool all_ok = true;
  for (const auto& path : paths) {
    const auto ext = extension(path);
    std::vector<std::string> problems;
    std::string summary;
    if (ext == ".vtree") {
      const auto v = load_vtree(path);
      summary = fmt::format("vtree over {} variables", v.universe().size());
    } else if (ext == ".psdd") {
      const auto m = load_psdd(path, vtree);
      problems = validate(m).violations;
      summary = fmt::format("psdd with {} nodes over {} variables", m.nodes().size(), m.universe().size());
    } else if (ext == ".sem") {
      const auto m = load_sem(path);
      summary = fmt::format("sem with {} exogenous and {} endogenous variables", m.exogenous().size(),
                            m.endogenous().size());
    } else if (ext == ".spn") {
      const auto s = load_spn(path);
      const auto r = check_structure(s);
      if (!r.complete) problems.emplace_back("not complete");
      if (!r.decomposable) problems.emplace_back("not decomposable");
      summary = fmt::format("spn with {} nodes, selective: {}", s.nodes().size(),
                            r.selective ? (*r.selective ? "yes" : "no") : "unchecked");
    } else {
      throw PreconditionError("'" + path + "': unknown model type (expected .vtree, .psdd, .sem or .spn)");
    }
    if (problems.empty()) {
      fmt::print(out, "{}: ok, {}\n", path, summary);
    } else {
      all_ok = false;
      for (const auto& p : problems) fmt::print(out, "{}: {}\n", path, p);
    }
  }
  return all_ok ? 0 : 1;
}

// ------------------------------------------------------------------- query

int cmd_query(const std::string& path, const std::string& vtree, const std::string& q, const std::string& e,
              const Common& common, std::ostream& out) {
  double p = 0.0;
  if (extension(path) == ".sem") {
    const auto m = load_sem(path);
    const auto query = parse_assignment(q, m.universe());
    const auto evidence = parse_assignment(e, m.universe());
    p = joint(m).conditional(query, evidence);
  } else {
    const auto m = load_psdd(path, vtree);
    const auto query = parse_assignment(q, m.universe());
    const auto evidence = parse_assignment(e, m.universe());
    p = evidence.empty() ? marginal(m, query) : conditional(m, query, evidence);
  }
  print_value(out, common.fmt(), pr_label(q, "", e), p);
  return 0;
}

// ----------------------------------------------------------------- compile

int cmd_compile(const std::string& path, const std::string& vtree, const std::string& out_prefix, const Common& common,
                std::ostream& out) {
  const auto m = load_psdd(path, vtree);
  const auto report = validate(m);
  if (!report.ok()) throw PreconditionError(path + ": " + report.violations.front());
  const auto c = compile_psdd(m);
  const double deviation = check_consistency(m, c);
  if (out_prefix.empty()) {
    out << serialize(c.sem);
    return 0;
  }
  write_file(out_prefix + ".sem", serialize(c.sem));
  write_file(out_prefix + ".naming", naming_sidecar(c));
  fmt::print(out, "wrote {}.sem and {}.naming ({} augmented nodes, root {})\n", out_prefix, out_prefix,
             c.naming.size(), c.root_name);
  print_value(out, common.fmt(), "max deviation", deviation);
  if (deviation > common.tol) throw PreconditionError("compiled SEM disagrees with the PSDD beyond --tol");
  return 0;
}

// ---------------------------------------------------------------- do / cf

int cmd_do(const std::string& path, const std::string& q, const std::string& action, const std::string& semantics,
           bool semantics_given, const Common& common, std::ostream& out, std::ostream& err) {
  const auto m = load_sem(path);
  const auto query = parse_assignment(q, m.universe());
  const auto interventions = parse_assignment(action, m.universe());
  if (!semantics_given)
    err << "note: using --semantics surgery (equation replacement); --semantics adjustment sums over the "
           "parents of the intervened variable and can differ\n";
  double p = 0.0;
  if (semantics == "surgery") {
    p = interventional_surgery_prob(m, query, interventions);
  } else {
    if (query.size() != 1 || interventions.size() != 1)
      throw PreconditionError("adjustment semantics takes exactly one --query and one --do variable");
    const auto [y, y_value] = *query.begin();
    const auto [x, x_value] = *interventions.begin();
    p = interventional_adjustment_prob(m, y, y_value, x, x_value);
  }
  print_value(out, common.fmt(), pr_label(q, action, ""), p);
  return 0;
}

int cmd_cf(const std::string& path, const std::string& q, const std::string& action, const std::string& e,
           const Common& common, std::ostream& out) {
  const auto m = load_sem(path);
  const auto query = parse_assignment(q, m.universe());
  const auto interventions = parse_assignment(action, m.universe());
  const auto evidence = parse_assignment(e, m.universe());
  print_value(out, common.fmt(), pr_label(q, action, e), counterfactual(m, evidence, interventions, query));
  return 0;
}

// ---------------------------------------------------------- dot / spn-bn

int cmd_dot(const std::string& path, const std::string& vtree, const std::string& out_path, std::ostream& out) {
  const auto ext = extension(path);
  std::string dot;
  if (ext == ".sem") {
    dot = to_dot(load_sem(path));
  } else if (ext == ".spn") {
    dot = to_dot(to_bn_topology(load_spn(path)).graph(), "spn_bn");
  } else if (ext == ".psdd") {
    dot = to_dot(compile_psdd(load_psdd(path, vtree)).sem);
  } else {
    throw PreconditionError("'" + path + "': dot needs a .sem, .spn or .psdd file");
  }
  if (out_path.empty()) {
    out << dot;
  } else {
    write_file(out_path, dot);
  }
  return 0;
}

int cmd_spn_bn(const std::string& path, const std::string& out_path, const Common& common, std::ostream& out) {
  const auto s = load_spn(path);
  const auto t = to_bn_topology(s);
  const auto g = t.graph();
  const auto sep = common.fmt() == Format::tsv ? "\t" : " ";
  for (const auto& [latent, observable] : t.edges)
    fmt::print(out, "edge{}{}{}{}\n", sep, g.name(t.observables.size() + latent), sep, t.observables[observable].name);

  // All nonempty subsets when they fit, otherwise each observable alone.
  const std::size_t n = t.observables.size();
  std::vector<std::vector<std::string>> subsets;
  if (n <= kMaxSelectivityVars) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      std::vector<std::string> x;
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1U) x.push_back(t.observables[i].name);
      subsets.push_back(std::move(x));
    }
  } else {
    for (const auto& v : t.observables) subsets.push_back({v.name});
  }
  std::size_t holds = 0;
  for (const auto& x : subsets)
    if (verify_spn_triviality(t, x)) ++holds;
  fmt::print(out, "latents{}{}\n", sep, t.latent_sums.size());
  fmt::print(out, "trivial interventions{}{}/{}\n", sep, holds, subsets.size());
  if (!out_path.empty()) write_file(out_path, to_dot(g, "spn_bn"));
  return 0;
}

// --------------------------------------------------------------- reproduce

class Checker {
 public:
  Checker(const Common& c, std::ostream& out) : common_(c), out_(out) {}

  void check(std::string_view label, double got, double want) {
    const bool ok = std::abs(got - want) <= common_.tol;
    failures_ += ok ? 0 : 1;
    if (common_.fmt() == Format::tsv) {
      fmt::print(out_, "{}\t{}\t{}\t{}\n", label, prob(got), prob(want), ok ? "ok" : "MISMATCH");
    } else {
      fmt::print(out_, "{:<40} {:>16} expected {:<16} {}\n", label, prob(got), prob(want), ok ? "ok" : "MISMATCH");
    }
  }

  int failures() const { return failures_; }

 private:
  const Common& common_;
  std::ostream& out_;
  int failures_ = 0;
};

int cmd_reproduce(const std::string& dir, const Common& common, std::ostream& out) {
  const auto psdd = dir.empty() ? fixtures::courses_psdd()
                                : load_psdd((fs::path(dir) / "courses.psdd").string(),
                                            (fs::path(dir) / "courses.vtree").string());
  const auto sem = dir.empty() ? fixtures::courses_sem() : load_sem((fs::path(dir) / "courses.sem").string());
  const auto& su = sem.universe();
  const auto& pu = psdd.universe();
  Checker c(common, out);

  struct Row {
    const char* lkpa;
    double percent;
  };
  constexpr Row table[] = {{"0010", 6.0}, {"0011", 54.0}, {"0111", 10.0}, {"1000", 3.6}, {"1010", 1.8},
                           {"1011", 0.6}, {"1100", 14.4}, {"1110", 7.2},  {"1111", 2.4}};
  const std::vector<Var> order{su[su.at("L")], su[su.at("K")], su[su.at("P")], su[su.at("A")]};
  const auto sem_marginal = joint(sem).marginal(order);
  for (const auto& row : table) {
    Assignment a;
    std::size_t index = 0;
    for (int i = 0; i < 4; ++i) {
      a.set(pu.at(order[i].name), row.lkpa[i] == '1');
      index = (index << 1) | (row.lkpa[i] == '1' ? 1U : 0U);
    }
    c.check(fmt::format("table1 LKPA={} psdd", row.lkpa), probability(psdd, a), row.percent / 100.0);
    c.check(fmt::format("table1 LKPA={} sem", row.lkpa), sem_marginal[index], row.percent / 100.0);
  }

  const auto id = [&](std::string_view name) { return su.at(name); };
  const auto dist = joint(sem);
  const double observational = dist.probability({{id("X_9"), true}});
  const double conditional = dist.conditional({{id("X_9"), true}}, {{id("A"), true}});
  const double cf = counterfactual(sem, {{id("X_9"), false}}, {{id("A"), true}}, {{id("X_9"), true}});
  c.check("Pr(X_9=1)", observational, 0.54);
  c.check("Pr(X_9=1 | A=1)", conditional, 0.54 / 0.67);
  c.check("Pr(X_9=1 | do(A=1), X_9=0)", cf, 0.06 / 0.46);
  c.check("Pr(X_1=1 | do(P=1), X_1=0)",
          counterfactual(sem, {{id("X_1"), false}}, {{id("P"), true}}, {{id("X_1"), true}}), 0.0);
  c.check("surgery Pr(X_9=1 | do(X_1=1))", interventional_surgery_prob(sem, {{id("X_9"), true}}, {{id("X_1"), true}}),
          0.60);
  c.check("adjustment Pr(X_9=1 | do(X_1=1))", interventional_adjustment_prob(sem, id("X_9"), true, id("X_1"), true),
          0.54);

  fmt::print(out, "\nfigure3\tdistribution\tPr(X_9=1)\n");
  fmt::print(out, "figure3\tobservational\t{}\n", prob(observational));
  fmt::print(out, "figure3\tconditional A=1\t{}\n", prob(conditional));
  fmt::print(out, "figure3\tcounterfactual do(A=1), X_9=0\t{}\n", prob(cf));

  if (c.failures() > 0) {
    fmt::print(out, "{} check(s) deviate beyond {}\n", c.failures(), common.tol);
    return 2;
  }
  fmt::print(out, "all checks pass within {}\n", common.tol);
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PSDD, SPN and structural causal model toolkit", "tpc"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--tol", common.tol, "Tolerance for checks")->capture_default_str();
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "tsv"}))->capture_default_str();

  std::string model;
  std::string vtree;
  std::string query;
  std::string evidence;
  std::string action;
  std::string out_path;
  std::string semantics = "surgery";
  std::vector<std::string> paths;

  auto* validate_cmd = app.add_subcommand("validate", "Check model files");
  validate_cmd->add_option("files", paths, "Model files (.vtree, .psdd, .sem, .spn)")->required();
  validate_cmd->add_option("--vtree", vtree, "Vtree for .psdd files (default: sibling .vtree)");

  auto* query_cmd = app.add_subcommand("query", "Observational probability from a PSDD or SEM");
  query_cmd->add_option("model", model, "Model file")->required();
  query_cmd->add_option("--vtree", vtree, "Vtree for a .psdd file");
  query_cmd->add_option("--query", query, "Assignment, e.g. X_9=1");
  query_cmd->add_option("--evidence", evidence, "Conditioning assignment");

  auto* compile_cmd = app.add_subcommand("compile", "Compile a PSDD into a SEM");
  compile_cmd->add_option("model", model, "PSDD file")->required();
  compile_cmd->add_option("--vtree", vtree, "Vtree for the PSDD");
  compile_cmd->add_option("--out", out_path, "Write <out>.sem and <out>.naming instead of printing");

  auto* do_cmd = app.add_subcommand("do", "Interventional probability");
  do_cmd->add_option("model", model, "SEM file")->required();
  do_cmd->add_option("--query", query, "Assignment")->required();
  do_cmd->add_option("--do", action, "Intervention")->required();
  auto* semantics_opt = do_cmd->add_option("--semantics", semantics, "surgery or adjustment")
                            ->check(CLI::IsMember({"surgery", "adjustment"}));

  auto* cf_cmd = app.add_subcommand("cf", "Counterfactual probability");
  cf_cmd->add_option("model", model, "SEM file")->required();
  cf_cmd->add_option("--query", query, "Assignment")->required();
  cf_cmd->add_option("--do", action, "Intervention")->required();
  cf_cmd->add_option("--evidence", evidence, "Observed assignment")->required();

  auto* dot_cmd = app.add_subcommand("dot", "Export the causal graph as DOT");
  dot_cmd->add_option("model", model, "SEM, SPN or PSDD file")->required();
  dot_cmd->add_option("--vtree", vtree, "Vtree for a .psdd file");
  dot_cmd->add_option("--out", out_path, "Output file (default: stdout)");

  auto* spn_cmd = app.add_subcommand("spn-bn", "Latent BN topology of an SPN and its triviality report");
  spn_cmd->add_option("model", model, "SPN file")->required();
  spn_cmd->add_option("--out", out_path, "Write the topology as DOT");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "Recompute the course example numbers");
  std::string fixtures_dir;
  reproduce_cmd->add_option("--fixtures", fixtures_dir, "Load courses.* from this directory instead of built-ins");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate_cmd) return cmd_validate(paths, vtree, out);
    if (*query_cmd) return cmd_query(model, vtree, query, evidence, common, out);
    if (*compile_cmd) return cmd_compile(model, vtree, out_path, common, out);
    if (*do_cmd) return cmd_do(model, query, action, semantics, semantics_opt->count() > 0, common, out, err);
    if (*cf_cmd) return cmd_cf(model, query, action, evidence, common, out);
    if (*dot_cmd) return cmd_dot(model, vtree, out_path, out);
    if (*spn_cmd) return cmd_spn_bn(model, out_path, common, out);
    if (*reproduce_cmd) return cmd_reproduce(fixtures_dir, common, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tpc::cli
