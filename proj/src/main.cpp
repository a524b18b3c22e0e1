// banachforge command-line front end.
//
// Subcommands:
//   norm    -- evaluate a sequence-space norm on a finitely supported vector
//   family  -- membership / admissibility / regularity queries on set families
//   bd      -- build, evaluate, and analyse finite-stage extension models
//   verify  -- run a named falsification suite and emit its JSON report
//
// Output discipline: machine-readable results on stdout (bare value for
// `norm` and `family`, JSON elsewhere), one-line human summaries on stderr.
// Exit codes: 0 ok/true/pass, 1 false/falsified, 2 parse or schema error,
// 3 cap exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "banachforge/diagalg.hpp"
#include "banachforge/verify.hpp"

namespace {

using namespace banachforge;

// Reads JSON from a literal argument (starting with '{' or '['), from stdin
// ("-"), or from a file path.
json load_json_arg(const std::string& arg) {
  try {
    if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return json::parse(arg);
    if (arg == "-") return json::parse(std::cin);
    std::ifstream in(arg);
    if (!in) throw ParseError("cannot open file: " + arg);
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

void write_json_out(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output file: " + out_path);
  out << j.dump(2) << "\n";
}

bool resolve_float_mode(const std::string& flag_mode) {
  std::string mode = flag_mode;
  if (mode.empty()) {
    const char* env = std::getenv("BANACHFORGE_MODE");
    mode = env ? env : "exact";
  }
  if (mode == "exact") return false;
  if (mode == "float") return true;
  throw ParseError("unknown scalar mode: " + mode + " (expected exact or float)");
}

FiniteSet set_from_csv(const std::string& csv) {
  std::vector<int> elems;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::strip(tok);
    if (tok.empty()) continue;
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw ParseError("bad set element: " + tok);
    elems.push_back(v);
  }
  try {
    return FiniteSet(std::move(elems));
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
}

// ---------------------------------------------------------------------------
// norm

int run_norm(const std::string& space, const std::string& vector_csv, const std::string& mode) {
  bool float_mode = resolve_float_mode(mode);
  NormOracle oracle = make_oracle(space);
  Coeffs v = coeffs_from_csv(vector_csv, float_mode);
  Scalar val = oracle(v);
  std::cout << to_string(val) << "\n";
  std::cerr << "norm[" << space << "](" << vector_csv << ") = " << to_string(val) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// family

int run_family_member(const std::string& spec_text, const std::string& set_csv) {
  FamilySpec spec = parse_family(spec_text);
  bool ok = member(spec, set_from_csv(set_csv));
  std::cout << (ok ? "true" : "false") << "\n";
  std::cerr << "family member[" << spec_text << "] {" << set_csv << "}: "
            << (ok ? "true" : "false") << "\n";
  return ok ? 0 : 1;
}

int run_family_admissible(const std::string& spec_text, const std::string& sets_arg) {
  FamilySpec spec = parse_family(spec_text);
  std::vector<FiniteSet> Es;
  std::stringstream ss(sets_arg);
  std::string tok;
  while (std::getline(ss, tok, ';'))
    if (!detail::strip(tok).empty()) Es.push_back(set_from_csv(tok));
  bool ok = is_admissible(spec, Es);
  std::cout << (ok ? "true" : "false") << "\n";
  std::cerr << "family admissible[" << spec_text << "] " << Es.size() << " blocks: "
            << (ok ? "true" : "false") << "\n";
  return ok ? 0 : 1;
}

int run_family_regular(const std::string& spec_text, int cap) {
  FamilySpec spec = parse_family(spec_text);
  bool ok = is_regular(spec, cap);
  std::cout << (ok ? "true" : "false") << "\n";
  std::cerr << "family regular[" << spec_text << "] cap " << cap << ": "
            << (ok ? "true" : "false") << "\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bd

// See run_build_request for the request schema; with no request the model
// carries only the rank-1 base layer.
int run_bd_build(const std::string& in_arg, const std::string& out_path) {
  json req = in_arg.empty() ? json::object() : load_json_arg(in_arg);
  ordered_json out = run_build_request(req);
  write_json_out(out, out_path);
  std::cerr << "bd build: " << out["delta"].size() << " nodes above the base, cap "
            << out["params"]["cap"].get<int>() << "\n";
  return 0;
}

int run_bd_eval(const std::string& model_arg, int gamma, const std::string& vec_arg,
                const std::string& mode) {
  bool float_mode = resolve_float_mode(mode);
  BDModel model = model_from_json(load_json_arg(model_arg));
  YVec u = yvec_from_json(load_json_arg(vec_arg), float_mode);
  ExtCtx ctx(model, u);
  ordered_json out;
  out["gamma"] = gamma;
  out["e"] = to_string(ctx.e(gamma));
  out["c"] = to_string(ctx.c(gamma));
  out["d"] = to_string(ctx.d(gamma));
  write_json_out(out, "");
  std::cerr << "bd eval gamma=" << gamma << ": e = " << out["e"].get<std::string>() << "\n";
  return 0;
}

int run_bd_analysis(const std::string& model_arg, int gamma) {
  BDModel model = model_from_json(load_json_arg(model_arg));
  EvalAnalysis a = evaluation_analysis(model, gamma);
  ordered_json out;
  out["gamma"] = gamma;
  out["windex"] = a.windex;
  ordered_json entries = ordered_json::array();
  for (const auto& e : a.entries) {
    ordered_json row;
    row["rank"] = e.rank;
    row["xi"] = e.node;
    if (e.b_is_node)
      row["b"] = ordered_json{{"pool", "node"}, {"eta", e.b}};
    else
      row["b"] = handle_to_json(model.handle(e.b));
    entries.push_back(row);
  }
  out["entries"] = entries;
  write_json_out(out, "");
  std::cerr << "bd analysis gamma=" << gamma << ": age " << a.entries.size() << ", weight index "
            << a.windex << "\n";
  return 0;
}

int run_bd_norm(const std::string& model_arg, const std::string& vec_arg,
                const std::string& mode) {
  bool float_mode = resolve_float_mode(mode);
  BDModel model = model_from_json(load_json_arg(model_arg));
  YVec u = yvec_from_json(load_json_arg(vec_arg), float_mode);
  ordered_json out;
  out["norm"] = to_string(norm_Y(model, u));
  write_json_out(out, "");
  std::cerr << "bd norm = " << out["norm"].get<std::string>() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const std::string& suite, long trials, unsigned long long seed,
               const std::string& mode) {
  bool float_mode = false;
  if (mode == "toy" || mode == "compliant") {
    // Parameter-regime request: the quantitative suites run toy parameters by
    // construction (the compliant growth regime is far beyond desk scale),
    // and the report labels the regime it actually used.
    if (mode == "compliant")
      std::cerr << "note: quantitative suites run toy parameters; the report labels the regime\n";
    float_mode = resolve_float_mode("");
  } else {
    float_mode = resolve_float_mode(mode);
  }
  SuiteReport report = run_suite(suite, trials, seed, float_mode);
  write_json_out(report.to_json(), "");
  std::cerr << "suite " << report.suite << " [" << report.anchor << "]: "
            << (report.pass ? "PASS" : "FALSIFIED") << ", trials=" << report.trials
            << ", failures=" << report.failures
            << (report.have_ratio ? ", max ratio " + to_string(report.max_ratio) : "") << "\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banachforge: norms, set families, and finite-stage extension models"};
  app.require_subcommand(1);

  std::string space, vector_csv, mode;
  std::string spec_text, set_csv, sets_arg;
  int cap = 12;
  std::string in_arg, out_path, model_arg, vec_arg;
  int gamma = 0;
  std::string suite;
  long trials = 0;
  unsigned long long seed = 1;

  auto* cmd_norm = app.add_subcommand("norm", "evaluate a sequence-space norm");
  cmd_norm->add_option("--space", space, "space spec, e.g. jp:2 or tsirelson(schreier,1/2)")
      ->required();
  cmd_norm->add_option("--vector", vector_csv, "comma-separated coefficients (rationals ok)")
      ->required();
  cmd_norm->add_option("--mode", mode, "exact|float (default: BANACHFORGE_MODE or exact)");

  auto* cmd_family = app.add_subcommand("family", "set-family queries");
  cmd_family->require_subcommand(1);
  auto* fam_member = cmd_family->add_subcommand("member", "does the set belong to the family?");
  fam_member->add_option("--spec", spec_text, "family spec, e.g. schreier or bounded:3")
      ->required();
  fam_member->add_option("--set", set_csv, "comma-separated elements")->required();
  auto* fam_adm = cmd_family->add_subcommand("admissible", "is the block sequence admissible?");
  fam_adm->add_option("--spec", spec_text, "family spec")->required();
  fam_adm->add_option("--sets", sets_arg, "semicolon-separated sets, e.g. '2,3;5,6,7'")
      ->required();
  auto* fam_reg = cmd_family->add_subcommand("regular", "spreading + hereditary up to a cap");
  fam_reg->add_option("--spec", spec_text, "family spec")->required();
  fam_reg->add_option("--cap", cap, "check all sets inside {1..cap}")->required();

  auto* cmd_bd = app.add_subcommand("bd", "finite-stage extension models");
  cmd_bd->require_subcommand(1);
  auto* bd_build = cmd_bd->add_subcommand("build", "construct a model from a request file");
  bd_build->add_option("--requests", in_arg, "request JSON (file, inline, or '-')");
  bd_build->add_option("--out", out_path, "output path (default stdout)");
  auto* bd_eval = cmd_bd->add_subcommand("eval", "evaluate e*, c*, d* at a node");
  bd_eval->add_option("--model", model_arg, "model JSON (file, inline, or '-')")->required();
  bd_eval->add_option("--gamma", gamma, "node id")->required();
  bd_eval->add_option("--vector", vec_arg, "vector JSON (file, inline, or '-')")->required();
  bd_eval->add_option("--mode", mode, "exact|float");
  auto* bd_analysis = cmd_bd->add_subcommand("analysis", "evaluation analysis of a node");
  bd_analysis->add_option("--model", model_arg, "model JSON (file, inline, or '-')")->required();
  bd_analysis->add_option("--gamma", gamma, "node id")->required();
  auto* bd_norm = cmd_bd->add_subcommand("norm", "stage norm of a vector");
  bd_norm->add_option("--model", model_arg, "model JSON (file, inline, or '-')")->required();
  bd_norm->add_option("--vector", vec_arg, "vector JSON (file, inline, or '-')")->required();
  bd_norm->add_option("--mode", mode, "exact|float");

  auto* cmd_verify = app.add_subcommand("verify", "run a falsification suite");
  cmd_verify->add_option("suite", suite, "suite name (see --list)");
  bool list_suites = false;
  cmd_verify->add_flag("--list", list_suites, "list suite names and exit");
  cmd_verify->add_option("--trials", trials, "trial count (0 = suite default)");
  cmd_verify->add_option("--seed", seed, "RNG seed (identical seed, identical report)");
  cmd_verify->add_option("--mode", mode, "exact|float|toy|compliant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_norm->parsed()) return run_norm(space, vector_csv, mode);
    if (fam_member->parsed()) return run_family_member(spec_text, set_csv);
    if (fam_adm->parsed()) return run_family_admissible(spec_text, sets_arg);
    if (fam_reg->parsed()) return run_family_regular(spec_text, cap);
    if (bd_build->parsed()) return run_bd_build(in_arg, out_path);
    if (bd_eval->parsed()) return run_bd_eval(model_arg, gamma, vec_arg, mode);
    if (bd_analysis->parsed()) return run_bd_analysis(model_arg, gamma);
    if (bd_norm->parsed()) return run_bd_norm(model_arg, vec_arg, mode);
    if (cmd_verify->parsed()) {
      if (list_suites) {
        for (const auto& name : suite_names()) std::cout << name << "\n";
        return 0;
      }
      if (suite.empty()) throw ParseError("verify needs a suite name (try --list)");
      return run_verify(suite, trials, seed, mode);
    }
  } catch (const CapError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
