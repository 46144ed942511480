// hadamard-lab: check sampled class membership, evaluate inequality
// chains with certified quadrature error bars, fuzz chains with seeded
// generators, and audit the symmetric-function corollary.
//
// Exit codes: 0 holds / holds-on-samples, 1 violated, 2 inconclusive,
// 64 usage error.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hadamard/chains.hpp"
#include "hadamard/classes.hpp"
#include "hadamard/probe.hpp"
#include "hadamard/report.hpp"

namespace {

using namespace hadamard;

constexpr int kUsageError = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string piece = csv.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (piece.empty()) throw UsageError("empty value in list: " + csv);
    const char* b = piece.data();
    const char* e = b + piece.size();
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
      throw UsageError("not a number: " + piece);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Domain parse_domain(const std::string& spec) {
  std::vector<double> v = parse_reals(spec);
  if (v.size() == 2) {
    if (!(v[0] < v[1]))
      throw UsageError("domain needs a < b, got " + spec);
    return Interval{v[0], v[1]};
  }
  if (v.size() == 4) {
    if (!(v[0] < v[1]) || !(v[2] < v[3]))
      throw UsageError("domain needs a < b and c < d, got " + spec);
    return Rect{v[0], v[1], v[2], v[3]};
  }
  throw UsageError("domain takes 2 (interval) or 4 (rectangle) values, got " +
                   std::to_string(v.size()));
}

Expr parse_expr_arg(const std::string& text, const char* flag) {
  ParseResult r = parse(text);
  if (!r.ok())
    throw UsageError(std::string(flag) + ": " + r.error->message());
  return *r.expr;
}

int env_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  int threads = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* s = std::getenv("HADAMARD_LAB_THREADS"); s && *s) {
    int cap = std::atoi(s);
    if (cap >= 1 && cap < threads) threads = cap;
  }
  return threads;
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file: " + out_path);
  f << body;
}

void write_domain_json(JsonWriter& w, const Domain& d) {
  w.begin_array();
  if (const auto* iv = std::get_if<Interval>(&d)) {
    w.value(iv->a);
    w.value(iv->b);
  } else {
    const Rect& r = std::get<Rect>(d);
    w.value(r.a);
    w.value(r.b);
    w.value(r.c);
    w.value(r.d);
  }
  w.end_array();
}

void write_tolerance_json(JsonWriter& w, const Tolerance& t) {
  w.begin_object();
  w.field("abs", t.abs);
  w.field("rel", t.rel);
  w.end_object();
}

// ---------------------------------------------------------------- check-class

struct CheckClassArgs {
  std::string f_text, domain_text, class_name_text;
  int grid_points = SampleGrid{}.point_count;
  int lambda_count = SampleGrid{}.lambda_count;
  double tol_abs = Tolerance{}.abs;
  double tol_rel = Tolerance{}.rel;
};

int run_check_class(const CheckClassArgs& a, OutputFormat fmt,
                    const std::string& out_path) {
  auto klass = class_from_name(a.class_name_text);
  if (!klass) throw UsageError("unknown class: " + a.class_name_text);
  Expr f = parse_expr_arg(a.f_text, "--f");
  Domain dom = parse_domain(a.domain_text);

  bool want_1d = is_1d_class(*klass);
  if (want_1d != std::holds_alternative<Interval>(dom))
    throw UsageError(std::string("class ") + a.class_name_text + " needs a " +
                     (want_1d ? "2" : "4") + "-value domain");
  VarSet vars = free_vars(f);
  if (want_1d && vars.y)
    throw UsageError("--f uses y but the class is one-dimensional");

  SampleGrid grid;
  grid.point_count = a.grid_points;
  grid.lambda_count = a.lambda_count;
  Tolerance tol{a.tol_abs, a.tol_rel};

  MembershipReport rep;
  if (want_1d)
    rep = check_1d(as_fn1(f), std::get<Interval>(dom), *klass, grid, tol);
  else if (is_joint_class(*klass))
    rep = check_joint(as_fn2(f), std::get<Rect>(dom), *klass, grid, tol);
  else
    rep = check_coordinated(as_fn2(f), std::get<Rect>(dom), *klass, grid, tol);

  std::string body;
  switch (fmt) {
    case OutputFormat::Json:
      body = json_document(
          "check-class",
          [&](JsonWriter& w) {
            w.field("f", a.f_text);
            w.field("class", class_name(*klass));
            w.key("domain");
            write_domain_json(w, dom);
            w.field("grid_points", grid.point_count);
            w.field("lambda_count", grid.lambda_count);
            w.key("tolerance");
            write_tolerance_json(w, tol);
          },
          [&](JsonWriter& w) { write_membership_json(w, rep); });
      break;
    case OutputFormat::Csv: body = csv_membership(rep); break;
    case OutputFormat::Text: body = text_membership(rep); break;
  }
  emit(body, out_path);
  return exit_code_for(rep.verdict);
}

// --------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string chain_text, f_text, g_text, domain_text;
  int quad_nodes = QuadConfig{}.nodes_per_panel;
  double quad_tol = QuadConfig{}.abs_tol;
  double quad_rel_tol = QuadConfig{}.rel_tol;
  int max_refinements = QuadConfig{}.max_refinements;
  int grid_points = SampleGrid{}.point_count;
  int lambda_count = SampleGrid{}.lambda_count;
  double tol_abs = Tolerance{}.abs;
  double tol_rel = Tolerance{}.rel;
  bool skip_preconditions = false;
};

int run_verify(const VerifyArgs& a, OutputFormat fmt,
               const std::string& out_path) {
  auto chain = chain_from_name(a.chain_text);
  if (!chain) throw UsageError("unknown chain: " + a.chain_text);
  Expr f = parse_expr_arg(a.f_text, "--f");
  std::optional<Expr> g;
  if (chain_needs_g(*chain)) {
    if (a.g_text.empty())
      throw UsageError("chain " + a.chain_text + " needs --g");
    g = parse_expr_arg(a.g_text, "--g");
  } else if (!a.g_text.empty()) {
    throw UsageError("chain " + a.chain_text + " does not take --g");
  }

  Domain dom = parse_domain(a.domain_text);
  bool want_rect = chain_domain_kind(*chain) == DomainKind::Rectangle;
  if (want_rect != std::holds_alternative<Rect>(dom))
    throw UsageError("chain " + a.chain_text + " needs a " +
                     (want_rect ? "4" : "2") + "-value domain");
  if (chain_domain_kind(*chain) == DomainKind::Interval1D &&
      (free_vars(f).y || (g && free_vars(*g).y)))
    throw UsageError("chain " + a.chain_text + " is one-dimensional; the "
                     "function may only use x");

  ChainConfig cfg;
  cfg.quad.nodes_per_panel = a.quad_nodes;
  cfg.quad.abs_tol = a.quad_tol;
  cfg.quad.rel_tol = a.quad_rel_tol;
  cfg.quad.max_refinements = a.max_refinements;
  cfg.grid.point_count = a.grid_points;
  cfg.grid.lambda_count = a.lambda_count;
  cfg.tol = Tolerance{a.tol_abs, a.tol_rel};
  cfg.run_preconditions = !a.skip_preconditions;

  ChainReport rep = eval_chain(*chain, f, g ? &*g : nullptr, dom, cfg);

  std::string body;
  switch (fmt) {
    case OutputFormat::Json:
      body = json_document(
          "verify",
          [&](JsonWriter& w) {
            w.field("chain", chain_name(*chain));
            w.field("f", a.f_text);
            w.key("g");
            if (g) w.value(a.g_text);
            else w.null();
            w.key("domain");
            write_domain_json(w, dom);
            w.key("quad");
            w.begin_object();
            w.field("nodes", cfg.quad.nodes_per_panel);
            w.field("abs_tol", cfg.quad.abs_tol);
            w.field("rel_tol", cfg.quad.rel_tol);
            w.field("max_refinements", cfg.quad.max_refinements);
            w.end_object();
            w.field("grid_points", cfg.grid.point_count);
            w.field("lambda_count", cfg.grid.lambda_count);
            w.key("tolerance");
            write_tolerance_json(w, cfg.tol);
          },
          [&](JsonWriter& w) { write_chain_json(w, rep); });
      break;
    case OutputFormat::Csv: body = csv_chain(rep); break;
    case OutputFormat::Text: body = text_chain(rep); break;
  }
  emit(body, out_path);
  return exit_code_for(rep.verdict);
}

// ----------------------------------------------------------------------- fuzz

struct FuzzArgs {
  std::string chain_text, domain_text;
  int trials = 100;
  std::uint64_t seed = 0;
  int atoms = GenSpec{}.atom_count;
};

int run_fuzz(const FuzzArgs& a, OutputFormat fmt,
             const std::string& out_path) {
  auto chain = chain_from_name(a.chain_text);
  if (!chain) throw UsageError("unknown chain: " + a.chain_text);
  if (a.trials < 1) throw UsageError("--trials must be >= 1");

  GenSpec tmpl;
  tmpl.atom_count = a.atoms;
  if (!a.domain_text.empty()) {
    tmpl.domain = parse_domain(a.domain_text);
  } else if (chain_domain_kind(*chain) != DomainKind::Rectangle) {
    tmpl.domain = Interval{0.0, 1.0};
  }  // rectangle chains keep the unit-square default

  FuzzReport rep = fuzz_chain(*chain, tmpl, a.trials, a.seed,
                              fuzz_chain_config(), env_threads());

  std::string body;
  switch (fmt) {
    case OutputFormat::Json:
      body = json_document(
          "fuzz",
          [&](JsonWriter& w) {
            w.field("chain", chain_name(*chain));
            w.field("trials", a.trials);
            w.field("seed", a.seed);
            w.field("atoms", tmpl.atom_count);
            w.key("domain");
            write_domain_json(w, tmpl.domain);
          },
          [&](JsonWriter& w) { write_fuzz_json(w, rep); });
      break;
    case OutputFormat::Csv: body = csv_fuzz(rep); break;
    case OutputFormat::Text: body = text_fuzz(rep); break;
  }
  emit(body, out_path);
  return exit_code_for(fuzz_verdict(rep));
}

// ----------------------------------------------------- audit-corollary2

struct AuditArgs {
  std::string domain_text = "0,1";
  std::string f_text;
};

int run_audit(const AuditArgs& a, OutputFormat fmt,
              const std::string& out_path) {
  Domain dom = parse_domain(a.domain_text);
  if (!std::holds_alternative<Interval>(dom))
    throw UsageError("audit-corollary2 takes a 2-value domain (the square "
                     "side)");
  Interval iv = std::get<Interval>(dom);

  std::vector<Corollary2Case> cases;
  {
    Corollary2Case c;
    c.f_text = "1";
    c.audit = audit_corollary2([](double, double) { return 1.0; }, iv);
    cases.push_back(std::move(c));
  }
  if (!a.f_text.empty()) {
    Expr f = parse_expr_arg(a.f_text, "--f");
    Corollary2Case c;
    c.f_text = a.f_text;
    c.audit = audit_corollary2(as_fn2(f), iv);
    cases.push_back(std::move(c));
  }

  std::string body;
  switch (fmt) {
    case OutputFormat::Json:
      body = json_document(
          "audit-corollary2",
          [&](JsonWriter& w) {
            w.key("domain");
            write_domain_json(w, dom);
            w.key("f");
            if (a.f_text.empty()) w.null();
            else w.value(a.f_text);
          },
          [&](JsonWriter& w) { write_corollary2_json(w, cases); });
      break;
    case OutputFormat::Csv: body = csv_corollary2(cases); break;
    case OutputFormat::Text: body = text_corollary2(cases); break;
  }
  emit(body, out_path);
  return exit_code_for(corollary2_verdict(cases));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hadamard-type inequality verification and falsification"};
  app.require_subcommand(1);

  std::string format_name = "text";
  std::string out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "json | csv | text")
        ->capture_default_str();
    sub->add_option("--out", out_path, "write the report to a file");
  };

  CheckClassArgs cc;
  CLI::App* cc_cmd = app.add_subcommand(
      "check-class", "sampled membership check for a function class");
  cc_cmd->add_option("--f", cc.f_text, "expression in x (and y for 2D)")
      ->required();
  cc_cmd->add_option("--domain", cc.domain_text, "a,b or a,b,c,d")->required();
  cc_cmd->add_option("--class", cc.class_name_text,
                     "convex | p | gl | joint-* | coord-*")
      ->required();
  cc_cmd->add_option("--grid", cc.grid_points, "sample points per axis")
      ->capture_default_str();
  cc_cmd->add_option("--lambdas", cc.lambda_count, "lambda values per pair")
      ->capture_default_str();
  cc_cmd->add_option("--tol", cc.tol_abs, "absolute tolerance")
      ->capture_default_str();
  cc_cmd->add_option("--rel-tol", cc.tol_rel, "relative tolerance")
      ->capture_default_str();
  add_common(cc_cmd);

  VerifyArgs vf;
  CLI::App* vf_cmd = app.add_subcommand(
      "verify", "evaluate an inequality chain with quadrature error bars");
  vf_cmd->add_option("--chain", vf.chain_text, "chain name (see README)")
      ->required();
  vf_cmd->add_option("--f", vf.f_text, "expression in x (and y)")->required();
  vf_cmd->add_option("--g", vf.g_text, "second factor for product chains");
  vf_cmd->add_option("--domain", vf.domain_text, "a,b or a,b,c,d")->required();
  vf_cmd->add_option("--quad-nodes", vf.quad_nodes, "Gauss nodes per panel")
      ->capture_default_str();
  vf_cmd->add_option("--quad-tol", vf.quad_tol, "quadrature absolute tolerance")
      ->capture_default_str();
  vf_cmd->add_option("--quad-rel-tol", vf.quad_rel_tol,
                     "quadrature relative tolerance")
      ->capture_default_str();
  vf_cmd->add_option("--max-refinements", vf.max_refinements,
                     "adaptive refinement rounds")
      ->capture_default_str();
  vf_cmd->add_option("--grid", vf.grid_points,
                     "precondition sample points per axis")
      ->capture_default_str();
  vf_cmd->add_option("--lambdas", vf.lambda_count,
                     "precondition lambda count")
      ->capture_default_str();
  vf_cmd->add_option("--tol", vf.tol_abs, "link absolute tolerance")
      ->capture_default_str();
  vf_cmd->add_option("--rel-tol", vf.tol_rel, "link relative tolerance")
      ->capture_default_str();
  vf_cmd->add_flag("--skip-preconditions", vf.skip_preconditions,
                   "skip hypothesis membership checks");
  add_common(vf_cmd);

  FuzzArgs fz;
  CLI::App* fz_cmd = app.add_subcommand(
      "fuzz", "run an inequality chain over seeded certified functions");
  fz_cmd->add_option("--chain", fz.chain_text, "chain name")->required();
  fz_cmd->add_option("--trials", fz.trials, "number of trials")
      ->capture_default_str();
  fz_cmd->add_option("--seed", fz.seed, "master seed")->capture_default_str();
  fz_cmd->add_option("--atoms", fz.atoms, "atoms per generated function")
      ->capture_default_str();
  fz_cmd->add_option("--domain", fz.domain_text,
                     "a,b or a,b,c,d (default unit interval/square)");
  add_common(fz_cmd);

  AuditArgs au;
  CLI::App* au_cmd = app.add_subcommand(
      "audit-corollary2",
      "compare the printed and corrected symmetric-function corollary");
  au_cmd->add_option("--domain", au.domain_text, "a,b (square side)")
      ->capture_default_str();
  au_cmd->add_option("--f", au.f_text,
                     "optional extra symmetric function to audit");
  add_common(au_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    OutputFormat fmt = format_from_name(format_name);
    if (cc_cmd->parsed()) return run_check_class(cc, fmt, out_path);
    if (vf_cmd->parsed()) return run_verify(vf, fmt, out_path);
    if (fz_cmd->parsed()) return run_fuzz(fz, fmt, out_path);
    if (au_cmd->parsed()) return run_audit(au, fmt, out_path);
    std::cerr << "no subcommand\n";
    return kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;  // EX_SOFTWARE
  }
}
