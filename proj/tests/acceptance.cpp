// Acceptance gate: every stated criterion for the toolkit, each printed
// as one [PASS]/[FAIL] line with its runtime. Exits nonzero if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "hadamard/chains.hpp"
#include "hadamard/classes.hpp"
#include "hadamard/probe.hpp"
#include "hadamard/report.hpp"

using namespace hadamard;

namespace {

int g_failures = 0;
std::string g_why;

void why(const std::string& reason) {
  if (g_why.empty()) g_why = reason;
}

bool close_abs(double got, double want, double tol, const char* what) {
  if (std::abs(got - want) <= tol) return true;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: got %.17g want %.17g (abs tol %g)",
                what, got, want, tol);
  why(buf);
  return false;
}

bool close_rel(double got, double want, double tol, const char* what) {
  if (std::abs(got - want) <= tol * std::max(1.0, std::abs(want))) return true;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: got %.17g want %.17g (rel tol %g)",
                what, got, want, tol);
  why(buf);
  return false;
}

void criterion(int number, const char* name,
               const std::function<bool()>& body) {
  g_why.clear();
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    why(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (ok) {
    std::printf("[PASS] %d. %s (%.2fs)\n", number, name, secs);
  } else {
    std::printf("[FAIL] %d. %s (%.2fs): %s\n", number, name, secs,
                g_why.empty() ? "criterion body returned false"
                              : g_why.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

Fn2 const_one = [](double, double) { return 1.0; };

int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  int threads = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* s = std::getenv("HADAMARD_LAB_THREADS"); s && *s) {
    int cap = std::atoi(s);
    if (cap >= 1 && cap < threads) threads = cap;
  }
  return threads;
}

// ---- criteria ----

bool constant_function_constants() {
  auto start = std::chrono::steady_clock::now();
  ChainConfig cfg;

  ChainReport gl = eval_coord_gl(const_one, {0.0, 1.0, 0.0, 1.0}, cfg);
  const double want_gl[3] = {1.0 / 16.0, 1.0 / 4.0, 1.0};
  if (gl.terms.size() != 3) return why("coord-gl term count"), false;
  for (int i = 0; i < 3; ++i)
    if (!close_abs(gl.terms[static_cast<std::size_t>(i)].value, want_gl[i],
                   1e-12, "coord-gl term"))
      return false;

  ChainReport p = eval_coord_p(const_one, {0.0, 1.0, 0.0, 1.0}, cfg);
  const double want_p[4] = {1.0, 2.0, 4.0, 8.0};
  if (p.terms.size() != 4) return why("coord-p term count"), false;
  for (int i = 0; i < 4; ++i)
    if (!close_abs(p.terms[static_cast<std::size_t>(i)].value, want_p[i],
                   1e-12, "coord-p term"))
      return false;

  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (secs >= 1.0) return why("took " + std::to_string(secs) + "s"), false;
  return gl.verdict == Verdict::Holds && p.verdict == Verdict::Holds;
}

bool closed_form_fixture() {
  ParseResult f = parse("x^2*y^2");
  if (!f.ok()) return why("parse"), false;
  ChainConfig cfg;

  ChainReport cc = eval_coord_convex(as_fn2(*f.expr), {0.0, 1.0, 0.0, 1.0},
                                     cfg);
  const double want_cc[5] = {1.0 / 16.0, 1.0 / 12.0, 1.0 / 9.0, 1.0 / 6.0,
                             1.0 / 4.0};
  if (cc.terms.size() != 5) return why("coord-convex term count"), false;
  for (int i = 0; i < 5; ++i)
    if (!close_rel(cc.terms[static_cast<std::size_t>(i)].value, want_cc[i],
                   1e-9, "coord-convex term"))
      return false;

  ChainReport gl = eval_coord_gl(as_fn2(*f.expr), {0.0, 1.0, 0.0, 1.0}, cfg);
  const double want_gl[3] = {1.0 / 256.0, 1.0 / 48.0, 1.0 / 9.0};
  if (gl.terms.size() != 3) return why("coord-gl term count"), false;
  for (int i = 0; i < 3; ++i)
    if (!close_rel(gl.terms[static_cast<std::size_t>(i)].value, want_gl[i],
                   1e-9, "coord-gl term"))
      return false;
  return true;
}

bool fuzzing_soundness() {
  auto start = std::chrono::steady_clock::now();
  int threads = worker_threads();
  GenSpec tmpl;
  tmpl.domain = Rect{0.0, 1.0, 0.0, 1.0};

  const std::array<ChainId, 5> chains = {
      ChainId::CoordConvex, ChainId::CoordGL, ChainId::CoordP,
      ChainId::ProdCoord, ChainId::Prod1D};
  for (std::size_t i = 0; i < chains.size(); ++i) {
    FuzzReport rep = fuzz_chain(chains[i], tmpl, 100,
                                1000 + static_cast<std::uint64_t>(i),
                                fuzz_chain_config(), threads);
    std::string tag(chain_name(chains[i]));
    if (!rep.violations.empty())
      return why(tag + ": " + std::to_string(rep.violations.size()) +
                 " violated links, first f = " +
                 rep.violations.front().f_text),
             false;
    if (rep.precondition_failures != 0)
      return why(tag + ": " + std::to_string(rep.precondition_failures) +
                 " membership-check failures"),
             false;
    if (rep.inconclusive_count != 0)
      return why(tag + ": " + std::to_string(rep.inconclusive_count) +
                 " inconclusive trials"),
             false;
  }

  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (secs >= 60.0) return why("took " + std::to_string(secs) + "s"), false;
  return true;
}

bool documented_falsification() {
  Corollary2Audit audit = audit_corollary2(const_one, {0.0, 1.0});
  if (audit.stated.verdict != Verdict::Violated)
    return why("stated variant did not report violated for f=1"), false;
  // 1 <= 1/4 fails by 3/4: far beyond every tolerance in play.
  if (!(audit.stated.links[0].slack < -0.5))
    return why("stated violation not beyond tolerances"), false;
  if (audit.corrected.verdict != Verdict::Holds)
    return why("corrected variant did not hold for f=1"), false;
  return true;
}

bool affine_equality_chain() {
  SplitMix64 rng(555);
  ChainConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    double alpha = rng.uniform(-2.0, 2.0);
    double beta = rng.uniform(-2.0, 2.0);
    double a = rng.uniform(-2.0, 1.0), b = a + rng.uniform(0.5, 3.0);
    double c = rng.uniform(-2.0, 1.0), d = c + rng.uniform(0.5, 3.0);
    // gamma keeps f nonnegative on the rectangle with margin.
    double min_corner = std::min(std::min(alpha * a, alpha * b), 0.0) +
                        std::min(std::min(beta * c, beta * d), 0.0);
    double gamma = -min_corner + 0.5;
    Fn2 f = [=](double x, double y) { return alpha * x + beta * y + gamma; };

    ChainReport rep = eval_coord_convex(f, {a, b, c, d}, cfg);
    if (rep.verdict == Verdict::Violated)
      return why("affine chain reported violated"), false;
    double t0 = rep.terms[0].value;
    double scale = std::abs(t0);
    for (const auto& t : rep.terms)
      if (std::abs(t.value - t0) > 1e-10 * scale) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "trial %d: term %s = %.17g vs %.17g", trial,
                      t.label.c_str(), t.value, t0);
        return why(buf), false;
      }
  }
  return true;
}

bool lemma_reductions() {
  SampleGrid grid;
  for (ClassTag joint : {ClassTag::JointGL, ClassTag::JointP}) {
    for (int i = 0; i < 50; ++i) {
      GenSpec spec;
      spec.klass = joint;
      spec.seed = derive_seed(606, static_cast<std::uint64_t>(i) +
                                       (joint == ClassTag::JointP ? 1000 : 0));
      spec.atom_count = 1 + i % 5;
      GeneratedFn fn = gen_function(spec);
      auto red = verify_lemma_reduction(as_fn2(fn.expr),
                                        {0.0, 1.0, 0.0, 1.0}, joint, grid);
      std::string tag(class_name(joint));
      if (red.joint.verdict != Verdict::Holds)
        return why(tag + " joint check failed on " + to_string(fn.expr)),
               false;
      if (red.coordinated.verdict != Verdict::Holds)
        return why(tag + " coordinated check failed on " +
                   to_string(fn.expr)),
               false;
      if (!red.implication_ok)
        return why(tag + " implication audit flagged " + to_string(fn.expr)),
               false;
    }
  }
  return true;
}

bool known_counterexamples() {
  ParseResult xy = parse("x*y");
  if (!xy.ok()) return why("parse x*y"), false;
  auto joint = check_joint(as_fn2(*xy.expr), {0.0, 1.0, 0.0, 1.0},
                           ClassTag::JointConvex, {});
  if (joint.verdict != Verdict::Violated)
    return why("x*y joint-convex not violated"), false;
  if (joint.witnesses.empty() ||
      !(joint.witnesses.front().violation >= 0.25 - 1e-9))
    return why("x*y witness violation below 0.25 - 1e-9"), false;

  ParseResult rt = parse("sqrt(x)");
  if (!rt.ok()) return why("parse sqrt"), false;
  auto cvx = check_1d(as_fn1(*rt.expr), {0.0, 1.0}, ClassTag::Convex1D, {});
  if (cvx.verdict != Verdict::Violated)
    return why("sqrt(x) convex not violated"), false;
  if (cvx.witnesses.empty() || !(cvx.witnesses.front().violation >= 0.2))
    return why("sqrt(x) witness violation below 0.2"), false;
  return true;
}

bool quadrature_quality() {
  // n = 8 Gauss on one panel integrates x^15 on [0,2] to 1e-12 relative.
  const GaussRule& rule = gauss_nodes(8);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double x = 1.0 + rule.nodes[i];  // map [-1,1] -> [0,2]
    sum += rule.weights[i] * std::pow(x, 15);
  }
  sum *= 1.0;  // jacobian (b-a)/2 = 1
  if (!close_rel(sum, 4096.0, 1e-12, "single-panel x^15")) return false;

  // Fubini consistency on random smooth bivariate polynomials.
  SplitMix64 rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    double c[4][4];
    for (auto& row : c)
      for (double& v : row) v = rng.uniform(-1.5, 1.5);
    auto f = [&](double x, double y) {
      double acc = 0.0, xp = 1.0;
      for (int i = 0; i < 4; ++i) {
        double yp = 1.0;
        for (int j = 0; j < 4; ++j) {
          acc += c[i][j] * xp * yp;
          yp *= y;
        }
        xp *= x;
      }
      return acc;
    };
    Rect dom{-1.0, 1.5, 0.25, 2.0};
    QuadResult direct = integrate_2d(f, dom);
    QuadResult iterated = integrate_1d(
        [&](double x) {
          return integrate_1d([&](double y) { return f(x, y); },
                              {dom.c, dom.d})
              .value;
        },
        {dom.a, dom.b});
    double gap = std::abs(direct.value - iterated.value);
    if (gap > direct.error_estimate + iterated.error_estimate + 1e-10) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "trial %d: gap %.3g > est %.3g", trial,
                    gap, direct.error_estimate + iterated.error_estimate);
      return why(buf), false;
    }
  }
  return true;
}

bool cli_determinism() {
  std::string bin;
  if (const char* env = std::getenv("HADAMARD_LAB_BIN")) bin = env;
  if (bin.empty()) return why("HADAMARD_LAB_BIN not set"), false;

  auto run_once = [&](const std::string& path) {
    std::string cmd = bin +
                      " fuzz --chain coord-p --trials 50 --seed 7 "
                      "--format json --out " +
                      path + " 2>/dev/null";
    return std::system(cmd.c_str());
  };
  if (run_once("/tmp/hadamard_accept_a.json") != 0)
    return why("first fuzz run exited nonzero"), false;
  if (run_once("/tmp/hadamard_accept_b.json") != 0)
    return why("second fuzz run exited nonzero"), false;

  auto slurp = [](const char* path) {
    std::string out;
    if (FILE* fp = std::fopen(path, "rb")) {
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, fp)) > 0) out.append(buf, n);
      std::fclose(fp);
    }
    return out;
  };
  std::string a = slurp("/tmp/hadamard_accept_a.json");
  std::string b = slurp("/tmp/hadamard_accept_b.json");
  std::remove("/tmp/hadamard_accept_a.json");
  std::remove("/tmp/hadamard_accept_b.json");
  if (a.empty()) return why("no output produced"), false;
  if (a != b) return why("outputs differ between runs"), false;
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance gate: %d worker thread(s)\n", worker_threads());

  criterion(1, "constant-function constant exposure",
            constant_function_constants);
  criterion(2, "closed-form fixture x^2*y^2", closed_form_fixture);
  criterion(3, "fuzzing soundness, 500 certified trials",
            fuzzing_soundness);
  criterion(4, "documented falsification of the printed corollary",
            documented_falsification);
  criterion(5, "equality chain on random affine functions",
            affine_equality_chain);
  criterion(6, "joint-to-coordinated lemma reductions", lemma_reductions);
  criterion(7, "known counterexamples (x*y joint, sqrt concavity)",
            known_counterexamples);
  criterion(8, "quadrature quality (degree-15 exactness, Fubini)",
            quadrature_quality);
  criterion(9, "byte-identical fuzz reports across runs", cli_determinism);

  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
