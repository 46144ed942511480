#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "hadamard/probe.hpp"

using namespace hadamard;

TEST_CASE("splitmix64 matches the reference stream") {
  SplitMix64 g(0);
  CHECK(g.next() == 0xE220A8397B1DCDAFull);
  CHECK(g.next() == 0x6E789E6AA1B965F4ull);
  CHECK(g.next() == 0x06C45D188009454Full);

  SplitMix64 h(1234567);
  CHECK(h.next() == 0x599ED017FB08FC85ull);
  CHECK(h.next() == 0x2C73F08458540FA5ull);

  SplitMix64 u(42);
  double first = u.unit();
  CHECK(first == doctest::Approx(0.7415648787718233).epsilon(1e-15));
}

TEST_CASE("rng helpers stay in range") {
  SplitMix64 g(99);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    double v = g.unit();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    double u = g.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u <= 3.0);
    int k = g.range_int(2, 5);
    CHECK(k >= 2);
    CHECK(k <= 5);
    seen.insert(k);
  }
  CHECK(seen.size() == 4);  // inclusive bounds are reachable
}

TEST_CASE("seed derivation is deterministic and spread out") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 500; ++i) {
    std::uint64_t s = derive_seed(7, i);
    CHECK(s == derive_seed(7, i));
    seeds.insert(s);
  }
  CHECK(seeds.size() == 500);
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("generated functions are deterministic, parseable and certified") {
  SampleGrid grid;
  Tolerance tol;
  for (ClassTag klass : {ClassTag::Convex1D, ClassTag::P1D, ClassTag::GL1D,
                         ClassTag::JointConvex, ClassTag::JointP,
                         ClassTag::JointGL, ClassTag::CoordConvex,
                         ClassTag::CoordP, ClassTag::CoordGL}) {
    CAPTURE(class_name(klass));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      GenSpec spec;
      spec.klass = klass;
      spec.seed = derive_seed(11, seed);
      spec.atom_count = 1 + static_cast<int>(seed % 5);
      if (is_1d_class(klass)) spec.domain = Interval{0.0, 1.0};

      GeneratedFn fn = gen_function(spec);
      GeneratedFn again = gen_function(spec);
      CHECK(structurally_equal(fn.expr, again.expr));
      CHECK(fn.cert.klass == klass);
      CHECK_FALSE(fn.cert.construction.empty());

      // Closed loop: the rendered text reparses to the same tree.
      std::string text = to_string(fn.expr);
      ParseResult parsed_back = parse(text);
      REQUIRE(parsed_back.ok());
      CHECK(structurally_equal(fn.expr, *parsed_back.expr));

      VarSet vars = free_vars(fn.expr);
      if (is_1d_class(klass)) CHECK_FALSE(vars.y);

      // The construction rules must actually certify membership.
      MembershipReport rep;
      if (is_1d_class(klass))
        rep = check_1d(as_fn1(fn.expr), {0.0, 1.0}, klass, grid, tol);
      else if (is_joint_class(klass))
        rep = check_joint(as_fn2(fn.expr), {0.0, 1.0, 0.0, 1.0}, klass, grid,
                          tol);
      else
        rep = check_coordinated(as_fn2(fn.expr), {0.0, 1.0, 0.0, 1.0}, klass,
                                grid, tol);
      CAPTURE(text);
      CHECK(rep.verdict == Verdict::Holds);
    }
  }
}

TEST_CASE("generator respects the domain when anchoring atoms") {
  GenSpec spec;
  spec.klass = ClassTag::CoordP;
  spec.seed = 31337;
  spec.atom_count = 6;
  spec.domain = Rect{2.0, 5.0, -1.0, 1.0};
  GeneratedFn fn = gen_function(spec);
  auto rep = check_coordinated(as_fn2(fn.expr), {2.0, 5.0, -1.0, 1.0},
                               ClassTag::CoordP, {});
  CHECK(rep.verdict == Verdict::Holds);
}

TEST_CASE("symmetrized coordinated members are symmetric and certified") {
  for (std::uint64_t seed : {1ull, 77ull, 4096ull}) {
    GenSpec spec;
    spec.klass = ClassTag::CoordGL;
    spec.seed = seed;
    spec.domain = Rect{0.0, 1.0, 0.0, 1.0};
    GeneratedFn fn = gen_symmetric_coord(spec);
    Fn2 f = as_fn2(fn.expr);
    for (double x : {0.0, 0.33, 0.8}) {
      for (double y : {0.1, 0.5, 1.0}) {
        CHECK(f(x, y) == doctest::Approx(f(y, x)).epsilon(1e-12));
      }
    }
    auto rep = check_coordinated(f, {0.0, 1.0, 0.0, 1.0}, ClassTag::CoordGL,
                                 {});
    CHECK(rep.verdict == Verdict::Holds);
    // Convexity is what the corrected symmetric corollary leans on.
    auto cvx = check_coordinated(f, {0.0, 1.0, 0.0, 1.0},
                                 ClassTag::CoordConvex, {});
    CHECK(cvx.verdict == Verdict::Holds);
  }
}

TEST_CASE("fuzzing certified members never reports violations") {
  GenSpec tmpl;
  tmpl.domain = Rect{0.0, 1.0, 0.0, 1.0};
  for (ChainId chain : {ChainId::HQ1D, ChainId::HP1D, ChainId::Prod1D,
                        ChainId::CoordConvex, ChainId::CoordGL,
                        ChainId::CoordGLSquare, ChainId::CoordP,
                        ChainId::ProdCoord}) {
    CAPTURE(chain_name(chain));
    FuzzReport rep = fuzz_chain(chain, tmpl, 8, 2026);
    CHECK(rep.trials == 8);
    CHECK(rep.violations.empty());
    CHECK(rep.inconclusive_count == 0);
    CHECK(rep.precondition_failures == 0);
    REQUIRE(rep.min_slack.trial >= 0);
    CHECK(rep.min_slack.slack >= 0.0);
    CHECK_FALSE(rep.min_slack.link.empty());
  }
}

TEST_CASE("symmetric-corollary fuzzing singles out the printed variant") {
  GenSpec tmpl;
  FuzzReport stated = fuzz_chain(ChainId::CoordGLSymStated, tmpl, 4, 5);
  // Trial 0 injects f = 1, the documented counterexample.
  REQUIRE_FALSE(stated.violations.empty());
  CHECK(stated.violations.front().trial == 0);
  CHECK(stated.violations.front().f_text == "1");

  FuzzReport fixed = fuzz_chain(ChainId::CoordGLSymCorrected, tmpl, 4, 5);
  CHECK(fixed.violations.empty());
  CHECK(fixed.precondition_failures == 0);
}

TEST_CASE("fuzz reports are canonical across thread counts") {
  GenSpec tmpl;
  FuzzReport serial = fuzz_chain(ChainId::CoordGL, tmpl, 6, 404,
                                 fuzz_chain_config(), 1);
  FuzzReport threaded = fuzz_chain(ChainId::CoordGL, tmpl, 6, 404,
                                   fuzz_chain_config(), 4);
  CHECK(serial.min_slack.trial == threaded.min_slack.trial);
  CHECK(serial.min_slack.seed == threaded.min_slack.seed);
  CHECK(serial.min_slack.slack == threaded.min_slack.slack);
  CHECK(serial.min_slack.link == threaded.min_slack.link);
  CHECK(serial.violations.size() == threaded.violations.size());
  CHECK(serial.inconclusive_count == threaded.inconclusive_count);
}

TEST_CASE("product-chain fuzzing draws a pair per trial") {
  GenSpec tmpl;
  tmpl.domain = Interval{0.0, 1.0};
  FuzzReport rep = fuzz_chain(ChainId::Prod1D, tmpl, 5, 12);
  CHECK(rep.violations.empty());
  // The two generation streams must be decoupled: check directly.
  GenSpec fa;
  fa.klass = ClassTag::Convex1D;
  fa.seed = derive_seed(derive_seed(12, 0), 0);
  fa.domain = Interval{0.0, 1.0};
  GenSpec fb = fa;
  fb.klass = ClassTag::P1D;
  fb.seed = derive_seed(derive_seed(12, 0), 1);
  CHECK_FALSE(structurally_equal(gen_function(fa).expr,
                                 gen_function(fb).expr));
}

TEST_CASE("membership falsifier finds the classic counterexamples") {
  ParseResult root = parse("sqrt(x)");
  REQUIRE(root.ok());
  auto w = falsify_membership(*root.expr, Domain(Interval{0.0, 1.0}),
                              ClassTag::Convex1D, 2000, 9);
  REQUIRE(w.has_value());
  CHECK(w->violation > 0.15);  // zoom should sharpen well past this
  CHECK(w->lhs > w->rhs);

  ParseResult xy = parse("x*y");
  REQUIRE(xy.ok());
  auto wj = falsify_membership(*xy.expr, Domain(Rect{0.0, 1.0, 0.0, 1.0}),
                               ClassTag::JointConvex, 4000, 9);
  REQUIRE(wj.has_value());
  CHECK(wj->violation > 0.15);

  // Coordinated falsification: concave partial maps.
  ParseResult sxy = parse("sqrt(x)*sqrt(y)");
  REQUIRE(sxy.ok());
  auto wc = falsify_membership(*sxy.expr, Domain(Rect{0.0, 1.0, 0.0, 1.0}),
                               ClassTag::CoordConvex, 4000, 9);
  REQUIRE(wc.has_value());
  CHECK(wc->kind.find("partial-") == 0);
}

TEST_CASE("membership falsifier stays quiet on members") {
  ParseResult sq = parse("x^2");
  REQUIRE(sq.ok());
  CHECK_FALSE(falsify_membership(*sq.expr, Domain(Interval{0.0, 1.0}),
                                 ClassTag::Convex1D, 3000, 17)
                  .has_value());

  ParseResult one = parse("1");
  REQUIRE(one.ok());
  // GL lambda sampling must avoid the endpoint singularities.
  CHECK_FALSE(falsify_membership(*one.expr, Domain(Interval{0.0, 1.0}),
                                 ClassTag::GL1D, 3000, 17)
                  .has_value());
  CHECK_FALSE(falsify_membership(*one.expr, Domain(Rect{0.0, 1.0, 0.0, 1.0}),
                                 ClassTag::CoordGL, 3000, 17)
                  .has_value());
}

TEST_CASE("falsifier is deterministic for a fixed seed") {
  ParseResult root = parse("sqrt(x)");
  REQUIRE(root.ok());
  auto a = falsify_membership(*root.expr, Domain(Interval{0.0, 1.0}),
                              ClassTag::Convex1D, 1000, 5);
  auto b = falsify_membership(*root.expr, Domain(Interval{0.0, 1.0}),
                              ClassTag::Convex1D, 1000, 5);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->violation == b->violation);
  CHECK(a->lambda == b->lambda);
  CHECK(a->points[0].x == b->points[0].x);
}

TEST_CASE("slack probe reports the tightest link") {
  ParseResult f = parse("x^2*y^2");
  REQUIRE(f.ok());
  ChainConfig cfg;
  cfg.run_preconditions = false;
  SlackProbe probe = min_slack(ChainId::CoordConvex, *f.expr, nullptr,
                               Domain(Rect{0.0, 1.0, 0.0, 1.0}), cfg);
  CHECK(probe.verdict == Verdict::Holds);
  CHECK(probe.slack ==
        doctest::Approx(1.0 / 12.0 - 1.0 / 16.0).epsilon(1e-8));
  CHECK(probe.link == "f(mid,mid) <= mid-line-avg");
  CHECK(probe.terms.size() == 5);
}
