#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hadamard/quadrature.hpp"

using namespace hadamard;

namespace {

// Maps the reference rule to [a,b] and sums; the single-panel oracle.
double single_panel(int n, double a, double b, const Fn1& f) {
  const GaussRule& rule = gauss_nodes(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

}  // namespace

TEST_CASE("rule construction invariants") {
  for (int n : {2, 3, 5, 8, 13, 21, 40, 64}) {
    CAPTURE(n);
    const GaussRule& r = gauss_nodes(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    REQUIRE(r.weights.size() == static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      wsum += r.weights[i];
      CHECK(r.weights[i] > 0.0);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      CHECK(r.nodes[i] > -1.0);
      CHECK(r.nodes[i] < 1.0);
      // symmetry about 0
      CHECK(r.nodes[i] == doctest::Approx(-r.nodes[n - 1 - i]).epsilon(1e-15));
      CHECK(r.weights[i] ==
            doctest::Approx(r.weights[n - 1 - i]).epsilon(1e-15));
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    if (n % 2 == 1) CHECK(r.nodes[n / 2] == 0.0);
  }
}

TEST_CASE("known 5-point rule values") {
  // Abscissa sqrt(5 - 2*sqrt(10/7))/3 and weight (322+13*sqrt(70))/900.
  const GaussRule& r = gauss_nodes(5);
  CHECK(r.nodes[3] ==
        doctest::Approx(std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0)
            .epsilon(1e-15));
  CHECK(r.weights[3] ==
        doctest::Approx((322.0 + 13.0 * std::sqrt(70.0)) / 900.0)
            .epsilon(1e-15));
  CHECK(r.weights[2] == doctest::Approx(128.0 / 225.0).epsilon(1e-15));
}

TEST_CASE("unsupported orders throw with the order attached") {
  for (int n : {-3, 0, 1, 65, 1000}) {
    CAPTURE(n);
    try {
      gauss_nodes(n);
      FAIL("expected UnsupportedOrderError");
    } catch (const UnsupportedOrderError& e) {
      CHECK(e.order() == n);
    }
  }
}

TEST_CASE("n-point rule is exact to degree 2n-1 on one panel") {
  // x^15 with n=8 on [0,2]: exactly representable case.
  double got = single_panel(8, 0.0, 2.0, [](double x) {
    double x3 = x * x * x;
    double x5 = x3 * x * x;
    return x5 * x5 * x5;  // x^15
  });
  double want = 4096.0;  // 2^16 / 16
  CHECK(std::abs(got - want) <= 1e-12 * want);

  // Degree 2n-1 for small n, random coefficients.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int n : {2, 4, 6}) {
    int deg = 2 * n - 1;
    std::vector<double> c(static_cast<std::size_t>(deg + 1));
    for (auto& v : c) v = coef(rng);
    auto poly = [&](double x) {
      double acc = 0.0;
      for (int k = deg; k >= 0; --k) acc = acc * x + c[static_cast<std::size_t>(k)];
      return acc;
    };
    double exact = 0.0;  // integral over [-1, 2]
    for (int k = 0; k <= deg; ++k)
      exact += c[static_cast<std::size_t>(k)] *
               (std::pow(2.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
    double approx = single_panel(n, -1.0, 2.0, poly);
    CAPTURE(n);
    CHECK(approx == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("adaptive 1d handles smooth, kinked and singular integrands") {
  QuadConfig cfg;

  QuadResult smooth = integrate_1d([](double x) { return std::exp(x); },
                                   {0.0, 1.0}, cfg);
  CHECK(smooth.converged);
  CHECK(std::abs(smooth.value - (std::exp(1.0) - 1.0)) <= 1e-12);
  CHECK(smooth.panels_used >= cfg.initial_panels);

  // |x - 1/3| has a kink off every panel boundary.
  QuadResult kink = integrate_1d([](double x) { return std::abs(x - 1.0 / 3.0); },
                                 {0.0, 1.0}, cfg);
  double kink_exact = (1.0 / 18.0) + (2.0 / 9.0);
  CHECK(kink.converged);
  CHECK(std::abs(kink.value - kink_exact) <=
        std::max(1e-10, 10 * kink.error_estimate));

  // sqrt has an endpoint derivative singularity; nodes stay interior.
  QuadConfig deep = cfg;
  deep.max_refinements = 20;
  QuadResult root = integrate_1d([](double x) { return std::sqrt(x); },
                                 {0.0, 1.0}, deep);
  CHECK(std::abs(root.value - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("convergence flag is honest under a starved budget") {
  QuadConfig starved;
  starved.max_refinements = 0;
  starved.initial_panels = 1;
  starved.abs_tol = 1e-15;
  starved.rel_tol = 1e-15;
  QuadResult r = integrate_1d([](double x) { return std::sqrt(std::abs(x - 0.377)); },
                              {0.0, 1.0}, starved);
  CHECK_FALSE(r.converged);
  CHECK(r.error_estimate > 0.0);
}

TEST_CASE("interior faults surface as NonIntegrableError with the point") {
  try {
    integrate_1d([](double x) {
      if (x < 0.5) throw EvalException({EvalError::Kind::DivisionByZero,
                                        EvalPoint{x, {}}});
      return 1.0 / x;
    }, {0.0, 1.0});
    FAIL("expected NonIntegrableError");
  } catch (const NonIntegrableError& e) {
    CHECK(e.cause().kind == EvalError::Kind::DivisionByZero);
    CHECK(e.cause().point.x < 0.5);
  }
}

TEST_CASE("2d tensor quadrature matches closed forms") {
  QuadResult r = integrate_2d([](double x, double y) { return x * x * y * y; },
                              {0.0, 1.0, 0.0, 1.0});
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0 / 9.0) <= 1e-10);

  QuadResult kink = integrate_2d(
      [](double x, double y) { return std::abs(x - y); }, {0.0, 1.0, 0.0, 1.0});
  CHECK(std::abs(kink.value - 1.0 / 3.0) <=
        std::max(1e-9, 10 * kink.error_estimate));

  QuadResult rect = integrate_2d([](double x, double y) { return x + 2 * y; },
                                 {1.0, 3.0, -1.0, 2.0});
  // int_1^3 int_{-1}^2 (x + 2y) dy dx = 3*(x) over [1,3] -> 12 + 2*3 = 18
  CHECK(rect.value == doctest::Approx(18.0).epsilon(1e-13));
}

TEST_CASE("2d agrees with iterated 1d on random smooth polynomials") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    double c[4][4];
    for (auto& row : c)
      for (double& v : row) v = coef(rng);
    auto f = [&](double x, double y) {
      double acc = 0.0;
      double xp = 1.0;
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
    Rect dom{-0.5, 1.25, 0.25, 2.0};
    QuadResult direct = integrate_2d(f, dom);
    QuadResult iterated = integrate_1d(
        [&](double x) {
          return integrate_1d([&](double y) { return f(x, y); },
                              {dom.c, dom.d}).value;
        },
        {dom.a, dom.b});
    CAPTURE(trial);
    CHECK(std::abs(direct.value - iterated.value) <=
          direct.error_estimate + iterated.error_estimate + 1e-10);
  }
}

TEST_CASE("error estimates bound true error on analytic integrands") {
  for (double freq : {1.0, 3.5, 9.0}) {
    QuadResult r = integrate_1d(
        [&](double x) { return std::sin(freq * x); }, {0.0, 2.0});
    double exact = (1.0 - std::cos(2.0 * freq)) / freq;
    CAPTURE(freq);
    CHECK(std::abs(r.value - exact) <= std::max(r.error_estimate, 1e-12));
  }
}
