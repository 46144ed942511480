#include "hadamard/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>

namespace hadamard {

namespace {

// Hard stops so a hostile integrand cannot grow the panel list without
// bound; hitting them just yields converged=false.
constexpr std::size_t kMaxPanels1D = 1u << 17;
constexpr std::size_t kMaxPanels2D = 1u << 17;

// Neumaier-compensated accumulator; panel sums must not drift with
// panel count.
struct Acc {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double get() const { return sum + comp; }
};

GaussRule compute_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pi = 3.14159265358979323846;
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess for the i-th root (descending order).
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) via the three-term recurrence.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    // Refresh the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
    }
    pp = n * (x * p0 - p1) / (x * x - 1.0);
    if (std::abs(x) < 1e-15) x = 0.0;  // middle root of odd rules
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

double panel_sum_1d(const Fn1& f, const GaussRule& g, double lo, double hi) {
  double c = 0.5 * (lo + hi);
  double h = 0.5 * (hi - lo);
  Acc acc;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    acc.add(g.weights[i] * f(c + h * g.nodes[i]));
  return acc.get() * h;
}

double panel_sum_2d(const Fn2& f, const GaussRule& g, double xlo, double xhi,
                    double ylo, double yhi) {
  double cx = 0.5 * (xlo + xhi), hx = 0.5 * (xhi - xlo);
  double cy = 0.5 * (ylo + yhi), hy = 0.5 * (yhi - ylo);
  Acc acc;
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    double y = cy + hy * g.nodes[j];
    double wy = g.weights[j];
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      acc.add(wy * g.weights[i] * f(cx + hx * g.nodes[i], y));
  }
  return acc.get() * hx * hy;
}

struct Panel1 {
  double lo, hi;
  double coarse;    // one rule over [lo,hi]
  double fine_lo;   // one rule over [lo,mid]
  double fine_hi;   // one rule over [mid,hi]
  double fine() const { return fine_lo + fine_hi; }
  double err() const { return std::abs(fine() - coarse); }
};

Panel1 make_panel_1d(const Fn1& f, const GaussRule& g, double lo, double hi,
                     double coarse) {
  double mid = 0.5 * (lo + hi);
  return {lo, hi, coarse, panel_sum_1d(f, g, lo, mid),
          panel_sum_1d(f, g, mid, hi)};
}

struct Panel2 {
  double xlo, xhi, ylo, yhi;
  double coarse;
  // Quadrants in fixed order: (lo,lo), (hi,lo), (lo,hi), (hi,hi).
  std::array<double, 4> fine_q;
  double fine() const {
    return ((fine_q[0] + fine_q[1]) + (fine_q[2] + fine_q[3]));
  }
  double err() const { return std::abs(fine() - coarse); }
};

Panel2 make_panel_2d(const Fn2& f, const GaussRule& g, double xlo, double xhi,
                     double ylo, double yhi, double coarse) {
  double xm = 0.5 * (xlo + xhi);
  double ym = 0.5 * (ylo + yhi);
  Panel2 p{xlo, xhi, ylo, yhi, coarse, {}};
  p.fine_q[0] = panel_sum_2d(f, g, xlo, xm, ylo, ym);
  p.fine_q[1] = panel_sum_2d(f, g, xm, xhi, ylo, ym);
  p.fine_q[2] = panel_sum_2d(f, g, xlo, xm, ym, yhi);
  p.fine_q[3] = panel_sum_2d(f, g, xm, xhi, ym, yhi);
  return p;
}

template <typename Panel>
double total_value(const std::vector<Panel>& panels) {
  Acc acc;
  for (const auto& p : panels) acc.add(p.fine());
  return acc.get();
}

template <typename Panel>
double total_err(const std::vector<Panel>& panels) {
  Acc acc;
  for (const auto& p : panels) acc.add(p.err());
  return acc.get();
}

}  // namespace

UnsupportedOrderError::UnsupportedOrderError(int n)
    : std::invalid_argument("Gauss-Legendre order must be in [2,64], got " +
                            std::to_string(n)),
      n_(n) {}

NonIntegrableError::NonIntegrableError(EvalError cause)
    : std::runtime_error(std::string("integrand fault (") +
                         std::string(to_string(cause.kind)) +
                         ") inside the integration domain"),
      cause_(cause) {}

const GaussRule& gauss_nodes(int n) {
  if (n < 2 || n > 64) throw UnsupportedOrderError(n);
  static std::mutex mu;
  static std::array<std::unique_ptr<const GaussRule>, 65> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (!cache[n])
    cache[n] = std::make_unique<const GaussRule>(compute_rule(n));
  return *cache[n];
}

QuadResult integrate_1d(const Fn1& f, Interval iv, const QuadConfig& cfg) {
  const GaussRule& rule = gauss_nodes(cfg.nodes_per_panel);
  try {
    std::vector<Panel1> panels;
    int n0 = std::max(1, cfg.initial_panels);
    panels.reserve(static_cast<std::size_t>(n0));
    double width = (iv.b - iv.a) / n0;
    for (int i = 0; i < n0; ++i) {
      double lo = iv.a + i * width;
      double hi = (i + 1 == n0) ? iv.b : iv.a + (i + 1) * width;
      panels.push_back(
          make_panel_1d(f, rule, lo, hi, panel_sum_1d(f, rule, lo, hi)));
    }

    double value = total_value(panels);
    double err = total_err(panels);
    for (int round = 0; round < cfg.max_refinements; ++round) {
      double bound = cfg.abs_tol + cfg.rel_tol * std::abs(value);
      if (err <= bound || panels.size() >= kMaxPanels1D) break;
      // Split every panel holding more than its share of the budget. The
      // worst panel always exceeds err/P > bound/(2P), so each round
      // makes progress.
      double threshold = bound / (2.0 * static_cast<double>(panels.size()));
      std::vector<Panel1> next;
      next.reserve(panels.size() + 8);
      for (const auto& p : panels) {
        if (p.err() > threshold && next.size() + panels.size() < kMaxPanels1D) {
          double mid = 0.5 * (p.lo + p.hi);
          next.push_back(make_panel_1d(f, rule, p.lo, mid, p.fine_lo));
          next.push_back(make_panel_1d(f, rule, mid, p.hi, p.fine_hi));
        } else {
          next.push_back(p);
        }
      }
      panels = std::move(next);
      value = total_value(panels);
      err = total_err(panels);
    }

    QuadResult res;
    res.value = value;
    res.error_estimate = err;
    res.converged = err <= cfg.abs_tol + cfg.rel_tol * std::abs(value);
    res.panels_used = static_cast<int>(panels.size());
    return res;
  } catch (const EvalException& e) {
    throw NonIntegrableError(e.error());
  }
}

QuadResult integrate_2d(const Fn2& f, Rect r, const QuadConfig& cfg) {
  const GaussRule& rule = gauss_nodes(cfg.nodes_per_panel);
  try {
    std::vector<Panel2> panels;
    int n0 = std::max(1, cfg.initial_panels);
    panels.reserve(static_cast<std::size_t>(n0) * n0);
    double wx = (r.b - r.a) / n0;
    double wy = (r.d - r.c) / n0;
    for (int j = 0; j < n0; ++j) {
      double ylo = r.c + j * wy;
      double yhi = (j + 1 == n0) ? r.d : r.c + (j + 1) * wy;
      for (int i = 0; i < n0; ++i) {
        double xlo = r.a + i * wx;
        double xhi = (i + 1 == n0) ? r.b : r.a + (i + 1) * wx;
        panels.push_back(make_panel_2d(
            f, rule, xlo, xhi, ylo, yhi,
            panel_sum_2d(f, rule, xlo, xhi, ylo, yhi)));
      }
    }

    double value = total_value(panels);
    double err = total_err(panels);
    for (int round = 0; round < cfg.max_refinements; ++round) {
      double bound = cfg.abs_tol + cfg.rel_tol * std::abs(value);
      if (err <= bound || panels.size() >= kMaxPanels2D) break;
      double threshold = bound / (2.0 * static_cast<double>(panels.size()));
      std::vector<Panel2> next;
      next.reserve(panels.size() + 16);
      for (const auto& p : panels) {
        if (p.err() > threshold && next.size() + panels.size() < kMaxPanels2D) {
          double xm = 0.5 * (p.xlo + p.xhi);
          double ym = 0.5 * (p.ylo + p.yhi);
          next.push_back(
              make_panel_2d(f, rule, p.xlo, xm, p.ylo, ym, p.fine_q[0]));
          next.push_back(
              make_panel_2d(f, rule, xm, p.xhi, p.ylo, ym, p.fine_q[1]));
          next.push_back(
              make_panel_2d(f, rule, p.xlo, xm, ym, p.yhi, p.fine_q[2]));
          next.push_back(
              make_panel_2d(f, rule, xm, p.xhi, ym, p.yhi, p.fine_q[3]));
        } else {
          next.push_back(p);
        }
      }
      panels = std::move(next);
      value = total_value(panels);
      err = total_err(panels);
    }

    QuadResult res;
    res.value = value;
    res.error_estimate = err;
    res.converged = err <= cfg.abs_tol + cfg.rel_tol * std::abs(value);
    res.panels_used = static_cast<int>(panels.size());
    return res;
  } catch (const EvalException& e) {
    throw NonIntegrableError(e.error());
  }
}

}  // namespace hadamard
