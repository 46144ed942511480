#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "hadamard/expr.hpp"

namespace hadamard {

struct Interval {
  double a = 0.0;
  double b = 1.0;  // requires a < b, both finite
};

// The rectangle [a,b] x [c,d].
struct Rect {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;
};

struct QuadConfig {
  int nodes_per_panel = 8;  // Gauss-Legendre order, 2..64
  int initial_panels = 4;   // uniform panels per axis before adaptation
  int max_refinements = 12; // rounds of splitting out-of-tolerance panels
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  // two-resolution difference, not a bound
  bool converged = false;
  int panels_used = 0;
};

struct GaussRule {
  std::vector<double> nodes;    // ascending, symmetric about 0, on [-1,1]
  std::vector<double> weights;  // positive, sum to 2
};

class UnsupportedOrderError : public std::invalid_argument {
 public:
  explicit UnsupportedOrderError(int n);
  int order() const { return n_; }

 private:
  int n_;
};

/// An evaluation fault inside an integrand makes the integral undefined
/// for our purposes; the faulting point is preserved.
class NonIntegrableError : public std::runtime_error {
 public:
  explicit NonIntegrableError(EvalError cause);
  const EvalError& cause() const { return cause_; }

 private:
  EvalError cause_;
};

/// Legendre nodes/weights on [-1,1] for 2 <= n <= 64, computed by Newton
/// iteration and cached. The returned reference stays valid for the
/// process lifetime.
const GaussRule& gauss_nodes(int n);

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Composite Gauss-Legendre with adaptive panel bisection. The error
/// estimate per panel is |sum of half-panel rules - whole-panel rule|;
/// panels exceeding their share of the tolerance are split, up to
/// cfg.max_refinements rounds. Nodes are interior, so endpoint
/// singularities never fault; they show up as converged=false instead.
/// Throws NonIntegrableError if the integrand faults at an interior node.
QuadResult integrate_1d(const Fn1& f, Interval iv, const QuadConfig& cfg = {});

/// Tensor-product counterpart on a rectangle; refinement quadrisects
/// out-of-tolerance panels. Same contract as integrate_1d.
QuadResult integrate_2d(const Fn2& f, Rect r, const QuadConfig& cfg = {});

}  // namespace hadamard
