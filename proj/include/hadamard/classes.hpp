#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hadamard/quadrature.hpp"

namespace hadamard {

enum class ClassTag : std::uint8_t {
  Convex1D,
  P1D,
  GL1D,
  JointConvex,
  JointP,
  JointGL,
  CoordConvex,
  CoordP,
  CoordGL,
};

std::string_view class_name(ClassTag c);        // kebab-case, CLI-facing
std::optional<ClassTag> class_from_name(std::string_view name);
bool is_1d_class(ClassTag c);
bool is_joint_class(ClassTag c);
bool is_coordinated_class(ClassTag c);
ClassTag coordinated_counterpart(ClassTag joint);  // JointP -> CoordP etc.
ClassTag partial_map_class(ClassTag coord);        // CoordP -> P1D etc.

struct SampleGrid {
  int point_count = 17;  // per axis, uniform, endpoints included
  int lambda_count = 9;
  bool lambda_open = false;

  // Closed grid: lambda_count values {k/(lambda_count-1)}, k=0..count-1,
  // so 0, 1/2 and 1 are all present at the default count. Open grid:
  // {k/(lambda_count+1)}, k=1..count — endpoints excluded, 1/2 present.
  // Classes defined only for lambda in (0,1) always get the open grid,
  // whatever the flag says, so division by zero is impossible there.
  std::vector<double> lambda_values(bool force_open) const;
  static std::vector<double> axis_points(double lo, double hi, int count);
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-9;
  // Acceptance band for "lhs <= rhs" verdicts.
  double bound(double lhs, double rhs) const;
};

enum class Verdict : std::uint8_t { Holds, Violated, Inconclusive };

// Membership checks say "holds-on-samples" rather than "holds": sampling
// can refute but never prove.
std::string_view verdict_name(Verdict v);
std::string_view membership_verdict_name(Verdict v);

struct Witness {
  std::string kind;  // "inequality", "nonnegativity", "partial-x ...", ...
  std::vector<EvalPoint> points;  // the sample point(s) the check combined
  double lambda = 0.0;            // 0 when the check has no lambda
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // lhs - rhs - tolerance bound, > 0
};

struct MembershipReport {
  ClassTag klass = ClassTag::Convex1D;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<Witness> witnesses;  // largest violations, capped
  long samples_tested = 0;
  Tolerance tolerance;
};

constexpr int kDefaultWitnessCap = 10;

/// Right-hand side of the defining inequality of c at the two sampled
/// values: lam*fa + (1-lam)*fb (convex), fa + fb (P), fa/lam + fb/(1-lam)
/// (Godunova-Levin).
double class_combination_rhs(ClassTag c, double fa, double fb, double lam);

Fn1 as_fn1(const Expr& e);  // e must not use y
Fn2 as_fn2(const Expr& e);

Fn1 partial_map_x(const Fn2& f, double x0);  // v -> f(x0, v)
Fn1 partial_map_y(const Fn2& f, double y0);  // u -> f(u, y0)

/// Tests the defining inequality of c at every grid (x, y, lambda)
/// triple, plus nonnegativity at every grid point for P1D and GL1D.
/// Evaluation faults make the verdict inconclusive unless a violation
/// was already found (a witness stands regardless of faults elsewhere).
MembershipReport check_1d(const Fn1& f, Interval iv, ClassTag c,
                          const SampleGrid& g, const Tolerance& tol = {},
                          int witness_cap = kDefaultWitnessCap);

/// Joint (full-point) inequality over all unordered pairs of 2D grid
/// points; valid because the lambda grids are symmetric about 1/2.
MembershipReport check_joint(const Fn2& f, Rect r, ClassTag c,
                             const SampleGrid& g, const Tolerance& tol = {},
                             int witness_cap = kDefaultWitnessCap);

/// Runs the 1D check on every partial map: x frozen at each x-grid value
/// (sweeping y), then y frozen at each y-grid value. Witnesses carry the
/// full 2D points.
MembershipReport check_coordinated(const Fn2& f, Rect r, ClassTag c,
                                   const SampleGrid& g,
                                   const Tolerance& tol = {},
                                   int witness_cap = kDefaultWitnessCap);

struct LemmaReductionReport {
  MembershipReport joint;
  MembershipReport coordinated;
  // False only in the bug-level case: joint membership held on samples
  // while the coordinated check found a violation on the matched grid.
  bool implication_ok = true;
};

/// Joint membership implies coordinated membership; this runs both checks
/// on matched grids and audits that implication.
LemmaReductionReport verify_lemma_reduction(const Fn2& f, Rect r,
                                            ClassTag joint_class,
                                            const SampleGrid& g,
                                            const Tolerance& tol = {},
                                            int witness_cap = kDefaultWitnessCap);

}  // namespace hadamard
