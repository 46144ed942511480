#include "hadamard/classes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace hadamard {

namespace {

std::optional<double> try_call(const Fn1& f, double x, bool& faulted) {
  try {
    return f(x);
  } catch (const EvalException&) {
    faulted = true;
    return std::nullopt;
  }
}

std::optional<double> try_call(const Fn2& f, double x, double y,
                               bool& faulted) {
  try {
    return f(x, y);
  } catch (const EvalException&) {
    faulted = true;
    return std::nullopt;
  }
}

// Keeps the `cap` largest violations; earlier samples win ties so the
// retained set is deterministic under any evaluation order we use.
class WitnessCollector {
 public:
  explicit WitnessCollector(int cap) : cap_(std::max(1, cap)) {}

  void offer(Witness w) {
    if (static_cast<int>(items_.size()) == cap_ &&
        w.violation <= items_.back().violation)
      return;
    auto it = std::upper_bound(
        items_.begin(), items_.end(), w.violation,
        [](double v, const Witness& b) { return v > b.violation; });
    items_.insert(it, std::move(w));
    if (static_cast<int>(items_.size()) > cap_) items_.pop_back();
  }

  std::vector<Witness> take() { return std::move(items_); }
  bool empty() const { return items_.empty(); }

 private:
  int cap_;
  std::vector<Witness> items_;
};

EvalPoint point1(double x) {
  EvalPoint p;
  p.x = x;
  return p;
}

EvalPoint point2(double x, double y) {
  EvalPoint p;
  p.x = x;
  p.y = y;
  return p;
}

Verdict settle(const WitnessCollector& wc, bool faulted) {
  if (!wc.empty()) return Verdict::Violated;
  return faulted ? Verdict::Inconclusive : Verdict::Holds;
}

bool needs_nonnegativity(ClassTag c) {
  switch (c) {
    case ClassTag::P1D:
    case ClassTag::GL1D:
    case ClassTag::JointP:
    case ClassTag::JointGL:
    case ClassTag::CoordP:
    case ClassTag::CoordGL:
      return true;
    default:
      return false;
  }
}

bool lambda_must_be_open(ClassTag c) {
  return c == ClassTag::GL1D || c == ClassTag::JointGL ||
         c == ClassTag::CoordGL;
}

}  // namespace

std::string_view class_name(ClassTag c) {
  switch (c) {
    case ClassTag::Convex1D: return "convex";
    case ClassTag::P1D: return "p";
    case ClassTag::GL1D: return "gl";
    case ClassTag::JointConvex: return "joint-convex";
    case ClassTag::JointP: return "joint-p";
    case ClassTag::JointGL: return "joint-gl";
    case ClassTag::CoordConvex: return "coord-convex";
    case ClassTag::CoordP: return "coord-p";
    case ClassTag::CoordGL: return "coord-gl";
  }
  return "?";
}

std::optional<ClassTag> class_from_name(std::string_view name) {
  for (ClassTag c :
       {ClassTag::Convex1D, ClassTag::P1D, ClassTag::GL1D,
        ClassTag::JointConvex, ClassTag::JointP, ClassTag::JointGL,
        ClassTag::CoordConvex, ClassTag::CoordP, ClassTag::CoordGL}) {
    if (class_name(c) == name) return c;
  }
  return std::nullopt;
}

double class_combination_rhs(ClassTag c, double fa, double fb, double lam) {
  switch (c) {
    case ClassTag::Convex1D:
    case ClassTag::JointConvex:
    case ClassTag::CoordConvex:
      return lam * fa + (1.0 - lam) * fb;
    case ClassTag::P1D:
    case ClassTag::JointP:
    case ClassTag::CoordP:
      return fa + fb;
    case ClassTag::GL1D:
    case ClassTag::JointGL:
    case ClassTag::CoordGL:
      return fa / lam + fb / (1.0 - lam);
  }
  return 0.0;
}

bool is_1d_class(ClassTag c) {
  return c == ClassTag::Convex1D || c == ClassTag::P1D || c == ClassTag::GL1D;
}

bool is_joint_class(ClassTag c) {
  return c == ClassTag::JointConvex || c == ClassTag::JointP ||
         c == ClassTag::JointGL;
}

bool is_coordinated_class(ClassTag c) {
  return c == ClassTag::CoordConvex || c == ClassTag::CoordP ||
         c == ClassTag::CoordGL;
}

ClassTag coordinated_counterpart(ClassTag joint) {
  switch (joint) {
    case ClassTag::JointConvex: return ClassTag::CoordConvex;
    case ClassTag::JointP: return ClassTag::CoordP;
    case ClassTag::JointGL: return ClassTag::CoordGL;
    default: return joint;
  }
}

ClassTag partial_map_class(ClassTag coord) {
  switch (coord) {
    case ClassTag::CoordConvex: return ClassTag::Convex1D;
    case ClassTag::CoordP: return ClassTag::P1D;
    case ClassTag::CoordGL: return ClassTag::GL1D;
    default: return coord;
  }
}

std::vector<double> SampleGrid::lambda_values(bool force_open) const {
  int m = std::max(1, lambda_count);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  if (force_open || lambda_open) {
    for (int k = 1; k <= m; ++k)
      out.push_back(static_cast<double>(k) / (m + 1));
  } else if (m == 1) {
    out.push_back(0.5);
  } else {
    for (int k = 0; k < m; ++k)
      out.push_back(static_cast<double>(k) / (m - 1));
  }
  return out;
}

std::vector<double> SampleGrid::axis_points(double lo, double hi, int count) {
  int n = std::max(2, count);
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    pts[static_cast<std::size_t>(k)] =
        lo + (hi - lo) * (static_cast<double>(k) / (n - 1));
  pts.front() = lo;
  pts.back() = hi;
  return pts;
}

double Tolerance::bound(double lhs, double rhs) const {
  return abs + rel * std::max(std::abs(lhs), std::abs(rhs));
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view membership_verdict_name(Verdict v) {
  return v == Verdict::Holds ? "holds-on-samples" : verdict_name(v);
}

Fn1 as_fn1(const Expr& e) {
  return [e](double x) {
    EvalPoint p;
    p.x = x;
    return eval(e, p);
  };
}

Fn2 as_fn2(const Expr& e) {
  return [e](double x, double y) {
    EvalPoint p;
    p.x = x;
    p.y = y;
    return eval(e, p);
  };
}

Fn1 partial_map_x(const Fn2& f, double x0) {
  return [f, x0](double v) { return f(x0, v); };
}

Fn1 partial_map_y(const Fn2& f, double y0) {
  return [f, y0](double u) { return f(u, y0); };
}

MembershipReport check_1d(const Fn1& f, Interval iv, ClassTag c,
                          const SampleGrid& g, const Tolerance& tol,
                          int witness_cap) {
  MembershipReport rep;
  rep.klass = c;
  rep.tolerance = tol;
  WitnessCollector wc(witness_cap);
  bool faulted = false;

  auto pts = SampleGrid::axis_points(iv.a, iv.b, g.point_count);
  auto lams = g.lambda_values(lambda_must_be_open(c));

  std::vector<std::optional<double>> fv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    fv[i] = try_call(f, pts[i], faulted);

  if (needs_nonnegativity(c)) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++rep.samples_tested;
      if (!fv[i]) continue;
      double v = *fv[i];
      double b = tol.bound(0.0, v);
      if (-v > b) {
        Witness w;
        w.kind = "nonnegativity";
        w.points = {point1(pts[i])};
        w.lhs = 0.0;
        w.rhs = v;
        w.violation = -v - b;
        wc.offer(std::move(w));
      }
    }
  }

  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!fv[i]) continue;
    for (std::size_t j = i; j < pts.size(); ++j) {
      if (!fv[j]) continue;
      for (double lam : lams) {
        ++rep.samples_tested;
        double mid = lam * pts[i] + (1.0 - lam) * pts[j];
        auto mv = try_call(f, mid, faulted);
        if (!mv) continue;
        double lhs = *mv;
        double rhs = class_combination_rhs(c, *fv[i], *fv[j], lam);
        double b = tol.bound(lhs, rhs);
        if (lhs - rhs > b) {
          Witness w;
          w.kind = "inequality";
          w.points = {point1(pts[i]), point1(pts[j])};
          w.lambda = lam;
          w.lhs = lhs;
          w.rhs = rhs;
          w.violation = lhs - rhs - b;
          wc.offer(std::move(w));
        }
      }
    }
  }

  rep.verdict = settle(wc, faulted);
  rep.witnesses = wc.take();
  return rep;
}

MembershipReport check_joint(const Fn2& f, Rect r, ClassTag c,
                             const SampleGrid& g, const Tolerance& tol,
                             int witness_cap) {
  MembershipReport rep;
  rep.klass = c;
  rep.tolerance = tol;
  WitnessCollector wc(witness_cap);
  bool faulted = false;

  auto xs = SampleGrid::axis_points(r.a, r.b, g.point_count);
  auto ys = SampleGrid::axis_points(r.c, r.d, g.point_count);
  auto lams = g.lambda_values(lambda_must_be_open(c));

  struct Node {
    double x, y;
    std::optional<double> v;
  };
  std::vector<Node> nodes;
  nodes.reserve(xs.size() * ys.size());
  for (double y : ys)
    for (double x : xs) nodes.push_back({x, y, try_call(f, x, y, faulted)});

  if (needs_nonnegativity(c)) {
    for (const auto& n : nodes) {
      ++rep.samples_tested;
      if (!n.v) continue;
      double b = tol.bound(0.0, *n.v);
      if (-*n.v > b) {
        Witness w;
        w.kind = "nonnegativity";
        w.points = {point2(n.x, n.y)};
        w.lhs = 0.0;
        w.rhs = *n.v;
        w.violation = -*n.v - b;
        wc.offer(std::move(w));
      }
    }
  }

  // Unordered pairs suffice: swapping the points while sending lambda to
  // 1-lambda reproduces the same inequality, and both lambda grids are
  // symmetric about 1/2.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].v) continue;
    for (std::size_t j = i; j < nodes.size(); ++j) {
      if (!nodes[j].v) continue;
      for (double lam : lams) {
        ++rep.samples_tested;
        double mx = lam * nodes[i].x + (1.0 - lam) * nodes[j].x;
        double my = lam * nodes[i].y + (1.0 - lam) * nodes[j].y;
        auto mv = try_call(f, mx, my, faulted);
        if (!mv) continue;
        double lhs = *mv;
        double rhs = class_combination_rhs(c, *nodes[i].v, *nodes[j].v, lam);
        double b = tol.bound(lhs, rhs);
        if (lhs - rhs > b) {
          Witness w;
          w.kind = "inequality";
          w.points = {point2(nodes[i].x, nodes[i].y),
                      point2(nodes[j].x, nodes[j].y)};
          w.lambda = lam;
          w.lhs = lhs;
          w.rhs = rhs;
          w.violation = lhs - rhs - b;
          wc.offer(std::move(w));
        }
      }
    }
  }

  rep.verdict = settle(wc, faulted);
  rep.witnesses = wc.take();
  return rep;
}

MembershipReport check_coordinated(const Fn2& f, Rect r, ClassTag c,
                                   const SampleGrid& g, const Tolerance& tol,
                                   int witness_cap) {
  MembershipReport rep;
  rep.klass = c;
  rep.tolerance = tol;
  WitnessCollector wc(witness_cap);
  ClassTag line_class = partial_map_class(c);
  bool any_inconclusive = false;

  auto xs = SampleGrid::axis_points(r.a, r.b, g.point_count);
  auto ys = SampleGrid::axis_points(r.c, r.d, g.point_count);

  auto merge = [&](const MembershipReport& sub, bool x_frozen, double frozen) {
    rep.samples_tested += sub.samples_tested;
    if (sub.verdict == Verdict::Inconclusive) any_inconclusive = true;
    for (const Witness& sw : sub.witnesses) {
      Witness w = sw;
      w.kind = (x_frozen ? "partial-x " : "partial-y ") + sw.kind;
      for (EvalPoint& p : w.points) {
        double moving = p.x;
        p = x_frozen ? point2(frozen, moving) : point2(moving, frozen);
      }
      wc.offer(std::move(w));
    }
  };

  for (double x0 : xs)
    merge(check_1d(partial_map_x(f, x0), Interval{r.c, r.d}, line_class, g,
                   tol, witness_cap),
          /*x_frozen=*/true, x0);
  for (double y0 : ys)
    merge(check_1d(partial_map_y(f, y0), Interval{r.a, r.b}, line_class, g,
                   tol, witness_cap),
          /*x_frozen=*/false, y0);

  rep.verdict = settle(wc, any_inconclusive);
  rep.witnesses = wc.take();
  return rep;
}

LemmaReductionReport verify_lemma_reduction(const Fn2& f, Rect r,
                                            ClassTag joint_class,
                                            const SampleGrid& g,
                                            const Tolerance& tol,
                                            int witness_cap) {
  LemmaReductionReport out;
  out.joint = check_joint(f, r, joint_class, g, tol, witness_cap);
  out.coordinated = check_coordinated(f, r, coordinated_counterpart(joint_class),
                                      g, tol, witness_cap);
  out.implication_ok = !(out.joint.verdict == Verdict::Holds &&
                         out.coordinated.verdict == Verdict::Violated);
  return out;
}

}  // namespace hadamard
