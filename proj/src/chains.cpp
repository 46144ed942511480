#include "hadamard/chains.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hadamard {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TermValue {
  double value = kNaN;
  double qerr = 0.0;
  bool reliable = false;
};

TermValue point_term(const std::function<double()>& compute) {
  try {
    return {compute(), 0.0, true};
  } catch (const EvalException&) {
    return {};
  }
}

TermValue integral_term(const Fn1& f, Interval iv, const QuadConfig& q,
                        double scale) {
  try {
    QuadResult r = integrate_1d(f, iv, q);
    return {scale * r.value, std::abs(scale) * r.error_estimate, r.converged};
  } catch (const NonIntegrableError&) {
    return {};
  }
}

TermValue integral_term(const Fn2& f, Rect r, const QuadConfig& q,
                        double scale) {
  try {
    QuadResult qr = integrate_2d(f, r, q);
    return {scale * qr.value, std::abs(scale) * qr.error_estimate,
            qr.converged};
  } catch (const NonIntegrableError&) {
    return {};
  }
}

TermValue combine(std::initializer_list<std::pair<double, TermValue>> parts) {
  TermValue out{0.0, 0.0, true};
  for (const auto& [scale, tv] : parts) {
    out.value += scale * tv.value;
    out.qerr += std::abs(scale) * tv.qerr;
    out.reliable = out.reliable && tv.reliable;
  }
  return out;
}

void detail(ChainReport& rep, std::string label, const TermValue& tv) {
  rep.details.emplace_back(std::move(label), tv.value);
}

void finish(ChainReport& rep, std::vector<TermValue> tvs,
            std::vector<std::string> labels, const Tolerance& tol) {
  for (std::size_t i = 0; i < tvs.size(); ++i)
    rep.terms.push_back({std::move(labels[i]), tvs[i].value, tvs[i].qerr,
                         tvs[i].reliable});
  bool any_violated = false;
  bool any_inconclusive = false;
  for (std::size_t i = 0; i + 1 < tvs.size(); ++i) {
    const TermValue& lo = tvs[i];
    const TermValue& hi = tvs[i + 1];
    Link link;
    link.lhs_index = static_cast<int>(i);
    link.rhs_index = static_cast<int>(i + 1);
    link.slack = hi.value - lo.value;
    link.inconclusive = !lo.reliable || !hi.reliable ||
                        !std::isfinite(link.slack);
    double band = tol.bound(lo.value, hi.value) + lo.qerr + hi.qerr;
    link.holds = !link.inconclusive && link.slack >= -band;
    any_violated = any_violated || (!link.holds && !link.inconclusive);
    any_inconclusive = any_inconclusive || link.inconclusive;
    rep.links.push_back(link);
  }
  rep.verdict = any_violated
                    ? Verdict::Violated
                    : (any_inconclusive ? Verdict::Inconclusive
                                        : Verdict::Holds);
}

void attach_precondition(ChainReport& rep, MembershipReport mr) {
  rep.precondition_failed =
      rep.precondition_failed || mr.verdict == Verdict::Violated;
  rep.class_preconditions.push_back(std::move(mr));
}

// Grid test of f(x,y) == f(y,x) on [a,b]^2, used by the symmetric
// corollary variants.
bool grid_symmetric(const Fn2& f, Interval iv, const SampleGrid& g,
                    const Tolerance& tol) {
  auto pts = SampleGrid::axis_points(iv.a, iv.b, g.point_count);
  try {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double u = f(pts[i], pts[j]);
        double v = f(pts[j], pts[i]);
        if (std::abs(u - v) > tol.bound(u, v)) return false;
      }
  } catch (const EvalException&) {
    // Fault while probing symmetry: the chain terms will surface it.
  }
  return true;
}

}  // namespace

std::string_view chain_name(ChainId id) {
  switch (id) {
    case ChainId::HQ1D: return "hq-1d";
    case ChainId::HP1D: return "hp-1d";
    case ChainId::Prod1D: return "prod-1d";
    case ChainId::CoordConvex: return "coord-convex";
    case ChainId::CoordGL: return "coord-gl";
    case ChainId::CoordGLSquare: return "coord-gl-square";
    case ChainId::CoordGLSymStated: return "coord-gl-sym-stated";
    case ChainId::CoordGLSymCorrected: return "coord-gl-sym-corrected";
    case ChainId::CoordP: return "coord-p";
    case ChainId::ProdCoord: return "prod-coord";
  }
  return "?";
}

std::optional<ChainId> chain_from_name(std::string_view name) {
  for (ChainId id :
       {ChainId::HQ1D, ChainId::HP1D, ChainId::Prod1D, ChainId::CoordConvex,
        ChainId::CoordGL, ChainId::CoordGLSquare, ChainId::CoordGLSymStated,
        ChainId::CoordGLSymCorrected, ChainId::CoordP, ChainId::ProdCoord}) {
    if (chain_name(id) == name) return id;
  }
  return std::nullopt;
}

DomainKind chain_domain_kind(ChainId id) {
  switch (id) {
    case ChainId::HQ1D:
    case ChainId::HP1D:
    case ChainId::Prod1D:
      return DomainKind::Interval1D;
    case ChainId::CoordGLSquare:
    case ChainId::CoordGLSymStated:
    case ChainId::CoordGLSymCorrected:
      return DomainKind::SquareInterval;
    default:
      return DomainKind::Rectangle;
  }
}

bool chain_needs_g(ChainId id) {
  return id == ChainId::Prod1D || id == ChainId::ProdCoord;
}

ChainReport eval_hq_1d(const Fn1& f, Interval iv, const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::HQ1D;
  rep.domain = iv;
  double mid = 0.5 * (iv.a + iv.b);
  TermValue t1 = point_term([&] { return f(mid); });
  TermValue t2 = integral_term(f, iv, cfg.quad, 4.0 / (iv.b - iv.a));
  if (cfg.run_preconditions)
    attach_precondition(rep, check_1d(f, iv, ClassTag::GL1D, cfg.grid,
                                      cfg.tol, cfg.witness_cap));
  finish(rep, {t1, t2}, {"f(mid)", "4*avg(f)"}, cfg.tol);
  return rep;
}

ChainReport eval_hp_1d(const Fn1& f, Interval iv, const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::HP1D;
  rep.domain = iv;
  double mid = 0.5 * (iv.a + iv.b);
  TermValue t1 = point_term([&] { return f(mid); });
  TermValue t2 = integral_term(f, iv, cfg.quad, 2.0 / (iv.b - iv.a));
  TermValue fa = point_term([&] { return f(iv.a); });
  TermValue fb = point_term([&] { return f(iv.b); });
  TermValue t3 = combine({{2.0, fa}, {2.0, fb}});
  detail(rep, "f(a)", fa);
  detail(rep, "f(b)", fb);
  if (cfg.run_preconditions)
    attach_precondition(rep, check_1d(f, iv, ClassTag::P1D, cfg.grid, cfg.tol,
                                      cfg.witness_cap));
  finish(rep, {t1, t2, t3}, {"f(mid)", "2*avg(f)", "2*(f(a)+f(b))"}, cfg.tol);
  return rep;
}

ChainReport eval_prod_1d(const Fn1& f, const Fn1& g, Interval iv,
                         const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::Prod1D;
  rep.domain = iv;
  Fn1 fg = [&f, &g](double x) { return f(x) * g(x); };
  TermValue t1 = integral_term(fg, iv, cfg.quad, 1.0 / (iv.b - iv.a));
  TermValue m = point_term(
      [&] { return f(iv.a) * g(iv.a) + f(iv.b) * g(iv.b); });
  TermValue n = point_term(
      [&] { return f(iv.a) * g(iv.b) + f(iv.b) * g(iv.a); });
  TermValue t2 = combine({{0.5, m}, {0.5, n}});
  detail(rep, "M", m);
  detail(rep, "N", n);
  if (cfg.run_preconditions) {
    attach_precondition(rep, check_1d(f, iv, ClassTag::Convex1D, cfg.grid,
                                      cfg.tol, cfg.witness_cap));
    attach_precondition(rep, check_1d(g, iv, ClassTag::P1D, cfg.grid, cfg.tol,
                                      cfg.witness_cap));
  }
  finish(rep, {t1, t2}, {"avg(f*g)", "(M+N)/2"}, cfg.tol);
  return rep;
}

namespace {

// The building blocks shared by every rectangle chain: line averages
// through the midpoint and along the boundary, plus the double average.
struct RectParts {
  double midx, midy, area;
  TermValue mid_value;    // f(midx, midy)
  TermValue x_line_avg;   // avg over x of f(x, midy)
  TermValue y_line_avg;   // avg over y of f(midx, y)
  TermValue double_avg;   // avg over the rectangle
};

RectParts rect_parts(const Fn2& f, Rect r, const QuadConfig& q) {
  RectParts p;
  p.midx = 0.5 * (r.a + r.b);
  p.midy = 0.5 * (r.c + r.d);
  p.area = (r.b - r.a) * (r.d - r.c);
  p.mid_value = point_term([&] { return f(p.midx, p.midy); });
  p.x_line_avg =
      integral_term(partial_map_y(f, p.midy), Interval{r.a, r.b}, q,
                    1.0 / (r.b - r.a));
  p.y_line_avg =
      integral_term(partial_map_x(f, p.midx), Interval{r.c, r.d}, q,
                    1.0 / (r.d - r.c));
  p.double_avg = integral_term(f, r, q, 1.0 / p.area);
  return p;
}

struct BoundaryParts {
  TermValue at_c, at_d;  // avg over x of f(x,c) and f(x,d)
  TermValue at_a, at_b;  // avg over y of f(a,y) and f(b,y)
};

BoundaryParts boundary_parts(const Fn2& f, Rect r, const QuadConfig& q) {
  BoundaryParts b;
  b.at_c = integral_term(partial_map_y(f, r.c), Interval{r.a, r.b}, q,
                         1.0 / (r.b - r.a));
  b.at_d = integral_term(partial_map_y(f, r.d), Interval{r.a, r.b}, q,
                         1.0 / (r.b - r.a));
  b.at_a = integral_term(partial_map_x(f, r.a), Interval{r.c, r.d}, q,
                         1.0 / (r.d - r.c));
  b.at_b = integral_term(partial_map_x(f, r.b), Interval{r.c, r.d}, q,
                         1.0 / (r.d - r.c));
  return b;
}

void detail_boundary(ChainReport& rep, const BoundaryParts& b) {
  detail(rep, "avg f(x,c)", b.at_c);
  detail(rep, "avg f(x,d)", b.at_d);
  detail(rep, "avg f(a,y)", b.at_a);
  detail(rep, "avg f(b,y)", b.at_b);
}

}  // namespace

ChainReport eval_coord_convex(const Fn2& f, Rect r, const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::CoordConvex;
  rep.domain = r;
  RectParts p = rect_parts(f, r, cfg.quad);
  BoundaryParts b = boundary_parts(f, r, cfg.quad);
  TermValue t2 = combine({{0.5, p.x_line_avg}, {0.5, p.y_line_avg}});
  TermValue t4 = combine(
      {{0.25, b.at_c}, {0.25, b.at_d}, {0.25, b.at_a}, {0.25, b.at_b}});
  TermValue t5 = point_term([&] {
    return 0.25 * (f(r.a, r.c) + f(r.a, r.d) + f(r.b, r.c) + f(r.b, r.d));
  });
  detail(rep, "avg f(x,mid)", p.x_line_avg);
  detail(rep, "avg f(mid,y)", p.y_line_avg);
  detail_boundary(rep, b);
  if (cfg.run_preconditions)
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordConvex,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  finish(rep, {p.mid_value, t2, p.double_avg, t4, t5},
         {"f(mid,mid)", "mid-line-avg", "double-avg", "boundary-avg",
          "corner-avg"},
         cfg.tol);
  return rep;
}

ChainReport eval_coord_gl(const Fn2& f, Rect r, const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::CoordGL;
  rep.domain = r;
  RectParts p = rect_parts(f, r, cfg.quad);
  TermValue t1 = combine({{1.0 / 16.0, p.mid_value}});
  TermValue t2 = combine({{0.125, p.x_line_avg}, {0.125, p.y_line_avg}});
  detail(rep, "avg f(x,mid)", p.x_line_avg);
  detail(rep, "avg f(mid,y)", p.y_line_avg);
  if (cfg.run_preconditions)
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordGL,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  finish(rep, {t1, t2, p.double_avg},
         {"f(mid,mid)/16", "mid-line-sum/8", "double-avg"}, cfg.tol);
  return rep;
}

ChainReport eval_coord_gl_square(const Fn2& f, Interval iv,
                                 const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::CoordGLSquare;
  rep.domain = iv;
  Rect r{iv.a, iv.b, iv.a, iv.b};
  double mid = 0.5 * (iv.a + iv.b);
  TermValue t1 = combine(
      {{1.0 / 16.0, point_term([&] { return f(mid, mid); })}});
  // The corollary's own form: one integral of the symmetrized section.
  Fn1 section = [&f, mid](double x) { return f(x, mid) + f(mid, x); };
  TermValue t2 =
      integral_term(section, iv, cfg.quad, 1.0 / (8.0 * (iv.b - iv.a)));
  TermValue t3 = integral_term(
      f, r, cfg.quad, 1.0 / ((iv.b - iv.a) * (iv.b - iv.a)));
  if (cfg.run_preconditions)
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordGL,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  finish(rep, {t1, t2, t3}, {"f(mid,mid)/16", "mid-line-sum/8", "double-avg"},
         cfg.tol);
  return rep;
}

ChainReport eval_coord_gl_symmetric(const Fn2& f, Interval iv,
                                    const ChainConfig& cfg,
                                    SymVariant variant) {
  ChainReport rep;
  rep.chain = variant == SymVariant::Stated ? ChainId::CoordGLSymStated
                                            : ChainId::CoordGLSymCorrected;
  rep.domain = iv;
  Rect r{iv.a, iv.b, iv.a, iv.b};
  rep.symmetry_violation = !grid_symmetric(f, iv, cfg.grid, cfg.tol);
  double mid = 0.5 * (iv.a + iv.b);
  TermValue t1 = point_term([&] { return f(mid, mid); });
  TermValue line_avg = integral_term(partial_map_y(f, mid), iv, cfg.quad,
                                     1.0 / (iv.b - iv.a));
  TermValue dbl = integral_term(
      f, r, cfg.quad, 1.0 / ((iv.b - iv.a) * (iv.b - iv.a)));
  detail(rep, "line-avg", line_avg);
  if (cfg.run_preconditions)
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordGL,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  if (variant == SymVariant::Stated) {
    finish(rep, {t1, combine({{0.25, line_avg}}), dbl},
           {"f(mid,mid)", "line-avg/4", "double-avg"}, cfg.tol);
  } else {
    finish(rep, {t1, combine({{4.0, line_avg}}), combine({{4.0, dbl}})},
           {"f(mid,mid)", "4*line-avg", "4*double-avg"}, cfg.tol);
  }
  return rep;
}

ChainReport eval_coord_p(const Fn2& f, Rect r, const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::CoordP;
  rep.domain = r;
  RectParts p = rect_parts(f, r, cfg.quad);
  BoundaryParts b = boundary_parts(f, r, cfg.quad);
  TermValue t2 = combine({{1.0, p.x_line_avg}, {1.0, p.y_line_avg}});
  TermValue t3 = combine({{4.0, p.double_avg}});
  TermValue t4 = combine(
      {{2.0, b.at_c}, {2.0, b.at_d}, {2.0, b.at_a}, {2.0, b.at_b}});
  detail(rep, "avg f(x,mid)", p.x_line_avg);
  detail(rep, "avg f(mid,y)", p.y_line_avg);
  detail_boundary(rep, b);
  if (cfg.run_preconditions)
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordP,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  finish(rep, {p.mid_value, t2, t3, t4},
         {"f(mid,mid)", "mid-line-sum", "4*double-avg", "2*boundary-sum"},
         cfg.tol);
  return rep;
}

ChainReport eval_prod_coord(const Fn2& f, const Fn2& g, Rect r,
                            const ChainConfig& cfg) {
  ChainReport rep;
  rep.chain = ChainId::ProdCoord;
  rep.domain = r;
  Fn2 fg = [&f, &g](double x, double y) { return f(x, y) * g(x, y); };
  double area = (r.b - r.a) * (r.d - r.c);
  TermValue t1 = integral_term(fg, r, cfg.quad, 1.0 / area);
  TermValue l = point_term([&] {
    return f(r.a, r.c) * g(r.a, r.c) + f(r.b, r.c) * g(r.b, r.c) +
           f(r.a, r.d) * g(r.a, r.d) + f(r.b, r.d) * g(r.b, r.d);
  });
  TermValue m = point_term([&] {
    return f(r.a, r.c) * g(r.a, r.d) + f(r.a, r.d) * g(r.a, r.c) +
           f(r.b, r.c) * g(r.b, r.d) + f(r.b, r.d) * g(r.b, r.c) +
           f(r.b, r.c) * g(r.a, r.c) + f(r.b, r.d) * g(r.a, r.d) +
           f(r.a, r.c) * g(r.b, r.c) + f(r.a, r.d) * g(r.b, r.d);
  });
  TermValue n = point_term([&] {
    return f(r.b, r.c) * g(r.a, r.d) + f(r.b, r.d) * g(r.a, r.c) +
           f(r.a, r.c) * g(r.b, r.d) + f(r.a, r.d) * g(r.b, r.c);
  });
  TermValue t2 = combine({{0.25, l}, {0.25, m}, {0.25, n}});
  detail(rep, "L", l);
  detail(rep, "M", m);
  detail(rep, "N", n);
  if (cfg.run_preconditions) {
    attach_precondition(rep, check_coordinated(f, r, ClassTag::CoordConvex,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
    attach_precondition(rep, check_coordinated(g, r, ClassTag::CoordP,
                                               cfg.grid, cfg.tol,
                                               cfg.witness_cap));
  }
  finish(rep, {t1, t2}, {"double-avg(f*g)", "(L+M+N)/4"}, cfg.tol);
  return rep;
}

Corollary2Audit audit_corollary2(const Fn2& f, Interval iv,
                                 const ChainConfig& cfg) {
  Corollary2Audit audit;
  audit.stated = eval_coord_gl_symmetric(f, iv, cfg, SymVariant::Stated);
  audit.corrected = eval_coord_gl_symmetric(f, iv, cfg, SymVariant::Corrected);
  return audit;
}

ChainReport eval_chain(ChainId id, const Expr& f, const Expr* g,
                       const Domain& domain, const ChainConfig& cfg) {
  if (chain_needs_g(id) != (g != nullptr))
    throw std::invalid_argument(
        chain_needs_g(id) ? "chain requires a second function g"
                          : "chain takes a single function");
  bool wants_interval = chain_domain_kind(id) != DomainKind::Rectangle;
  if (wants_interval != std::holds_alternative<Interval>(domain))
    throw std::invalid_argument(
        wants_interval ? "chain expects an interval domain"
                       : "chain expects a rectangle domain");

  switch (id) {
    case ChainId::HQ1D:
      return eval_hq_1d(as_fn1(f), std::get<Interval>(domain), cfg);
    case ChainId::HP1D:
      return eval_hp_1d(as_fn1(f), std::get<Interval>(domain), cfg);
    case ChainId::Prod1D:
      return eval_prod_1d(as_fn1(f), as_fn1(*g), std::get<Interval>(domain),
                          cfg);
    case ChainId::CoordConvex:
      return eval_coord_convex(as_fn2(f), std::get<Rect>(domain), cfg);
    case ChainId::CoordGL:
      return eval_coord_gl(as_fn2(f), std::get<Rect>(domain), cfg);
    case ChainId::CoordGLSquare:
      return eval_coord_gl_square(as_fn2(f), std::get<Interval>(domain), cfg);
    case ChainId::CoordGLSymStated:
      return eval_coord_gl_symmetric(as_fn2(f), std::get<Interval>(domain),
                                     cfg, SymVariant::Stated);
    case ChainId::CoordGLSymCorrected:
      return eval_coord_gl_symmetric(as_fn2(f), std::get<Interval>(domain),
                                     cfg, SymVariant::Corrected);
    case ChainId::CoordP:
      return eval_coord_p(as_fn2(f), std::get<Rect>(domain), cfg);
    case ChainId::ProdCoord:
      return eval_prod_coord(as_fn2(f), as_fn2(*g), std::get<Rect>(domain),
                             cfg);
  }
  throw std::invalid_argument("unknown chain");
}

double min_link_slack(const ChainReport& rep) {
  double best = kNaN;
  for (const Link& l : rep.links) {
    if (l.inconclusive) continue;
    if (std::isnan(best) || l.slack < best) best = l.slack;
  }
  return best;
}

}  // namespace hadamard
