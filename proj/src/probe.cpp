#include "hadamard/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace hadamard {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// All randomly drawn parameters are snapped to multiples of 1/64: exactly
// representable, so generated expression text round-trips bit-for-bit.
double quant64(double v) { return std::nearbyint(v * 64.0) / 64.0; }
double ceil64(double v) { return std::ceil(v * 64.0) / 64.0; }

double pick_anchor(SplitMix64& rng, double lo, double hi) {
  return std::clamp(quant64(rng.uniform(lo, hi)), lo, hi);
}

double pick_coef(SplitMix64& rng, double lo, double hi) {
  double c = quant64(rng.uniform(lo, hi));
  return c < 1.0 / 64.0 ? 1.0 / 64.0 : c;
}

ExprPtr scaled(double c, ExprPtr e) {
  return make_binary(BinOp::Mul, make_number(c), std::move(e));
}

ExprPtr sum2(ExprPtr a, ExprPtr b) {
  return make_binary(BinOp::Add, std::move(a), std::move(b));
}

// Nonnegative convex atoms in one variable on [lo,hi].
ExprPtr convex_atom(SplitMix64& rng, Var v, double lo, double hi) {
  switch (rng.range_int(0, 3)) {
    case 0: {  // (t-r)^2
      double r = pick_anchor(rng, lo, hi);
      return make_binary(BinOp::Pow,
                         make_binary(BinOp::Sub, make_var(v), make_number(r)),
                         make_number(2.0));
    }
    case 1: {  // exp(k*t), |k| <= 2
      double k = quant64(rng.uniform(-2.0, 2.0));
      return make_call(Func::Exp,
                       {make_binary(BinOp::Mul, make_number(k), make_var(v))});
    }
    case 2: {  // |t-r|
      double r = pick_anchor(rng, lo, hi);
      return make_call(Func::Abs, {make_binary(BinOp::Sub, make_var(v),
                                               make_number(r))});
    }
    default:
      return make_number(1.0);
  }
}

// P-function atoms: the convex pool plus the subadditive sqrt section.
// The max(.,0) guard keeps lambda-combinations that round a hair below
// lo from faulting; on [lo,hi] it is the same function as sqrt(t-lo).
ExprPtr p_atom(SplitMix64& rng, Var v, double lo, double hi, bool& used_sqrt) {
  if (rng.range_int(0, 4) == 0) {
    used_sqrt = true;
    return make_call(
        Func::Sqrt,
        {make_call(Func::Max, {make_binary(BinOp::Sub, make_var(v),
                                           make_number(lo)),
                               make_number(0.0)})});
  }
  return convex_atom(rng, v, lo, hi);
}

struct GenContext {
  SplitMix64 rng;
  double coef_lo, coef_hi;
  bool used_sqrt = false;
  bool used_max = false;
};

ExprPtr convex_sum_1d(GenContext& g, int n, Interval iv) {
  ExprPtr acc;
  for (int i = 0; i < n; ++i) {
    double c = pick_coef(g.rng, g.coef_lo, g.coef_hi);
    ExprPtr term = scaled(c, convex_atom(g.rng, Var::X, iv.a, iv.b));
    acc = acc ? sum2(std::move(acc), std::move(term)) : std::move(term);
  }
  return acc;
}

ExprPtr p_sum_1d(GenContext& g, int n, Interval iv) {
  if (n >= 2 && g.rng.unit() < 0.25) {
    g.used_max = true;
    int n1 = g.rng.range_int(1, n - 1);
    ExprPtr a = p_sum_1d(g, n1, iv);
    ExprPtr b = p_sum_1d(g, n - n1, iv);
    return make_call(Func::Max, {std::move(a), std::move(b)});
  }
  ExprPtr acc;
  for (int i = 0; i < n; ++i) {
    double c = pick_coef(g.rng, g.coef_lo, g.coef_hi);
    ExprPtr term = scaled(c, p_atom(g.rng, Var::X, iv.a, iv.b, g.used_sqrt));
    acc = acc ? sum2(std::move(acc), std::move(term)) : std::move(term);
  }
  return acc;
}

ExprPtr coord_convex_sum(GenContext& g, int n, Rect r) {
  ExprPtr acc;
  for (int i = 0; i < n; ++i) {
    double c = pick_coef(g.rng, g.coef_lo, g.coef_hi);
    ExprPtr phi = convex_atom(g.rng, Var::X, r.a, r.b);
    ExprPtr psi = convex_atom(g.rng, Var::Y, r.c, r.d);
    ExprPtr term =
        scaled(c, make_binary(BinOp::Mul, std::move(phi), std::move(psi)));
    acc = acc ? sum2(std::move(acc), std::move(term)) : std::move(term);
  }
  return acc;
}

ExprPtr coord_p_sum(GenContext& g, int n, Rect r) {
  if (n >= 2 && g.rng.unit() < 0.25) {
    g.used_max = true;
    int n1 = g.rng.range_int(1, n - 1);
    ExprPtr a = coord_p_sum(g, n1, r);
    ExprPtr b = coord_p_sum(g, n - n1, r);
    return make_call(Func::Max, {std::move(a), std::move(b)});
  }
  ExprPtr acc;
  for (int i = 0; i < n; ++i) {
    double c = pick_coef(g.rng, g.coef_lo, g.coef_hi);
    ExprPtr phi = p_atom(g.rng, Var::X, r.a, r.b, g.used_sqrt);
    ExprPtr psi = p_atom(g.rng, Var::Y, r.c, r.d, g.used_sqrt);
    ExprPtr term =
        scaled(c, make_binary(BinOp::Mul, std::move(phi), std::move(psi)));
    acc = acc ? sum2(std::move(acc), std::move(term)) : std::move(term);
  }
  return acc;
}

// alpha*x + beta*y + gamma
ExprPtr affine_form(double alpha, double beta, double gamma) {
  ExprPtr e = sum2(make_binary(BinOp::Mul, make_number(alpha),
                               make_var(Var::X)),
                   make_binary(BinOp::Mul, make_number(beta),
                               make_var(Var::Y)));
  return sum2(std::move(e), make_number(gamma));
}

// Jointly convex nonnegative atoms: convex transforms of affine forms.
ExprPtr joint_atom(SplitMix64& rng, const Rect& r) {
  double alpha = quant64(rng.uniform(-1.0, 1.0));
  double beta = quant64(rng.uniform(-1.0, 1.0));
  switch (rng.range_int(0, 4)) {
    case 0: {
      double gamma = quant64(rng.uniform(-1.0, 1.0));
      return make_binary(BinOp::Pow, affine_form(alpha, beta, gamma),
                         make_number(2.0));
    }
    case 1: {
      double gamma = quant64(rng.uniform(-1.0, 1.0));
      return make_call(Func::Abs, {affine_form(alpha, beta, gamma)});
    }
    case 2:
      return make_call(
          Func::Exp,
          {sum2(make_binary(BinOp::Mul, make_number(alpha), make_var(Var::X)),
                make_binary(BinOp::Mul, make_number(beta),
                            make_var(Var::Y)))});
    case 3: {  // affine kept strictly positive on the rectangle
      double min_ab = alpha * (alpha >= 0.0 ? r.a : r.b) +
                      beta * (beta >= 0.0 ? r.c : r.d);
      double gamma = ceil64(std::max(0.0, -min_ab) + 1.0 / 64.0) +
                     quant64(rng.uniform(0.0, 1.0));
      return affine_form(alpha, beta, gamma);
    }
    default:
      return make_number(1.0);
  }
}

ExprPtr joint_sum(GenContext& g, int n, Rect r) {
  ExprPtr acc;
  for (int i = 0; i < n; ++i) {
    double c = pick_coef(g.rng, g.coef_lo, g.coef_hi);
    ExprPtr term = scaled(c, joint_atom(g.rng, r));
    acc = acc ? sum2(std::move(acc), std::move(term)) : std::move(term);
  }
  return acc;
}

Interval interval_of(const Domain& d) {
  if (const auto* iv = std::get_if<Interval>(&d)) return *iv;
  const Rect& r = std::get<Rect>(d);
  return {r.a, r.b};
}

Rect rect_of(const Domain& d) {
  if (const auto* r = std::get_if<Rect>(&d)) return *r;
  const Interval& iv = std::get<Interval>(d);
  return {iv.a, iv.b, iv.a, iv.b};
}

std::string count_word(int n) { return std::to_string(n) + "-term"; }

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0x9E3779B97F4A7C15ull * (index + 1)));
  return g.next();
}

GeneratedFn gen_function(const GenSpec& spec) {
  GenContext g{SplitMix64(spec.seed),
               spec.coef_lo > 0.0 ? spec.coef_lo : 1.0 / 64.0,
               std::max(spec.coef_hi, spec.coef_lo), false, false};
  int n = std::clamp(spec.atom_count, 1, 8);
  Interval iv = interval_of(spec.domain);
  Rect r = rect_of(spec.domain);

  GeneratedFn out;
  out.cert.klass = spec.klass;
  ExprPtr root;
  std::string rules;

  switch (spec.klass) {
    case ClassTag::Convex1D:
      root = convex_sum_1d(g, n, iv);
      rules = count_word(n) +
              " nonneg-coefficient sum of nonneg convex atoms; convex by "
              "closure under nonneg combination";
      break;
    case ClassTag::P1D:
      root = p_sum_1d(g, n, iv);
      rules = count_word(n) +
              " nonneg combination of P atoms (convex-nonneg pool" +
              (g.used_sqrt ? ", sqrt sections" : "") +
              (g.used_max ? ", max of P members" : "") +
              "); P by closure under sum, nonneg scaling and max";
      break;
    case ClassTag::GL1D: {
      double s = pick_coef(g.rng, g.coef_lo, g.coef_hi);
      root = scaled(s, p_sum_1d(g, n, iv));
      rules = "positive scaling of a certified P construction (" +
              count_word(n) + "); P(I) lies in Q(I) pointwise";
      break;
    }
    case ClassTag::CoordConvex:
      root = coord_convex_sum(g, n, r);
      rules = count_word(n) +
              " nonneg sum of products phi(x)*psi(y) of nonneg convex "
              "atoms; every partial map is a nonneg convex combination";
      break;
    case ClassTag::CoordP:
      root = coord_p_sum(g, n, r);
      rules = count_word(n) +
              " nonneg sum of products of P atoms" +
              (g.used_sqrt ? " (with sqrt sections)" : "") +
              (g.used_max ? ", max-combined" : "") +
              "; every partial map is P by closure";
      break;
    case ClassTag::CoordGL: {
      double s = pick_coef(g.rng, g.coef_lo, g.coef_hi);
      root = scaled(s, coord_p_sum(g, n, r));
      rules = "positive scaling of a certified coordinated-P construction (" +
              count_word(n) + "); coordinated P lies in coordinated "
              "Godunova-Levin pointwise";
      break;
    }
    case ClassTag::JointConvex:
    case ClassTag::JointP:
    case ClassTag::JointGL:
      root = joint_sum(g, n, r);
      rules = count_word(n) +
              " nonneg sum of convex transforms of affine forms; jointly "
              "convex and nonneg, hence joint P, hence joint Godunova-Levin";
      break;
  }

  out.expr = Expr(std::move(root));
  out.cert.construction = std::move(rules);
  return out;
}

namespace {

ExprPtr swap_vars(const ExprNode& n) {
  return std::visit(
      [](const auto& node) -> ExprPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return make_number(node.value);
        } else if constexpr (std::is_same_v<T, VarNode>) {
          return make_var(node.var == Var::X ? Var::Y : Var::X);
        } else if constexpr (std::is_same_v<T, NegNode>) {
          return make_neg(swap_vars(*node.operand));
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return make_binary(node.op, swap_vars(*node.lhs),
                             swap_vars(*node.rhs));
        } else {
          std::vector<ExprPtr> args;
          args.reserve(node.args.size());
          for (const auto& a : node.args) args.push_back(swap_vars(*a));
          return make_call(node.fn, std::move(args));
        }
      },
      n.v);
}

}  // namespace

GeneratedFn gen_symmetric_coord(const GenSpec& spec) {
  GenContext g{SplitMix64(spec.seed),
               spec.coef_lo > 0.0 ? spec.coef_lo : 1.0 / 64.0,
               std::max(spec.coef_hi, spec.coef_lo), false, false};
  int n = std::clamp(spec.atom_count, 1, 8);
  Rect r = rect_of(spec.domain);
  ExprPtr h = coord_convex_sum(g, n, r);
  ExprPtr mirrored = swap_vars(*h);
  GeneratedFn out;
  out.expr = Expr(sum2(std::move(h), std::move(mirrored)));
  out.cert.klass = spec.klass;
  out.cert.construction =
      "h(x,y)+h(y,x) for a " + count_word(n) +
      " coordinated-convex certified h; symmetric, nonneg, and in every "
      "coordinated class by closure under addition";
  return out;
}

ChainConfig fuzz_chain_config() {
  ChainConfig cfg;
  cfg.quad.abs_tol = 1e-9;
  cfg.quad.rel_tol = 1e-8;
  cfg.quad.max_refinements = 20;
  return cfg;
}

namespace {

std::vector<ClassTag> hypothesis_classes(ChainId id) {
  switch (id) {
    case ChainId::HQ1D: return {ClassTag::GL1D};
    case ChainId::HP1D: return {ClassTag::P1D};
    case ChainId::Prod1D: return {ClassTag::Convex1D, ClassTag::P1D};
    case ChainId::CoordConvex: return {ClassTag::CoordConvex};
    case ChainId::CoordGL:
    case ChainId::CoordGLSquare:
    case ChainId::CoordGLSymStated:
    case ChainId::CoordGLSymCorrected:
      return {ClassTag::CoordGL};
    case ChainId::CoordP: return {ClassTag::CoordP};
    case ChainId::ProdCoord: return {ClassTag::CoordConvex, ClassTag::CoordP};
  }
  return {};
}

Domain adapt_domain(const Domain& d, ChainId chain) {
  if (chain_domain_kind(chain) == DomainKind::Rectangle)
    return rect_of(d);
  return interval_of(d);
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::string f_text;
  std::string g_text;
  ChainReport report;
};

TrialOutcome run_trial(ChainId chain, const GenSpec& tmpl,
                       std::uint64_t master, int trial,
                       const ChainConfig& cfg) {
  TrialOutcome out;
  out.seed = derive_seed(master, static_cast<std::uint64_t>(trial));
  Domain dom = adapt_domain(tmpl.domain, chain);
  // Generation always sees the chain's own domain so atom anchors and
  // sqrt sections line up with where the chain evaluates.
  Domain gen_dom = chain_domain_kind(chain) == DomainKind::Interval1D
                       ? Domain(interval_of(dom))
                       : Domain(rect_of(dom));

  auto classes = hypothesis_classes(chain);
  bool symmetric_chain = chain == ChainId::CoordGLSymStated ||
                         chain == ChainId::CoordGLSymCorrected;

  Expr f;
  std::optional<Expr> g;
  if (symmetric_chain) {
    if (trial == 0) {
      // The documented counterexample to the printed corollary.
      f = Expr(make_number(1.0));
      out.f_text = "1";
    } else {
      GenSpec spec = tmpl;
      spec.klass = classes[0];
      spec.seed = out.seed;
      spec.domain = gen_dom;
      GeneratedFn gf = gen_symmetric_coord(spec);
      f = gf.expr;
      out.f_text = to_string(f);
    }
  } else {
    GenSpec spec = tmpl;
    spec.klass = classes[0];
    spec.seed = classes.size() > 1 ? derive_seed(out.seed, 0) : out.seed;
    spec.domain = gen_dom;
    f = gen_function(spec).expr;
    out.f_text = to_string(f);
    if (classes.size() > 1) {
      GenSpec gspec = tmpl;
      gspec.klass = classes[1];
      gspec.seed = derive_seed(out.seed, 1);
      gspec.domain = gen_dom;
      g = gen_function(gspec).expr;
      out.g_text = to_string(*g);
    }
  }

  out.report = eval_chain(chain, f, g ? &*g : nullptr, dom, cfg);
  return out;
}

}  // namespace

FuzzReport fuzz_chain(ChainId chain, const GenSpec& tmpl, int trials,
                      std::uint64_t master_seed, const ChainConfig& cfg,
                      int threads) {
  FuzzReport rep;
  rep.chain = chain;
  rep.trials = std::max(0, trials);
  if (rep.trials == 0) return rep;

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(rep.trials));
  int workers = std::clamp(threads, 1, rep.trials);
  if (workers <= 1) {
    for (int i = 0; i < rep.trials; ++i)
      outcomes[static_cast<std::size_t>(i)] =
          run_trial(chain, tmpl, master_seed, i, cfg);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= rep.trials) return;
        outcomes[static_cast<std::size_t>(i)] =
            run_trial(chain, tmpl, master_seed, i, cfg);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduce in trial order: reports are canonical however trials ran.
  for (int i = 0; i < rep.trials; ++i) {
    TrialOutcome& o = outcomes[static_cast<std::size_t>(i)];
    const ChainReport& cr = o.report;
    if (cr.verdict == Verdict::Inconclusive) ++rep.inconclusive_count;
    for (const MembershipReport& mr : cr.class_preconditions) {
      if (mr.verdict != Verdict::Holds) {
        ++rep.precondition_failures;
        break;
      }
    }
    for (const Link& l : cr.links) {
      if (l.inconclusive) continue;
      if (rep.min_slack.trial < 0 || l.slack < rep.min_slack.slack) {
        rep.min_slack.trial = i;
        rep.min_slack.seed = o.seed;
        rep.min_slack.link =
            cr.terms[static_cast<std::size_t>(l.lhs_index)].label + " <= " +
            cr.terms[static_cast<std::size_t>(l.rhs_index)].label;
        rep.min_slack.slack = l.slack;
      }
    }
    if (cr.verdict == Verdict::Violated) {
      FuzzViolation v;
      v.trial = i;
      v.seed = o.seed;
      v.f_text = std::move(o.f_text);
      v.g_text = std::move(o.g_text);
      v.report = std::move(o.report);
      rep.violations.push_back(std::move(v));
    }
  }
  return rep;
}

namespace {

struct SearchBest {
  double score = -std::numeric_limits<double>::infinity();
  Witness witness;
  bool seen = false;
};

void consider(SearchBest& best, Witness w) {
  if (!best.seen || w.violation > best.score) {
    best.score = w.violation;
    best.witness = std::move(w);
    best.seen = true;
  }
}

double clamp_to(double v, double lo, double hi) {
  return std::clamp(v, lo, hi);
}

}  // namespace

std::optional<Witness> falsify_membership(const Expr& f, const Domain& domain,
                                          ClassTag klass, int budget,
                                          std::uint64_t seed,
                                          const Tolerance& tol) {
  SplitMix64 rng(seed);
  budget = std::max(1, budget);
  bool gl = klass == ClassTag::GL1D || klass == ClassTag::JointGL ||
            klass == ClassTag::CoordGL;
  bool nonneg_class = klass != ClassTag::Convex1D &&
                      klass != ClassTag::JointConvex &&
                      klass != ClassTag::CoordConvex;
  constexpr double kLamMargin = 1e-3;

  auto draw_lambda = [&](double center, double radius) {
    double lo = gl ? kLamMargin : 0.0;
    double hi = gl ? 1.0 - kLamMargin : 1.0;
    if (radius < 1.0)
      return clamp_to(rng.uniform(center - radius, center + radius), lo, hi);
    return rng.uniform(lo, hi);
  };

  SearchBest best;

  auto evaluate_1d = [&](double x, double y, double lam, bool nonneg_probe) {
    try {
      if (nonneg_probe) {
        EvalPoint p;
        p.x = x;
        double v = eval(f, p);
        double b = tol.bound(0.0, v);
        if (-v > b) {
          Witness w;
          w.kind = "nonnegativity";
          w.points = {p};
          w.lhs = 0.0;
          w.rhs = v;
          w.violation = -v - b;
          consider(best, std::move(w));
        }
        return;
      }
      EvalPoint px, py, pm;
      px.x = x;
      py.x = y;
      pm.x = lam * x + (1.0 - lam) * y;
      double fx = eval(f, px);
      double fy = eval(f, py);
      double lhs = eval(f, pm);
      double rhs = class_combination_rhs(klass, fx, fy, lam);
      double b = tol.bound(lhs, rhs);
      if (lhs - rhs > b) {
        Witness w;
        w.kind = "inequality";
        w.points = {px, py};
        w.lambda = lam;
        w.lhs = lhs;
        w.rhs = rhs;
        w.violation = lhs - rhs - b;
        consider(best, std::move(w));
      }
    } catch (const EvalException&) {
    }
  };

  auto evaluate_joint = [&](double x, double y, double z, double w2,
                            double lam) {
    try {
      EvalPoint p1, p2, pm;
      p1.x = x;
      p1.y = y;
      p2.x = z;
      p2.y = w2;
      pm.x = lam * x + (1.0 - lam) * z;
      pm.y = lam * y + (1.0 - lam) * w2;
      double f1 = eval(f, p1);
      double f2 = eval(f, p2);
      double lhs = eval(f, pm);
      double rhs = class_combination_rhs(klass, f1, f2, lam);
      double b = tol.bound(lhs, rhs);
      if (lhs - rhs > b) {
        Witness w;
        w.kind = "inequality";
        w.points = {p1, p2};
        w.lambda = lam;
        w.lhs = lhs;
        w.rhs = rhs;
        w.violation = lhs - rhs - b;
        consider(best, std::move(w));
      }
    } catch (const EvalException&) {
    }
  };

  auto evaluate_nonneg_2d = [&](double x, double y) {
    try {
      EvalPoint p;
      p.x = x;
      p.y = y;
      double v = eval(f, p);
      double b = tol.bound(0.0, v);
      if (-v > b) {
        Witness w;
        w.kind = "nonnegativity";
        w.points = {p};
        w.lhs = 0.0;
        w.rhs = v;
        w.violation = -v - b;
        consider(best, std::move(w));
      }
    } catch (const EvalException&) {
    }
  };

  auto evaluate_coord = [&](bool freeze_x, double frozen, double u, double v,
                            double lam) {
    ClassTag line = partial_map_class(klass);
    try {
      EvalPoint pu, pv, pm;
      double mid = lam * u + (1.0 - lam) * v;
      if (freeze_x) {
        pu = {frozen, u};
        pv = {frozen, v};
        pm = {frozen, mid};
      } else {
        pu = {u, frozen};
        pv = {v, frozen};
        pm = {mid, frozen};
      }
      double fu = eval(f, pu);
      double fv = eval(f, pv);
      double lhs = eval(f, pm);
      double rhs = class_combination_rhs(line, fu, fv, lam);
      double b = tol.bound(lhs, rhs);
      if (lhs - rhs > b) {
        Witness w;
        w.kind = freeze_x ? "partial-x inequality" : "partial-y inequality";
        w.points = {pu, pv};
        w.lambda = lam;
        w.lhs = lhs;
        w.rhs = rhs;
        w.violation = lhs - rhs - b;
        consider(best, std::move(w));
      }
    } catch (const EvalException&) {
    }
  };

  int per_round = std::max(16, budget / 4);

  if (is_1d_class(klass)) {
    Interval iv = interval_of(domain);
    double span = iv.b - iv.a;
    double bx = 0.0, by = 0.0, bl = 0.5;  // best sample so far
    auto sample = [&](double radius) {
      double x, y, lam;
      if (radius >= 1.0) {
        x = rng.uniform(iv.a, iv.b);
        y = rng.uniform(iv.a, iv.b);
        lam = draw_lambda(0.5, 1.0);
      } else {
        x = clamp_to(rng.uniform(bx - radius * span, bx + radius * span),
                     iv.a, iv.b);
        y = clamp_to(rng.uniform(by - radius * span, by + radius * span),
                     iv.a, iv.b);
        lam = draw_lambda(bl, radius);
      }
      bool nonneg_probe = nonneg_class && rng.range_int(0, 3) == 0;
      evaluate_1d(x, y, lam, nonneg_probe);
      if (best.seen && best.witness.kind == "inequality") {
        bx = best.witness.points[0].x;
        by = best.witness.points[1].x;
        bl = best.witness.lambda;
      }
    };
    for (int i = 0; i < budget; ++i) sample(1.0);
    if (best.seen)
      for (int round = 1; round <= 3; ++round)
        for (int i = 0; i < per_round; ++i)
          sample(std::pow(10.0, -round));
  } else if (is_joint_class(klass)) {
    Rect r = rect_of(domain);
    double sx = r.b - r.a, sy = r.d - r.c;
    double b1 = 0, b2 = 0, b3 = 0, b4 = 0, bl = 0.5;
    auto sample = [&](double radius) {
      double x, y, z, w, lam;
      if (radius >= 1.0) {
        x = rng.uniform(r.a, r.b);
        y = rng.uniform(r.c, r.d);
        z = rng.uniform(r.a, r.b);
        w = rng.uniform(r.c, r.d);
        lam = draw_lambda(0.5, 1.0);
      } else {
        x = clamp_to(rng.uniform(b1 - radius * sx, b1 + radius * sx), r.a, r.b);
        y = clamp_to(rng.uniform(b2 - radius * sy, b2 + radius * sy), r.c, r.d);
        z = clamp_to(rng.uniform(b3 - radius * sx, b3 + radius * sx), r.a, r.b);
        w = clamp_to(rng.uniform(b4 - radius * sy, b4 + radius * sy), r.c, r.d);
        lam = draw_lambda(bl, radius);
      }
      if (nonneg_class && rng.range_int(0, 3) == 0) {
        evaluate_nonneg_2d(x, y);
      } else {
        evaluate_joint(x, y, z, w, lam);
      }
      if (best.seen && best.witness.kind == "inequality") {
        b1 = best.witness.points[0].x;
        b2 = best.witness.points[0].y.value_or(0.0);
        b3 = best.witness.points[1].x;
        b4 = best.witness.points[1].y.value_or(0.0);
        bl = best.witness.lambda;
      }
    };
    for (int i = 0; i < budget; ++i) sample(1.0);
    if (best.seen)
      for (int round = 1; round <= 3; ++round)
        for (int i = 0; i < per_round; ++i)
          sample(std::pow(10.0, -round));
  } else {
    Rect r = rect_of(domain);
    double sx = r.b - r.a, sy = r.d - r.c;
    bool bfx = true;
    double bf = 0, bu = 0, bv = 0, bl = 0.5;
    auto sample = [&](double radius, int k) {
      bool freeze_x = radius >= 1.0 ? (k % 2 == 0) : bfx;
      double fspan = freeze_x ? sx : sy;
      double uspan = freeze_x ? sy : sx;
      double flo = freeze_x ? r.a : r.c, fhi = freeze_x ? r.b : r.d;
      double ulo = freeze_x ? r.c : r.a, uhi = freeze_x ? r.d : r.b;
      double frozen, u, v, lam;
      if (radius >= 1.0) {
        frozen = rng.uniform(flo, fhi);
        u = rng.uniform(ulo, uhi);
        v = rng.uniform(ulo, uhi);
        lam = draw_lambda(0.5, 1.0);
      } else {
        frozen = clamp_to(rng.uniform(bf - radius * fspan, bf + radius * fspan),
                          flo, fhi);
        u = clamp_to(rng.uniform(bu - radius * uspan, bu + radius * uspan),
                     ulo, uhi);
        v = clamp_to(rng.uniform(bv - radius * uspan, bv + radius * uspan),
                     ulo, uhi);
        lam = draw_lambda(bl, radius);
      }
      if (nonneg_class && rng.range_int(0, 3) == 0) {
        double px = freeze_x ? frozen : u;
        double py = freeze_x ? u : frozen;
        evaluate_nonneg_2d(px, py);
      } else {
        evaluate_coord(freeze_x, frozen, u, v, lam);
      }
      if (best.seen && best.witness.kind.find("inequality") !=
                           std::string::npos &&
          best.witness.points.size() == 2) {
        bfx = best.witness.kind[8] == 'x';
        if (bfx) {
          bf = best.witness.points[0].x;
          bu = best.witness.points[0].y.value_or(0.0);
          bv = best.witness.points[1].y.value_or(0.0);
        } else {
          bf = best.witness.points[0].y.value_or(0.0);
          bu = best.witness.points[0].x;
          bv = best.witness.points[1].x;
        }
        bl = best.witness.lambda;
      }
    };
    for (int i = 0; i < budget; ++i) sample(1.0, i);
    if (best.seen)
      for (int round = 1; round <= 3; ++round)
        for (int i = 0; i < per_round; ++i)
          sample(std::pow(10.0, -round), i);
  }

  if (best.seen && best.witness.violation > 0.0) return best.witness;
  return std::nullopt;
}

SlackProbe min_slack(ChainId chain, const Expr& f, const Expr* g,
                     const Domain& domain, const ChainConfig& cfg) {
  ChainReport rep = eval_chain(chain, f, g, domain, cfg);
  SlackProbe out;
  out.terms = rep.terms;
  out.verdict = rep.verdict;
  out.slack = kNaN;
  for (const Link& l : rep.links) {
    if (l.inconclusive) continue;
    if (std::isnan(out.slack) || l.slack < out.slack) {
      out.slack = l.slack;
      out.link = rep.terms[static_cast<std::size_t>(l.lhs_index)].label +
                 " <= " +
                 rep.terms[static_cast<std::size_t>(l.rhs_index)].label;
    }
  }
  return out;
}

}  // namespace hadamard
