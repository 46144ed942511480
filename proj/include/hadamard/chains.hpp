#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hadamard/classes.hpp"

namespace hadamard {

enum class ChainId : std::uint8_t {
  HQ1D,          // f(mid) <= 4*avg(f), f in the 1D Godunova-Levin class
  HP1D,          // f(mid) <= 2*avg(f) <= 2*(f(a)+f(b)), f a 1D P-function
  Prod1D,        // avg(f*g) <= (M+N)/2, f convex, g a P-function
  CoordConvex,   // five-term chain for coordinated convex f on a rectangle
  CoordGL,       // f(mid)/16 <= (sum of mid-line avgs)/8 <= double avg
  CoordGLSquare, // CoordGL specialized to a square via one line integral
  CoordGLSymStated,    // symmetric-f corollary exactly as printed (1/4)
  CoordGLSymCorrected, // same corollary rederived (factors of 4)
  CoordP,        // four-term chain for coordinated P-functions
  ProdCoord,     // double avg of f*g <= (L+M+N)/4 corner bound
};

std::string_view chain_name(ChainId id);  // kebab-case, CLI-facing
std::optional<ChainId> chain_from_name(std::string_view name);

enum class DomainKind : std::uint8_t { Interval1D, SquareInterval, Rectangle };
DomainKind chain_domain_kind(ChainId id);
bool chain_needs_g(ChainId id);

using Domain = std::variant<Interval, Rect>;

struct ChainConfig {
  QuadConfig quad;
  SampleGrid grid;
  Tolerance tol;
  int witness_cap = kDefaultWitnessCap;
  bool run_preconditions = true;
};

struct Term {
  std::string label;   // stable, part of the report schema
  double value = 0.0;  // NaN when the defining evaluation faulted
  double quad_error = 0.0;
  bool reliable = true;  // false: integral unconverged or evaluation fault
};

struct Link {
  int lhs_index = 0;
  int rhs_index = 0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
  bool inconclusive = false;  // an endpoint term is unreliable
};

struct ChainReport {
  ChainId chain = ChainId::HQ1D;
  Domain domain;
  std::vector<Term> terms;
  std::vector<Link> links;  // one per consecutive term pair, in order
  std::vector<std::pair<std::string, double>> details;  // named sub-values
  std::vector<MembershipReport> class_preconditions;
  bool precondition_failed = false;  // some precondition came back violated
  bool symmetry_violation = false;   // symmetric variants only
  Verdict verdict = Verdict::Inconclusive;
};

// A link holds when slack >= -(tolerance band + both quad error bars);
// verdict is violated only if a link with both terms reliable fails that
// test. Chains are evaluated even when preconditions fail — exploring
// where the hypotheses are necessary is the point — so precondition
// failure is a flag, never an abort.

ChainReport eval_hq_1d(const Fn1& f, Interval iv, const ChainConfig& cfg = {});
ChainReport eval_hp_1d(const Fn1& f, Interval iv, const ChainConfig& cfg = {});
ChainReport eval_prod_1d(const Fn1& f, const Fn1& g, Interval iv,
                         const ChainConfig& cfg = {});
ChainReport eval_coord_convex(const Fn2& f, Rect r, const ChainConfig& cfg = {});
ChainReport eval_coord_gl(const Fn2& f, Rect r, const ChainConfig& cfg = {});
ChainReport eval_coord_gl_square(const Fn2& f, Interval iv,
                                 const ChainConfig& cfg = {});

enum class SymVariant : std::uint8_t { Stated, Corrected };

/// The symmetric-function corollary on [a,b]^2. The printed form bounds
/// f(mid,mid) by one quarter of the mid-line average and is falsified by
/// f = 1; the corrected form carries factors of 4 on both upper terms.
/// Symmetry of f is itself checked on the sample grid first.
ChainReport eval_coord_gl_symmetric(const Fn2& f, Interval iv,
                                    const ChainConfig& cfg, SymVariant variant);

ChainReport eval_coord_p(const Fn2& f, Rect r, const ChainConfig& cfg = {});
ChainReport eval_prod_coord(const Fn2& f, const Fn2& g, Rect r,
                            const ChainConfig& cfg = {});

struct Corollary2Audit {
  ChainReport stated;
  ChainReport corrected;
};

Corollary2Audit audit_corollary2(const Fn2& f, Interval iv,
                                 const ChainConfig& cfg = {});

/// Expression-level dispatcher used by the CLI and the fuzz harness.
/// The domain alternative must match chain_domain_kind(id) (interval for
/// 1D and square chains, rectangle otherwise) and g must be present iff
/// chain_needs_g(id); otherwise throws std::invalid_argument.
ChainReport eval_chain(ChainId id, const Expr& f, const Expr* g,
                       const Domain& domain, const ChainConfig& cfg = {});

double min_link_slack(const ChainReport& rep);  // NaN if no conclusive link

}  // namespace hadamard
