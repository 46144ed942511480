#include "hadamard/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hadamard {

namespace {

std::string fmt(double d) { return format_double(d); }
std::string S(std::string_view v) { return std::string(v); }

// Shorter rendering for the human-facing text format.
std::string fmt9(double d) {
  if (!std::isfinite(d)) return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", d);
  return buf;
}

std::string domain_text(const Domain& d) {
  if (const auto* iv = std::get_if<Interval>(&d))
    return "[" + fmt9(iv->a) + "," + fmt9(iv->b) + "]";
  const Rect& r = std::get<Rect>(d);
  return "[" + fmt9(r.a) + "," + fmt9(r.b) + "]x[" + fmt9(r.c) + "," +
         fmt9(r.d) + "]";
}

std::string point_text(const EvalPoint& p) {
  if (p.y) return "(" + fmt9(p.x) + ", " + fmt9(*p.y) + ")";
  return "(" + fmt9(p.x) + ")";
}

std::string link_label(const ChainReport& r, const Link& l) {
  return r.terms[static_cast<std::size_t>(l.lhs_index)].label + " <= " +
         r.terms[static_cast<std::size_t>(l.rhs_index)].label;
}

std::string link_status(const Link& l) {
  if (l.inconclusive) return "inconclusive";
  return l.holds ? "holds" : "violated";
}

// CSV: RFC-4180 quoting, only when needed.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos)
    return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += csv_field(c);
    first = false;
  }
  out += '\n';
}

// key,value flattening used by the non-tabular reports.
void kv(std::string& out, const std::string& k, const std::string& v) {
  csv_row(out, {k, v});
}

}  // namespace

std::string format_double(double d) {
  if (!std::isfinite(d)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::separate() {
  if (pending_key_) {
    pending_key_ = false;
    return;  // value follows its key, no comma
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

void JsonWriter::begin_object() {
  separate();
  out_ += '{';
  first_.push_back(true);
}

void JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
}

void JsonWriter::begin_array() {
  separate();
  out_ += '[';
  first_.push_back(true);
}

void JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
}

void JsonWriter::key(std::string_view k) {
  separate();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\":";
  pending_key_ = true;
}

void JsonWriter::value(std::string_view s) {
  separate();
  out_ += '"';
  out_ += json_escape(s);
  out_ += '"';
}

void JsonWriter::value(double d) {
  separate();
  out_ += format_double(d);
}

void JsonWriter::value(int i) {
  separate();
  out_ += std::to_string(i);
}

void JsonWriter::value(long long i) {
  separate();
  out_ += std::to_string(i);
}

void JsonWriter::value(std::uint64_t i) {
  separate();
  out_ += std::to_string(i);
}

void JsonWriter::value(bool b) {
  separate();
  out_ += b ? "true" : "false";
}

void JsonWriter::null() {
  separate();
  out_ += "null";
}

OutputFormat format_from_name(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "text") return OutputFormat::Text;
  throw std::invalid_argument("unknown output format: " + std::string(name));
}

namespace {

void write_point(JsonWriter& w, const EvalPoint& p) {
  w.begin_object();
  w.field("x", p.x);
  w.key("y");
  if (p.y) w.value(*p.y);
  else w.null();
  w.end_object();
}

void write_witness(JsonWriter& w, const Witness& wit) {
  w.begin_object();
  w.field("kind", wit.kind);
  w.key("points");
  w.begin_array();
  for (const auto& p : wit.points) write_point(w, p);
  w.end_array();
  w.field("lambda", wit.lambda);
  w.field("lhs", wit.lhs);
  w.field("rhs", wit.rhs);
  w.field("violation", wit.violation);
  w.end_object();
}

void write_domain(JsonWriter& w, const Domain& d) {
  w.begin_array();
  if (const auto* iv = std::get_if<Interval>(&d)) {
    w.value(iv->a);
    w.value(iv->b);
  } else {
    const Rect& r = std::get<Rect>(d);
    w.value(r.a);
    w.value(r.b);
    w.value(r.c);
    w.value(r.d);
  }
  w.end_array();
}

}  // namespace

void write_membership_json(JsonWriter& w, const MembershipReport& r) {
  w.begin_object();
  w.field("class", class_name(r.klass));
  w.field("verdict", membership_verdict_name(r.verdict));
  w.field("samples_tested", static_cast<long long>(r.samples_tested));
  w.key("tolerance");
  w.begin_object();
  w.field("abs", r.tolerance.abs);
  w.field("rel", r.tolerance.rel);
  w.end_object();
  w.key("witnesses");
  w.begin_array();
  for (const auto& wit : r.witnesses) write_witness(w, wit);
  w.end_array();
  w.end_object();
}

void write_chain_json(JsonWriter& w, const ChainReport& r) {
  w.begin_object();
  w.field("chain", chain_name(r.chain));
  w.key("domain");
  write_domain(w, r.domain);
  w.field("verdict", verdict_name(r.verdict));
  w.key("terms");
  w.begin_array();
  for (const auto& t : r.terms) {
    w.begin_object();
    w.field("label", t.label);
    w.field("value", t.value);
    w.field("quad_error", t.quad_error);
    w.field("reliable", t.reliable);
    w.end_object();
  }
  w.end_array();
  w.key("links");
  w.begin_array();
  for (const auto& l : r.links) {
    w.begin_object();
    w.field("lhs", l.lhs_index);
    w.field("rhs", l.rhs_index);
    w.field("slack", l.slack);
    w.field("holds", l.holds);
    w.field("inconclusive", l.inconclusive);
    w.end_object();
  }
  w.end_array();
  w.key("details");
  w.begin_object();
  for (const auto& [k, v] : r.details) w.field(k, v);
  w.end_object();
  w.key("preconditions");
  w.begin_array();
  for (const auto& m : r.class_preconditions) write_membership_json(w, m);
  w.end_array();
  w.field("precondition_failed", r.precondition_failed);
  w.field("symmetry_violation", r.symmetry_violation);
  w.end_object();
}

void write_fuzz_json(JsonWriter& w, const FuzzReport& r) {
  w.begin_object();
  w.field("chain", chain_name(r.chain));
  w.field("trials", r.trials);
  w.field("verdict", verdict_name(fuzz_verdict(r)));
  w.field("inconclusive", r.inconclusive_count);
  w.field("precondition_failures", r.precondition_failures);
  w.key("min_slack");
  if (r.min_slack.trial < 0) {
    w.null();
  } else {
    w.begin_object();
    w.field("trial", r.min_slack.trial);
    w.field("seed", r.min_slack.seed);
    w.field("link", r.min_slack.link);
    w.field("slack", r.min_slack.slack);
    w.end_object();
  }
  w.key("violations");
  w.begin_array();
  for (const auto& v : r.violations) {
    w.begin_object();
    w.field("trial", v.trial);
    w.field("seed", v.seed);
    w.field("f", v.f_text);
    w.key("g");
    if (v.g_text.empty()) w.null();
    else w.value(v.g_text);
    w.key("report");
    write_chain_json(w, v.report);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

void write_corollary2_json(JsonWriter& w,
                           const std::vector<Corollary2Case>& cases) {
  w.begin_object();
  w.field("verdict", verdict_name(corollary2_verdict(cases)));
  w.key("cases");
  w.begin_array();
  for (const auto& c : cases) {
    w.begin_object();
    w.field("f", c.f_text);
    w.key("stated");
    write_chain_json(w, c.audit.stated);
    w.key("corrected");
    write_chain_json(w, c.audit.corrected);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

std::string json_document(std::string_view command,
                          const std::function<void(JsonWriter&)>& inputs,
                          const std::function<void(JsonWriter&)>& result) {
  JsonWriter w;
  w.begin_object();
  w.field("schema", "hadamard-lab/1");
  w.field("command", command);
  w.key("inputs");
  w.begin_object();
  inputs(w);
  w.end_object();
  w.key("result");
  result(w);
  w.end_object();
  std::string out = w.take();
  out += '\n';
  return out;
}

Verdict fuzz_verdict(const FuzzReport& r) {
  if (!r.violations.empty()) return Verdict::Violated;
  if (r.inconclusive_count > 0) return Verdict::Inconclusive;
  return Verdict::Holds;
}

Verdict corollary2_verdict(const std::vector<Corollary2Case>& cases) {
  bool inconclusive = false;
  for (const auto& c : cases) {
    if (c.audit.corrected.verdict == Verdict::Violated)
      return Verdict::Violated;
    if (c.audit.corrected.verdict == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::Inconclusive : Verdict::Holds;
}

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::Holds: return 0;
    case Verdict::Violated: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

// ---------------------------------------------------------------------
// CSV

namespace {

std::string points_cell(const Witness& w) {
  std::string s;
  for (const auto& p : w.points) {
    if (!s.empty()) s += ' ';
    s += point_text(p);
  }
  return s;
}

void membership_kv(std::string& out, const std::string& prefix,
                   const MembershipReport& r) {
  kv(out, prefix + "class", S(class_name(r.klass)));
  kv(out, prefix + "verdict", S(membership_verdict_name(r.verdict)));
  kv(out, prefix + "samples_tested", std::to_string(r.samples_tested));
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    const Witness& wit = r.witnesses[i];
    std::string wp = prefix + "witness." + std::to_string(i) + ".";
    kv(out, wp + "kind", wit.kind);
    kv(out, wp + "points", points_cell(wit));
    kv(out, wp + "lambda", fmt(wit.lambda));
    kv(out, wp + "lhs", fmt(wit.lhs));
    kv(out, wp + "rhs", fmt(wit.rhs));
    kv(out, wp + "violation", fmt(wit.violation));
  }
}

void chain_rows(std::string& out, const std::string& tag,
                const ChainReport& r) {
  for (const auto& t : r.terms)
    csv_row(out, {tag, "term", t.label, fmt(t.value), fmt(t.quad_error),
                  t.reliable ? "reliable" : "unreliable"});
  for (const auto& l : r.links)
    csv_row(out, {tag, "link", link_label(r, l), fmt(l.slack), "",
                  link_status(l)});
  for (const auto& [k, v] : r.details)
    csv_row(out, {tag, "detail", k, fmt(v), "", ""});
  for (const auto& m : r.class_preconditions)
    csv_row(out, {tag, "precondition", S(class_name(m.klass)),
                  std::to_string(m.samples_tested), "",
                  S(membership_verdict_name(m.verdict))});
  csv_row(out, {tag, "chain", S(chain_name(r.chain)), domain_text(r.domain),
                r.symmetry_violation ? std::string("symmetry-violation")
                                     : std::string(),
                S(verdict_name(r.verdict))});
}

}  // namespace

std::string csv_membership(const MembershipReport& r) {
  std::string out;
  csv_row(out, {"key", "value"});
  membership_kv(out, "", r);
  return out;
}

std::string csv_chain(const ChainReport& r) {
  std::string out;
  csv_row(out, {"case", "record", "label", "value", "error", "status"});
  chain_rows(out, "", r);
  return out;
}

std::string csv_fuzz(const FuzzReport& r) {
  std::string out;
  csv_row(out, {"key", "value"});
  kv(out, "chain", S(chain_name(r.chain)));
  kv(out, "trials", std::to_string(r.trials));
  kv(out, "verdict", S(verdict_name(fuzz_verdict(r))));
  kv(out, "inconclusive", std::to_string(r.inconclusive_count));
  kv(out, "precondition_failures", std::to_string(r.precondition_failures));
  if (r.min_slack.trial >= 0) {
    kv(out, "min_slack.trial", std::to_string(r.min_slack.trial));
    kv(out, "min_slack.seed", std::to_string(r.min_slack.seed));
    kv(out, "min_slack.link", r.min_slack.link);
    kv(out, "min_slack.slack", fmt(r.min_slack.slack));
  }
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const FuzzViolation& v = r.violations[i];
    std::string vp = "violation." + std::to_string(i) + ".";
    kv(out, vp + "trial", std::to_string(v.trial));
    kv(out, vp + "seed", std::to_string(v.seed));
    kv(out, vp + "f", v.f_text);
    if (!v.g_text.empty()) kv(out, vp + "g", v.g_text);
    kv(out, vp + "verdict", S(verdict_name(v.report.verdict)));
  }
  return out;
}

std::string csv_corollary2(const std::vector<Corollary2Case>& cases) {
  std::string out;
  csv_row(out, {"case", "record", "label", "value", "error", "status"});
  for (const auto& c : cases) {
    chain_rows(out, "stated f=" + c.f_text, c.audit.stated);
    chain_rows(out, "corrected f=" + c.f_text, c.audit.corrected);
  }
  return out;
}

// ---------------------------------------------------------------------
// Text

namespace {

void witness_text(std::string& out, const Witness& w, const char* indent) {
  out += indent;
  out += w.kind + ": lambda=" + fmt9(w.lambda) + " points=";
  out += points_cell(w);
  out += " lhs=" + fmt9(w.lhs) + " rhs=" + fmt9(w.rhs) +
         " violation=" + fmt9(w.violation) + "\n";
}

void membership_text(std::string& out, const MembershipReport& r,
                     const char* indent) {
  out += indent;
  out += S(class_name(r.klass)) + ": " +
         S(membership_verdict_name(r.verdict)) + " (" +
         std::to_string(r.samples_tested) + " samples)\n";
  std::string deeper = std::string(indent) + "  ";
  for (const auto& w : r.witnesses) witness_text(out, w, deeper.c_str());
}

void chain_text(std::string& out, const ChainReport& r, const char* indent) {
  std::string in(indent);
  out += in + "chain " + S(chain_name(r.chain)) + " on " +
         domain_text(r.domain) + ": " + S(verdict_name(r.verdict)) + "\n";
  for (const auto& t : r.terms) {
    out += in + "  " + t.label + " = " + fmt9(t.value);
    if (t.quad_error > 0.0) out += " (+/- " + fmt9(t.quad_error) + ")";
    if (!t.reliable) out += " [unreliable]";
    out += "\n";
  }
  for (const auto& l : r.links)
    out += in + "  " + link_label(r, l) + ": slack " + fmt9(l.slack) + " (" +
           link_status(l) + ")\n";
  for (const auto& [k, v] : r.details)
    out += in + "  " + k + " = " + fmt9(v) + "\n";
  if (!r.class_preconditions.empty()) {
    out += in + "  preconditions:\n";
    std::string deeper = in + "    ";
    for (const auto& m : r.class_preconditions)
      membership_text(out, m, deeper.c_str());
  }
  if (r.symmetry_violation)
    out += in + "  warning: f is not symmetric on the sample grid\n";
}

}  // namespace

std::string text_membership(const MembershipReport& r) {
  std::string out;
  membership_text(out, r, "");
  return out;
}

std::string text_chain(const ChainReport& r) {
  std::string out;
  chain_text(out, r, "");
  return out;
}

std::string text_fuzz(const FuzzReport& r) {
  std::string out = "fuzz " + std::string(chain_name(r.chain)) + ": " +
                    std::to_string(r.trials) + " trials, " +
                    std::to_string(r.violations.size()) + " violated, " +
                    std::to_string(r.inconclusive_count) + " inconclusive, " +
                    std::to_string(r.precondition_failures) +
                    " precondition failures\n";
  if (r.min_slack.trial >= 0)
    out += "tightest link: " + r.min_slack.link + " slack " +
           fmt9(r.min_slack.slack) + " (trial " +
           std::to_string(r.min_slack.trial) + ", seed " +
           std::to_string(r.min_slack.seed) + ")\n";
  for (const auto& v : r.violations) {
    out += "violation at trial " + std::to_string(v.trial) + " (seed " +
           std::to_string(v.seed) + "): f = " + v.f_text;
    if (!v.g_text.empty()) out += ", g = " + v.g_text;
    out += "\n";
    chain_text(out, v.report, "  ");
  }
  out += "verdict: " + std::string(verdict_name(fuzz_verdict(r))) + "\n";
  return out;
}

std::string text_corollary2(const std::vector<Corollary2Case>& cases) {
  std::string out;
  for (const auto& c : cases) {
    out += "f = " + c.f_text + "\n";
    out += "  stated variant:\n";
    chain_text(out, c.audit.stated, "    ");
    out += "  corrected variant:\n";
    chain_text(out, c.audit.corrected, "    ");
  }
  out += "verdict (corrected variant): " +
         std::string(verdict_name(corollary2_verdict(cases))) + "\n";
  return out;
}

}  // namespace hadamard
