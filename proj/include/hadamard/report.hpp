#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/chains.hpp"
#include "hadamard/probe.hpp"

namespace hadamard {

/// Minimal JSON emitter with caller-controlled key order. Every document
/// the tool prints goes through this writer, so key order and number
/// formatting are byte-stable across runs: doubles at 17 significant
/// digits (full round-trip precision), non-finite values as null.
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(std::string_view k);

  void value(std::string_view s);
  void value(const char* s) { value(std::string_view(s)); }
  void value(double d);
  void value(int i);
  void value(long long i);
  void value(std::uint64_t i);
  void value(bool b);
  void null();

  // key + value in one call, for scalar fields.
  template <typename T>
  void field(std::string_view k, T v) {
    key(k);
    value(v);
  }

  std::string take() { return std::move(out_); }
  const std::string& str() const { return out_; }

 private:
  void separate();
  std::string out_;
  std::vector<bool> first_;     // per open container
  bool pending_key_ = false;
};

std::string format_double(double d);  // %.17g; "null" for non-finite
std::string json_escape(std::string_view s);

enum class OutputFormat : std::uint8_t { Json, Csv, Text };
OutputFormat format_from_name(std::string_view name);  // throws on unknown

/// Nested payload writers (callable from any enclosing document).
void write_membership_json(JsonWriter& w, const MembershipReport& r);
void write_chain_json(JsonWriter& w, const ChainReport& r);
void write_fuzz_json(JsonWriter& w, const FuzzReport& r);

/// One audited function: the printed and corrected symmetric corollary
/// side by side.
struct Corollary2Case {
  std::string f_text;
  Corollary2Audit audit;
};

void write_corollary2_json(JsonWriter& w,
                           const std::vector<Corollary2Case>& cases);

/// Top-level document: {"schema":"hadamard-lab/1","command":...,
/// "inputs":{...},"result":{...}}. The two callbacks fill the inputs
/// and result objects (the writer is already inside each object).
std::string json_document(std::string_view command,
                          const std::function<void(JsonWriter&)>& inputs,
                          const std::function<void(JsonWriter&)>& result);

/// CSV flattening: one record per row, heterogeneous record kinds tagged
/// in the first column; floats keep the JSON formatting.
std::string csv_membership(const MembershipReport& r);
std::string csv_chain(const ChainReport& r);
std::string csv_fuzz(const FuzzReport& r);
std::string csv_corollary2(const std::vector<Corollary2Case>& cases);

/// Human-readable renderings.
std::string text_membership(const MembershipReport& r);
std::string text_chain(const ChainReport& r);
std::string text_fuzz(const FuzzReport& r);
std::string text_corollary2(const std::vector<Corollary2Case>& cases);

/// Aggregate fuzz verdict: violated if any trial violated, else
/// inconclusive if any trial was, else holds.
Verdict fuzz_verdict(const FuzzReport& r);

/// Audit verdict follows the corrected variant only; the stated variant
/// is reported in the body and is expected to fail for f = 1.
Verdict corollary2_verdict(const std::vector<Corollary2Case>& cases);

/// Exit-code mapping shared by every subcommand: holds 0, violated 1,
/// inconclusive 2.
int exit_code_for(Verdict v);

}  // namespace hadamard
