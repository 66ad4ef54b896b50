#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdim/sample.hpp"
#include "hdim/testing.hpp"
#include "hdim/verify.hpp"

namespace hdim {

// Locale-independent formatting with 17 significant digits (enough to
// round-trip any double exactly).
std::string format_real(double x);

// Minimal JSON emitter with a fixed, insertion-ordered layout and
// format_real for every number, so identical inputs always serialize to
// identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(long v);
  JsonWriter& value(int v) { return value(static_cast<long>(v)); }
  JsonWriter& value(unsigned long long v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& null_value();
  // Splices pre-rendered JSON, re-indented to the current depth.
  JsonWriter& raw_value(const std::string& rendered);

  const std::string& str() const { return out_; }

 private:
  void separate();
  void indent();
  std::string out_;
  std::vector<bool> has_item_;  // per nesting level
  bool pending_key_ = false;
};

// CSV ingestion: rows are replicates, columns variables. A single header
// row is auto-detected (first row with any non-numeric, non-missing
// field). Empty fields and the literal tokens NA / na are missing values;
// anything else non-numeric is an error. Ragged rows are an error with
// the offending line number.
TriangularSample parse_csv(const std::string& path);
TriangularSample parse_csv_stream(std::istream& in, const std::string& name);

// Writes the sample back as CSV (no header); missing cells are empty
// fields, observed values are emitted with full precision.
void write_csv(const TriangularSample& sample, std::ostream& out);

// One row or one column of numbers (e.g., a null-mean profile).
std::vector<double> parse_number_list(const std::string& path);

// Report serialization. `config_json` is the fully-resolved run
// configuration, already serialized, spliced in as the "config" field.
std::string test_report_json(const TestReport& report,
                             const std::string& config_json);

std::string suite_reports_json(const std::vector<SuiteReport>& reports,
                               const std::string& config_json);

std::string type1_table_json(const Type1Table& table,
                             const std::string& config_json);
std::string type1_table_csv(const Type1Table& table);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace hdim
