#include "hdim/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace hdim {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------
// JSON emission.
// ---------------------------------------------------------------------

namespace {

std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out;
}

}  // namespace

void JsonWriter::indent() { out_.append(2 * has_item_.size(), ' '); }

void JsonWriter::separate() {
  // Prefix for a new item at the current nesting level.
  if (has_item_.empty()) return;  // top-level value
  if (has_item_.back()) out_ += ',';
  out_ += '\n';
  indent();
  has_item_.back() = true;
}

JsonWriter& JsonWriter::begin_object() {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += '{';
  has_item_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool had = has_item_.back();
  has_item_.pop_back();
  if (had) {
    out_ += '\n';
    indent();
  }
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += '[';
  has_item_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool had = has_item_.back();
  has_item_.pop_back();
  if (had) {
    out_ += '\n';
    indent();
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  separate();
  out_ += '"';
  out_ += escape_json(name);
  out_ += "\": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  if (std::isnan(v) || std::isinf(v)) return null_value();
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += format_real(v);
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out_.append(buf, res.ptr);
  return *this;
}

JsonWriter& JsonWriter::value(unsigned long long v) {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out_.append(buf, res.ptr);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += '"';
  out_ += escape_json(v);
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::null_value() {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::raw_value(const std::string& rendered) {
  if (pending_key_) {
    pending_key_ = false;
  } else {
    separate();
  }
  // Re-indent the pre-rendered fragment to the current depth.
  const std::string pad(2 * has_item_.size(), ' ');
  for (char ch : rendered) {
    out_ += ch;
    if (ch == '\n') out_ += pad;
  }
  return *this;
}

// ---------------------------------------------------------------------
// CSV ingestion / emission.
// ---------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing_token(const std::string& t) {
  return t.empty() || t == "NA" || t == "na";
}

std::optional<double> try_parse_double(const std::string& token) {
  std::string t = token;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  // from_chars accepts "nan"/"inf"; those are not usable data values.
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

}  // namespace

TriangularSample parse_csv_stream(std::istream& in, const std::string& name) {
  std::vector<std::vector<std::optional<double>>> grid;
  std::string line;
  long line_number = 0;
  std::size_t width = 0;
  bool saw_data = false;
  bool header_checked = false;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // blank lines carry no cells
    const std::vector<std::string> fields = split_fields(line);

    if (!header_checked) {
      // Header auto-detection: a first row with any field that is neither
      // numeric nor a missing token is a single header row.
      header_checked = true;
      bool header = false;
      for (const std::string& f : fields) {
        if (!is_missing_token(f) && !try_parse_double(f)) header = true;
      }
      if (header) continue;
    }

    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (std::size_t col = 0; col < fields.size(); ++col) {
      const std::string& f = fields[col];
      if (is_missing_token(f)) {
        row.push_back(std::nullopt);
        continue;
      }
      const std::optional<double> v = try_parse_double(f);
      if (!v) {
        throw std::runtime_error(name + ": non-numeric value '" + f +
                                 "' at line " + std::to_string(line_number) +
                                 ", column " + std::to_string(col + 1));
      }
      row.push_back(v);
    }

    if (!saw_data) {
      width = row.size();
      saw_data = true;
    } else if (row.size() != width) {
      throw std::runtime_error(
          name + ": expected " + std::to_string(width) + " fields but found " +
          std::to_string(row.size()) + " at line " +
          std::to_string(line_number));
    }
    grid.push_back(std::move(row));
  }

  if (grid.empty()) {
    throw std::runtime_error(name + ": no data rows");
  }
  return from_matrix(grid);
}

TriangularSample parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open file");
  }
  return parse_csv_stream(in, path);
}

void write_csv(const TriangularSample& sample, std::ostream& out) {
  for (int i = 0; i < sample.n(); ++i) {
    const Row& row = sample.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      if (row[j].observed) out << format_real(row[j].value);
    }
    out << '\n';
  }
}

std::vector<double> parse_number_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open file");
  }
  std::vector<double> values;
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::string token;
  const auto flush_token = [&]() {
    if (token.empty()) return;
    const std::optional<double> v = try_parse_double(token);
    if (!v) {
      throw std::runtime_error(path + ": non-numeric value '" + token + "'");
    }
    values.push_back(*v);
    token.clear();
  };
  for (char ch : content) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      flush_token();
    } else {
      token += ch;
    }
  }
  flush_token();
  if (values.empty()) {
    throw std::runtime_error(path + ": no numbers found");
  }
  return values;
}

// ---------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------

std::string test_report_json(const TestReport& report,
                             const std::string& config_json) {
  JsonWriter w;
  w.begin_object();
  w.key("statistic").value(report.statistic);
  w.key("critical_value").value(report.critical_value);
  w.key("p_value").value(report.p_value);
  w.key("reject").value(report.reject);
  w.key("lambda").begin_array();
  for (double l : report.lambda_used) w.value(l);
  w.end_array();
  w.key("psd_repaired").value(report.psd_repaired);
  w.key("norm").value(report.norm.name());
  w.key("normalizer").value(normalizer_name(report.normalizer));
  w.key("n").begin_array();
  for (int n : report.n_per_group) w.value(n);
  w.end_array();
  w.key("dim").value(report.dim);
  w.key("seed").value(static_cast<unsigned long long>(report.seed));
  w.key("config").raw_value(config_json);
  w.end_object();
  return w.str() + "\n";
}

std::string suite_reports_json(const std::vector<SuiteReport>& reports,
                               const std::string& config_json) {
  JsonWriter w;
  w.begin_object();
  bool all = true;
  w.key("suites").begin_array();
  for (const SuiteReport& suite : reports) {
    w.begin_object();
    w.key("suite").value(suite.suite);
    w.key("all_pass").value(suite.all_pass);
    w.key("checks").begin_array();
    for (const SuiteCheck& check : suite.checks) {
      w.begin_object();
      w.key("name").value(check.name);
      w.key("pass").value(check.pass);
      w.key("detail").value(check.detail);
      w.end_object();
    }
    w.end_array();
    w.end_object();
    all = all && suite.all_pass;
  }
  w.end_array();
  w.key("all_pass").value(all);
  w.key("config").raw_value(config_json);
  w.end_object();
  return w.str() + "\n";
}

std::string type1_table_json(const Type1Table& table,
                             const std::string& config_json) {
  JsonWriter w;
  w.begin_object();
  w.key("alpha").value(table.alpha);
  w.key("trials").value(table.trials);
  w.key("cells").begin_array();
  for (const Type1Cell& cell : table.cells) {
    w.begin_object();
    w.key("b").value(cell.b);
    w.key("norm").value(cell.norm);
    w.key("rate").value(cell.rate);
    w.key("std_error").value(cell.std_error);
    w.end_object();
  }
  w.end_array();
  w.key("config").raw_value(config_json);
  w.end_object();
  return w.str() + "\n";
}

std::string type1_table_csv(const Type1Table& table) {
  std::string out = "b,norm,rate,std_error\n";
  for (const Type1Cell& cell : table.cells) {
    out += std::to_string(cell.b);
    out += ',';
    out += cell.norm;
    out += ',';
    out += format_real(cell.rate);
    out += ',';
    out += format_real(cell.std_error);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << content;
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

}  // namespace hdim
