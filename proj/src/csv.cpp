#include "flexcon/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace flexcon::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: '" + field + "'");
  return v;
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Writer::Writer(Row header) : header_(std::move(header)) {}

void Writer::add(Row row) {
  if (row.size() != header_.size()) throw std::logic_error("csv row width does not match header");
  rows_.push_back(std::move(row));
}

std::string Writer::str() const {
  std::string out;
  auto emit = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += escape(r[i]);
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

std::vector<Row> parse(const std::string& text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw std::invalid_argument("csv: quote inside unquoted field");
        quoted = field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Row report_header() {
  return {"mode", "baseline_profit", "menu_profit", "super_optimal_profit", "gain_ratio", "per_type_capacity"};
}

Row report_fields(const EvaluationReport& report) {
  std::string caps;
  for (std::size_t i = 0; i < report.per_type_capacity.size(); ++i) {
    if (i) caps += ';';
    caps += format_number(report.per_type_capacity[i]);
  }
  return {to_string(report.mode.mode), format_number(report.baseline_profit), format_number(report.menu_profit),
          format_number(report.super_optimal_profit), format_number(report.gain_ratio), caps};
}

std::string report_to_csv(const EvaluationReport& report) {
  Writer w(report_header());
  w.add(report_fields(report));
  return w.str();
}

EvaluationReport report_from_csv(const std::string& text) {
  const auto rows = parse(text);
  if (rows.size() != 2 || rows[0] != report_header() || rows[1].size() != rows[0].size())
    throw std::invalid_argument("csv: not a report table");
  const Row& r = rows[1];
  EvaluationReport out;
  if (r[0] == "optimistic") {
    out.mode.mode = Behavior::Optimistic;
  } else if (r[0] == "pessimistic") {
    out.mode.mode = Behavior::Pessimistic;
  } else {
    throw std::invalid_argument("csv: unknown mode '" + r[0] + "'");
  }
  out.baseline_profit = parse_number(r[1]);
  out.menu_profit = parse_number(r[2]);
  out.super_optimal_profit = parse_number(r[3]);
  out.gain_ratio = parse_number(r[4]);
  std::stringstream ss(r[5]);
  for (std::string part; std::getline(ss, part, ';');) out.per_type_capacity.push_back(parse_number(part));
  return out;
}

}  // namespace flexcon::csv
