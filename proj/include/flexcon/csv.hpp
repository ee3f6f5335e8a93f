#pragma once

#include <string>
#include <vector>

#include "flexcon/model.hpp"

namespace flexcon::csv {

// Shortest representation that parses back to the same double ("nan", "inf", "-inf" for
// non-finite values).
std::string format_number(double v);
double parse_number(const std::string& field);

// Quotes fields containing a comma, quote, CR or LF; quotes are doubled.
std::string escape(const std::string& field);

using Row = std::vector<std::string>;

// RFC-4180 table with a mandatory header; rows end in "\n".
class Writer {
 public:
  explicit Writer(Row header);

  void add(Row row);
  const Row& header() const { return header_; }
  std::string str() const;

 private:
  Row header_;
  std::vector<Row> rows_;
};

// Parses RFC-4180 text (LF or CRLF line endings); the first row is the header.
std::vector<Row> parse(const std::string& text);

// EvaluationReport as a one-row table. Per-type capacities are joined with ';'.
Row report_header();
Row report_fields(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);
EvaluationReport report_from_csv(const std::string& text);

}  // namespace flexcon::csv
