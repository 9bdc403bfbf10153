#pragma once

// RFC 4180 output: CRLF records, fields quoted only when they contain a
// comma, quote or line break. Doubles use the shortest round-trip form so
// identical runs give identical bytes.

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace sigt::cli {

std::string csv_field(const std::string& s);
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

 private:
  std::ostream& out_;
};

/// Splits one record (no embedded line breaks) back into fields.
std::vector<std::string> parse_csv_record(const std::string& line);

}  // namespace sigt::cli
