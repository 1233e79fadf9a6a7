#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fluct::csv {

/// One parsed record and the 1-based line it started on.
struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC-4180 reader. Quoted fields may span lines; a bare quote inside an
/// unquoted field or an unterminated quote throws DataError with the line.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Returns false at end of input.
  bool next(Row& row);

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<Row> read_all(std::istream& in);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that round-trips the double exactly.
std::string format_real(double value);

}  // namespace fluct::csv
