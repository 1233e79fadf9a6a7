#include "fluct/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "fluct/errors.hpp"

namespace fluct::csv {

bool Reader::next(Row& row) {
  row.fields.clear();
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return false;
  ++line_;
  row.line = line_;

  std::string field;
  bool quoted = false;     // currently inside quotes
  bool was_quoted = false; // field began with a quote
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw DataError("line " + std::to_string(row.line) + ": unterminated quoted field");
      row.fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == ',') {
      row.fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CRLF terminator; the LF ends the record on the next read.
    } else if (ch == '\n') {
      row.fields.push_back(std::move(field));
      return true;
    } else if (ch == '"') {
      if (!field.empty() || was_quoted) {
        throw DataError("line " + std::to_string(line_) + ": stray quote in field");
      }
      quoted = true;
      was_quoted = true;
    } else {
      if (was_quoted) {
        throw DataError("line " + std::to_string(line_) + ": text after closing quote");
      }
      field.push_back(ch);
    }
  }
}

std::vector<Row> read_all(std::istream& in) {
  Reader reader(in);
  std::vector<Row> rows;
  Row row;
  while (reader.next(row)) rows.push_back(row);
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::string format_real(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace fluct::csv
