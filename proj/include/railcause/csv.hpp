#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace railcause::csv {

/// Streaming RFC-4180 reader: quoted fields, doubled quotes, embedded
/// newlines, CRLF or LF line endings. A leading UTF-8 BOM is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws DataError on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool started_ = false;
};

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/// Joins fields into one CSV line (no trailing newline).
std::string join(const std::vector<std::string>& fields);

}  // namespace railcause::csv
