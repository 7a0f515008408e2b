#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace magwell {

/// Shortest representation that reads back to the same double, so that
/// identical inputs give identical bytes.
std::string format_number(double x);

/// Minimal RFC-4180 writer: CRLF line endings, fields quoted only when they
/// contain a comma, quote or line break.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& fields);

  const std::string& str() const { return out_; }
  std::size_t columns() const { return columns_; }

 private:
  void append_line(const std::vector<std::string>& fields);

  std::size_t columns_;
  std::string out_;
};

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace magwell
