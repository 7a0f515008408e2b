#include "magwell/csv.hpp"

#include <charconv>
#include <fstream>

#include "magwell/errors.hpp"

namespace magwell {

std::string format_number(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  append_line(header);
}

void CsvWriter::add_row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_number(v));
  append_line(fields);
}

void CsvWriter::add_row(const std::vector<std::string>& fields) { append_line(fields); }

void CsvWriter::append_line(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw InvalidInput("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(columns_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += quote_if_needed(fields[i]);
  }
  out_ += "\r\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw NumericalError("write to " + path + " failed");
}

}  // namespace magwell
