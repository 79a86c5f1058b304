#include "magwell/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "magwell/errors.hpp"

namespace magwell {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  // RFC 4180: quote a cell only when needed; embedded quotes double.
  auto emit_cell = [&out](const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
      out += cell;
      return;
    }
    out += '"';
    for (char c : cell) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  };
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      emit_cell(row[i]);
    }
    out += '\n';
  };
  emit_row(header);
  for (const auto& r : rows) emit_row(r);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open output file for writing: " + path);
  out << content;
  if (!out) throw ParseError("failed writing output file: " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ParseError("cannot create output directory " + path + ": " + ec.message());
}

}  // namespace magwell
