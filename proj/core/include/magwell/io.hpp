#pragma once

#include <string>
#include <vector>

namespace magwell {

// All floating-point values destined for artifacts go through this single
// formatter (17 significant digits) so reruns are byte-identical.
std::string format_g17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_string() const;
};

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

}  // namespace magwell
