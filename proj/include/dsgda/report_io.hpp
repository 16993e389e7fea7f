#pragma once

#include <string>
#include <vector>

namespace dsgda {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

}  // namespace dsgda
