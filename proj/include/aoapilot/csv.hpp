#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace aoapilot {

// Round-trippable decimal ("%.17g"); NaN prints as "nan".
std::string csv_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column, or -1.
  int column(const std::string& name) const;
};

// Minimal reader for the comma-separated files this project writes (no
// quoting).
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace aoapilot
