#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace hwsim {

// Shortest round-trip decimal form, locale independent; all CSV output goes
// through this so that artifacts are byte-stable.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void close();

  static std::string cell(double v) { return format_number(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }

 private:
  std::ofstream out_;
  std::string path_;
};

// Minimal reader for the toolkit's own artifacts: header plus numeric rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace hwsim
