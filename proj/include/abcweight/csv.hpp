#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace abcweight {

// Shortest text form of a double that round-trips exactly.
std::string format_double(double value);

// RFC-4180 quoting; only applied when the field needs it.
std::string csv_field(const std::string& raw);

// Headerless numeric matrix, one row per line, comma separated.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

}  // namespace abcweight
