#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "geoaccel/linalg.hpp"

namespace geoaccel {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

Matrix matrix_from_json(const nlohmann::json& rows);
Vector vector_from_json(const nlohmann::json& values);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);

// Minimal CSV builder; every number goes through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& begin_row();
  CsvWriter& add(double v);
  CsvWriter& add(long long v);
  CsvWriter& add(const Vector& v);
  void end_row();

  std::size_t rows() const { return rows_; }
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
  std::string out_;
};

// Column names "<prefix>_1".."<prefix>_n".
std::vector<std::string> indexed_columns(const std::string& prefix, int n);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace geoaccel
