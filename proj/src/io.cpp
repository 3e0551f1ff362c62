#include "geoaccel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "geoaccel/errors.hpp"

namespace geoaccel {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Vector vector_from_json(const nlohmann::json& values) {
  if (!values.is_array()) throw ConfigError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number()) throw ConfigError("expected a JSON array of numbers");
    v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("expected a non-empty array of rows");
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  if (cols == 0) throw ConfigError("matrix rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw ConfigError("matrix rows must all have the same length");
    }
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(rows[i]).transpose();
  }
  return m;
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::begin_row() {
  in_row_ = 0;
  return *this;
}

CsvWriter& CsvWriter::add(double v) {
  if (in_row_++ > 0) out_ += ',';
  out_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::add(long long v) {
  if (in_row_++ > 0) out_ += ',';
  out_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::add(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(in_row_) + " fields, header has " +
                           std::to_string(columns_));
  }
  out_ += '\n';
  ++rows_;
}

std::vector<std::string> indexed_columns(const std::string& prefix, int n) {
  std::vector<std::string> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) cols.push_back(prefix + "_" + std::to_string(i));
  return cols;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace geoaccel
