#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace idio {

// Dense row-major real matrix. Small (16x8 in the full system) so no
// external linear algebra is needed.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c);
    return s;
  }
  double row_mean(std::size_t r) const { return row_sum(r) / static_cast<double>(cols_); }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Text format: optional leading '#' comment lines, then "N L", then N rows
// of L space-separated decimals.
inline Matrix load_matrix(std::istream& in) {
  std::string line;
  std::size_t rows = 0, cols = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream head(line);
    if (!(head >> rows >> cols) || rows == 0 || cols == 0)
      throw std::runtime_error("matrix file: bad header line: " + line);
    break;
  }
  if (rows == 0) throw std::runtime_error("matrix file: missing header");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (!(in >> m(r, c)))
        throw std::runtime_error("matrix file: truncated at row " + std::to_string(r));
  return m;
}

inline Matrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return load_matrix(in);
}

inline void save_matrix(std::ostream& out, const Matrix& m, const std::string& comment = "") {
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string cl;
    while (std::getline(cs, cl)) out << "# " << cl << "\n";
  }
  out << m.rows() << " " << m.cols() << "\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << "\n";
  }
}

inline void save_matrix_file(const std::string& path, const Matrix& m,
                             const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + path);
  save_matrix(out, m, comment);
}

}  // namespace idio
