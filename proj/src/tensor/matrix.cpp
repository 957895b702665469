#include "pmarl/tensor/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "pmarl/errors.hpp"

namespace pmarl::tensor {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.size() == 0 ? 0 : rows.begin()->size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw ContractViolation("Matrix::from_rows: ragged rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

bool Matrix::all_finite() const { return tensor::all_finite(data); }

void Matrix::set_zero() { std::fill(data.begin(), data.end(), 0.0); }

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace pmarl::tensor
