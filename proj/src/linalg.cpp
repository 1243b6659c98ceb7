#include "retrialq/linalg.hpp"

#include "retrialq/error.hpp"

#include <algorithm>
#include <cmath>

namespace retrialq {

Matrix row_sum_diagonal(const Matrix& m) {
  return m.rowwise().sum().asDiagonal();
}

Matrix checked_inverse(const Matrix& m, double rcond_min) {
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc > rcond_min)) {
    throw Error("singular-block", "matrix inversion failed (rcond = " + std::to_string(rc) + ")");
  }
  return lu.inverse();
}

int PolyMatrix::rows() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows()); }
int PolyMatrix::cols() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().cols()); }

Matrix PolyMatrix::coeff(int power) const {
  const int k = power - min_power;
  if (k < 0 || k >= static_cast<int>(coeffs.size())) return Matrix::Zero(rows(), cols());
  return coeffs[static_cast<size_t>(k)];
}

Matrix PolyMatrix::operator()(double z) const {
  Matrix out = Matrix::Zero(rows(), cols());
  for (size_t k = 0; k < coeffs.size(); ++k) {
    out += coeffs[k] * std::pow(z, min_power + static_cast<int>(k));
  }
  return out;
}

CMatrix PolyMatrix::operator()(std::complex<double> z) const {
  CMatrix out = CMatrix::Zero(rows(), cols());
  for (size_t k = 0; k < coeffs.size(); ++k) {
    out += coeffs[k].cast<std::complex<double>>() * std::pow(z, min_power + static_cast<int>(k));
  }
  return out;
}

int PolyMatrix::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (coeffs[static_cast<size_t>(k)].cwiseAbs().maxCoeff() != 0.0) return min_power + k;
  }
  return min_power;
}

}  // namespace retrialq
