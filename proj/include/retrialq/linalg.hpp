#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace retrialq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;
using CRowVector = Eigen::RowVectorXcd;

/// Diagonal matrix holding the row sums of m.
Matrix row_sum_diagonal(const Matrix& m);

/// Inverse through LU with partial pivoting; throws Error("singular-block")
/// when the reciprocal condition estimate falls below rcond_min.
Matrix checked_inverse(const Matrix& m, double rcond_min = 1e-14);

/// Matrix polynomial sum_k coeffs[k] z^(k + min_power).
struct PolyMatrix {
  std::vector<Matrix> coeffs;
  int min_power = 0;

  int rows() const;
  int cols() const;
  int max_power() const { return min_power + static_cast<int>(coeffs.size()) - 1; }
  /// Coefficient of z^power (zero matrix when absent).
  Matrix coeff(int power) const;
  Matrix operator()(double z) const;
  CMatrix operator()(std::complex<double> z) const;
  /// Highest power with a nonzero coefficient (entries exactly zero are ignored).
  int degree() const;
};

}  // namespace retrialq
