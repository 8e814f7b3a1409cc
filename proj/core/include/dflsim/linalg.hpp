/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DFLSIM_LINALG_HPP_
#define DFLSIM_LINALG_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dflsim {

// Flattened model parameters. The common currency between clients, attacks
// and aggregation rules.
using ParamVector = std::vector<double>;

// Dense row-major matrix for the small n x n client-space quantities.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// d x n matrix whose columns are the colluding clients' parameter vectors.
// Stored column-major so each client's vector is contiguous.
class UpdateMatrix {
 public:
  UpdateMatrix() = default;
  // Zero-filled d x n.
  UpdateMatrix(std::size_t d, std::size_t n);

  // Throws InvalidInputError on ragged, empty or non-finite input.
  static UpdateMatrix from_columns(const std::vector<ParamVector>& columns);
  static UpdateMatrix from_columns(const std::vector<std::span<const double>>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t j, std::size_t i) noexcept { return data_[i * rows_ + j]; }
  double operator()(std::size_t j, std::size_t i) const noexcept { return data_[i * rows_ + j]; }

  std::span<const double> column(std::size_t i) const noexcept {
    return {data_.data() + i * rows_, rows_};
  }
  std::span<double> column(std::size_t i) noexcept { return {data_.data() + i * rows_, rows_}; }

  bool operator==(const UpdateMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Symmetric n x n correlation matrix with unit diagonal.
struct CorrelationMatrix {
  Matrix values;
  // Rows whose standard deviation fell under the zero-variance threshold.
  std::vector<bool> guarded;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit norm, largest-magnitude entry >= 0
};

// Full symmetric eigendecomposition; eigenvalues in the order Jacobi leaves
// them on the diagonal, vectors[k] pairs with values[k].
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  std::size_t sweeps = 0;
};

inline constexpr double kZeroVarianceEpsilon = 1e-12;
inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr std::size_t kJacobiMaxSweeps = 100;
inline constexpr double kEigenTieTolerance = 1e-10;

ParamVector column_mean(const UpdateMatrix& u);

// V[j,i] = U[j,i] - mean[j].
UpdateMatrix center(const UpdateMatrix& u, std::span<const double> mean);

// C = V^T V / (n - 1), n x n. Returns nullopt when n < 2.
std::optional<Matrix> client_covariance(const UpdateMatrix& v);

// Y[a,b] = C[a,b] / (T_a T_b) with T = sqrt(diag C). Rows with T_a below
// kZeroVarianceEpsilon become unit basis rows.
CorrelationMatrix correlation_from_covariance(const Matrix& c);

// Cyclic Jacobi on a symmetric matrix. Throws NumericFailureError if the
// off-diagonal norm is still above kJacobiTolerance after kJacobiMaxSweeps.
SymmetricEigen jacobi_eigen(const Matrix& a);

// Largest eigenvalue and its eigenvector. Ties within kEigenTieTolerance go to
// the vector whose largest-magnitude component has the smallest index.
EigenPair principal_eigenpair(const Matrix& y);
inline EigenPair principal_eigenpair(const CorrelationMatrix& y) {
  return principal_eigenpair(y.values);
}

// P = (U y) y^T, the rank-one projection of every client column onto the
// client-space direction y.
UpdateMatrix project_onto_client_direction(const UpdateMatrix& u, std::span<const double> y);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace dflsim

#endif  // DFLSIM_LINALG_HPP_
