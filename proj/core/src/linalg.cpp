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

#include "dflsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dflsim/errors.hpp"

namespace dflsim {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw InvalidInputError("Matrix::from_rows: ragged rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

UpdateMatrix::UpdateMatrix(std::size_t d, std::size_t n) : rows_(d), cols_(n), data_(d * n, 0.0) {}

UpdateMatrix UpdateMatrix::from_columns(const std::vector<std::span<const double>>& columns) {
  if (columns.empty() || columns.front().empty()) {
    throw InvalidInputError("UpdateMatrix: need at least one non-empty column");
  }
  UpdateMatrix u(columns.front().size(), columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != u.rows()) {
      throw InvalidInputError("UpdateMatrix: column " + std::to_string(i) + " has length " +
                              std::to_string(columns[i].size()) + ", expected " +
                              std::to_string(u.rows()));
    }
    auto out = u.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      if (!std::isfinite(columns[i][j])) {
        throw InvalidInputError("UpdateMatrix: non-finite entry in column " + std::to_string(i));
      }
      out[j] = columns[i][j];
    }
  }
  return u;
}

UpdateMatrix UpdateMatrix::from_columns(const std::vector<ParamVector>& columns) {
  std::vector<std::span<const double>> views(columns.begin(), columns.end());
  return from_columns(views);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

ParamVector column_mean(const UpdateMatrix& u) {
  if (u.empty()) throw InvalidInputError("column_mean: empty matrix");
  ParamVector mean(u.rows(), 0.0);
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const auto col = u.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) mean[j] += col[j];
  }
  const double inv = 1.0 / static_cast<double>(u.cols());
  for (double& m : mean) m *= inv;
  return mean;
}

UpdateMatrix center(const UpdateMatrix& u, std::span<const double> mean) {
  if (mean.size() != u.rows()) {
    throw InvalidInputError("center: mean has length " + std::to_string(mean.size()) +
                            ", matrix has " + std::to_string(u.rows()) + " rows");
  }
  UpdateMatrix v = u;
  for (std::size_t i = 0; i < v.cols(); ++i) {
    auto col = v.column(i);
    for (std::size_t j = 0; j < v.rows(); ++j) col[j] -= mean[j];
  }
  return v;
}

std::optional<Matrix> client_covariance(const UpdateMatrix& v) {
  const std::size_t n = v.cols();
  if (n < 2) return std::nullopt;
  Matrix c(n, n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < n; ++a) {
    const auto va = v.column(a);
    for (std::size_t b = a; b < n; ++b) {
      const auto vb = v.column(b);
      double s = 0.0;
      for (std::size_t j = 0; j < v.rows(); ++j) s += va[j] * vb[j];
      c(a, b) = s / denom;
      c(b, a) = c(a, b);
    }
  }
  return c;
}

CorrelationMatrix correlation_from_covariance(const Matrix& c) {
  if (c.rows() != c.cols()) throw InvalidInputError("correlation_from_covariance: not square");
  const std::size_t n = c.rows();
  std::vector<double> sd(n);
  CorrelationMatrix out{Matrix(n, n), std::vector<bool>(n, false)};
  for (std::size_t a = 0; a < n; ++a) {
    sd[a] = std::sqrt(std::max(c(a, a), 0.0));
    out.guarded[a] = sd[a] < kZeroVarianceEpsilon;
  }
  for (std::size_t a = 0; a < n; ++a) {
    out.values(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double y = (out.guarded[a] || out.guarded[b]) ? 0.0 : c(a, b) / (sd[a] * sd[b]);
      out.values(a, b) = y;
      out.values(b, a) = y;
    }
  }
  return out;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p) {
    for (std::size_t q = 0; q < a.cols(); ++q) {
      if (p != q) s += a(p, q) * a(p, q);
    }
  }
  return std::sqrt(s);
}

std::size_t argmax_abs(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input) {
  if (input.rows() != input.cols() || input.rows() == 0) {
    throw InvalidInputError("jacobi_eigen: expected a non-empty square matrix");
  }
  const std::size_t n = input.rows();
  double scale = 0.0;
  for (double x : input.data()) {
    if (!std::isfinite(x)) throw InvalidInputError("jacobi_eigen: non-finite entry");
    scale = std::max(scale, std::abs(x));
  }
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (std::abs(input(p, q) - input(q, p)) > 1e-9 * (1.0 + scale)) {
        throw InvalidInputError("jacobi_eigen: matrix is not symmetric");
      }
    }
  }

  Matrix a = input;
  Matrix v = Matrix::identity(n);
  std::size_t sweep = 0;
  for (; off_diagonal_norm(a) >= kJacobiTolerance; ++sweep) {
    if (sweep == kJacobiMaxSweeps) {
      throw NumericFailureError("jacobi_eigen: off-diagonal norm did not reach tolerance", sweep);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(k, k);
    for (std::size_t i = 0; i < n; ++i) out.vectors[k][i] = v(i, k);
  }
  return out;
}

EigenPair principal_eigenpair(const Matrix& y) {
  const SymmetricEigen eig = jacobi_eigen(y);
  const double top = *std::max_element(eig.values.begin(), eig.values.end());

  std::size_t chosen = eig.values.size();
  std::size_t chosen_lead = 0;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] < top - kEigenTieTolerance) continue;
    const std::size_t lead = argmax_abs(eig.vectors[k]);
    if (chosen == eig.values.size() || lead < chosen_lead) {
      chosen = k;
      chosen_lead = lead;
    }
  }

  EigenPair pair{eig.values[chosen], eig.vectors[chosen]};
  const double nrm = norm2(pair.vector);
  const double sign = pair.vector[argmax_abs(pair.vector)] < 0.0 ? -1.0 : 1.0;
  for (double& x : pair.vector) x *= sign / nrm;
  return pair;
}

UpdateMatrix project_onto_client_direction(const UpdateMatrix& u, std::span<const double> y) {
  if (y.size() != u.cols()) {
    throw InvalidInputError("project_onto_client_direction: direction has length " +
                            std::to_string(y.size()) + ", expected " + std::to_string(u.cols()));
  }
  if (std::abs(norm2(y) - 1.0) > 1e-9) {
    throw InvalidInputError("project_onto_client_direction: direction is not unit norm");
  }
  // uy = U y, a d-vector.
  ParamVector uy(u.rows(), 0.0);
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const auto col = u.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) uy[j] += col[j] * y[i];
  }
  UpdateMatrix p(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.cols(); ++i) {
    auto col = p.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) col[j] = uy[j] * y[i];
  }
  return p;
}

}  // namespace dflsim
