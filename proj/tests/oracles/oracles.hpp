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


// Independent reference implementations used by the unit and acceptance
// tests. They deliberately share no code with the library: the DMPA oracle
// is a straight transcription on Eigen dense matrices with Eigen's own
// symmetric eigensolver, and the scalar oracles use bisection.

#ifndef DFLSIM_TESTS_ORACLES_HPP_
#define DFLSIM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Columns = std::vector<std::vector<double>>;

inline Eigen::MatrixXd to_matrix(const Columns& cols) {
  Eigen::MatrixXd u(cols.front().size(), cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = 0; j < cols[i].size(); ++j) u(j, i) = cols[i][j];
  }
  return u;
}

// Coordinate j is selected when fewer than k coordinates beat it, where a
// coordinate beats j if it is larger, or equal with a lower index.
inline std::vector<bool> top_k(const Eigen::VectorXd& v, std::size_t k) {
  const auto d = static_cast<std::size_t>(v.size());
  std::vector<bool> mask(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    std::size_t beaten_by = 0;
    for (std::size_t o = 0; o < d; ++o) {
      if (v[o] > v[j] || (v[o] == v[j] && o < j)) ++beaten_by;
    }
    mask[j] = beaten_by < k;
  }
  return mask;
}

// Principal unit eigenvector of a symmetric matrix with the tie and sign
// conventions: among eigenvalues within 1e-10 of the maximum, take the vector
// whose largest |component| sits at the smallest index; then make that
// component non-negative.
inline Eigen::VectorXd principal_vector(const Eigen::MatrixXd& y, double* value = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
  const auto& vals = es.eigenvalues();
  const Eigen::Index n = vals.size();
  const double top = vals[n - 1];
  Eigen::Index best = -1, best_lead = n;
  for (Eigen::Index k = n - 1; k >= 0 && top - vals[k] <= 1e-10; --k) {
    Eigen::Index lead;
    es.eigenvectors().col(k).cwiseAbs().maxCoeff(&lead);
    if (lead < best_lead) {
      best_lead = lead;
      best = k;
    }
  }
  Eigen::VectorXd v = es.eigenvectors().col(best).normalized();
  Eigen::Index lead;
  v.cwiseAbs().maxCoeff(&lead);
  if (v[lead] < 0) v = -v;
  if (value) *value = top;
  return v;
}

// Angle-bias attack, one step per line of the published pseudocode, with
// client-space covariance, P = (U y) y^T and the column mean for mu_new.
inline std::vector<double> dmpa(const Columns& cols, unsigned percent) {
  const Eigen::MatrixXd u = to_matrix(cols);
  const Eigen::Index d = u.rows(), n = u.cols();
  const Eigen::VectorXd mu = u.rowwise().mean();                        // 1
  const Eigen::MatrixXd v = u.colwise() - mu;                           // 2
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, n);
  if (n >= 2) {
    const Eigen::MatrixXd c = v.transpose() * v / double(n - 1);        // 3
    const Eigen::VectorXd t = c.diagonal().cwiseSqrt();                 // 4
    Eigen::MatrixXd y(n, n);                                            // 5
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        if (t[a] < 1e-12 || t[b] < 1e-12) y(a, b) = (a == b) ? 1.0 : 0.0;
        else y(a, b) = a == b ? 1.0 : c(a, b) / (t[a] * t[b]);
      }
    }
    const Eigen::VectorXd ymax = principal_vector(y);                   // 6-7
    p = (u * ymax) * ymax.transpose();                                  // 8
  }
  const Eigen::MatrixXd u_new = -u + p;                                 // 9
  Eigen::VectorXd mu_new = u_new.rowwise().mean();                      // 10
  const auto k = static_cast<std::size_t>(d) * percent / 100;
  for (Eigen::Index i = 0; i < n; ++i) {                                // 11
    const auto m = top_k(u.col(i).array().square().matrix(), k);        // 12
    for (Eigen::Index j = 0; j < d; ++j) {                              // 13
      mu_new[j] = m[j] ? u_new(j, i) : mu_new[j];
    }
  }
  return {mu_new.data(), mu_new.data() + d};                            // 15
}

// Largest root of a monic-sign characteristic polynomial det(A - x I) for
// n = 2 or 3, by a downward scan for the first sign change then bisection.
inline double largest_eigenvalue_charpoly(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const auto det = [&](double x) {
    if (n == 2) return (a[0][0] - x) * (a[1][1] - x) - a[0][1] * a[1][0];
    const double m00 = a[0][0] - x, m11 = a[1][1] - x, m22 = a[2][2] - x;
    return m00 * (m11 * m22 - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * m22 - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - m11 * a[2][0]);
  };
  double radius = 0.0;  // Gershgorin
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += std::abs(a[r][c]);
    radius = std::max(radius, s);
  }
  const double hi0 = radius + 1.0;
  const double sign_top = det(hi0);
  constexpr int kScan = 200000;
  const double step = 2.0 * hi0 / kScan;
  double hi = hi0;
  for (int s = 1; s <= kScan; ++s) {
    const double x = hi0 - s * step;
    const double fx = det(x);
    if (fx == 0.0) return x;
    if ((fx > 0) != (sign_top > 0)) {
      double lo = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((det(mid) > 0) == (sign_top > 0)) hi = mid;
        else lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    hi = x;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Inverse standard normal CDF by bisection on erfc.
inline double inverse_normal_cdf(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Perturbation {
  std::vector<double> mean, direction;
  double bound = 0.0;
};

inline Perturbation perturbation_setup(const Columns& cols, bool sum_envelope) {
  const std::size_t n = cols.size(), d = cols.front().size();
  Perturbation p;
  p.mean.assign(d, 0.0);
  for (const auto& c : cols) {
    for (std::size_t j = 0; j < d; ++j) p.mean[j] += c[j] / double(n);
  }
  double nrm = 0.0;
  for (double x : p.mean) nrm += x * x;
  nrm = std::sqrt(nrm);
  p.direction.assign(d, 0.0);
  if (nrm >= 1e-12) {
    for (std::size_t j = 0; j < d; ++j) p.direction[j] = -p.mean[j] / nrm;
  } else {
    std::size_t lead = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      double var = 0.0;
      for (const auto& c : cols) var += (c[j] - p.mean[j]) * (c[j] - p.mean[j]);
      if (var > best) {
        best = var;
        lead = j;
      }
    }
    p.direction[lead] = 1.0;
  }
  const auto sq = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
  };
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      row += sq(cols[a], cols[b]);
      if (!sum_envelope) p.bound = std::max(p.bound, std::sqrt(sq(cols[a], cols[b])));
    }
    if (sum_envelope) p.bound = std::max(p.bound, row);
  }
  return p;
}

// max_i |mean + g p - u_i| <= B (or the summed squared version) at g.
inline bool perturbation_feasible(const Columns& cols, const Perturbation& p, double g, bool sum_envelope) {
  double total = 0.0;
  for (const auto& c : cols) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double diff = p.mean[j] + g * p.direction[j] - c[j];
      s += diff * diff;
    }
    if (!sum_envelope && std::sqrt(s) > p.bound) return false;
    total += s;
  }
  return !sum_envelope || total <= p.bound;
}

// Largest feasible gamma in [0, gamma_max] by a dense scan with `steps`
// points, then a second scan of the same density inside the bracketing cell.
inline double dense_scan_gamma(const Columns& cols, bool sum_envelope, double gamma_max, int steps) {
  const Perturbation p = perturbation_setup(cols, sum_envelope);
  double lo = 0.0, width = gamma_max;
  for (int stage = 0; stage < 2; ++stage) {
    const double h = width / steps;
    double best = lo;
    for (int s = 1; s <= steps; ++s) {
      const double g = lo + s * h;
      if (perturbation_feasible(cols, p, g, sum_envelope)) best = g;
      else break;
    }
    if (best >= lo + width) return best;
    lo = best;
    width = h;
  }
  return lo;
}

// Closed forms. Each distance constraint is a quadratic in gamma with the
// unit direction p: gamma^2 + 2 gamma p.(mean - u_i) + |mean - u_i|^2 - B^2.
// For the summed envelope the linear terms cancel because the mean is the
// centroid: n gamma^2 + S <= B.
inline double closed_form_gamma(const Columns& cols, bool sum_envelope) {
  const Perturbation p = perturbation_setup(cols, sum_envelope);
  const std::size_t d = p.mean.size();
  if (sum_envelope) {
    double s = 0.0;
    for (const auto& c : cols) {
      for (std::size_t j = 0; j < d; ++j) s += (p.mean[j] - c[j]) * (p.mean[j] - c[j]);
    }
    return std::sqrt(std::max(0.0, (p.bound - s) / double(cols.size())));
  }
  double g = std::numeric_limits<double>::infinity();
  for (const auto& c : cols) {
    double b = 0.0, cc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      b += p.direction[j] * (p.mean[j] - c[j]);
      cc += (p.mean[j] - c[j]) * (p.mean[j] - c[j]);
    }
    cc -= p.bound * p.bound;
    g = std::min(g, -b + std::sqrt(std::max(0.0, b * b - cc)));
  }
  return g;
}

}  // namespace oracle

#endif  // DFLSIM_TESTS_ORACLES_HPP_
