#pragma once

// Reference computations written independently of the library, used to check
// its outputs. Loops over explicit formulas, QR instead of SVD, grid search
// instead of alternating projections.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Rows C_i A^k for i in `sensors` (zero-based), ordered sensor-major.
inline Mat stacked_rows(const Mat& A, const Mat& C, const std::vector<int>& sensors, int N) {
  Mat out(static_cast<Eigen::Index>(sensors.size()) * N, A.cols());
  Eigen::Index r = 0;
  for (int i : sensors) {
    Eigen::RowVectorXd row = C.row(i);
    for (int k = 0; k < N; ++k) {
      out.row(r++) = row;
      row = row * A;
    }
  }
  return out;
}

/// Same rows ordered by step first.
inline Mat stacked_rows_time_major(const Mat& A, const Mat& C, const std::vector<int>& sensors, int N) {
  Mat out(static_cast<Eigen::Index>(sensors.size()) * N, A.cols());
  Mat CAk = C;
  Eigen::Index r = 0;
  for (int k = 0; k < N; ++k) {
    for (int i : sensors) out.row(r++) = CAk.row(i);
    CAk = CAk * A;
  }
  return out;
}

/// Rank by column-pivoted QR with threshold tol * max(1, largest |R_jj|).
inline int qr_rank(const Mat& M, double tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(M);
  const auto& R = qr.matrixQR();
  const Eigen::Index k = std::min(M.rows(), M.cols());
  double top = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) top = std::max(top, std::abs(R(j, j)));
  const double thr = tol * std::max(1.0, top);
  int rank = 0;
  for (Eigen::Index j = 0; j < k; ++j) rank += std::abs(R(j, j)) > thr ? 1 : 0;
  return rank;
}

/// Kernel basis from a full-pivot LU decomposition.
inline Mat lu_kernel(const Mat& M, int n, double tol) {
  if (M.rows() == 0) return Mat::Identity(n, n);
  Eigen::FullPivLU<Mat> lu(M);
  lu.setThreshold(tol);
  return lu.kernel();
}

inline std::vector<int> complement(int p, const std::vector<int>& s) {
  std::vector<int> out;
  for (int i = 0; i < p; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) out.push_back(i);
  return out;
}

inline std::vector<int> bits(std::uint64_t mask, int p) {
  std::vector<int> out;
  for (int i = 0; i < p; ++i)
    if (mask >> i & 1u) out.push_back(i);
  return out;
}

/// Supports by cardinality, then lexicographically.
inline std::vector<std::vector<int>> supports_in_order(int p) {
  std::vector<std::vector<int>> out;
  for (int k = 0; k <= p; ++k) {
    std::vector<std::vector<int>> level;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << p); ++m) {
      auto b = bits(m, p);
      if (static_cast<int>(b.size()) == k) level.push_back(b);
    }
    std::sort(level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// Largest per-step (or stacked) excess of the residual y - O x over the
/// noise ball, for the clean rows only. `clean` counts sensors, rows are
/// sensor-major with N steps each.
inline double excess(const Mat& O, const Vec& y, int clean, int N, double delta_w, bool stacked, const Vec& x) {
  const Vec r = y - O * x;
  if (stacked) return r.norm() - std::sqrt(static_cast<double>(N)) * delta_w;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < N; ++k) {
    double s = 0.0;
    for (int i = 0; i < clean; ++i) s += r[i * N + k] * r[i * N + k];
    worst = std::max(worst, std::sqrt(s) - delta_w);
  }
  return worst;
}

/// Minimum of `excess` over x by coarse-to-fine grid search. The search box
/// is centred at the origin with half-width `radius`; each level keeps the
/// best few points and zooms around them.
inline double min_excess(const Mat& O, const Vec& y, int clean, int N, double delta_w, bool stacked, double radius,
                         Vec* argmin = nullptr) {
  const int n = static_cast<int>(O.cols());
  if (clean == 0) {
    if (argmin) *argmin = Vec::Zero(n);
    return -delta_w;
  }
  const int pts = n <= 2 ? 61 : 17;
  const int keep = 4;
  struct Cand {
    double val;
    Vec x;
  };
  std::vector<Cand> centres{{0.0, Vec::Zero(n)}};
  double half = radius;
  Cand best{std::numeric_limits<double>::infinity(), Vec::Zero(n)};
  for (int level = 0; level < 40 && half > 1e-13; ++level) {
    std::vector<Cand> found;
    const double step = 2.0 * half / (pts - 1);
    for (const auto& c : centres) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        Vec x = c.x;
        for (int j = 0; j < n; ++j) x[j] += -half + step * idx[static_cast<std::size_t>(j)];
        found.push_back({excess(O, y, clean, N, delta_w, stacked, x), x});
        int j = 0;
        while (j < n && ++idx[static_cast<std::size_t>(j)] == pts) idx[static_cast<std::size_t>(j++)] = 0;
        if (j == n) break;
      }
    }
    std::partial_sort(found.begin(), found.begin() + std::min<std::size_t>(keep, found.size()), found.end(),
                      [](const Cand& a, const Cand& b) { return a.val < b.val; });
    found.resize(std::min<std::size_t>(keep, found.size()));
    if (found.front().val < best.val) best = found.front();
    centres = found;
    half = 3.0 * step;
  }
  if (argmin) *argmin = best.x;
  return best.val;
}

/// Box half-width that contains a feasible point whenever one exists: the
/// row-space projection of any feasible x is feasible and bounded by
/// ||O^+|| (||y|| + sqrt(N) delta_w).
inline double search_radius(const Mat& O, const Vec& y, int N, double delta_w) {
  if (O.rows() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(O);
  const auto& s = svd.singularValues();
  double smallest = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-9 * std::max(1.0, s[0])) smallest = s[i];
  const double inv = smallest > 0.0 ? 1.0 / smallest : 0.0;
  return std::max(2.0, 1.1 * inv * (y.norm() + std::sqrt(static_cast<double>(N)) * delta_w) + 1e-3);
}

struct SupportCheck {
  std::vector<int> support;
  double excess = 0.0;
};

struct DecodeOracle {
  std::vector<int> support;            ///< first support with excess <= 0
  std::vector<SupportCheck> examined;  ///< every support up to and including it
};

/// Exhaustive l0 decode over supports in canonical order.
inline DecodeOracle exhaustive_decode(const Mat& A, const Mat& C, int N, double delta_w, bool stacked,
                                      const Vec& y_sensor_major) {
  const int p = static_cast<int>(C.rows());
  DecodeOracle out;
  for (const auto& sup : supports_in_order(p)) {
    const auto clean = complement(p, sup);
    const Mat O = stacked_rows(A, C, clean, N);
    Vec y(static_cast<Eigen::Index>(clean.size()) * N);
    for (std::size_t c = 0; c < clean.size(); ++c)
      y.segment(static_cast<Eigen::Index>(c) * N, N) = y_sensor_major.segment(clean[c] * N, N);
    const double e =
        min_excess(O, y, static_cast<int>(clean.size()), N, delta_w, stacked, search_radius(O, y, N, delta_w));
    out.examined.push_back({sup, e});
    if (e <= 0.0) {
      out.support = sup;
      return out;
    }
  }
  return out;
}

/// Random matrix with entries uniform in [-scale, scale].
inline Mat random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = u(rng);
  return M;
}

}  // namespace oracle
