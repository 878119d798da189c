#include "rselab/model.hpp"

#include <algorithm>
#include <cmath>

#include "rselab/error.hpp"

namespace rselab {

namespace {

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

bool all_finite(const Matrix& M) { return M.allFinite(); }

}  // namespace

SystemModel::SystemModel(Matrix A, Matrix B, Matrix C, double delta_w, int N, Tolerances tol)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), delta_w_(delta_w), N_(N), tol_(tol) {
  require(A_.rows() > 0 && A_.rows() == A_.cols(), ErrorCode::DimensionMismatch, "A must be square and nonempty");
  require(C_.cols() == A_.rows() && C_.rows() > 0, ErrorCode::DimensionMismatch, "C must be p x n with p >= 1");
  if (B_.size() == 0) B_ = Matrix::Zero(A_.rows(), 0);
  require(B_.rows() == A_.rows(), ErrorCode::DimensionMismatch, "B must have n rows");
  require(all_finite(A_) && all_finite(B_) && all_finite(C_), ErrorCode::InvalidArgument,
          "model matrices contain non-finite entries");
  require(std::isfinite(delta_w_) && delta_w_ >= 0.0, ErrorCode::InvalidArgument, "delta_w must be >= 0");
  require(N_ >= 1, ErrorCode::InvalidArgument, "window length N must be >= 1");
  require(C_.rows() <= 64, ErrorCode::InvalidArgument, "at most 64 sensors are supported");
  require(tol_.rank_tol > 0 && tol_.eig_tol > 0 && tol_.cluster_tol > 0 && tol_.stability_margin >= 0,
          ErrorCode::InvalidArgument, "tolerances must be positive");
  if (!is_observable(A_, C_, tol_.rank_tol)) {
    throw Error(ErrorCode::NotObservable, "(A, C) is not observable");
  }
}

SystemModel SystemModel::with_window(int N) const { return SystemModel(A_, B_, C_, delta_w_, N, tol_); }

SystemModel SystemModel::with_delta_w(double delta_w) const {
  return SystemModel(A_, B_, C_, delta_w, N_, tol_);
}

Matrix SystemModel::power(int k) const {
  Matrix P = Matrix::Identity(n(), n());
  for (int i = 0; i < k; ++i) P = P * A_;
  return P;
}

StackedWindow::StackedWindow(int p_, int N_, long start)
    : stacked(Vector::Zero(p_ * N_)), p(p_), N(N_), window_start(start) {}

StackedWindow::StackedWindow(Vector v, int p_, int N_, long start)
    : stacked(std::move(v)), p(p_), N(N_), window_start(start) {
  if (stacked.size() != static_cast<Eigen::Index>(p) * N) {
    throw Error(ErrorCode::DimensionMismatch, "stacked window length must be p*N");
  }
}

StackedWindow StackedWindow::from_time_major(const Matrix& steps_by_sensors, long start) {
  const int N = static_cast<int>(steps_by_sensors.rows());
  const int p = static_cast<int>(steps_by_sensors.cols());
  StackedWindow w(p, N, start);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < N; ++k) w.at(i, k) = steps_by_sensors(k, i);
  return w;
}

Vector StackedWindow::per_step(int k) const {
  Vector v(p);
  for (int i = 0; i < p; ++i) v[i] = at(i, k);
  return v;
}

Matrix StackedWindow::time_major() const {
  Matrix M(N, p);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < N; ++k) M(k, i) = at(i, k);
  return M;
}

Matrix build_O(const SystemModel& model, const SensorSet& subset) {
  const int N = model.N();
  Matrix O(static_cast<Eigen::Index>(subset.size()) * N, model.n());
  std::vector<Matrix> CAk;
  CAk.reserve(static_cast<std::size_t>(N));
  Matrix CA = model.C();
  for (int k = 0; k < N; ++k) {
    CAk.push_back(CA);
    CA = CA * model.A();
  }
  int r = 0;
  for (int i : subset) {
    for (int k = 0; k < N; ++k) O.row(r++) = CAk[static_cast<std::size_t>(k)].row(i);
  }
  return O;
}

std::vector<int> time_major_permutation(int sensors, int N) {
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(sensors) * static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < sensors; ++i) perm.push_back(i * N + k);
  return perm;
}

Matrix build_O_time_major(const SystemModel& model, const SensorSet& subset) {
  const Matrix O = build_O(model, subset);
  const auto perm = time_major_permutation(subset.size(), model.N());
  Matrix T(O.rows(), O.cols());
  for (std::size_t r = 0; r < perm.size(); ++r) T.row(static_cast<Eigen::Index>(r)) = O.row(perm[r]);
  return T;
}

Matrix build_F(const SystemModel& model, const SensorSet& compromised) {
  const Matrix Oc = build_O(model, compromised.complement());
  const int extra = model.N() - 1;
  Matrix F(Oc.rows() + static_cast<Eigen::Index>(compromised.size()) * extra, model.n());
  F.topRows(Oc.rows()) = Oc;
  int r = static_cast<int>(Oc.rows());
  for (int i : compromised) {
    Matrix CA = model.C().row(i);
    for (int k = 0; k < extra; ++k) {
      F.row(r++) = CA;
      CA = CA * model.A();
    }
  }
  return F;
}

Matrix build_O_auth(const SystemModel& model, const SensorSet& compromised,
                    const std::vector<SensorSet>& auth) {
  if (static_cast<int>(auth.size()) != model.N()) {
    throw Error(ErrorCode::DimensionMismatch, "need one authenticated set per window step");
  }
  const SensorSet clean = compromised.complement();
  std::vector<Matrix> blocks;
  Eigen::Index rows = 0;
  Matrix CA = model.C();
  for (int k = 0; k < model.N(); ++k) {
    const SensorSet used = auth[static_cast<std::size_t>(k)].unite(clean);
    blocks.push_back(select_rows(CA, used));
    rows += blocks.back().rows();
    CA = CA * model.A();
  }
  Matrix O(rows, model.n());
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    O.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return O;
}

Matrix select_rows(const Matrix& C, const SensorSet& subset) {
  Matrix out(subset.size(), C.cols());
  int r = 0;
  for (int i : subset) out.row(r++) = C.row(i);
  return out;
}

Matrix observability_matrix(const Matrix& A, const Matrix& C_rows) {
  const auto n = A.rows();
  Matrix O(C_rows.rows() * n, n);
  Matrix CA = C_rows;
  for (Eigen::Index k = 0; k < n; ++k) {
    O.middleRows(k * C_rows.rows(), C_rows.rows()) = CA;
    CA = CA * A;
  }
  return O;
}

bool is_observable(const Matrix& A, const Matrix& C_rows, double rank_tol) {
  if (C_rows.rows() == 0) return false;
  return rank_with_tol(observability_matrix(A, C_rows), rank_tol) == A.rows();
}

namespace {

RankInfo rank_from_singular_values(const Vector& s, double tol) {
  RankInfo info;
  info.singular_values = s;
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  info.threshold = tol * std::max(1.0, smax);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > info.threshold) ++info.rank;
    if (s[i] > info.threshold / 100.0 && s[i] <= info.threshold * 100.0) info.borderline = true;
  }
  if (s.size() > 0) {
    const double above = info.rank > 0 ? s[info.rank - 1] : 0.0;
    const double below = info.rank < s.size() ? s[info.rank] : 0.0;
    info.margin = info.rank > 0 ? above - below : info.threshold - below;
  }
  return info;
}

}  // namespace

RankInfo rank_info(const Matrix& M, double rank_tol) {
  if (M.size() == 0) return rank_from_singular_values(Vector(), rank_tol);
  Eigen::JacobiSVD<Matrix> svd(M);
  return rank_from_singular_values(svd.singularValues(), rank_tol);
}

RankInfo rank_info_complex(const CMatrix& M, double tol) {
  if (M.size() == 0) return rank_from_singular_values(Vector(), tol);
  Eigen::JacobiSVD<CMatrix> svd(M);
  return rank_from_singular_values(svd.singularValues(), tol);
}

int rank_with_tol(const Matrix& M, double rank_tol) { return rank_info(M, rank_tol).rank; }

Matrix null_space(const Matrix& M, double rank_tol) {
  const auto n = M.cols();
  if (M.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), rank_tol).rank;
  return svd.matrixV().rightCols(n - r);
}

CMatrix null_space_complex(const CMatrix& M, double tol) {
  const auto n = M.cols();
  if (M.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), tol).rank;
  return svd.matrixV().rightCols(n - r);
}

Matrix pinv(const Matrix& M, double rank_tol) {
  if (M.size() == 0) return Matrix::Zero(M.cols(), M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double thr = rank_tol * std::max(1.0, s.size() ? s.maxCoeff() : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > thr) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double pinv_norm(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() < M.cols() || s[s.size() - 1] <= 0.0) {
    throw Error(ErrorCode::NotObservable, "matrix is not full column rank");
  }
  return 1.0 / s[s.size() - 1];
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()[0];
}

int max_sparse_observability(const SystemModel& model) {
  const int p = model.p();
  int best = 0;
  for (int k = 1; k <= p; ++k) {
    bool ok = true;
    for (const auto& R : subsets_of_size(p, p - k)) {
      if (!is_observable(model.A(), select_rows(model.C(), R), model.tol().rank_tol)) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
    best = k;
  }
  return best;
}

double conservative_delta_w(const SystemModel& model, double delta_vP, double delta_vM) {
  double sum = 0.0;
  Matrix Aj = Matrix::Identity(model.n(), model.n());
  for (int j = 0; j + 1 < model.N(); ++j) {
    sum += spectral_norm(Aj);
    Aj = Aj * model.A();
  }
  return delta_vM + spectral_norm(model.C()) * sum * delta_vP;
}

}  // namespace rselab
