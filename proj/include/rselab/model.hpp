#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rselab/sensor_set.hpp"

namespace rselab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Numerical thresholds shared by rank and eigenstructure decisions.
struct Tolerances {
  double rank_tol = 1e-9;          ///< relative, see rank_with_tol
  double stability_margin = 1e-9;  ///< |lambda| >= 1 - margin counts as unstable
  double cluster_tol = 1e-5;       ///< eigenvalues closer than this (relative) are merged
  double eig_tol = 1e-7;           ///< rank threshold for tests involving computed eigenvalues
};

/// Plant x(t+1) = A x(t) + B u(t) + v_P(t), y(t) = C x(t) + v_M(t) with a
/// per-step noise bound delta_w and estimator window length N.
///
/// Construction validates dimensions and rejects (A, C) pairs that are not
/// observable at `tol.rank_tol`.
class SystemModel {
 public:
  SystemModel(Matrix A, Matrix B, Matrix C, double delta_w, int N, Tolerances tol = {});

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& C() const noexcept { return C_; }
  double delta_w() const noexcept { return delta_w_; }
  int N() const noexcept { return N_; }
  int n() const noexcept { return static_cast<int>(A_.rows()); }
  int m() const noexcept { return static_cast<int>(B_.cols()); }
  int p() const noexcept { return static_cast<int>(C_.rows()); }
  const Tolerances& tol() const noexcept { return tol_; }

  SensorSet all_sensors() const { return SensorSet::all(p()); }
  SystemModel with_window(int N) const;
  SystemModel with_delta_w(double delta_w) const;

  /// A^k, k >= 0.
  Matrix power(int k) const;

 private:
  Matrix A_, B_, C_;
  double delta_w_;
  int N_;
  Tolerances tol_;
};

/// Length-pN stacked vector, sensor-major: entry (i, k) sits at i*N + k and
/// holds sensor i at step window_start + k.
struct StackedWindow {
  Vector stacked;
  int p = 0;
  int N = 0;
  long window_start = 0;

  StackedWindow() = default;
  StackedWindow(int p, int N, long window_start = 0);
  StackedWindow(Vector stacked, int p, int N, long window_start = 0);

  /// Rows are steps, columns are sensors.
  static StackedWindow from_time_major(const Matrix& steps_by_sensors, long window_start = 0);

  double& at(int sensor, int k) { return stacked[sensor * N + k]; }
  double at(int sensor, int k) const { return stacked[sensor * N + k]; }
  Vector per_step(int k) const;
  Vector block(int sensor) const { return stacked.segment(sensor * N, N); }
  Matrix time_major() const;
};

struct DecodeResult {
  Vector x_hat;
  Vector a_hat;  ///< sensor-major, zero outside `support`
  Vector w_hat;  ///< sensor-major, zero on `support` rows
  SensorSet support;
  bool feasible = false;

  Vector error_against(const Vector& x_true) const { return x_hat - x_true; }
};

/// Stacked observation matrix of the sensors in `subset`, sensor-major:
/// rows i*N + k hold C_i A^k.
Matrix build_O(const SystemModel& model, const SensorSet& subset);
/// Same rows ordered by step first, then sensor.
Matrix build_O_time_major(const SystemModel& model, const SensorSet& subset);
/// perm[r] is the sensor-major row index of time-major row r.
std::vector<int> time_major_permutation(int sensors, int N);

/// O of the clean sensors stacked over the compromised rows C_K A^k, k <= N-2.
Matrix build_F(const SystemModel& model, const SensorSet& compromised);

/// Rows for window step k use sensors auth[k] united with the clean set,
/// multiplied by C A^k. `auth` must have N entries.
Matrix build_O_auth(const SystemModel& model, const SensorSet& compromised,
                    const std::vector<SensorSet>& auth);

/// Observability matrix [C; CA; ...; CA^{n-1}] of (A, C restricted to `subset`).
Matrix observability_matrix(const Matrix& A, const Matrix& C_rows);
Matrix select_rows(const Matrix& C, const SensorSet& subset);
bool is_observable(const Matrix& A, const Matrix& C_rows, double rank_tol);

struct RankInfo {
  int rank = 0;
  Vector singular_values;
  double threshold = 0.0;
  /// sigma_r - sigma_{r+1}; zero-row or zero-column input gives 0.
  double margin = 0.0;
  /// A singular value sits within a factor 100 of the threshold.
  bool borderline = false;
};

RankInfo rank_info(const Matrix& M, double rank_tol);
int rank_with_tol(const Matrix& M, double rank_tol);
RankInfo rank_info_complex(const CMatrix& M, double tol);

/// Orthonormal basis of the null space (columns), via SVD.
Matrix null_space(const Matrix& M, double rank_tol);
CMatrix null_space_complex(const CMatrix& M, double tol);
Matrix pinv(const Matrix& M, double rank_tol = 1e-12);
/// 1 / sigma_min for a full column rank matrix.
double pinv_norm(const Matrix& M);
double spectral_norm(const Matrix& M);

struct EigenCluster {
  Complex lambda;
  int algebraic = 0;
  int geometric = 0;
};

/// Eigenvalues with |lambda| >= 1 - stability_margin, clustered, ordered by
/// (|lambda| desc, arg asc).
std::vector<EigenCluster> unstable_eigenstructure(const Matrix& A, const Tolerances& tol = {});
std::vector<EigenCluster> eigen_clusters(const Matrix& A, const Tolerances& tol = {});

/// Unstable eigenvector lying in N(O_{K^c}), with its Jordan chain inside the
/// A-invariant unobservable subspace of (A, C_{K^c}).
struct UnstableWitness {
  Complex lambda;
  Vector v;       ///< unit eigenvector (real part for complex lambda)
  Vector v_imag;  ///< empty for real lambda
  /// chain[0] is an eigenvector, (A - lambda I) chain[j+1] = chain[j],
  /// chain.back() has unit norm. Real parts for complex lambda.
  std::vector<Vector> chain;
  std::vector<Vector> chain_imag;
  double eig_residual = 0.0;
  double null_residual = 0.0;
  double chain_residual = 0.0;
  double margin = 0.0;
  bool borderline = false;

  bool is_complex() const { return v_imag.size() > 0; }
  const Vector& head() const { return chain.back(); }
};

std::optional<UnstableWitness> unstable_null_intersection(const SystemModel& model,
                                                          const SensorSet& compromised);

/// Basis (columns) of the largest A-invariant subspace inside N(O_{K^c}).
Matrix unobservable_subspace(const SystemModel& model, const SensorSet& compromised);

/// Largest k such that every R with |R| = p - k keeps (A, C_R) observable.
int max_sparse_observability(const SystemModel& model);

/// delta_w >= delta_vM + ||C|| sum_{j<N-1} ||A^j|| delta_vP.
double conservative_delta_w(const SystemModel& model, double delta_vP, double delta_vM);

}  // namespace rselab
