#include <algorithm>
#include <cmath>
#include <numeric>

#include "rselab/model.hpp"

namespace rselab {

namespace {

bool is_real(Complex z, double tol) { return std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z)); }

bool cluster_order(const EigenCluster& a, const EigenCluster& b) {
  const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
  if (std::abs(ma - mb) > 1e-12 * std::max(1.0, ma)) return ma > mb;
  return std::arg(a.lambda) < std::arg(b.lambda);
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
  return i;
}

CMatrix to_complex(const Matrix& M) { return M.cast<Complex>(); }

CMatrix matrix_power(const CMatrix& M, int k) {
  CMatrix P = CMatrix::Identity(M.rows(), M.cols());
  for (int i = 0; i < k; ++i) P = P * M;
  return P;
}

/// Largest-modulus entry made real and positive.
CVector normalize_phase(CVector v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const Complex ph = v[idx] / std::abs(v[idx]);
  v *= std::conj(ph);
  return v / v.norm();
}

}  // namespace

std::vector<EigenCluster> eigen_clusters(const Matrix& A, const Tolerances& tol) {
  Eigen::EigenSolver<Matrix> es(A, false);
  const CVector ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double scale = std::max(1.0, std::max(std::abs(ev[i]), std::abs(ev[j])));
      if (std::abs(ev[i] - ev[j]) <= tol.cluster_tol * scale) {
        parent[static_cast<std::size_t>(find_root(parent, i))] = find_root(parent, j);
      }
    }
  }
  std::vector<EigenCluster> out;
  std::vector<int> seen;
  for (int i = 0; i < n; ++i) {
    const int r = find_root(parent, i);
    if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
    seen.push_back(r);
    Complex sum = 0.0;
    int count = 0;
    for (int j = 0; j < n; ++j) {
      if (find_root(parent, j) == r) {
        sum += ev[j];
        ++count;
      }
    }
    EigenCluster c;
    c.lambda = sum / static_cast<double>(count);
    if (is_real(c.lambda, tol.cluster_tol)) c.lambda = Complex(c.lambda.real(), 0.0);
    c.algebraic = count;
    const CMatrix shifted = to_complex(A) - c.lambda * CMatrix::Identity(A.rows(), A.cols());
    c.geometric = static_cast<int>(A.rows()) - rank_info_complex(shifted, tol.eig_tol).rank;
    c.geometric = std::clamp(c.geometric, 1, c.algebraic);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), cluster_order);
  return out;
}

std::vector<EigenCluster> unstable_eigenstructure(const Matrix& A, const Tolerances& tol) {
  std::vector<EigenCluster> out;
  for (const auto& c : eigen_clusters(A, tol)) {
    if (std::abs(c.lambda) >= 1.0 - tol.stability_margin) out.push_back(c);
  }
  return out;
}

Matrix unobservable_subspace(const SystemModel& model, const SensorSet& compromised) {
  const SensorSet clean = compromised.complement();
  if (clean.empty()) return Matrix::Identity(model.n(), model.n());
  return null_space(observability_matrix(model.A(), select_rows(model.C(), clean)), model.tol().rank_tol);
}

namespace {

/// Jordan chain of lambda for the restriction A_U = Q^T A Q, lifted back by Q.
std::vector<CVector> jordan_chain(const Matrix& A, const Matrix& Q, Complex lambda, const Tolerances& tol) {
  const auto r = Q.cols();
  const CMatrix AU = to_complex(Q.transpose() * A * Q);
  const CMatrix M = AU - lambda * CMatrix::Identity(r, r);
  int prev_nullity = 0;
  int kstar = 0;
  for (int k = 1; k <= r; ++k) {
    const int nullity = static_cast<int>(r) - rank_info_complex(matrix_power(M, k), tol.eig_tol).rank;
    if (nullity <= prev_nullity) break;
    prev_nullity = nullity;
    kstar = k;
  }
  if (kstar == 0) return {};
  const CMatrix Z = null_space_complex(matrix_power(M, kstar), tol.eig_tol);
  CVector head;
  if (kstar == 1) {
    head = Z.col(0);
  } else {
    const CMatrix Z1 = null_space_complex(matrix_power(M, kstar - 1), tol.eig_tol);
    double best = -1.0;
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      const CVector resid = Z.col(j) - Z1 * (Z1.adjoint() * Z.col(j));
      if (resid.norm() > best) {
        best = resid.norm();
        head = resid;
      }
    }
  }
  head = normalize_phase(head);
  std::vector<CVector> chain(static_cast<std::size_t>(kstar));
  CVector v = head;
  for (int j = kstar - 1; j >= 0; --j) {
    chain[static_cast<std::size_t>(j)] = to_complex(Q) * v;
    v = M * v;
  }
  return chain;
}

}  // namespace

std::optional<UnstableWitness> unstable_null_intersection(const SystemModel& model,
                                                          const SensorSet& compromised) {
  const Tolerances& tol = model.tol();
  const int n = model.n();
  const Matrix Oc = build_O(model, compromised.complement());
  const Matrix Q = unobservable_subspace(model, compromised);
  for (const auto& cl : unstable_eigenstructure(model.A(), tol)) {
    CMatrix test(n + Oc.rows(), n);
    test.topRows(n) = to_complex(model.A()) - cl.lambda * CMatrix::Identity(n, n);
    test.bottomRows(Oc.rows()) = to_complex(Oc);
    const RankInfo ri = rank_info_complex(test, tol.eig_tol);
    if (ri.rank >= n || Q.cols() == 0) continue;

    const auto chain = jordan_chain(model.A(), Q, cl.lambda, tol);
    if (chain.empty()) continue;

    UnstableWitness w;
    w.lambda = cl.lambda;
    w.margin = ri.margin;
    w.borderline = ri.borderline;
    const bool real = cl.lambda.imag() == 0.0;
    const CVector ev = normalize_phase(chain.front());
    w.v = ev.real();
    if (!real) w.v_imag = ev.imag();
    for (const auto& c : chain) {
      w.chain.push_back(c.real());
      if (!real) w.chain_imag.push_back(c.imag());
    }
    if (real) w.v.normalize();

    const CMatrix shifted = to_complex(model.A()) - cl.lambda * CMatrix::Identity(n, n);
    w.eig_residual = (shifted * ev).norm();
    w.null_residual = (to_complex(Oc) * ev).norm();
    double chain_res = 0.0;
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
      chain_res = std::max(chain_res, (shifted * chain[j + 1] - chain[j]).norm());
    }
    w.chain_residual = chain_res;
    return w;
  }
  return std::nullopt;
}

}  // namespace rselab
