#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tetra {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when a numeric contract cannot be certified (as opposed to
/// std::invalid_argument, which signals malformed input such as shape
/// mismatches or non-finite entries).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* who) {
  if (!is_finite(m))
    throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

inline void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_same_shape(const ComplexMatrix& x, const ComplexMatrix& y, const char* who) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument(std::string(who) + ": shape mismatch " +
                                std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " vs " +
                                std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
}

/// Spectral norm (largest singular value). A matrix with zero rows or
/// columns has norm 0.
inline double operator_norm(const ComplexMatrix& m) {
  require_finite(m, "operator_norm");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

/// Largest eigenvalue of a Hermitian matrix; 0 for the empty matrix.
inline double largest_hermitian_eigenvalue(const ComplexMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("largest_hermitian_eigenvalue: eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

namespace detail {

/// Largest eigenvalue of Re(e^{i theta} M).
inline double rotated_real_part_max(const ComplexMatrix& m, double theta) {
  const Complex phase = std::polar(1.0, theta);
  ComplexMatrix h = 0.5 * (phase * m + std::conj(phase) * m.adjoint());
  return largest_hermitian_eigenvalue(h);
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 80) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace detail

/// Numerical radius w(M) = max_theta lambda_max(Re(e^{i theta} M)),
/// evaluated on a uniform angular grid and sharpened by golden-section
/// refinement around the best grid angle.
inline double numerical_radius(const ComplexMatrix& m, int angular_grid = 720) {
  require_finite(m, "numerical_radius");
  require_square(m, "numerical_radius");
  if (angular_grid < 8)
    throw std::invalid_argument("numerical_radius: angular_grid must be at least 8");
  if (m.rows() == 0) return 0.0;

  const double two_pi = 2.0 * M_PI;
  const double step = two_pi / angular_grid;
  double best = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int k = 0; k < angular_grid; ++k) {
    const double theta = k * step;
    const double v = detail::rotated_real_part_max(m, theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const double refined = detail::golden_max(
      [&](double th) { return detail::rotated_real_part_max(m, th); },
      best_theta - step, best_theta + step);
  return std::max(best, refined);
}

struct SpectralFactorization {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, columns match eigenvalues
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before factoring so that tiny departures from exact Hermitian
/// symmetry do not poison the result.
inline SpectralFactorization hermitian_factorization(const ComplexMatrix& m) {
  require_finite(m, "hermitian_factorization");
  require_square(m, "hermitian_factorization");
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (m.rows() > 0 && es.info() != Eigen::Success)
    throw Error("hermitian_factorization: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Range data of a defect operator D = (I - P*P)^{1/2}.
///
/// `defect` is the n x n positive square root with eigenvalues below the
/// rank cutoff flushed to zero, `embed` is an n x r isometry whose columns
/// span ran(D), and `scale` holds the corresponding r positive singular
/// values of D, so that embed^* . defect . embed = diag(scale) exactly.
struct DefectSpace {
  int dim = 0;
  ComplexMatrix embed;
  ComplexMatrix defect;
  RealVector scale;
};

/// Defect operator of a contraction P: forms I - P*P, takes the positive
/// square root by Hermitian eigendecomposition, and determines the defect
/// rank with cutoff rank_tol * max(1, lambda_max). Eigenvalues in
/// [-cutoff, cutoff] are treated as zero; an eigenvalue below -cutoff or a
/// norm above 1 + rank_tol means P is not a contraction.
inline DefectSpace defect_operator(const ComplexMatrix& p, double rank_tol = 1e-10) {
  require_finite(p, "defect_operator");
  require_square(p, "defect_operator");
  if (rank_tol <= 0.0) throw std::invalid_argument("defect_operator: rank_tol must be positive");
  const Eigen::Index n = p.rows();

  ComplexMatrix gram = ComplexMatrix::Identity(n, n) - p.adjoint() * p;
  SpectralFactorization sf = hermitian_factorization(gram);
  const double lam_max = (n > 0) ? sf.eigenvalues.maxCoeff() : 0.0;
  const double cutoff = rank_tol * std::max(1.0, lam_max);
  if (n > 0 && sf.eigenvalues.minCoeff() < -cutoff)
    throw Error("defect_operator: operator is not a contraction (|P| > 1 + rank_tol)");

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sf.eigenvalues(i) > cutoff) kept.push_back(i);

  DefectSpace space;
  space.dim = static_cast<int>(kept.size());
  space.embed.resize(n, space.dim);
  space.scale.resize(space.dim);
  for (int j = 0; j < space.dim; ++j) {
    space.embed.col(j) = sf.eigenvectors.col(kept[j]);
    space.scale(j) = std::sqrt(sf.eigenvalues(kept[j]));
  }
  space.defect = space.embed * space.scale.asDiagonal().toDenseMatrix().cast<Complex>() *
                 space.embed.adjoint();
  return space;
}

/// Lift an operator given in defect coordinates back to the ambient space.
inline ComplexMatrix lift(const DefectSpace& space, const ComplexMatrix& coord) {
  if (coord.rows() != space.dim || coord.cols() != space.dim)
    throw std::invalid_argument("lift: coordinate block does not match defect dimension");
  return space.embed * coord * space.embed.adjoint();
}

/// Compress an ambient operator to defect coordinates.
inline ComplexMatrix compress(const DefectSpace& space, const ComplexMatrix& op) {
  require_square(op, "compress");
  if (op.rows() != space.embed.rows())
    throw std::invalid_argument("compress: operator does not act on the ambient space");
  return space.embed.adjoint() * op * space.embed;
}

/// Norm of the commutator XY - YX.
inline double commutator_residual(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_square(x, "commutator_residual");
  require_same_shape(x, y, "commutator_residual");
  return operator_norm(x * y - y * x);
}

/// Residuals of the defect intertwining relations of a contraction:
/// P D_P = D_{P*} P and D_P P* = P* D_{P*}.
inline std::pair<double, double> intertwining_residuals(const ComplexMatrix& p,
                                                        double rank_tol = 1e-10) {
  DefectSpace dp = defect_operator(p, rank_tol);
  DefectSpace dps = defect_operator(ComplexMatrix(p.adjoint()), rank_tol);
  const double r1 = operator_norm(p * dp.defect - dps.defect * p);
  const double r2 = operator_norm(dp.defect * p.adjoint() - p.adjoint() * dps.defect);
  return {r1, r2};
}

struct SimultaneousDiagonalization {
  ComplexMatrix basis;                     // unitary change of basis
  std::vector<ComplexVector> diagonals;    // one diagonal per input operator
  double offdiag_residual = 0.0;           // max over inputs of |Q* M Q - diag|
};

namespace detail {

/// Unitary similarity that diagonalizes commuting normal operators: take a
/// random real linear combination, Schur-factor it, group its eigenvalues
/// into clusters separated by cluster_tol, and recurse on each cluster's
/// compression of the remaining operators.
inline void simdiag_recurse(const std::vector<ComplexMatrix>& ops, double cluster_tol,
                            std::mt19937_64& rng, ComplexMatrix& q) {
  const Eigen::Index n = q.cols();
  if (n <= 1 || ops.empty()) return;

  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix mix = ComplexMatrix::Zero(n, n);
  std::vector<double> weights(ops.size());
  for (double& w : weights) w = gauss(rng);
  for (std::size_t k = 0; k < ops.size(); ++k)
    mix += weights[k] * (q.adjoint() * ops[k] * q);

  Eigen::ComplexSchur<ComplexMatrix> schur(mix);
  if (schur.info() != Eigen::Success) throw Error("simultaneous_diagonalization: Schur failed");
  ComplexMatrix u = schur.matrixU();
  ComplexVector eigs = schur.matrixT().diagonal();

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (eigs(a).real() != eigs(b).real()) return eigs(a).real() < eigs(b).real();
    return eigs(a).imag() < eigs(b).imag();
  });

  ComplexMatrix perm = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) perm(order[i], i) = 1.0;
  u = u * perm;
  q = q * u;

  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || std::abs(eigs(order[i]) - eigs(order[i - 1])) > cluster_tol) {
      clusters.emplace_back(start, i);
      start = i;
    }
  }
  if (clusters.size() <= 1) return;  // single cluster: the mix carries no split

  for (auto [lo, hi] : clusters) {
    const Eigen::Index len = hi - lo;
    if (len <= 1) continue;
    ComplexMatrix qblock = q.middleCols(lo, len);
    simdiag_recurse(ops, cluster_tol, rng, qblock);
    q.middleCols(lo, len) = qblock;
  }
}

}  // namespace detail

/// Joint diagonalization of a commuting family of normal operators.
/// Draws random real linear combinations until every cluster is resolved
/// (a fixed small number of rounds), then reports the off-diagonal
/// residual so the caller can judge whether the family was in fact
/// simultaneously diagonalizable.
inline SimultaneousDiagonalization simultaneous_diagonalization(
    const std::vector<ComplexMatrix>& ops, double cluster_tol = 1e-8, std::uint64_t seed = 7) {
  if (ops.empty()) throw std::invalid_argument("simultaneous_diagonalization: no operators");
  const Eigen::Index n = ops.front().rows();
  for (const auto& m : ops) {
    require_square(m, "simultaneous_diagonalization");
    require_finite(m, "simultaneous_diagonalization");
    if (m.rows() != n)
      throw std::invalid_argument("simultaneous_diagonalization: dimension mismatch");
  }

  std::mt19937_64 rng(seed);
  SimultaneousDiagonalization result;
  result.basis = ComplexMatrix::Identity(n, n);
  double best_residual = std::numeric_limits<double>::infinity();
  ComplexMatrix best_basis = result.basis;

  for (int attempt = 0; attempt < 4; ++attempt) {
    ComplexMatrix q = ComplexMatrix::Identity(n, n);
    detail::simdiag_recurse(ops, cluster_tol, rng, q);
    double residual = 0.0;
    for (const auto& m : ops) {
      ComplexMatrix t = q.adjoint() * m * q;
      ComplexMatrix off = t;
      off.diagonal().setZero();
      residual = std::max(residual, operator_norm(off));
    }
    if (residual < best_residual) {
      best_residual = residual;
      best_basis = q;
    }
    if (best_residual <= cluster_tol) break;
  }

  result.basis = best_basis;
  result.offdiag_residual = best_residual;
  result.diagonals.reserve(ops.size());
  for (const auto& m : ops)
    result.diagonals.push_back((result.basis.adjoint() * m * result.basis).diagonal());
  return result;
}

/// Gaussian random complex matrix (entries standard complex normal).
inline ComplexMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols,
                                           std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

/// Haar-ish random unitary via QR of a Gaussian matrix, with the phase
/// convention that R has positive diagonal.
inline ComplexMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  if (n == 0) return ComplexMatrix(0, 0);
  ComplexMatrix g = random_complex_matrix(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex d = r(i, i);
    double a = std::abs(d);
    q.col(i) *= (a > 0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace tetra
