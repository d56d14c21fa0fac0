#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "tetra/linalg.hpp"
#include "tetra/report.hpp"

namespace tetra {

/// A point (x1, x2, x3) tested for membership in the closed tetrablock,
/// the set of (a11, a22, det A) over 2x2 matrices A of norm at most 1.
struct TetraPoint {
  Complex x1, x2, x3;
};

struct MembershipVerdict {
  bool in_closure = false;
  bool in_distinguished_boundary = false;
  double witness_norm = 0.0;
};

/// Distinguished-boundary test: |x3| = 1, x1 = conj(x2) x3, |x2| <= 1,
/// each up to tol.
inline bool point_in_bE(const TetraPoint& p, double tol = 1e-9) {
  if (std::abs(std::abs(p.x3) - 1.0) > tol) return false;
  if (std::abs(p.x1 - std::conj(p.x2) * p.x3) > tol) return false;
  return std::abs(p.x2) <= 1.0 + tol;
}

namespace detail {

/// Minimal spectral norm over all 2x2 matrices with diagonal (x1, x2) and
/// determinant x3. Any such matrix is A(t) = [[x1, t], [(x1 x2 - x3)/t, x2]]
/// up to a diagonal unitary conjugation that preserves the norm, so with
/// mu = x1 x2 - x3 and m = |mu| the squared Frobenius norm
/// |x1|^2 + |x2|^2 + t^2 + m^2 / t^2 is minimized at t = sqrt(m), where it
/// equals s = |x1|^2 + |x2|^2 + 2m. The determinant is pinned at x3, and
/// the larger singular value grows with the Frobenius norm at fixed
/// determinant, so the norm of A(sqrt(m)) is the minimum; equivalently
/// sigma1^2 = (s + sqrt(s^2 - 4 |x3|^2)) / 2, and the point lies in the
/// closed tetrablock exactly when |x3| <= 1 and s <= 1 + |x3|^2. The norm
/// is measured by a singular value decomposition of A(sqrt(m)) itself,
/// which stays accurate to machine precision where the explicit radical
/// loses half its digits to cancellation near the unit witness sphere.
inline double closed_form_witness_norm(const TetraPoint& p) {
  const Complex mu = p.x1 * p.x2 - p.x3;
  const double m = std::abs(mu);
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = p.x1;
  a(1, 1) = p.x2;
  if (m > 0.0) {
    const double t = std::sqrt(m);
    a(0, 1) = t;
    a(1, 0) = mu / t;
  }
  return operator_norm(a);
}

}  // namespace detail

/// Closed-form membership test for the closed tetrablock. The verdict uses
/// the witness threshold |A| <= 1 + tol so that it agrees pointwise with
/// brute_force_membership, which minimizes over explicit witness matrices.
inline MembershipVerdict point_in_closure(const TetraPoint& p, double tol = 1e-9) {
  MembershipVerdict v;
  v.witness_norm = detail::closed_form_witness_norm(p);
  v.in_closure = v.witness_norm <= 1.0 + tol;
  v.in_distinguished_boundary = v.in_closure && point_in_bE(p, tol);
  return v;
}

/// Direct-search membership test: minimizes the spectral norm of the
/// explicit witness family A(t) = [[x1, t], [(x1 x2 - x3)/t, x2]] over a
/// logarithmic grid in t with golden-section refinement, measuring each
/// candidate with an actual 2x2 singular value decomposition. Serves as
/// the independent cross-check for point_in_closure.
inline MembershipVerdict brute_force_membership(const TetraPoint& p, int grid = 200,
                                                double tol = 1e-9) {
  if (grid < 100) throw std::invalid_argument("brute_force_membership: grid must be at least 100");
  const Complex mu = p.x1 * p.x2 - p.x3;
  const double m = std::abs(mu);

  auto witness_at = [&](double t) {
    ComplexMatrix a(2, 2);
    a(0, 0) = p.x1;
    a(0, 1) = t;
    a(1, 0) = (t > 0.0) ? mu / t : Complex(0.0, 0.0);
    a(1, 1) = p.x2;
    return operator_norm(a);
  };

  MembershipVerdict v;
  if (m == 0.0) {
    // The off-diagonal entries can both be taken to zero.
    v.witness_norm = witness_at(0.0);
  } else {
    const double center = std::log(std::sqrt(m));
    const double span = std::log(1e4);
    double best_u = center, best_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k) {
      const double u = center - span + (2.0 * span * k) / (grid - 1);
      const double val = witness_at(std::exp(u));
      if (val < best_val) {
        best_val = val;
        best_u = u;
      }
    }
    const double step = 2.0 * span / (grid - 1);
    const double refined = -detail::golden_max(
        [&](double u) { return -witness_at(std::exp(u)); }, best_u - step, best_u + step);
    v.witness_norm = std::min(best_val, refined);
  }
  v.in_closure = v.witness_norm <= 1.0 + tol;
  v.in_distinguished_boundary = v.in_closure && point_in_bE(p, tol);
  return v;
}

/// Verifies that a commuting triple of matrices is a tetrablock unitary:
/// pairwise commuting normal operators with N3 unitary, N2 a contraction,
/// N1 = N2* N3, and the joint spectrum on the distinguished boundary.
/// The joint spectrum is computed only once the structural checks pass.
inline VerificationReport is_tetrablock_unitary(const ComplexMatrix& n1, const ComplexMatrix& n2,
                                                const ComplexMatrix& n3, double tol = 1e-9) {
  require_square(n1, "is_tetrablock_unitary");
  require_same_shape(n1, n2, "is_tetrablock_unitary");
  require_same_shape(n1, n3, "is_tetrablock_unitary");
  const Eigen::Index n = n1.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  const double nm1 = operator_norm(n1), nm2 = operator_norm(n2), nm3 = operator_norm(n3);
  const double pair_scale = std::max({1.0, nm1 * nm2, nm1 * nm3, nm2 * nm3});

  VerificationReport report;
  report.record("commuting",
                std::max({commutator_residual(n1, n2), commutator_residual(n1, n3),
                          commutator_residual(n2, n3)}),
                tol * pair_scale);
  report.record("n1-normal", commutator_residual(n1, ComplexMatrix(n1.adjoint())),
                tol * std::max(1.0, nm1 * nm1));
  report.record("n2-normal", commutator_residual(n2, ComplexMatrix(n2.adjoint())),
                tol * std::max(1.0, nm2 * nm2));
  report.record("n3-unitary",
                std::max(operator_norm(n3.adjoint() * n3 - id), operator_norm(n3 * n3.adjoint() - id)),
                tol * std::max(1.0, nm3 * nm3));
  report.record("n2-contraction", std::max(0.0, nm2 - 1.0), tol);
  report.record("n1-factorization", operator_norm(n1 - n2.adjoint() * n3),
                tol * std::max(1.0, nm2 * nm3));

  if (!report.all_passed()) {
    report.skip("joint-diagonalization", "structural checks failed");
    report.skip("joint-spectrum-boundary", "structural checks failed");
    return report;
  }

  SimultaneousDiagonalization sd = simultaneous_diagonalization({n1, n2, n3});
  report.record("joint-diagonalization", sd.offdiag_residual, 10.0 * tol * std::max(1.0, nm1 + nm2 + nm3));

  double boundary_defect = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d1 = sd.diagonals[0](i), d2 = sd.diagonals[1](i), d3 = sd.diagonals[2](i);
    const double defect = std::max({std::abs(std::abs(d3) - 1.0),
                                    std::abs(d1 - std::conj(d2) * d3),
                                    std::max(0.0, std::abs(d2) - 1.0)});
    boundary_defect = std::max(boundary_defect, defect);
  }
  report.record("joint-spectrum-boundary", boundary_defect, 10.0 * tol);
  return report;
}

/// For z on the unit circle, checks that U_z = z N3 is unitary and that
/// R_z = N1 + z N2 satisfies |R_z| <= 2, R_z = R_z* U_z, and that the
/// whole family commutes. These are the defining relations of the
/// symmetrized-bidisc unitary pair (R_z, U_z) attached to the triple.
inline VerificationReport gamma_unitary_family_check(const ComplexMatrix& n1,
                                                     const ComplexMatrix& n2,
                                                     const ComplexMatrix& n3, int z_samples = 16,
                                                     double tol = 1e-9) {
  require_square(n1, "gamma_unitary_family_check");
  require_same_shape(n1, n2, "gamma_unitary_family_check");
  require_same_shape(n1, n3, "gamma_unitary_family_check");
  if (z_samples < 1) throw std::invalid_argument("gamma_unitary_family_check: z_samples >= 1");
  const Eigen::Index n = n1.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const double scale =
      std::max(1.0, operator_norm(n1) + operator_norm(n2) + operator_norm(n3));

  std::vector<Complex> zs(z_samples);
  for (int k = 0; k < z_samples; ++k) zs[k] = std::polar(1.0, 2.0 * M_PI * k / z_samples);

  double unitary_defect = 0.0, norm_excess = 0.0, symmetry_defect = 0.0, commute_defect = 0.0;
  std::vector<ComplexMatrix> r_family, u_family;
  r_family.reserve(zs.size());
  u_family.reserve(zs.size());
  for (const Complex& z : zs) {
    ComplexMatrix rz = n1 + z * n2;
    ComplexMatrix uz = z * n3;
    unitary_defect = std::max({unitary_defect, operator_norm(uz.adjoint() * uz - id),
                               operator_norm(uz * uz.adjoint() - id)});
    norm_excess = std::max(norm_excess, operator_norm(rz) - 2.0);
    symmetry_defect = std::max(symmetry_defect, operator_norm(rz - rz.adjoint() * uz));
    r_family.push_back(std::move(rz));
    u_family.push_back(std::move(uz));
  }
  for (std::size_t i = 0; i < zs.size(); ++i)
    for (std::size_t j = 0; j < zs.size(); ++j) {
      commute_defect = std::max(commute_defect, commutator_residual(r_family[i], u_family[j]));
      if (j > i)
        commute_defect = std::max(commute_defect, commutator_residual(r_family[i], r_family[j]));
    }

  VerificationReport report;
  report.record("family-unitary", unitary_defect, tol * scale);
  report.record("family-norm-bound", std::max(0.0, norm_excess), tol * scale);
  report.record("family-symmetry", symmetry_defect, tol * scale);
  report.record("family-commuting", commute_defect, tol * scale * scale);
  return report;
}

}  // namespace tetra
