#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tetra/domain.hpp"
#include "tetra/fundamental.hpp"
#include "tetra/linalg.hpp"

namespace tetra {

/// 1x1 instance from a point of the closed tetrablock.
inline OperatorTriple generate_scalar_instance(const TetraPoint& pt, double tol = 1e-9) {
  if (!point_in_closure(pt, tol).in_closure)
    throw Error("generate_scalar_instance: point lies outside the closed tetrablock");
  OperatorTriple t;
  t.a = ComplexMatrix::Constant(1, 1, pt.x1);
  t.b = ComplexMatrix::Constant(1, 1, pt.x2);
  t.p = ComplexMatrix::Constant(1, 1, pt.x3);
  return t;
}

/// Diagonal instance from a list of points of the closed tetrablock.
inline OperatorTriple generate_diagonal_instance(const std::vector<TetraPoint>& pts,
                                                 double tol = 1e-9) {
  if (pts.empty()) throw std::invalid_argument("generate_diagonal_instance: no points");
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  OperatorTriple t;
  t.a = ComplexMatrix::Zero(n, n);
  t.b = ComplexMatrix::Zero(n, n);
  t.p = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TetraPoint& pt = pts[i];
    if (!point_in_closure(pt, tol).in_closure)
      throw Error("generate_diagonal_instance: point lies outside the closed tetrablock");
    t.a(i, i) = pt.x1;
    t.b(i, i) = pt.x2;
    t.p(i, i) = pt.x3;
  }
  return t;
}

/// Random interior point of the tetrablock, read off a random 2x2 matrix
/// of norm `radius` as (a11, a22, det). Constructive, so no rejection loop
/// and a guaranteed membership margin of 1 - radius.
inline TetraPoint random_interior_point(std::mt19937_64& rng, double radius = 0.9) {
  ComplexMatrix g = random_complex_matrix(2, 2, rng);
  g *= radius / std::max(operator_norm(g), 1e-300);
  return TetraPoint{g(0, 0), g(1, 1), g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)};
}

/// Random commuting normal triple with joint spectrum on the distinguished
/// boundary: in a common random eigenbasis, N3 has unimodular eigenvalues,
/// N2 eigenvalues in the closed disc, and N1 = N2* N3.
inline OperatorTriple generate_tetrablock_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("generate_tetrablock_unitary: dim must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ComplexMatrix q = random_unitary(dim, rng);
  ComplexVector d3(dim), d2(dim), d1(dim);
  for (int i = 0; i < dim; ++i) {
    d3(i) = std::polar(1.0, 2.0 * M_PI * uniform(rng));
    d2(i) = std::polar(uniform(rng), 2.0 * M_PI * uniform(rng));
    d1(i) = std::conj(d2(i)) * d3(i);
  }
  OperatorTriple t;
  t.a = q * d1.asDiagonal() * q.adjoint();
  t.b = q * d2.asDiagonal() * q.adjoint();
  t.p = q * d3.asDiagonal() * q.adjoint();
  return t;
}

/// Checks the symbol hypotheses for the compressed-isometry construction:
/// [G1, G2] = 0, balanced self-commutators, and w(G1 + z G2) <= 1 on a
/// grid of unimodular z.
inline void require_symbol_hypotheses(const ComplexMatrix& g1, const ComplexMatrix& g2,
                                      double tol = 1e-9, int z_samples = 16,
                                      int angular_grid = 720) {
  require_square(g1, "require_symbol_hypotheses");
  require_same_shape(g1, g2, "require_symbol_hypotheses");
  if (commutator_residual(g1, g2) > tol)
    throw Error("compressed instance: symbols do not commute");
  const ComplexMatrix s1 = g1 * g1.adjoint() - g1.adjoint() * g1;
  const ComplexMatrix s2 = g2 * g2.adjoint() - g2.adjoint() * g2;
  if (operator_norm(s1 - s2) > tol)
    throw Error("compressed instance: unbalanced symbol self-commutators");
  for (int k = 0; k < z_samples; ++k) {
    const Complex z = std::polar(1.0, 2.0 * M_PI * k / z_samples);
    if (numerical_radius(ComplexMatrix(g1 + z * g2), angular_grid) > 1.0 + tol)
      throw Error("compressed instance: symbol numerical radius exceeds 1");
  }
}

/// Compression of the multiplication triple with symbols G1* + G2 z,
/// G2* + G1 z, and z to the first `levels` Taylor coefficients: block
/// lower-bidiagonal Toeplitz matrices over the block shift. The symbol
/// hypotheses make the compressed triple commute; the caller certifies the
/// result through the fundamental solver.
inline OperatorTriple compressed_isometry_instance(const ComplexMatrix& g1,
                                                   const ComplexMatrix& g2, int levels,
                                                   double tol = 1e-9) {
  require_symbol_hypotheses(g1, g2, tol);
  if (levels < 2) throw std::invalid_argument("compressed_isometry_instance: levels must be >= 2");
  const Eigen::Index d = g1.rows();
  const Eigen::Index n = d * levels;
  OperatorTriple t;
  t.a = ComplexMatrix::Zero(n, n);
  t.b = ComplexMatrix::Zero(n, n);
  t.p = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < levels; ++k) {
    t.a.block(k * d, k * d, d, d) = g1.adjoint();
    t.b.block(k * d, k * d, d, d) = g2.adjoint();
    if (k + 1 < levels) {
      t.a.block((k + 1) * d, k * d, d, d) = g2;
      t.b.block((k + 1) * d, k * d, d, d) = g1;
      t.p.block((k + 1) * d, k * d, d, d) = ComplexMatrix::Identity(d, d);
    }
  }
  return t;
}

/// Random symbol pair satisfying the hypotheses. Even draws give a
/// commuting normal pair with spectra paired so that |l1| + |l2| stays
/// below `radius`; odd draws give a non-normal pair G2 = phase * G1 + c,
/// whose self-commutators balance because the phase is unimodular.
inline std::pair<ComplexMatrix, ComplexMatrix> random_symbol_pair(int dim, std::mt19937_64& rng,
                                                                  double radius = 0.9) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (rng() % 2 == 0) {
    ComplexMatrix q = random_unitary(dim, rng);
    ComplexVector l1(dim), l2(dim);
    for (int i = 0; i < dim; ++i) {
      const double split = uniform(rng);
      const double total = radius * uniform(rng);
      l1(i) = std::polar(total * split, 2.0 * M_PI * uniform(rng));
      l2(i) = std::polar(total * (1.0 - split), 2.0 * M_PI * uniform(rng));
    }
    return {q * l1.asDiagonal() * q.adjoint(), q * l2.asDiagonal() * q.adjoint()};
  }
  ComplexMatrix nil = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) nil(i, i + 1) = radius * uniform(rng);
  double w = numerical_radius(nil);
  if (w > radius / 2.02) {
    nil *= radius / (2.02 * w);
    w = radius / 2.02;
  }
  const double room = std::max(0.0, radius - 2.0 * w) / 2.0;
  const Complex phase = std::polar(1.0, 2.0 * M_PI * uniform(rng));
  const Complex c = std::polar(room * uniform(rng), 2.0 * M_PI * uniform(rng));
  ComplexMatrix g2 = phase * nil + c * ComplexMatrix::Identity(dim, dim);
  return {nil, g2};
}

/// Random compressed-isometry instance, retrying seeds until the
/// fundamental solver certifies the draw.
inline OperatorTriple random_compressed_instance(int dim, int levels, std::uint64_t seed,
                                                 double tol = 1e-9, double rank_tol = 1e-10) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    auto [g1, g2] = random_symbol_pair(dim, rng);
    try {
      OperatorTriple t = compressed_isometry_instance(g1, g2, levels, tol);
      FundamentalPair f = solve_fundamental(t, tol, rank_tol);
      const PairCondition c = commutation_defects(f);
      if (std::max(c.commutator, c.selfcommutator_gap) <= tol) return t;
    } catch (const Error&) {
    }
  }
  throw Error("random_compressed_instance: no admissible draw after 32 attempts");
}

}  // namespace tetra
