#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tetra/dilation.hpp"
#include "tetra/fundamental.hpp"
#include "tetra/linalg.hpp"
#include "tetra/report.hpp"

namespace tetra {

/// Confirms the dilation property: compressing R1^m R2^n U^l to H agrees
/// with A^m B^n P^l for every exponent triple with m + n + l <= k_max,
/// checked column by column on the standard basis of H.
inline VerificationReport verify_dilation_equality(const UnitaryDilation& dil, int k_max = 4,
                                                   double tol = 1e-9) {
  if (k_max < 1) throw std::invalid_argument("verify_dilation_equality: k_max must be positive");
  const DilationBlocks& blk = *dil.blocks;
  const Eigen::Index n = blk.dim_h();
  const DilationOperator r1 = dil.r1(), r2 = dil.r2(), u = dil.u();

  std::vector<ComplexMatrix> pow_a(k_max + 1), pow_b(k_max + 1), pow_p(k_max + 1);
  pow_a[0] = pow_b[0] = pow_p[0] = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= k_max; ++k) {
    pow_a[k] = blk.a * pow_a[k - 1];
    pow_b[k] = blk.b * pow_b[k - 1];
    pow_p[k] = blk.p * pow_p[k - 1];
  }

  double worst = 0.0;
  std::string worst_label;
  for (Eigen::Index i = 0; i < n; ++i) {
    DilationVector ul = basis_h(blk, i);
    for (int l = 0; l <= k_max; ++l) {
      DilationVector wn = ul;
      for (int nn = 0; l + nn <= k_max; ++nn) {
        const ComplexVector mid = pow_b[nn] * pow_p[l].col(i);
        DilationVector xm = wn;
        for (int m = 0; l + nn + m <= k_max; ++m) {
          const double res = (xm.h - pow_a[m] * mid).norm();
          if (res > worst) {
            worst = res;
            std::ostringstream label;
            label << "m=" << m << " n=" << nn << " l=" << l << " column=" << i;
            worst_label = label.str();
          }
          if (l + nn + m < k_max) xm = r1.apply(xm);
        }
        if (l + nn < k_max) wn = r2.apply(wn);
      }
      if (l < k_max) ul = u.apply(ul);
    }
  }

  const double scale = std::max(
      1.0, operator_norm(blk.a) + operator_norm(blk.b) + operator_norm(blk.p));
  VerificationReport report;
  report.record("equality", worst, tol * scale, "worst at " + worst_label);
  return report;
}

/// Samples random finitely supported vectors and checks the operator
/// relations that make (R1, R2, U) a tetrablock unitary: commutation,
/// R1 = R2* U, contractivity of R1 and R2, unitarity of U, and normality
/// of R1 and R2. Residuals are relative to the sample norm.
inline VerificationReport verify_unitary_triple_conditions(const UnitaryDilation& dil,
                                                           int samples = 200, double tol = 1e-9,
                                                           std::uint64_t seed = 11,
                                                           double unitary_tol = 1e-12) {
  if (samples < 1) throw std::invalid_argument("verify_unitary_triple_conditions: samples >= 1");
  const DilationBlocks& blk = *dil.blocks;
  const DilationOperator r1 = dil.r1(), r2 = dil.r2(), u = dil.u();
  std::mt19937_64 rng(seed);

  double comm = 0.0, fact = 0.0, contr1 = 0.0, contr2 = 0.0, unit = 0.0;
  double norm1 = 0.0, norm2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const DilationVector v = random_dilation_vector(blk, rng);
    const double nv = v.norm();
    if (nv == 0.0) continue;
    const DilationVector r1v = r1.apply(v), r2v = r2.apply(v), uv = u.apply(v);

    comm = std::max({comm, (r1.apply(r2v) - r2.apply(r1v)).norm() / nv,
                     (r1.apply(uv) - u.apply(r1v)).norm() / nv,
                     (r2.apply(uv) - u.apply(r2v)).norm() / nv});
    fact = std::max(fact, (r1v - r2.apply_adjoint(uv)).norm() / nv);
    contr1 = std::max(contr1, r1v.norm() / nv - 1.0);
    contr2 = std::max(contr2, r2v.norm() / nv - 1.0);
    unit = std::max({unit, (u.apply_adjoint(uv) - v).norm() / nv,
                     (u.apply(u.apply_adjoint(v)) - v).norm() / nv});
    norm1 = std::max(norm1, (r1.apply_adjoint(r1v) - r1.apply(r1.apply_adjoint(v))).norm() / nv);
    norm2 = std::max(norm2, (r2.apply_adjoint(r2v) - r2.apply(r2.apply_adjoint(v))).norm() / nv);
  }

  VerificationReport report;
  report.record("commuting", comm, tol);
  report.record("factorization", fact, tol);
  report.record("r1-contraction", std::max(0.0, contr1), tol);
  report.record("r2-contraction", std::max(0.0, contr2), tol);
  report.record("u-unitary", unit, unitary_tol);
  report.record("r1-normal", norm1, tol);
  report.record("r2-normal", norm2, tol);
  return report;
}

/// Confirms that U acts by the five-block recipe written directly from the
/// payload: on H it is P into H plus D_P into tail position 0, on the tail
/// over D_P it is the forward shift, and on the adjoint tail it reads
/// position 0 through D_{P*} and -P* while shifting the rest backwards.
/// The expected vectors are recomputed here from P and the defect data, so
/// a mistake in the assembled blocks cannot hide.
inline VerificationReport verify_schaffer_structure(const UnitaryDilation& dil,
                                                    double tol = 1e-12, int probe_depth = 4) {
  const DilationBlocks& blk = *dil.blocks;
  const Eigen::Index n = blk.dim_h();
  const int rp = blk.dim_p(), rps = blk.dim_ps();
  const DilationOperator u = dil.u();

  auto residual_against = [&](const DilationVector& y, const DilationVector& expected) {
    return (y - expected).norm();
  };

  double on_h = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const DilationVector y = u.apply(basis_h(blk, i));
    DilationVector expected;
    expected.h = blk.p.col(i);
    expected.tail_p.blocks.push_back(blk.dp.embed.adjoint() * blk.dp.defect.col(i));
    on_h = std::max(on_h, residual_against(y, expected));
  }

  double shift = 0.0;
  for (int k = 0; k <= probe_depth; ++k)
    for (int j = 0; j < rp; ++j) {
      const DilationVector y = u.apply(basis_tail_p(blk, j, k));
      shift = std::max(shift, residual_against(y, basis_tail_p(blk, j, k + 1)));
    }

  double on_adjoint = 0.0;
  for (int j = 0; j < rps; ++j) {
    const DilationVector y = u.apply(basis_tail_pstar(blk, j, 0));
    DilationVector expected;
    expected.h = blk.dps.defect * blk.dps.embed.col(j);
    expected.tail_p.blocks.push_back(-(blk.dp.embed.adjoint() * (blk.p.adjoint() * blk.dps.embed.col(j))));
    on_adjoint = std::max(on_adjoint, residual_against(y, expected));
  }
  for (int k = 1; k <= probe_depth; ++k)
    for (int j = 0; j < rps; ++j) {
      const DilationVector y = u.apply(basis_tail_pstar(blk, j, k));
      on_adjoint = std::max(on_adjoint, residual_against(y, basis_tail_pstar(blk, j, k - 1)));
    }

  double adj_on_h = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const DilationVector y = u.apply_adjoint(basis_h(blk, i));
    DilationVector expected;
    expected.h = blk.p.adjoint().col(i);
    if (rps > 0)
      expected.tail_pstar.blocks.push_back(blk.dps.embed.adjoint() * blk.dps.defect.col(i));
    expected.tail_pstar.trim();
    adj_on_h = std::max(adj_on_h, residual_against(y, expected));
  }

  double adj_on_tail = 0.0;
  for (int j = 0; j < rp; ++j) {
    const DilationVector y = u.apply_adjoint(basis_tail_p(blk, j, 0));
    DilationVector expected;
    expected.h = blk.dp.defect * blk.dp.embed.col(j);
    if (rps > 0)
      expected.tail_pstar.blocks.push_back(
          -(blk.dps.embed.adjoint() * (blk.p * blk.dp.embed.col(j))));
    expected.tail_pstar.trim();
    adj_on_tail = std::max(adj_on_tail, residual_against(y, expected));
  }
  for (int k = 1; k <= probe_depth; ++k)
    for (int j = 0; j < rp; ++j) {
      const DilationVector y = u.apply_adjoint(basis_tail_p(blk, j, k));
      adj_on_tail = std::max(adj_on_tail, residual_against(y, basis_tail_p(blk, j, k - 1)));
    }

  double adj_shift = 0.0;
  for (int k = 0; k <= probe_depth; ++k)
    for (int j = 0; j < rps; ++j) {
      const DilationVector y = u.apply_adjoint(basis_tail_pstar(blk, j, k));
      adj_shift = std::max(adj_shift, residual_against(y, basis_tail_pstar(blk, j, k + 1)));
    }

  VerificationReport report;
  report.record("u-on-h", on_h, tol);
  report.record("u-shift", shift, tol);
  report.record("u-on-adjoint-tail", on_adjoint, tol);
  report.record("u-adjoint-on-h", adj_on_h, tol);
  report.record("u-adjoint-on-tail", adj_on_tail, tol);
  report.record("u-adjoint-shift", adj_shift, tol);
  return report;
}

/// The matrix identities behind commutation of the assembled operators:
/// two symmetric exchange identities between the fundamental pairs across
/// the defect spaces, and the block-level commutation of R1 and R2 with U
/// probed on tail basis vectors.
inline VerificationReport verify_block_commutation_identities(const UnitaryDilation& dil,
                                                              double tol = 1e-9,
                                                              int probe_depth = 4) {
  const DilationBlocks& blk = *dil.blocks;
  const ComplexMatrix f1 = lift(blk.dp, blk.f1), f2 = lift(blk.dp, blk.f2);
  const ComplexMatrix g1 = lift(blk.dps, blk.g1), g2 = lift(blk.dps, blk.g2);
  const ComplexMatrix& dpm = blk.dp.defect;
  const ComplexMatrix& dpsm = blk.dps.defect;
  const ComplexMatrix ps = blk.p.adjoint();
  const ComplexMatrix proj_ps = blk.dps.embed * blk.dps.embed.adjoint();
  const double scale =
      std::max(1.0, operator_norm(blk.a) + operator_norm(blk.b) + operator_norm(blk.p));

  VerificationReport report;
  report.record("exchange-ambient",
                operator_norm(blk.a * dpsm * g1 + dpsm * g2 * g2.adjoint() -
                              blk.b * dpsm * g2 - dpsm * g1 * g1.adjoint()),
                tol * scale);
  report.record("exchange-ambient-commute", operator_norm(dpsm * (g2 * g1 - g1 * g2)), tol * scale);
  report.record(
      "exchange-defect",
      operator_norm((f2.adjoint() * dpm * dpsm * g1 - f1 * f1.adjoint() * ps -
                     f2.adjoint() * ps * g2.adjoint() - f1.adjoint() * dpm * dpsm * g2 +
                     f2 * f2.adjoint() * ps + f1.adjoint() * ps * g1.adjoint()) *
                    proj_ps),
      tol * scale);
  report.record("exchange-defect-commute",
                operator_norm(f2.adjoint() * ps * g1 - f1.adjoint() * ps * g2), tol * scale);
  report.record("exchange-adjoint-commute",
                operator_norm((f2.adjoint() * f1.adjoint() - f1.adjoint() * f2.adjoint()) * ps *
                              proj_ps),
                tol * scale);

  const DilationOperator v1 = dil.op(OperatorKind::v1), v2 = dil.op(OperatorKind::v2);
  const DilationOperator v3 = dil.op(OperatorKind::v3);
  const DilationOperator c1 = dil.op(OperatorKind::c1), c2 = dil.op(OperatorKind::c2);
  const DilationOperator c3 = dil.op(OperatorKind::c3);
  const DilationOperator d1 = dil.op(OperatorKind::d1), d2 = dil.op(OperatorKind::d2);
  const DilationOperator d3 = dil.op(OperatorKind::d3);

  double block_r1u = 0.0, block_r2u = 0.0;
  for (int k = 0; k <= probe_depth; ++k)
    for (int j = 0; j < blk.dim_ps(); ++j) {
      const DilationVector b = basis_tail_pstar(blk, j, k);
      block_r1u = std::max(block_r1u, (v1.apply(c3.apply(b)) + c1.apply(d3.apply(b)) -
                                       v3.apply(c1.apply(b)) - c3.apply(d1.apply(b)))
                                          .norm());
      block_r2u = std::max(block_r2u, (v2.apply(c3.apply(b)) + c2.apply(d3.apply(b)) -
                                       v3.apply(c2.apply(b)) - c3.apply(d2.apply(b)))
                                          .norm());
    }
  report.record("block-commutation-r1-u", block_r1u, tol * scale);
  report.record("block-commutation-r2-u", block_r2u, tol * scale);
  return report;
}

/// Reconstructs the coupling and tail blocks of R1 and R2 from (V1, V2)
/// and the fixed blocks (C3, D3) of U alone, and compares them against the
/// constructed blocks:
///   C1 = V2* C3,  C2 = V1* C3,
///   D1 b@0 = C3*(V1(C3 b@0)),  D2 b@0 = C3*(V2(C3 b@0)),
///   D2* b@k = shift^k (C3*(V2*(C3 b@0)) + shift(D1 b@0)),  symmetrically for D1*.
/// Also certifies the unitarity relations of the U blocks: D3* D3 + C3* C3
/// is the identity on the adjoint tail and C3* V3 vanishes on H + tail.
inline VerificationReport reconstruct_uniqueness(const UnitaryDilation& dil, double tol = 1e-9,
                                                 int positions = 6) {
  if (positions < 1) throw std::invalid_argument("reconstruct_uniqueness: positions >= 1");
  const DilationBlocks& blk = *dil.blocks;
  const Eigen::Index n = blk.dim_h();
  const int rp = blk.dim_p(), rps = blk.dim_ps();
  const DilationOperator v1 = dil.op(OperatorKind::v1), v2 = dil.op(OperatorKind::v2);
  const DilationOperator v3 = dil.op(OperatorKind::v3);
  const DilationOperator c1 = dil.op(OperatorKind::c1), c2 = dil.op(OperatorKind::c2);
  const DilationOperator c3 = dil.op(OperatorKind::c3);
  const DilationOperator d1 = dil.op(OperatorKind::d1), d2 = dil.op(OperatorKind::d2);
  const DilationOperator d3 = dil.op(OperatorKind::d3);

  double coupling1 = 0.0, coupling2 = 0.0;
  double tail1 = 0.0, tail2 = 0.0, tail_adj1 = 0.0, tail_adj2 = 0.0;
  for (int j = 0; j < rps; ++j) {
    const DilationVector b0 = basis_tail_pstar(blk, j, 0);
    const DilationVector c3b = c3.apply(b0);
    coupling1 = std::max(coupling1, (v2.apply_adjoint(c3b) - c1.apply(b0)).norm());
    coupling2 = std::max(coupling2, (v1.apply_adjoint(c3b) - c2.apply(b0)).norm());

    const DilationVector d1_derived = c3.apply_adjoint(v1.apply(c3b));
    const DilationVector d2_derived = c3.apply_adjoint(v2.apply(c3b));
    tail1 = std::max(tail1, (d1_derived - d1.apply(b0)).norm());
    tail2 = std::max(tail2, (d2_derived - d2.apply(b0)).norm());

    DilationVector d1_adj_derived =
        c3.apply_adjoint(v1.apply_adjoint(c3b)) + d3.apply_adjoint(d2_derived);
    DilationVector d2_adj_derived =
        c3.apply_adjoint(v2.apply_adjoint(c3b)) + d3.apply_adjoint(d1_derived);
    DilationVector probe1 = b0, probe2 = b0;
    for (int k = 0; k < positions; ++k) {
      tail_adj1 = std::max(tail_adj1, (d1_adj_derived - d1.apply_adjoint(probe1)).norm());
      tail_adj2 = std::max(tail_adj2, (d2_adj_derived - d2.apply_adjoint(probe2)).norm());
      d1_adj_derived = d3.apply_adjoint(d1_adj_derived);
      d2_adj_derived = d3.apply_adjoint(d2_adj_derived);
      probe1 = d3.apply_adjoint(probe1);
      probe2 = d3.apply_adjoint(probe2);
    }
  }

  double isometry = 0.0;
  for (int k = 0; k < positions; ++k)
    for (int j = 0; j < rps; ++j) {
      const DilationVector b = basis_tail_pstar(blk, j, k);
      const DilationVector back =
          d3.apply_adjoint(d3.apply(b)) + c3.apply_adjoint(c3.apply(b));
      isometry = std::max(isometry, (back - b).norm());
    }

  double orthogonality = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    orthogonality =
        std::max(orthogonality, c3.apply_adjoint(v3.apply(basis_h(blk, i))).norm());
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < rp; ++j)
      orthogonality = std::max(
          orthogonality, c3.apply_adjoint(v3.apply(basis_tail_p(blk, j, k))).norm());

  VerificationReport report;
  report.record("coupling-1", coupling1, tol);
  report.record("coupling-2", coupling2, tol);
  report.record("tail-action-1", tail1, tol);
  report.record("tail-action-2", tail2, tol);
  report.record("tail-adjoint-1", tail_adj1, tol);
  report.record("tail-adjoint-2", tail_adj2, tol);
  report.record("block-isometry", isometry, tol);
  report.record("block-orthogonality", orthogonality, tol);
  return report;
}

/// The structure forced on any commuting lift: in the ordering
/// tail(D_P), H, tail(D_{P*}), the blocks of R1 and R2 below the diagonal
/// vanish and the compression to H is exactly A respectively B. These are
/// structural zeros of the representation, so the tolerance is essentially
/// machine precision.
inline VerificationReport verify_triangular_structure(const UnitaryDilation& dil,
                                                      double tol = 1e-14, int probe_depth = 4) {
  const DilationBlocks& blk = *dil.blocks;
  const Eigen::Index n = blk.dim_h();
  const int rp = blk.dim_p();

  VerificationReport report;
  struct Side {
    const char* name;
    OperatorKind kind;
    const ComplexMatrix* compression;
  };
  const Side sides[2] = {{"r1", OperatorKind::r1, &blk.a}, {"r2", OperatorKind::r2, &blk.b}};
  for (const Side& side : sides) {
    const DilationOperator op = dil.op(side.kind);
    double h_from_tail = 0.0, adjoint_from_tail = 0.0;
    for (int k = 0; k <= probe_depth; ++k)
      for (int j = 0; j < rp; ++j) {
        const DilationVector y = op.apply(basis_tail_p(blk, j, k));
        h_from_tail = std::max(h_from_tail, y.h.norm());
        adjoint_from_tail = std::max(adjoint_from_tail, std::sqrt(y.tail_pstar.squared_norm()));
      }
    double adjoint_from_h = 0.0, compression = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const DilationVector y = op.apply(basis_h(blk, i));
      adjoint_from_h = std::max(adjoint_from_h, std::sqrt(y.tail_pstar.squared_norm()));
      compression = std::max(compression, (y.h - side.compression->col(i)).norm());
    }
    const std::string prefix(side.name);
    report.record(prefix + "-h-from-tail", h_from_tail, tol);
    report.record(prefix + "-adjoint-tail-from-tail", adjoint_from_tail, tol);
    report.record(prefix + "-adjoint-tail-from-h", adjoint_from_h, tol);
    report.record(prefix + "-compression", compression, tol);
  }
  return report;
}

/// Rank of the joint orbit of H under U and U* up to the given depth,
/// compared with the dimension count n + depth * (dim D_P + dim D_{P*})
/// that a minimal dilation must reach. A shortfall beyond one boundary
/// layer of tail blocks means the dilation space is larger than the
/// closure of the orbit, i.e. the dilation is not minimal.
inline VerificationReport minimality_rank_check(const UnitaryDilation& dil, int depth = 4,
                                                double svd_tol = 1e-8) {
  if (depth < 1) throw std::invalid_argument("minimality_rank_check: depth must be positive");
  const DilationBlocks& blk = *dil.blocks;
  const Eigen::Index n = blk.dim_h();
  const int rp = blk.dim_p(), rps = blk.dim_ps();
  const DilationOperator u = dil.u();

  const Eigen::Index total = n + static_cast<Eigen::Index>(depth) * (rp + rps);
  ComplexMatrix orbit(total, n * (2 * depth + 1));
  Eigen::Index col = 0;

  auto flatten = [&](const DilationVector& v) {
    ComplexVector out = ComplexVector::Zero(total);
    out.head(n) = v.h;
    for (int k = 0; k < v.tail_p.support() && k < depth; ++k)
      out.segment(n + static_cast<Eigen::Index>(k) * rp, rp) = v.tail_p.blocks[k];
    const Eigen::Index base = n + static_cast<Eigen::Index>(depth) * rp;
    for (int k = 0; k < v.tail_pstar.support() && k < depth; ++k)
      out.segment(base + static_cast<Eigen::Index>(k) * rps, rps) = v.tail_pstar.blocks[k];
    return out;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    DilationVector forward = basis_h(blk, i);
    orbit.col(col++) = flatten(forward);
    for (int m = 1; m <= depth; ++m) {
      forward = u.apply(forward);
      orbit.col(col++) = flatten(forward);
    }
    DilationVector backward = basis_h(blk, i);
    for (int m = 1; m <= depth; ++m) {
      backward = u.apply_adjoint(backward);
      orbit.col(col++) = flatten(backward);
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(orbit);
  const auto& sv = svd.singularValues();
  const double cutoff = svd_tol * std::max(1.0, (sv.size() > 0) ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;

  const Eigen::Index expected = total;
  const Eigen::Index slack = rp + rps;
  VerificationReport report;
  std::ostringstream note;
  note << "rank " << rank << " of expected " << expected << " (slack " << slack << ")";
  report.record_verdict("minimal-orbit-rank",
                        (rank <= expected && rank + slack >= expected) ? Verdict::pass
                                                                       : Verdict::fail,
                        static_cast<double>(std::abs(expected - rank)),
                        static_cast<double>(slack), note.str());
  return report;
}

/// Composite detector used by the perturbation experiments: the largest
/// relative residual of R1 = R2* U and [R1, U] = 0 over random probe
/// vectors, where `r1` may be a corrupted copy while R2 and U come from
/// the constructed dilation.
inline double perturbation_detector_residual(const DilationOperator& r1,
                                             const UnitaryDilation& dil, int probes = 20,
                                             std::uint64_t seed = 23) {
  const DilationBlocks& blk = *dil.blocks;
  const DilationOperator r2 = dil.r2(), u = dil.u();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < probes; ++s) {
    const DilationVector v = random_dilation_vector(blk, rng);
    const double nv = v.norm();
    if (nv == 0.0) continue;
    worst = std::max(worst, (r1.apply(v) - r2.apply_adjoint(u.apply(v))).norm() / nv);
    worst = std::max(worst, (r1.apply(u.apply(v)) - u.apply(r1.apply(v))).norm() / nv);
  }
  return worst;
}

}  // namespace tetra
