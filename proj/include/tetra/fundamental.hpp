#pragma once

#include <cmath>
#include <utility>

#include "tetra/linalg.hpp"
#include "tetra/report.hpp"

namespace tetra {

/// A commuting triple (A, B, P) of square matrices with |P| <= 1, the
/// operator-theoretic datum whose joint behaviour is modelled on the
/// tetrablock. A and B play symmetric roles; P is the distinguished
/// contraction whose defect spaces carry the fundamental operators.
struct OperatorTriple {
  ComplexMatrix a, b, p;
};

inline void require_triple_shapes(const OperatorTriple& t, const char* who) {
  require_square(t.a, who);
  require_same_shape(t.a, t.b, who);
  require_same_shape(t.a, t.p, who);
  require_finite(t.a, who);
  require_finite(t.b, who);
  require_finite(t.p, who);
}

inline OperatorTriple adjoint_triple(const OperatorTriple& t) {
  return {t.a.adjoint(), t.b.adjoint(), t.p.adjoint()};
}

/// Structural checks every admissible triple must satisfy: pairwise
/// commutativity and contractivity of P. Downstream constructions assume
/// these but do not re-verify them.
inline VerificationReport necessary_checks(const OperatorTriple& t, double tol = 1e-9) {
  require_triple_shapes(t, "necessary_checks");
  const double na = operator_norm(t.a), nb = operator_norm(t.b), np = operator_norm(t.p);
  VerificationReport report;
  report.record("commuting",
                std::max({commutator_residual(t.a, t.b), commutator_residual(t.a, t.p),
                          commutator_residual(t.b, t.p)}),
                tol * std::max({1.0, na * nb, na * np, nb * np}));
  report.record("p-contraction", std::max(0.0, np - 1.0), tol);
  return report;
}

/// Solutions (F1, F2) of the fundamental equations
///   A - B* P = D_P F1 D_P,   B - A* P = D_P F2 D_P
/// expressed in defect coordinates (embed^* F embed), together with the
/// lifted equation residuals and the numerical radii of the solutions.
/// `certified` records whether both radii are at most 1 + tol, the bound
/// every tetrablock contraction satisfies.
struct FundamentalPair {
  ComplexMatrix f1, f2;
  double residual1 = 0.0, residual2 = 0.0;
  double radius1 = 0.0, radius2 = 0.0;
  bool certified = false;
};

/// Solves D_P X D_P = rhs for X supported on ran(D_P), by scaling the
/// compressed right-hand side with the inverse defect singular values.
/// The returned residual |D_P X^ D_P - rhs| measures the component of rhs
/// off the defect range, which is the only obstruction to solvability.
inline std::pair<ComplexMatrix, double> solve_on_defect(const DefectSpace& space,
                                                        const ComplexMatrix& rhs) {
  const int r = space.dim;
  ComplexMatrix compressed = space.embed.adjoint() * rhs * space.embed;
  ComplexMatrix x(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) x(i, j) = compressed(i, j) / (space.scale(i) * space.scale(j));
  const double residual = operator_norm(space.defect * lift(space, x) * space.defect - rhs);
  return {x, residual};
}

/// Solves the fundamental equations of a triple on a precomputed defect
/// space of P. Throws when either lifted residual exceeds
/// tol * max(1, |A| + |B|).
inline FundamentalPair solve_fundamental_on(const OperatorTriple& t, const DefectSpace& dp,
                                            double tol = 1e-9, int angular_grid = 720) {
  require_triple_shapes(t, "solve_fundamental_on");
  FundamentalPair pair;
  auto [f1, r1] = solve_on_defect(dp, ComplexMatrix(t.a - t.b.adjoint() * t.p));
  auto [f2, r2] = solve_on_defect(dp, ComplexMatrix(t.b - t.a.adjoint() * t.p));
  pair.f1 = std::move(f1);
  pair.f2 = std::move(f2);
  pair.residual1 = r1;
  pair.residual2 = r2;
  const double scale = std::max(1.0, operator_norm(t.a) + operator_norm(t.b));
  if (std::max(r1, r2) > tol * scale)
    throw Error("fundamental equation unsolvable at tolerance");
  pair.radius1 = numerical_radius(pair.f1, angular_grid);
  pair.radius2 = numerical_radius(pair.f2, angular_grid);
  pair.certified = std::max(pair.radius1, pair.radius2) <= 1.0 + tol;
  return pair;
}

inline FundamentalPair solve_fundamental(const OperatorTriple& t, double tol = 1e-9,
                                         double rank_tol = 1e-10, int angular_grid = 720) {
  require_triple_shapes(t, "solve_fundamental");
  DefectSpace dp = defect_operator(t.p, rank_tol);
  return solve_fundamental_on(t, dp, tol, angular_grid);
}

/// Fundamental pair of the adjoint triple (A*, B*, P*), conventionally
/// written (G1, G2): A* - B P* = D_{P*} G1 D_{P*}, B* - A P* = D_{P*} G2 D_{P*}.
inline FundamentalPair solve_adjoint_fundamental(const OperatorTriple& t, double tol = 1e-9,
                                                 double rank_tol = 1e-10, int angular_grid = 720) {
  return solve_fundamental(adjoint_triple(t), tol, rank_tol, angular_grid);
}

/// Everything the dilation construction consumes: the triple, both defect
/// spaces, and both fundamental pairs on shared factorizations.
struct FundamentalData {
  OperatorTriple triple;
  DefectSpace dp, dps;
  FundamentalPair f, g;
};

inline FundamentalData analyze_triple(const OperatorTriple& t, double tol = 1e-9,
                                      double rank_tol = 1e-10, int angular_grid = 720) {
  require_triple_shapes(t, "analyze_triple");
  FundamentalData data;
  data.triple = t;
  data.dp = defect_operator(t.p, rank_tol);
  data.dps = defect_operator(ComplexMatrix(t.p.adjoint()), rank_tol);
  data.f = solve_fundamental_on(t, data.dp, tol, angular_grid);
  data.g = solve_fundamental_on(adjoint_triple(t), data.dps, tol, angular_grid);
  return data;
}

/// Residuals of the defect-action identities
///   D_P A = F1 D_P + F2* D_P P,   D_P B = F2 D_P + F1* D_P P,
/// which characterize the fundamental operators among operators on ran(D_P).
inline std::pair<double, double> verify_defect_action(const OperatorTriple& t,
                                                      const DefectSpace& dp,
                                                      const FundamentalPair& f) {
  const ComplexMatrix f1 = lift(dp, f.f1), f2 = lift(dp, f.f2);
  const ComplexMatrix& d = dp.defect;
  const double r1 = operator_norm(d * t.a - f1 * d - f2.adjoint() * d * t.p);
  const double r2 = operator_norm(d * t.b - f2 * d - f1.adjoint() * d * t.p);
  return {r1, r2};
}

/// Residuals of the link P F_i = G_i* P on ran(D_P), the relation tying the
/// fundamental pair of the triple to that of its adjoint.
inline std::pair<double, double> verify_adjoint_link(const OperatorTriple& t,
                                                     const DefectSpace& dp,
                                                     const DefectSpace& dps,
                                                     const FundamentalPair& f,
                                                     const FundamentalPair& g) {
  const ComplexMatrix proj = dp.embed * dp.embed.adjoint();
  const ComplexMatrix f1 = lift(dp, f.f1), f2 = lift(dp, f.f2);
  const ComplexMatrix g1 = lift(dps, g.f1), g2 = lift(dps, g.f2);
  const double r1 = operator_norm(t.p * f1 - g1.adjoint() * t.p * proj);
  const double r2 = operator_norm(t.p * f2 - g2.adjoint() * t.p * proj);
  return {r1, r2};
}

/// Residuals of the transport identities on ran(D_P):
///   D_P F1 = (A D_P - D_{P*} G2 P)|,   D_P F2 = (B D_P - D_{P*} G1 P)|.
inline std::pair<double, double> verify_defect_transport(const OperatorTriple& t,
                                                         const DefectSpace& dp,
                                                         const DefectSpace& dps,
                                                         const FundamentalPair& f,
                                                         const FundamentalPair& g) {
  const ComplexMatrix proj = dp.embed * dp.embed.adjoint();
  const ComplexMatrix f1 = lift(dp, f.f1), f2 = lift(dp, f.f2);
  const ComplexMatrix g1 = lift(dps, g.f1), g2 = lift(dps, g.f2);
  const double r1 =
      operator_norm((dp.defect * f1 - t.a * dp.defect + dps.defect * g2 * t.p) * proj);
  const double r2 =
      operator_norm((dp.defect * f2 - t.b * dp.defect + dps.defect * g1 * t.p) * proj);
  return {r1, r2};
}

/// Residuals of the cross-defect identities on ran(D_{P*}):
///   F1* D_P D_{P*} - F2 P* = D_P D_{P*} G1 - P* G2*,
///   F2* D_P D_{P*} - F1 P* = D_P D_{P*} G2 - P* G1*.
inline std::pair<double, double> verify_cross_defect_link(const OperatorTriple& t,
                                                          const DefectSpace& dp,
                                                          const DefectSpace& dps,
                                                          const FundamentalPair& f,
                                                          const FundamentalPair& g) {
  const ComplexMatrix proj = dps.embed * dps.embed.adjoint();
  const ComplexMatrix f1 = lift(dp, f.f1), f2 = lift(dp, f.f2);
  const ComplexMatrix g1 = lift(dps, g.f1), g2 = lift(dps, g.f2);
  const ComplexMatrix dd = dp.defect * dps.defect;
  const ComplexMatrix ps = t.p.adjoint();
  const double r1 = operator_norm(
      (f1.adjoint() * dd - f2 * ps - dd * g1 + ps * g2.adjoint()) * proj);
  const double r2 = operator_norm(
      (f2.adjoint() * dd - f1 * ps - dd * g2 + ps * g1.adjoint()) * proj);
  return {r1, r2};
}

/// Commutation defects of a fundamental pair: the norm of [F1, F2] and the
/// gap between the self-commutators [F1, F1*] and [F2, F2*]. Both vanish
/// exactly when the pair admits the unitary dilation construction.
struct PairCondition {
  double commutator = 0.0;
  double selfcommutator_gap = 0.0;
};

inline PairCondition commutation_defects(const FundamentalPair& pair) {
  PairCondition c;
  c.commutator = operator_norm(pair.f1 * pair.f2 - pair.f2 * pair.f1);
  const ComplexMatrix s1 = pair.f1 * pair.f1.adjoint() - pair.f1.adjoint() * pair.f1;
  const ComplexMatrix s2 = pair.f2 * pair.f2.adjoint() - pair.f2.adjoint() * pair.f2;
  c.selfcommutator_gap = operator_norm(s1 - s2);
  return c;
}

/// Tests the equivalence "F-pair satisfies the commutation condition iff
/// the G-pair does". Each side is classified pass (defect <= tol), fail
/// (defect > 10 tol) or inconclusive (the dead zone in between); the
/// equivalence verdict is inconclusive unless both sides are classified,
/// and fails only when the two sides are classified oppositely.
inline VerificationReport check_adjoint_pair_equivalence(const FundamentalPair& f,
                                                         const FundamentalPair& g,
                                                         double tol = 1e-9) {
  auto classify = [&](const PairCondition& c) {
    const double defect = std::max(c.commutator, c.selfcommutator_gap);
    if (defect <= tol) return std::pair<Verdict, double>{Verdict::pass, defect};
    if (defect > 10.0 * tol) return std::pair<Verdict, double>{Verdict::fail, defect};
    return std::pair<Verdict, double>{Verdict::inconclusive, defect};
  };
  const auto [fv, fd] = classify(commutation_defects(f));
  const auto [gv, gd] = classify(commutation_defects(g));

  VerificationReport report;
  report.record_verdict("f-pair-condition", fv, fd, tol);
  report.record_verdict("g-pair-condition", gv, gd, tol);
  if (fv == Verdict::inconclusive || gv == Verdict::inconclusive)
    report.record_verdict("equivalence", Verdict::inconclusive, 0.0, 0.0,
                          "a side landed in the dead zone");
  else if (fv == gv)
    report.record_verdict("equivalence", Verdict::pass, 0.0, 0.0);
  else
    report.record_verdict("equivalence", Verdict::fail, 1.0, 0.0, "sides disagree");
  return report;
}

/// Certifies the numerical radius bounds w(F1 + z F2) <= 1 and
/// w(G2 + z G1*) <= 1 over a grid of unimodular z. These bounds are what
/// membership of the triple in the tetrablock contractions buys.
inline VerificationReport radius_certificates(const FundamentalPair& f, const FundamentalPair& g,
                                              int z_samples = 16, double tol = 1e-9,
                                              int angular_grid = 720) {
  if (z_samples < 1) throw std::invalid_argument("radius_certificates: z_samples >= 1");
  double wf = 0.0, wg = 0.0;
  for (int k = 0; k < z_samples; ++k) {
    const Complex z = std::polar(1.0, 2.0 * M_PI * k / z_samples);
    wf = std::max(wf, numerical_radius(ComplexMatrix(f.f1 + z * f.f2), angular_grid));
    wg = std::max(wg, numerical_radius(ComplexMatrix(g.f2 + z * g.f1.adjoint()), angular_grid));
  }
  VerificationReport report;
  report.record("f-family", wf, 1.0 + tol);
  report.record("g-family", wg, 1.0 + tol);
  return report;
}

}  // namespace tetra
