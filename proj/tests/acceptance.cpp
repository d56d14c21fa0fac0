#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "tetra/generators.hpp"
#include "tetra/suite.hpp"
#include "tetra/verify.hpp"

using namespace tetra;

namespace {

struct CorpusEntry {
  std::string family;
  OperatorTriple triple;
  FundamentalData data;
  UnitaryDilation dil;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TetraPoint random_bE_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Complex x2 = std::polar(u(rng), 2.0 * M_PI * u(rng));
  const Complex x3 = std::polar(1.0, 2.0 * M_PI * u(rng));
  return TetraPoint{std::conj(x2) * x3, x2, x3};
}

/// 50 instances of each generated family, with fundamental data and the
/// unitary dilation attached. Built once and shared by the criteria.
const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    std::mt19937_64 rng(9001);

    auto add = [&](const std::string& family, OperatorTriple t) {
      CorpusEntry e;
      e.family = family;
      e.triple = std::move(t);
      e.data = analyze_triple(e.triple, 1e-9, 1e-10, 256);
      e.dil = build_unitary_dilation(e.data);
      out.push_back(std::move(e));
    };

    for (int i = 0; i < 50; ++i) add("scalar", generate_scalar_instance(random_interior_point(rng)));

    for (int i = 0; i < 50; ++i) {
      std::vector<TetraPoint> pts;
      const int n = 2 + static_cast<int>(rng() % 4);
      for (int k = 0; k < n; ++k) pts.push_back(random_interior_point(rng));
      if (i % 3 == 0) pts.push_back(random_bE_point(rng));
      add("diagonal", generate_diagonal_instance(pts));
    }

    for (int i = 0; i < 50; ++i)
      add("unitary", generate_tetrablock_unitary(1 + static_cast<int>(rng() % 6), rng()));

    for (int i = 0; i < 50; ++i) {
      const int dim = 1 + static_cast<int>(rng() % 2);
      const int levels = 2 + static_cast<int>(rng() % 3);
      add("compressed", random_compressed_instance(dim, levels, rng()));
    }
    return out;
  }();
  return entries;
}

void announce(int index, const std::string& label, bool ok) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << index << ": " << label << std::endl;
}

}  // namespace

TEST_CASE("criterion 1: fundamental equation residuals across four families") {
  std::vector<OperatorTriple> triples;
  for (const CorpusEntry& e : corpus()) triples.push_back(e.triple);

  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const OperatorTriple& t : triples) {
    const DefectSpace dp = defect_operator(t.p, 1e-10);
    const DefectSpace dps = defect_operator(ComplexMatrix(t.p.adjoint()), 1e-10);
    const FundamentalPair f = solve_fundamental_on(t, dp, 1e-9, 64);
    const FundamentalPair g = solve_fundamental_on(adjoint_triple(t), dps, 1e-9, 64);

    const ComplexMatrix f1 = lift(dp, f.f1), f2 = lift(dp, f.f2);
    const ComplexMatrix g1 = lift(dps, g.f1), g2 = lift(dps, g.f2);
    const double scale = std::max(1.0, operator_norm(t.a) + operator_norm(t.b));
    const double res = std::max(
        {operator_norm(t.a - t.b.adjoint() * t.p - dp.defect * f1 * dp.defect),
         operator_norm(t.b - t.a.adjoint() * t.p - dp.defect * f2 * dp.defect),
         operator_norm(t.a.adjoint() - t.b * t.p.adjoint() - dps.defect * g1 * dps.defect),
         operator_norm(t.b.adjoint() - t.a * t.p.adjoint() - dps.defect * g2 * dps.defect)});
    worst = std::max(worst, res / scale);
  }
  const double elapsed = seconds_since(start);

  const bool ok = worst <= 1e-9 && elapsed < 5.0;
  announce(1, "all four equation residuals at most 1e-9 on 50 instances per family, solved in " +
                  std::to_string(elapsed) + " s",
           ok);
  INFO("worst relative residual " << worst << ", elapsed " << elapsed << " s");
  REQUIRE(worst <= 1e-9);
  REQUIRE(elapsed < 5.0);
}

TEST_CASE("criterion 2: identity chain and pair-condition equivalence") {
  double worst = 0.0;
  int disagreements = 0;
  for (const CorpusEntry& e : corpus()) {
    const OperatorTriple& t = e.triple;
    const FundamentalData& d = e.data;
    const double scale = std::max(1.0, operator_norm(t.a) + operator_norm(t.b));

    const auto [a1, a2] = verify_defect_action(t, d.dp, d.f);
    const auto [l1, l2] = verify_adjoint_link(t, d.dp, d.dps, d.f, d.g);
    const auto [t1, t2] = verify_defect_transport(t, d.dp, d.dps, d.f, d.g);
    const auto [c1, c2] = verify_cross_defect_link(t, d.dp, d.dps, d.f, d.g);
    worst = std::max(worst, std::max({a1, a2, l1, l2, t1, t2, c1, c2}) / scale);

    const VerificationReport eq = check_adjoint_pair_equivalence(d.f, d.g, 1e-9);
    if (eq.at("equivalence").verdict == Verdict::fail) ++disagreements;
  }

  const bool ok = worst <= 1e-9 && disagreements == 0;
  announce(2, "defect-action, adjoint-link, transport and cross-defect residuals at most 1e-9, "
              "equivalence verdicts agree on all 200 instances",
           ok);
  INFO("worst relative residual " << worst << ", disagreements " << disagreements);
  REQUIRE(worst <= 1e-9);
  REQUIRE(disagreements == 0);
}

TEST_CASE("criterion 3: dilation equality and unitary triple relations") {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string first_failure;
  for (const CorpusEntry& e : corpus()) {
    const VerificationReport eq = verify_dilation_equality(e.dil, 4, 1e-9);
    const VerificationReport rel = verify_unitary_triple_conditions(e.dil, 200, 1e-9, 11, 1e-12);
    if (!eq.all_passed() || !rel.all_passed()) {
      ok = false;
      if (first_failure.empty())
        first_failure = e.family + ": " + eq.to_text() + "\n" + rel.to_text();
    }
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 30.0;

  announce(3, "compressions match all words of degree at most 4 within 1e-9, U unitary within "
              "1e-12, operator relations within 1e-9 over 200 samples, verified in " +
                  std::to_string(elapsed) + " s",
           ok);
  INFO(first_failure);
  INFO("elapsed " << elapsed << " s");
  REQUIRE(ok);
}

TEST_CASE("criterion 4: exchange and block commutation identities") {
  bool ok = true;
  std::string first_failure;
  for (const CorpusEntry& e : corpus()) {
    const VerificationReport r = verify_block_commutation_identities(e.dil, 1e-9);
    if (!r.all_passed()) {
      ok = false;
      if (first_failure.empty()) first_failure = e.family + ": " + r.to_text();
    }
  }
  announce(4, "exchange identities and the commutation of R1, R2 with U hold within 1e-9 on "
              "every instance",
           ok);
  INFO(first_failure);
  REQUIRE(ok);
}

TEST_CASE("criterion 5: uniqueness reconstruction and perturbation detection") {
  bool reconstruction_ok = true;
  std::string first_failure;
  for (const CorpusEntry& e : corpus()) {
    const VerificationReport r = reconstruct_uniqueness(e.dil, 1e-9, 6);
    if (!r.all_passed()) {
      reconstruction_ok = false;
      if (first_failure.empty()) first_failure = e.family + ": " + r.to_text();
    }
  }

  const UnitaryDilation probe = build_unitary_dilation(analyze_triple(random_compressed_instance(2, 3, 5)));
  const DilationBlocks& blk = *probe.blocks;
  const R1Block slots[8] = {R1Block::corner,    R1Block::couple, R1Block::diag,
                            R1Block::sub,       R1Block::mix_h,  R1Block::mix_t,
                            R1Block::tail_diag, R1Block::tail_super};
  auto block_of = [&](R1Block slot) -> const ComplexMatrix& {
    switch (slot) {
      case R1Block::corner: return blk.v1_corner;
      case R1Block::couple: return blk.v1_couple;
      case R1Block::diag: return blk.v1_diag;
      case R1Block::sub: return blk.v1_sub;
      case R1Block::mix_h: return blk.c1_h;
      case R1Block::mix_t: return blk.c1_t;
      case R1Block::tail_diag: return blk.d1_diag;
      case R1Block::tail_super: return blk.d1_super;
    }
    return blk.v1_corner;
  };

  std::mt19937_64 rng(1234);
  int detected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const R1Block slot = slots[trial % 8];
    const ComplexMatrix& shape = block_of(slot);
    ComplexMatrix delta = random_complex_matrix(shape.rows(), shape.cols(), rng);
    delta *= 1e-3 / operator_norm(delta);
    if (perturbation_detector_residual(perturbed_r1(probe, slot, delta), probe) > 1e-6)
      ++detected;
  }

  const bool ok = reconstruction_ok && detected == 100;
  announce(5, "coupling and tail blocks reconstructed within 1e-9 on tail positions 0..5, and " +
                  std::to_string(detected) + "/100 single-block 1e-3 perturbations detected",
           ok);
  INFO(first_failure);
  INFO("detected " << detected << " of 100");
  REQUIRE(reconstruction_ok);
  REQUIRE(detected == 100);
}

TEST_CASE("criterion 6: membership cross-check and a known numerical radius") {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int disagreements = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const TetraPoint p{Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
    const MembershipVerdict fast = point_in_closure(p, 1e-6);
    const MembershipVerdict slow = brute_force_membership(p, 200, 1e-6);
    if (fast.in_closure != slow.in_closure) ++disagreements;
  }

  ComplexMatrix nil = ComplexMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const double w = numerical_radius(nil);
  const bool radius_ok = std::abs(w - 0.5) <= 1e-6;

  const bool ok = disagreements == 0 && radius_ok;
  announce(6, "closed form agrees with brute-force membership on 10000 random points, and the "
              "rank-one nilpotent has numerical radius 0.5 within 1e-6",
           ok);
  INFO("disagreements " << disagreements << ", radius " << w);
  REQUIRE(disagreements == 0);
  REQUIRE(radius_ok);
}

TEST_CASE("criterion 7: triangular zeros, block recipe, and minimal window rank") {
  bool ok = true;
  std::string first_failure;
  for (const CorpusEntry& e : corpus()) {
    const VerificationReport tri = verify_triangular_structure(e.dil);
    const VerificationReport rec = verify_schaffer_structure(e.dil);
    const VerificationReport mini = minimality_rank_check(e.dil, 4);
    if (!tri.all_passed() || !rec.all_passed() || !mini.all_passed()) {
      ok = false;
      if (first_failure.empty())
        first_failure =
            e.family + ": " + tri.to_text() + "\n" + rec.to_text() + "\n" + mini.to_text();
    }
  }
  announce(7, "lower-triangular blocks vanish within 1e-14, the unitary follows its block recipe "
              "within 1e-12, and the depth-4 orbit rank is minimal within the edge slack",
           ok);
  INFO(first_failure);
  REQUIRE(ok);
}
