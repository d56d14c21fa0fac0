#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tetra/generators.hpp"
#include "tetra/verify.hpp"

using namespace tetra;

namespace {

OperatorTriple scalar_triple(Complex a, Complex b, Complex p) {
  OperatorTriple t;
  t.a = ComplexMatrix::Constant(1, 1, a);
  t.b = ComplexMatrix::Constant(1, 1, b);
  t.p = ComplexMatrix::Constant(1, 1, p);
  return t;
}

UnitaryDilation dilation_of(const OperatorTriple& t) {
  return build_unitary_dilation(analyze_triple(t));
}

std::vector<OperatorTriple> verification_examples() {
  std::vector<OperatorTriple> out;
  out.push_back(scalar_triple(0.3, 0.4, 0.5));
  out.push_back(scalar_triple(0, 0, 0));
  out.push_back(scalar_triple(Complex(0.1, 0.2), Complex(-0.3, 0.1), Complex(0.2, -0.4)));
  out.push_back(generate_diagonal_instance(
      {{0.3, 0.4, 0.5}, {0.5, 0.5, 1.0}, {Complex(0, 0.2), 0.1, Complex(0, -0.3)}}));
  out.push_back(generate_tetrablock_unitary(3, 21));
  out.push_back(random_compressed_instance(2, 3, 5));
  return out;
}

}  // namespace

TEST_CASE("compressions of dilation words reproduce the triple") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = verify_dilation_equality(dil, 4);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
  }
  REQUIRE_THROWS_AS(verify_dilation_equality(dilation_of(scalar_triple(0, 0, 0)), 0),
                    std::invalid_argument);
}

TEST_CASE("scalar compression values match plain powers") {
  const UnitaryDilation dil = dilation_of(scalar_triple(0.3, 0.4, 0.5));
  const DilationBlocks& blk = *dil.blocks;
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n)
      for (int l = 0; l <= 2; ++l) {
        DilationVector v = basis_h(blk, 0);
        for (int i = 0; i < l; ++i) v = dil.u().apply(v);
        for (int i = 0; i < n; ++i) v = dil.r2().apply(v);
        for (int i = 0; i < m; ++i) v = dil.r1().apply(v);
        const Complex expected = std::pow(Complex(0.3), m) * std::pow(Complex(0.4), n) *
                                 std::pow(Complex(0.5), l);
        REQUIRE(std::abs(v.h(0) - expected) <= 1e-12);
      }
}

TEST_CASE("sampled operator relations of the unitary triple") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = verify_unitary_triple_conditions(dil, 100);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
    REQUIRE(r.at("u-unitary").threshold == 1e-12);
  }
}

TEST_CASE("the ambient unitary follows the block recipe") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = verify_schaffer_structure(dil);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
    REQUIRE(r.has("u-on-h"));
    REQUIRE(r.has("u-shift"));
    REQUIRE(r.has("u-adjoint-shift"));
  }
}

TEST_CASE("exchange identities between block rows") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = verify_block_commutation_identities(dil);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
    REQUIRE(r.has("exchange-ambient"));
    REQUIRE(r.has("block-commutation-r1-u"));
    REQUIRE(r.has("block-commutation-r2-u"));
  }
}

TEST_CASE("coupling and tail blocks are reconstructed from the unitary") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = reconstruct_uniqueness(dil, 1e-9, 6);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
  }
  REQUIRE_THROWS_AS(reconstruct_uniqueness(dilation_of(scalar_triple(0, 0, 0)), 1e-9, 0),
                    std::invalid_argument);
}

TEST_CASE("scalar coupling reconstruction matches hand arithmetic") {
  const UnitaryDilation dil = dilation_of(scalar_triple(0.3, 0.4, 0.0));
  const DilationBlocks& blk = *dil.blocks;

  // With P = 0 the first coupling block is D_{P*} G2 = 0.4 on H.
  const DilationVector b0 = basis_tail_pstar(blk, 0, 0);
  const DilationVector c3b = dil.op(OperatorKind::c3).apply(b0);
  const DilationVector lhs = dil.op(OperatorKind::v2).apply_adjoint(c3b);
  const ComplexVector ambient = lhs.h;
  REQUIRE(std::abs(ambient.norm() - 0.4) <= 1e-13);
  const DilationVector rhs = dil.op(OperatorKind::c1).apply(b0);
  REQUIRE((lhs - rhs).norm() <= 1e-13);
}

TEST_CASE("triangular structure with machine-precision zeros") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    const VerificationReport r = verify_triangular_structure(dil);
    INFO(r.to_text());
    REQUIRE(r.all_passed());
    REQUIRE(r.at("r1-h-from-tail").threshold == 1e-14);
  }
}

TEST_CASE("orbit rank certifies minimality of the window") {
  for (const OperatorTriple& t : verification_examples()) {
    const UnitaryDilation dil = dilation_of(t);
    for (int depth : {2, 3, 4}) {
      const VerificationReport r = minimality_rank_check(dil, depth);
      INFO(r.to_text());
      REQUIRE(r.all_passed());
    }
  }
  REQUIRE_THROWS_AS(minimality_rank_check(dilation_of(scalar_triple(0, 0, 0)), 0),
                    std::invalid_argument);
}

TEST_CASE("scalar shift orbit spans the whole window") {
  // For a scalar with P = 0 the ambient unitary is the bilateral shift, so
  // depth 3 orbits of the single H basis vector span 1 + 3 + 3 dimensions.
  const UnitaryDilation dil = dilation_of(scalar_triple(0.3, 0.4, 0.0));
  const VerificationReport r = minimality_rank_check(dil, 3);
  REQUIRE(r.all_passed());
  REQUIRE(r.at("minimal-orbit-rank").note.find("rank 7 of expected 7") != std::string::npos);
}

TEST_CASE("detector flags every corrupted block slot") {
  const UnitaryDilation dil = dilation_of(random_compressed_instance(2, 3, 11));
  REQUIRE(perturbation_detector_residual(dil.r1(), dil) <= 1e-10);

  std::mt19937_64 rng(2718);
  int detected = 0;
  const R1Block slots[8] = {R1Block::corner,  R1Block::couple,   R1Block::diag,
                            R1Block::sub,     R1Block::mix_h,    R1Block::mix_t,
                            R1Block::tail_diag, R1Block::tail_super};
  for (int trial = 0; trial < 40; ++trial) {
    const R1Block slot = slots[trial % 8];
    const DilationBlocks& b = *dil.blocks;
    const ComplexMatrix* shape = nullptr;
    switch (slot) {
      case R1Block::corner: shape = &b.v1_corner; break;
      case R1Block::couple: shape = &b.v1_couple; break;
      case R1Block::diag: shape = &b.v1_diag; break;
      case R1Block::sub: shape = &b.v1_sub; break;
      case R1Block::mix_h: shape = &b.c1_h; break;
      case R1Block::mix_t: shape = &b.c1_t; break;
      case R1Block::tail_diag: shape = &b.d1_diag; break;
      case R1Block::tail_super: shape = &b.d1_super; break;
    }
    ComplexMatrix delta = random_complex_matrix(shape->rows(), shape->cols(), rng);
    delta *= 1e-3 / operator_norm(delta);
    if (perturbation_detector_residual(perturbed_r1(dil, slot, delta), dil) > 1e-6) ++detected;
  }
  REQUIRE(detected == 40);
}
