#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tetra/linalg.hpp"

using namespace tetra;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ComplexMatrix random_contraction(Eigen::Index n, std::mt19937_64& rng, double radius) {
  ComplexMatrix g = random_complex_matrix(n, n, rng);
  const double nm = operator_norm(g);
  if (nm > 0.0) g *= radius / nm;
  return g;
}

/// Independent largest-singular-value estimate: power iteration on M*M.
/// Every iterate is a certified lower bound of the true norm.
double power_iteration_norm(const ComplexMatrix& m, int iters) {
  const ComplexMatrix gram = m.adjoint() * m;
  std::mt19937_64 rng(987654321);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    ComplexVector w = gram * v;
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

/// Independent numerical-radius estimate: a dense uniform angle sweep of
/// the largest eigenvalue of the rotated Hermitian part, evaluated with a
/// plain eigensolver call.
double dense_sweep_radius(const ComplexMatrix& m, int angles) {
  double best = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double theta = 2.0 * M_PI * k / angles;
    const Complex phase = std::polar(1.0, theta);
    const ComplexMatrix h = 0.5 * (phase * m + std::conj(phase) * ComplexMatrix(m.adjoint()));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

}  // namespace

TEST_CASE("operator norm on known matrices") {
  REQUIRE(operator_norm(ComplexMatrix::Identity(3, 3)) == Catch::Approx(1.0).margin(1e-14));
  REQUIRE(operator_norm(mat2(0, 1, 0, 0)) == Catch::Approx(1.0).margin(1e-14));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = Complex(0.0, 3.0);
  d(1, 1) = Complex(-4.0, 0.0);
  REQUIRE(operator_norm(d) == Catch::Approx(4.0).margin(1e-13));
  REQUIRE(operator_norm(ComplexMatrix(0, 0)) == 0.0);
  REQUIRE(operator_norm(ComplexMatrix::Zero(3, 0)) == 0.0);

  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  REQUIRE_THROWS_AS(operator_norm(bad), std::invalid_argument);
}

TEST_CASE("operator norm matches the power-iteration oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    const ComplexMatrix m = random_complex_matrix(5, 5, rng);
    const double value = operator_norm(m);
    const double oracle = power_iteration_norm(m, 8000);
    REQUIRE(value >= oracle - 1e-12 * std::max(1.0, value));
    REQUIRE(value - oracle <= 1e-10 * std::max(1.0, value));
  }
}

TEST_CASE("operator norm is adjoint invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = random_complex_matrix(6, 6, rng);
    const double n1 = operator_norm(m);
    const double n2 = operator_norm(ComplexMatrix(m.adjoint()));
    REQUIRE(std::abs(n1 - n2) <= 1e-12 * std::max(1.0, n1));
  }
}

TEST_CASE("golden section finds the peak of a smooth bump") {
  const double peak = detail::golden_max([](double t) { return std::sin(t); }, 0.0, M_PI);
  REQUIRE(peak == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("numerical radius on known matrices") {
  REQUIRE(numerical_radius(ComplexMatrix::Zero(3, 3)) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(numerical_radius(ComplexMatrix(0, 0)) == 0.0);

  // Rank-one nilpotent: the numerical range is the disc of radius 1/2.
  REQUIRE(numerical_radius(mat2(0, 1, 0, 0)) == Catch::Approx(0.5).margin(1e-9));

  // Nilpotent single-block triangular of size 3: radius cos(pi/4).
  ComplexMatrix j3 = ComplexMatrix::Zero(3, 3);
  j3(0, 1) = 1.0;
  j3(1, 2) = 1.0;
  REQUIRE(numerical_radius(j3) == Catch::Approx(std::cos(M_PI / 4.0)).margin(1e-9));

  // Identity plus nilpotent: the disc shifts to center 1.
  REQUIRE(numerical_radius(mat2(1, 0.6, 0, 1)) == Catch::Approx(1.3).margin(1e-9));

  // Normal matrix: radius equals the spectral radius.
  ComplexMatrix nrm = ComplexMatrix::Zero(2, 2);
  nrm(0, 0) = Complex(0.3, 0.4);
  nrm(1, 1) = Complex(-0.8, 0.0);
  REQUIRE(numerical_radius(nrm) == Catch::Approx(0.8).margin(1e-9));

  REQUIRE_THROWS_AS(numerical_radius(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
  REQUIRE_THROWS_AS(numerical_radius(ComplexMatrix::Zero(2, 2), 4), std::invalid_argument);
}

TEST_CASE("numerical radius of a Hermitian matrix equals its norm") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix g = random_complex_matrix(4, 4, rng);
    ComplexMatrix h = 0.5 * (g + g.adjoint());
    REQUIRE(std::abs(numerical_radius(h) - operator_norm(h)) <= 1e-8 * std::max(1.0, operator_norm(h)));
  }
}

TEST_CASE("numerical radius matches a dense angle sweep") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const ComplexMatrix m = random_complex_matrix(4, 4, rng);
    const double value = numerical_radius(m);
    const double oracle = dense_sweep_radius(m, 20001);
    REQUIRE(std::abs(value - oracle) <= 1e-6 * std::max(1.0, oracle));
  }
}

TEST_CASE("numerical radius scales homogeneously and brackets the norm") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const ComplexMatrix m = random_complex_matrix(3, 3, rng);
    const Complex c(0.7, -1.1);
    const double w = numerical_radius(m);
    const double wc = numerical_radius(ComplexMatrix(c * m));
    REQUIRE(std::abs(wc - std::abs(c) * w) <= 1e-6 * std::max(1.0, std::abs(c) * w));

    const double nm = operator_norm(m);
    REQUIRE(w <= nm + 1e-9 * std::max(1.0, nm));
    REQUIRE(nm <= 2.0 * w + 1e-6 * std::max(1.0, nm));
  }
}

TEST_CASE("defect operator of the zero contraction is the identity") {
  const DefectSpace space = defect_operator(ComplexMatrix::Zero(4, 4));
  REQUIRE(space.dim == 4);
  REQUIRE(operator_norm(space.defect - ComplexMatrix::Identity(4, 4)) <= 1e-13);
  REQUIRE(operator_norm(space.embed.adjoint() * space.embed - ComplexMatrix::Identity(4, 4)) <= 1e-13);
}

TEST_CASE("defect operator of a unitary vanishes") {
  std::mt19937_64 rng(3);
  const ComplexMatrix q = random_unitary(5, rng);
  const DefectSpace space = defect_operator(q);
  REQUIRE(space.dim == 0);
  REQUIRE(space.embed.rows() == 5);
  REQUIRE(space.embed.cols() == 0);
  REQUIRE(space.defect.isZero(1e-13));
}

TEST_CASE("defect operator of a real scalar contraction") {
  const DefectSpace space = defect_operator(ComplexMatrix::Constant(1, 1, 0.5));
  REQUIRE(space.dim == 1);
  REQUIRE(std::abs(space.defect(0, 0) - std::sqrt(0.75)) <= 1e-14);
  REQUIRE(std::abs(space.scale(0) - std::sqrt(0.75)) <= 1e-14);
}

TEST_CASE("defect operator rejects expansions") {
  REQUIRE_THROWS_AS(defect_operator(ComplexMatrix::Identity(2, 2) * 2.0), Error);
  REQUIRE_THROWS_AS(defect_operator(ComplexMatrix::Constant(1, 1, 1.5)), Error);
}

TEST_CASE("defect operator squares back to the Gram complement") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 6);
    const ComplexMatrix p = random_contraction(n, rng, 0.97);
    const DefectSpace space = defect_operator(p);
    const ComplexMatrix gram = ComplexMatrix::Identity(n, n) - p.adjoint() * p;
    REQUIRE(operator_norm(space.defect * space.defect - gram) <= 1e-10);
    REQUIRE(operator_norm(space.embed.adjoint() * space.embed -
                          ComplexMatrix::Identity(space.dim, space.dim)) <= 1e-12);

    // embed* D embed is the diagonal of defect singular values.
    ComplexMatrix diag = space.embed.adjoint() * space.defect * space.embed;
    for (int i = 0; i < space.dim; ++i) diag(i, i) -= space.scale(i);
    REQUIRE(operator_norm(diag) <= 1e-12);
  }
}

TEST_CASE("lift and compress are mutually inverse on defect coordinates") {
  std::mt19937_64 rng(29);
  const ComplexMatrix p = random_contraction(5, rng, 0.9);
  const DefectSpace space = defect_operator(p);
  const ComplexMatrix x = random_complex_matrix(space.dim, space.dim, rng);
  REQUIRE(operator_norm(compress(space, lift(space, x)) - x) <= 1e-13 * std::max(1.0, operator_norm(x)));
  REQUIRE_THROWS_AS(lift(space, ComplexMatrix::Zero(space.dim + 1, space.dim + 1)),
                    std::invalid_argument);
}

TEST_CASE("commutator residual on known pairs") {
  std::mt19937_64 rng(31);
  const ComplexMatrix x = random_complex_matrix(4, 4, rng);
  REQUIRE(commutator_residual(x, x) <= 1e-13 * std::max(1.0, operator_norm(x)));

  ComplexMatrix d1 = ComplexMatrix::Zero(3, 3), d2 = ComplexMatrix::Zero(3, 3);
  d1.diagonal() << Complex(1, 0), Complex(0, 2), Complex(-1, 1);
  d2.diagonal() << Complex(2, 0), Complex(1, -1), Complex(0, 0);
  REQUIRE(commutator_residual(d1, d2) <= 1e-14);

  const ComplexMatrix nil = mat2(0, 1, 0, 0);
  REQUIRE(commutator_residual(nil, ComplexMatrix(nil.adjoint())) == Catch::Approx(1.0).margin(1e-13));
  REQUIRE_THROWS_AS(commutator_residual(nil, ComplexMatrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("defect intertwining residuals vanish for contractions") {
  const auto [z1, z2] = intertwining_residuals(ComplexMatrix::Zero(3, 3));
  REQUIRE(z1 <= 1e-13);
  REQUIRE(z2 <= 1e-13);

  std::mt19937_64 rng(37);
  const auto [u1, u2] = intertwining_residuals(random_unitary(4, rng));
  REQUIRE(u1 <= 1e-12);
  REQUIRE(u2 <= 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 8);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const ComplexMatrix p = random_contraction(n, rng, uniform(rng));
    const auto [r1, r2] = intertwining_residuals(p);
    REQUIRE(r1 <= 1e-10);
    REQUIRE(r2 <= 1e-10);
  }
}

TEST_CASE("hermitian factorization reconstructs its input") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    ComplexMatrix g = random_complex_matrix(5, 5, rng);
    ComplexMatrix h = 0.5 * (g + g.adjoint());
    const SpectralFactorization sf = hermitian_factorization(h);
    const ComplexMatrix rebuilt = sf.eigenvectors *
                                  sf.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                                  sf.eigenvectors.adjoint();
    REQUIRE(operator_norm(rebuilt - h) <= 1e-12 * std::max(1.0, operator_norm(h)));
    REQUIRE(operator_norm(sf.eigenvectors.adjoint() * sf.eigenvectors -
                          ComplexMatrix::Identity(5, 5)) <= 1e-12);
  }
}

TEST_CASE("simultaneous diagonalization of commuting normals") {
  std::mt19937_64 rng(43);
  const Eigen::Index n = 5;
  const ComplexMatrix q = random_unitary(n, rng);
  ComplexVector l1(n), l2(n);
  // Repeated eigenvalues in each operator separately, split only jointly.
  l1 << Complex(1, 0), Complex(1, 0), Complex(2, 0), Complex(2, 0), Complex(0, 1);
  l2 << Complex(0, 1), Complex(3, 0), Complex(3, 0), Complex(1, 1), Complex(1, 1);
  const ComplexMatrix m1 = q * l1.asDiagonal() * q.adjoint();
  const ComplexMatrix m2 = q * l2.asDiagonal() * q.adjoint();

  const SimultaneousDiagonalization sd = simultaneous_diagonalization({m1, m2});
  REQUIRE(sd.offdiag_residual <= 1e-10);
  REQUIRE(operator_norm(sd.basis.adjoint() * sd.basis - ComplexMatrix::Identity(n, n)) <= 1e-12);

  // The recovered joint pairs must be a permutation of the constructed ones.
  std::vector<bool> used(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool matched = false;
    for (Eigen::Index j = 0; j < n && !matched; ++j) {
      if (used[j]) continue;
      if (std::abs(sd.diagonals[0](i) - l1(j)) <= 1e-8 &&
          std::abs(sd.diagonals[1](i) - l2(j)) <= 1e-8) {
        used[j] = true;
        matched = true;
      }
    }
    REQUIRE(matched);
  }

  REQUIRE_THROWS_AS(simultaneous_diagonalization({}), std::invalid_argument);
}

TEST_CASE("random unitary is unitary") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix q = random_unitary(4, rng);
    REQUIRE(operator_norm(q.adjoint() * q - ComplexMatrix::Identity(4, 4)) <= 1e-12);
    REQUIRE(operator_norm(q * q.adjoint() - ComplexMatrix::Identity(4, 4)) <= 1e-12);
  }
}
