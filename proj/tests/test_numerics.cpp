#include <cmath>
#include <limits>

#include "doctest.h"
#include "grassrelay/numerics.hpp"

using namespace grassrelay;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = a;
  h(1, 1) = b;
  return h;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  RngStream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("rng fork gives distinct reproducible children") {
  const RngStream parent(5, 0);
  RngStream x = parent.fork(1), y = parent.fork(1), z = parent.fork(2);
  CHECK(x() == y());
  CHECK(x() != z());
}

TEST_CASE("complex gaussian has unit power and half variance per part") {
  RngStream rng(11, 0);
  const int count = 100000;
  double power = 0.0, re2 = 0.0, im2 = 0.0, mean_re = 0.0;
  for (int i = 0; i < count; ++i) {
    const Complex z = rng.complex_gaussian();
    power += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    mean_re += z.real();
  }
  CHECK(power / count == doctest::Approx(1.0).epsilon(0.02));
  CHECK(re2 / count == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im2 / count == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(mean_re / count) < 0.01);
}

TEST_CASE("svd of identity and diagonal matrices") {
  const SvdFactors id = svd(ComplexMatrix::Identity(2, 2));
  CHECK(id.singulars[0] == doctest::Approx(1.0));
  CHECK(id.singulars[1] == doctest::Approx(1.0));

  const SvdFactors f = svd(diag2(3.0, 0.0));
  CHECK(f.singulars[0] == doctest::Approx(3.0));
  CHECK(f.singulars[1] == doctest::Approx(0.0));
  CHECK(std::abs(f.right(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(f.right(1, 1)) == doctest::Approx(1.0));
  CHECK(f.rank() == 1);
}

TEST_CASE("svd rejects non-finite and empty input") {
  ComplexMatrix h = ComplexMatrix::Identity(2, 2);
  h(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_WITH_AS(svd(h), doctest::Contains("non-finite matrix"), NumericError);
  h(0, 1) = Complex(0.0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(svd(h), NumericError);
  CHECK_THROWS_AS(svd(ComplexMatrix(0, 0)), NumericError);
}

TEST_CASE("svd factors are unitary, sorted and reconstruct the input") {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int p = 1 + trial % 4, q = 1 + (trial / 4) % 4;
    const ComplexMatrix h = sample_complex_gaussian_matrix(rng, p, q);
    const SvdFactors f = svd(h);
    REQUIRE(f.left.rows() == p);
    REQUIRE(f.right.rows() == q);
    REQUIRE(f.singulars.size() == std::min(p, q));
    CHECK(unitarity_error(f.left) <= 1e-10);
    CHECK(unitarity_error(f.right) <= 1e-10);
    for (Eigen::Index i = 0; i + 1 < f.singulars.size(); ++i)
      CHECK(f.singulars[i] >= f.singulars[i + 1]);
    CHECK(f.singulars.minCoeff() >= 0.0);
    CHECK((f.reconstruct() - h).norm() <= 1e-9 * h.norm());
  }
}

TEST_CASE("svd reconstructs a random 3x2 matrix") {
  RngStream rng(4, 0);
  const ComplexMatrix h = sample_complex_gaussian_matrix(rng, 3, 2);
  const SvdFactors f = svd(h);
  CHECK((f.reconstruct() - h).norm() / h.norm() <= 1e-9);
}

TEST_CASE("largest singular value dominates random unit-vector gains") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = sample_complex_gaussian_matrix(rng, 3, 3);
    const SvdFactors f = svd(h);
    const double top = f.singulars[0];
    CHECK((h * f.right.col(0)).norm() == doctest::Approx(top).epsilon(1e-12));
    double best = 0.0;
    for (int k = 0; k < 10000; ++k) best = std::max(best, (h * sample_unit_vector(rng, 3)).norm());
    CHECK(best <= top + 1e-8);
    CHECK(best >= 0.9 * top);
  }
}

TEST_CASE("gaussian matrices follow the energy identity") {
  for (auto [p, q] : {std::pair{3, 3}, std::pair{2, 2}, std::pair{2, 3}}) {
    RngStream rng(6, static_cast<std::uint64_t>(p * 10 + q));
    const int samples = 100000;
    double energy = 0.0, sigma_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
      const ComplexMatrix h = sample_complex_gaussian_matrix(rng, p, q);
      energy += h.squaredNorm();
      if (i < 20000) sigma_sq += svd(h).singulars.squaredNorm();
    }
    CHECK(energy / samples == doctest::Approx(p * q).epsilon(0.02));
    CHECK(sigma_sq / 20000 == doctest::Approx(p * q).epsilon(0.02));
  }
  RngStream rng(6, 33);
  double sigma_sq = 0.0;
  for (int i = 0; i < 100000; ++i)
    sigma_sq += svd(sample_complex_gaussian_matrix(rng, 3, 3)).singulars.squaredNorm();
  CHECK(std::abs(sigma_sq / 100000 - 9.0) <= 0.1);
}

TEST_CASE("sampling is deterministic per stream") {
  RngStream a(9, 2), b(9, 2);
  CHECK(sample_complex_gaussian_matrix(a, 3, 3) == sample_complex_gaussian_matrix(b, 3, 3));
}

TEST_CASE("canonical phase") {
  ComplexVector v(2);
  v << Complex(0, 1), 0;
  const ComplexVector c = canonical_phase(v);
  CHECK(std::abs(c[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);
  CHECK(canonical_phase(c) == c);

  ComplexVector lead_zero(3);
  lead_zero << 0, Complex(0, -2), 1;
  const ComplexVector lz = canonical_phase(lead_zero);
  CHECK(lz[1].imag() == doctest::Approx(0.0));
  CHECK(lz[1].real() > 0.0);

  RngStream rng(10, 0);
  for (int i = 0; i < 100; ++i) {
    const ComplexVector s = sample_unit_vector(rng, 3);
    const ComplexVector t = canonical_phase(s);
    CHECK(std::abs(t.dot(s)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((canonical_phase(t) - t).norm() < 1e-15);
  }
  CHECK_THROWS_AS(canonical_phase(ComplexVector::Zero(2)), NumericError);
}

TEST_CASE("haar unitary and unit vectors") {
  RngStream rng(12, 0);
  for (int i = 0; i < 50; ++i) {
    CHECK(unitarity_error(sample_unitary(rng, 3)) < 1e-12);
    CHECK(sample_unit_vector(rng, 4).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(normalized(ComplexVector::Zero(3)), NumericError);
}

TEST_CASE("fnv1a hashing") {
  // Published FNV-1a 64-bit test vectors.
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
