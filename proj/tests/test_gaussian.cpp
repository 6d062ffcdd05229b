#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "lgqs/errors.hpp"
#include "lgqs/gaussian.hpp"

using namespace lgqs;
using namespace lgqs::test;

TEST_SUITE("gaussian") {

TEST_CASE("symplectic form is antisymmetric and squares to -I") {
  for (int n : {1, 2, 3}) {
    const Mat s = symplectic_form(n);
    CHECK((s.transpose() + s).norm() == 0.0);
    CHECK((s * s + Mat::Identity(2 * n, 2 * n)).norm() == 0.0);
  }
  const Mat S = channel_symplectic(2);
  CHECK((S * S + Mat::Identity(4, 4)).norm() == 0.0);
  CHECK(S(0, 2) == 1.0);
  CHECK(S(2, 0) == -1.0);
}

TEST_CASE("purity of reference states") {
  for (double hbar : {0.5, 1.0, 2.0}) CHECK(purity(state_with(0.5 * hbar * Mat::Identity(2, 2), hbar)) == doctest::Approx(1.0));
  CHECK(purity(state_with(diag({10.0, 0.5}))) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(purity(state_with(diag({2.0, 2.0}))) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("purity of the vacuum is one for several modes") {
  for (int n : {1, 2, 3}) CHECK(purity(state_with(Mat::Identity(2 * n, 2 * n))) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("purity rejects singular covariance") {
  CHECK_THROWS_AS(purity(state_with(diag({1.0, 0.0}))), DomainError);
}

TEST_CASE("shur check at and below the bound") {
  const double hbar = 2.0;
  ShurReport r = shur_check(state_with(0.5 * hbar * Mat::Identity(2, 2)));
  CHECK(r.valid);
  CHECK(r.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));

  r = shur_check(state_with(0.25 * hbar * Mat::Identity(2, 2)));
  CHECK_FALSE(r.valid);
  CHECK(r.min_eigenvalue == doctest::Approx(-hbar / 4).epsilon(1e-12));

  CHECK(shur_check(state_with(diag({10.0, 0.5}))).valid);
}

TEST_CASE("valid states have purity at most one") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> modes(1, 3);
  std::uniform_real_distribution<double> hb(0.5, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double hbar = hb(rng);
    const int n = modes(rng);
    const GaussianState s = state_with(random_quantum_cov(rng, n, hbar), hbar);
    REQUIRE(shur_check(s).valid);
    CHECK(purity(s) <= 1.0 + 1e-9);
  }
}

TEST_CASE("gaussian multiply") {
  const Mat I = Mat::Identity(2, 2);
  Moments m = gaussian_multiply(Vec::Zero(2), I, Vec::Zero(2), I);
  CHECK((m.cov - 0.5 * I).norm() < 1e-14);
  CHECK(m.mean.norm() == 0.0);

  // Hand oracle: V1^-1 = diag(1, 1/2), V2^-1 = diag(1/2, 1), sum diag(3/2, 3/2).
  m = gaussian_multiply(vec2(1, 0), diag({1, 2}), vec2(0, 1), diag({2, 1}));
  CHECK((m.cov - diag({2.0 / 3, 2.0 / 3})).norm() < 1e-14);
  CHECK(m.mean(0) == doctest::Approx(2.0 / 3));
  CHECK(m.mean(1) == doctest::Approx(2.0 / 3));

  CHECK_THROWS_AS(gaussian_multiply(Vec::Zero(2), diag({1, 0}), Vec::Zero(2), I), DomainError);
}

TEST_CASE("multiplying by an uninformative factor is the identity") {
  const Mat v = mat2(2.0, 0.3, 0.3, 0.7);
  const Vec mu = vec2(0.4, -1.2);
  const Moments m = gaussian_multiply_info(mu, v, Vec::Zero(2), Mat::Zero(2, 2));
  CHECK((m.cov - v).norm() < 1e-14);
  CHECK((m.mean - mu).norm() < 1e-14);

  // Multiply then convolve is not the identity.
  const Moments p = gaussian_multiply(mu, v, mu, v);
  const Moments c = gaussian_convolve(p.mean, p.cov, mu, v);
  CHECK((c.cov - v).norm() > 0.1);
}

TEST_CASE("gaussian convolve") {
  const Mat v = mat2(1.0, 0.2, 0.2, 3.0);
  Moments c = gaussian_convolve(Vec::Zero(2), v, Vec::Zero(2), Mat::Zero(2, 2));
  CHECK((c.cov - v).norm() == 0.0);
  c = gaussian_convolve(vec2(1, 2), v, vec2(-3, 1), 2.0 * v);
  CHECK((c.mean - vec2(-2, 3)).norm() == 0.0);
  CHECK((c.cov - 3.0 * v).norm() < 1e-15);
}

TEST_CASE("psd_leq examples") {
  const Mat I = Mat::Identity(2, 2);
  CHECK(psd_leq(I, I));
  CHECK(psd_leq(I, 2.0 * I));
  CHECK_FALSE(psd_leq(diag({2.0, 0.5}), I));
}

TEST_CASE("psd_leq is a partial order") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const Mat a = random_spd(rng, 3);
    const Mat b = a + random_spd(rng, 3, 0.0);
    const Mat c = b + random_spd(rng, 3, 0.0);
    CHECK(psd_leq(a, a));
    CHECK(psd_leq(a, b));
    CHECK(psd_leq(b, c));
    CHECK(psd_leq(a, c));
    if (psd_leq(b, a)) CHECK((a - b).norm() < 1e-6);
  }
}

TEST_CASE("validate rejects asymmetric and indefinite covariance") {
  CHECK_NOTHROW(validate(state_with(Mat::Identity(2, 2))));
  CHECK_THROWS_AS(validate(state_with(mat2(1, 0.5, 0, 1))), DomainError);
  CHECK_THROWS_AS(validate(state_with(diag({1.0, -0.1}))), DomainError);
}

}
