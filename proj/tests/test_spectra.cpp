#include <doctest.h>

#include <cmath>

#include "locc/spectra.hpp"
#include "test_support.hpp"

using namespace locc;

namespace {

/// Moves mass from a smaller entry to a larger one: the result majorizes
/// the input. Used to build ordered chains for the preorder tests.
Spectrum purify(Rng& rng, const Spectrum& s) {
  std::vector<double> vals = s.values();
  if (vals.size() < 2) return s;
  std::uniform_int_distribution<std::size_t> pick_high(0, vals.size() - 2);
  const std::size_t hi = pick_high(rng);
  std::uniform_int_distribution<std::size_t> pick_low(hi + 1, vals.size() - 1);
  const std::size_t lo = pick_low(rng);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const double delta = frac(rng) * vals[lo];
  vals[lo] -= delta;
  vals[hi] += delta;
  return Spectrum(std::move(vals));
}

}  // namespace

TEST_CASE("spectrum construction sorts and snaps") {
  Spectrum s({0.1, 0.7, 0.2});
  CHECK(s.values() == std::vector<double>{0.7, 0.2, 0.1});

  Spectrum snapped({1.0, -1e-12});
  CHECK(snapped[1] == 0.0);

  // genuine negatives of general Hermitian operators are preserved
  Spectrum general({1.0, -1.0});
  CHECK(general[1] == -1.0);
  CHECK_FALSE(general.is_state());
  CHECK(Spectrum({0.5, 0.5}).is_state());
}

TEST_CASE("spectrum_of sorts descending with state clamping") {
  CHECK(spectrum_of(0.5 * ComplexMatrix::Identity(2, 2)).values() ==
        std::vector<double>{0.5, 0.5});

  // Bob's pre-measurement state at p = 0.1, closed form
  const double p = 0.1;
  ComplexMatrix bob(2, 2);
  bob << Complex(1.0 - 2.0 * p / 3.0), Complex(p / 3.0), Complex(p / 3.0), Complex(2.0 * p / 3.0);
  const double split = std::sqrt(1.0 - 4.0 / 3.0 * p * (2.0 - 5.0 / 3.0 * p));
  Spectrum s = spectrum_of(bob);
  CHECK(s[0] == doctest::Approx((1.0 + split) / 2.0).epsilon(1e-12));
  CHECK(s[0] == doctest::Approx(0.934614).epsilon(1e-5));
  CHECK(s[1] == doctest::Approx(0.065386).epsilon(1e-4));
}

TEST_CASE("majorization basics") {
  Spectrum pure({1.0, 0.0});
  Spectrum mixed({0.5, 0.5});
  Spectrum tilted({0.7, 0.3});
  CHECK(majorizes(pure, mixed));
  CHECK_FALSE(majorizes(mixed, tilted));
  CHECK(majorizes(tilted, tilted));
  CHECK(majorizes(Spectrum({0.6, 0.4}), Spectrum({0.6, 0.4})));

  // padding: a pure state of a smaller space still majorizes
  CHECK(majorizes(Spectrum({1.0}), Spectrum({0.5, 0.25, 0.25})));
  CHECK_FALSE(majorizes(Spectrum({0.5, 0.25, 0.25}), Spectrum({1.0})));
}

TEST_CASE("majorization is a preorder") {
  Rng rng(101);
  for (int t = 0; t < 50; ++t) {
    Spectrum c = random_state_spectrum(rng, 4);
    Spectrum b = purify(rng, c);
    Spectrum a = purify(rng, b);
    CHECK(majorizes(a, a));
    CHECK(majorizes(a, b));
    CHECK(majorizes(b, c));
    CHECK(majorizes(a, c));  // transitivity along the chain
  }
}

TEST_CASE("c-majorization algebra") {
  Spectrum a({0.6, 0.4});
  Spectrum b({0.9, 0.1});
  CHECK(c_majorizes(a, b, 0.7));
  CHECK_FALSE(c_majorizes(a, b, 0.8));

  Rng rng(103);
  for (int t = 0; t < 50; ++t) {
    Spectrum x = random_state_spectrum(rng, 3);
    Spectrum y = random_state_spectrum(rng, 3);
    CHECK(c_majorizes(x, y, 0.0));   // c <= 0 holds vacuously
    CHECK(c_majorizes(x, y, -0.4));
    CHECK(c_majorizes(x, y, 1.0) == majorizes(x, y));  // c = 1 is majorization
    // monotone in c
    if (c_majorizes(x, y, 0.8)) CHECK(c_majorizes(x, y, 0.5));
    // no state spectra are c-related for c meaningfully above 1: the full
    // prefix sum forces 1 >= 1 - 1 + c
    CHECK_FALSE(c_majorizes(x, y, 1.1));
  }
}

TEST_CASE("mix_spectra mixes componentwise after sorting") {
  Spectrum only({0.8, 0.2});
  CHECK(mix_spectra({{{1.0, only}}}).values() == only.values());

  // sorting precedes mixing: (0,1) sorts to (1,0)
  Spectrum s1({1.0, 0.0});
  Spectrum s2({0.0, 1.0});
  Spectrum mixed = mix_spectra({{{0.5, s1}, {0.5, s2}}});
  CHECK(mixed[0] == doctest::Approx(1.0));
  CHECK(mixed[1] == doctest::Approx(0.0));

  // measurement counterexample at p = 0.1: branch spectra mix to the
  // expected spectrum
  const double top = (1.0 + std::sqrt(5.0) / 3.0) / 2.0;
  Spectrum branch1({top, 1.0 - top});
  Spectrum branch2({1.0, 0.0});
  Spectrum expected = mix_spectra({{{0.1, branch1}, {0.9, branch2}}});
  CHECK(expected[0] == doctest::Approx(0.987268).epsilon(1e-5));
  CHECK(expected[1] == doctest::Approx(0.012732).epsilon(1e-4));

  CHECK_THROWS_AS(mix_spectra({{{0.5, s1}, {0.6, s2}}}), ContractError);
  CHECK_THROWS_AS(mix_spectra({{{-0.2, s1}, {1.2, s2}}}), ContractError);
}

TEST_CASE("mix_spectra prefix sums are weighted averages of input prefix sums") {
  Rng rng(107);
  for (int t = 0; t < 30; ++t) {
    Spectrum s1 = random_state_spectrum(rng, 4);
    Spectrum s2 = random_state_spectrum(rng, 4);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double w = frac(rng);
    Spectrum mixed = mix_spectra({{{w, s1}, {1.0 - w, s2}}});
    auto pm = mixed.prefix_sums(4);
    auto p1 = s1.prefix_sums(4);
    auto p2 = s2.prefix_sums(4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(pm[k] == doctest::Approx(w * p1[k] + (1.0 - w) * p2[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fan weights on a diagonal operator") {
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 0) = 3;
  a(1, 1) = 2;
  a(2, 2) = 1;
  ComplexMatrix top2 = ComplexMatrix::Identity(3, 3).leftCols(2);
  CHECK(fan_weight(a, top2) == doctest::Approx(5.0));
  ComplexMatrix bottom2 = ComplexMatrix::Identity(3, 3).rightCols(2);
  CHECK(fan_weight(a, bottom2) == doctest::Approx(3.0));

  ComplexMatrix not_orthonormal(3, 2);
  not_orthonormal << 1, 1, 0, 1, 0, 0;
  CHECK_THROWS_AS(fan_weight(a, not_orthonormal), ContractError);
}

TEST_CASE("fan weight is bounded by the top-q eigenvalue sum") {
  Rng rng(109);
  for (int t = 0; t < 60; ++t) {
    const int dim = 2 + static_cast<int>(t % 5);
    std::uniform_int_distribution<int> q_pick(1, dim);
    const int q = q_pick(rng);
    ComplexMatrix a = random_hermitian(rng, dim);
    Spectrum sp = spectrum_of(a);
    double top_q = 0.0;
    for (int k = 0; k < q; ++k) top_q += sp[static_cast<std::size_t>(k)];
    CHECK(fan_weight(a, random_q_basis(rng, dim, q)) <= top_q + 1e-9);
    // equality at the top-q eigenbasis (Eigen orders ascending)
    EigResult eig = hermitian_eig(a);
    CHECK(std::abs(fan_weight(a, eig.vectors.rightCols(q)) - top_q) <= 1e-9);
  }
}

TEST_CASE("spectrum subadditivity") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 1;
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 0) = 3;
  CHECK(check_subadditivity(a, b));  // commuting, equality case

  // a = diag(1,0), b = X: Sp sums (2,-1), Sp(a+b) = (1 +- sqrt(5))/2
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1;
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  CHECK(check_subadditivity(d, x));
  Spectrum sum_spec = add_spectra(spectrum_of(d), spectrum_of(x));
  CHECK(sum_spec[0] == doctest::Approx(2.0));
  CHECK(sum_spec[1] == doctest::Approx(-1.0));

  Rng rng(113);
  for (int t = 0; t < 100; ++t) {
    CHECK(check_subadditivity(random_hermitian(rng, 4), random_hermitian(rng, 4)));
  }

  CHECK_THROWS_AS(check_subadditivity(a, ComplexMatrix::Identity(3, 3)), LayoutError);
}

TEST_CASE("conjugate spectra agree") {
  ComplexMatrix u(2, 2);
  u << Complex(0, 1), 0, 0, Complex(0, -1);
  CHECK(check_conjugate_spectra(u));

  ComplexMatrix nilpotent(2, 2);
  nilpotent << 0, 1, 0, 0;
  CHECK(check_conjugate_spectra(nilpotent));

  Rng rng(127);
  for (int t = 0; t < 50; ++t) {
    CHECK(check_conjugate_spectra(random_gaussian(rng, 5, 5)));
  }
}
