#include <doctest.h>

#include <cmath>

#include "locc/tensor_core.hpp"
#include "test_support.hpp"

using namespace locc;
using locc::testing::max_abs_diff;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("party layout bookkeeping") {
  PartyLayout layout({4, 2, 3});
  CHECK(layout.parties() == 3);
  CHECK(layout.total_dim() == 24);
  CHECK(layout.dim_before(0) == 1);
  CHECK(layout.dim_after(0) == 6);
  CHECK(layout.dim_before(2) == 8);
  CHECK(layout.dim_after(2) == 1);
  CHECK(layout.without(1).dims() == std::vector<int>{4, 3});
  CHECK_THROWS_AS(layout.dim(3), LayoutError);
  CHECK_THROWS_AS(PartyLayout({2, 0}), LayoutError);
  CHECK_THROWS_AS(PartyLayout({}), LayoutError);
}

TEST_CASE("kron identities and trace multiplicativity") {
  ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK(max_abs_diff(kron(i2, i2), ComplexMatrix::Identity(4, 4)) == 0.0);

  ComplexMatrix d = kron(diag2(1, 2), diag2(3, 4));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 3;
  expected(1, 1) = 4;
  expected(2, 2) = 6;
  expected(3, 3) = 8;
  CHECK(max_abs_diff(d, expected) == 0.0);

  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix a = random_gaussian(rng, 2, 2);
    ComplexMatrix b = random_gaussian(rng, 2, 2);
    CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
}

TEST_CASE("partial trace of the Bell projector is maximally mixed") {
  ComplexVector phi = ComplexVector::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  ComplexMatrix p = projector(phi);
  PartyLayout layout({2, 2});
  CHECK(max_abs_diff(partial_trace(p, layout, 1), 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs_diff(partial_trace(p, layout, 0), 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("partial trace of the identity multiplies by the traced dimension") {
  PartyLayout layout({3, 4});
  ComplexMatrix id = ComplexMatrix::Identity(12, 12);
  CHECK(max_abs_diff(partial_trace(id, layout, 0), 4.0 * ComplexMatrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs_diff(partial_trace(id, layout, 1), 3.0 * ComplexMatrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("partial trace dimension mismatch is a layout error") {
  CHECK_THROWS_AS(partial_trace(ComplexMatrix::Identity(3, 3), PartyLayout({2, 2}), 0),
                  LayoutError);
}

TEST_CASE("partial trace properties on random operators") {
  Rng rng(7);
  PartyLayout layout({2, 3, 2});
  for (int t = 0; t < 25; ++t) {
    ComplexMatrix m = random_gaussian(rng, 12, 12);
    for (int keep = 0; keep < 3; ++keep) {
      ComplexMatrix reduced = partial_trace(m, layout, keep);
      // trace of a partial trace is the trace
      CHECK(std::abs(reduced.trace() - m.trace()) < 1e-10);
      // adjoint commutes with the partial trace
      CHECK(max_abs_diff(partial_trace(ComplexMatrix(m.adjoint()), layout, keep),
                         reduced.adjoint()) < 1e-12);
    }
  }
  // weak positivity is preserved
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix rho = random_density(rng, 12);
    for (int keep = 0; keep < 3; ++keep) {
      EigResult eig = hermitian_eig(partial_trace(rho, layout, keep));
      CHECK(eig.values.minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("commutation and self-trace identities") {
  Rng rng(13);
  PartyLayout layout({3, 4});
  ComplexMatrix id3 = ComplexMatrix::Identity(3, 3);
  ComplexMatrix id4 = ComplexMatrix::Identity(4, 4);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix m = random_gaussian(rng, 12, 12);
    ComplexMatrix g_b = random_gaussian(rng, 4, 4);
    ComplexMatrix g_a = random_gaussian(rng, 3, 3);

    // Tr_B(M (id (x) g)) = Tr_B((id (x) g) M)
    ComplexMatrix lifted_b = kron(id3, g_b);
    CHECK(max_abs_diff(partial_trace(m * lifted_b, layout, 0),
                       partial_trace(lifted_b * m, layout, 0)) < 1e-10);

    // Tr_B(M (g (x) id)) = Tr_B(M) g and Tr_B((g (x) id) M) = g Tr_B(M)
    ComplexMatrix lifted_a = kron(g_a, id4);
    CHECK(max_abs_diff(partial_trace(m * lifted_a, layout, 0),
                       partial_trace(m, layout, 0) * g_a) < 1e-10);
    CHECK(max_abs_diff(partial_trace(lifted_a * m, layout, 0),
                       g_a * partial_trace(m, layout, 0)) < 1e-10);
  }
}

TEST_CASE("nested partial traces collapse") {
  Rng rng(17);
  PartyLayout abc({2, 3, 2});
  PartyLayout ab({2, 3});
  PartyLayout a_bc({2, 6});
  for (int t = 0; t < 15; ++t) {
    ComplexMatrix m = random_gaussian(rng, 12, 12);
    ComplexMatrix direct = partial_trace(m, abc, 0);
    // trace out C, then B
    ComplexMatrix nested = partial_trace(trace_out(m, abc, 2), ab, 0);
    CHECK(max_abs_diff(direct, nested) < 1e-10);
    // tracing out B (x) C at once
    CHECK(max_abs_diff(direct, partial_trace(m, a_bc, 0)) < 1e-10);
  }
}

TEST_CASE("local unitaries pass through the partial trace") {
  Rng rng(19);
  PartyLayout layout({2, 3});
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix sigma = random_density(rng, 6);
    ComplexMatrix u_a = random_unitary(rng, 2);
    ComplexMatrix u_b = random_unitary(rng, 3);
    ComplexMatrix lifted = kron(u_a, u_b);
    ComplexMatrix lhs = partial_trace(lifted * sigma * lifted.adjoint(), layout, 0);
    ComplexMatrix rhs = u_a * partial_trace(sigma, layout, 0) * u_a.adjoint();
    CHECK(max_abs_diff(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("lift_local embeds at the right slot") {
  PartyLayout layout({2, 2});
  ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  CHECK(max_abs_diff(lift_local({1, id2}, layout), ComplexMatrix::Identity(4, 4)) == 0.0);

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  ComplexVector e00 = ComplexVector::Zero(4);
  e00[0] = 1.0;
  ComplexVector moved = lift_local({0, x}, layout) * e00;
  CHECK(std::abs(moved[2] - Complex(1.0)) < 1e-15);  // |00> -> |10>

  CHECK_THROWS_AS(lift_local({0, ComplexMatrix::Identity(3, 3)}, layout), LayoutError);
}

TEST_CASE("conjugate renormalizes and preserves spectra under unitaries") {
  PartyLayout single({2});
  ComplexMatrix rho = diag2(1.0, 0.0);
  GlobalState state(single, rho);

  GlobalState same = conjugate(state, ComplexMatrix::Identity(2, 2));
  CHECK(max_abs_diff(same.rho(), rho) == 0.0);

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  GlobalState flipped = conjugate(state, x);
  CHECK(max_abs_diff(flipped.rho(), diag2(0.0, 1.0)) == 0.0);

  // annihilating operator
  CHECK_THROWS_AS(conjugate(state, diag2(0.0, 1.0)), TransformError);

  // operator of the wrong total dimension
  CHECK_THROWS_AS(conjugate(state, ComplexMatrix::Identity(3, 3)), LayoutError);

  Rng rng(23);
  PartyLayout pair({2, 2});
  for (int t = 0; t < 15; ++t) {
    GlobalState random_state(pair, random_density(rng, 4));
    ComplexMatrix u = random_unitary(rng, 4);
    EigResult before = hermitian_eig(random_state.rho());
    EigResult after = hermitian_eig(conjugate(random_state, u).rho());
    CHECK((before.values - after.values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("hermitian_eig on closed-form 2x2 matrices") {
  EigResult d = hermitian_eig(diag2(2.0, 1.0));
  CHECK(d.values[0] == doctest::Approx(1.0));
  CHECK(d.values[1] == doctest::Approx(2.0));

  // off-diagonal 1/3 matrix from the measurement counterexample
  ComplexMatrix m(2, 2);
  m << Complex(1.0 / 3.0), Complex(1.0 / 3.0), Complex(1.0 / 3.0), Complex(2.0 / 3.0);
  EigResult e = hermitian_eig(m);
  const double top = (1.0 + std::sqrt(5.0) / 3.0) / 2.0;
  const double bottom = (1.0 - std::sqrt(5.0) / 3.0) / 2.0;
  CHECK(e.values[1] == doctest::Approx(top).epsilon(1e-9));
  CHECK(e.values[0] == doctest::Approx(bottom).epsilon(1e-9));
  CHECK(e.values[1] == doctest::Approx(0.872678).epsilon(1e-5));

  ComplexMatrix skew(2, 2);
  skew << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(hermitian_eig(skew), ContractError);
}

TEST_CASE("hermitian_eig returns an orthonormal reconstruction") {
  Rng rng(29);
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix m = random_hermitian(rng, 6);
    EigResult eig = hermitian_eig(m);
    ComplexMatrix gram = eig.vectors.adjoint() * eig.vectors;
    CHECK(max_abs_diff(gram, ComplexMatrix::Identity(6, 6)) < 1e-10);
    ComplexMatrix rebuilt =
        eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    CHECK(max_abs_diff(rebuilt, m) < 1e-9);
  }
}

TEST_CASE("psd_sqrt squares back") {
  CHECK(max_abs_diff(psd_sqrt(ComplexMatrix::Identity(3, 3)), ComplexMatrix::Identity(3, 3)) <
        1e-12);
  CHECK(max_abs_diff(psd_sqrt(diag2(4.0, 9.0)), diag2(2.0, 3.0)) < 1e-12);

  Rng rng(31);
  for (int t = 0; t < 15; ++t) {
    ComplexMatrix rho = random_density(rng, 4);
    ComplexMatrix root = psd_sqrt(rho);
    CHECK(hermiticity_defect(root) < 1e-10);
    CHECK(max_abs_diff(root * root, rho) < 1e-10);
  }

  CHECK_THROWS_AS(psd_sqrt(diag2(1.0, -0.5)), ContractError);
}

TEST_CASE("validate_density reports defects") {
  DensityReport good = validate_density(0.5 * ComplexMatrix::Identity(2, 2));
  CHECK(good.pass(1e-9));

  ComplexMatrix bad(2, 2);
  bad << 0.6, 0.5, 0.5, 0.4;
  DensityReport report = validate_density(bad);
  CHECK_FALSE(report.pass(1e-9));
  // closed form: eigenvalues (1 +- sqrt(1.04)) / 2
  CHECK(report.min_eigenvalue == doctest::Approx((1.0 - std::sqrt(1.04)) / 2.0).epsilon(1e-12));
}

TEST_CASE("global state construction enforces invariants") {
  PartyLayout layout({2});
  CHECK_THROWS_AS(GlobalState(layout, ComplexMatrix::Identity(2, 2)), ContractError);  // trace 2
  ComplexMatrix bad(2, 2);
  bad << 0.6, 0.5, 0.5, 0.4;
  CHECK_THROWS_AS(GlobalState(layout, bad), ContractError);  // negative eigenvalue
  ComplexMatrix skew(2, 2);
  skew << 0.5, 0.1, 0.0, 0.5;
  CHECK_THROWS_AS(GlobalState(layout, skew), ContractError);  // not Hermitian
  CHECK_THROWS_AS(GlobalState(PartyLayout({3}), 0.5 * ComplexMatrix::Identity(2, 2)),
                  LayoutError);
}
