#include "locc/three_qubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "locc/random.hpp"

namespace locc {

namespace {

constexpr double kExact = 1e-12;

/// Radicands are guaranteed nonnegative by the ordering invariant plus the
/// family condition; clamp round-off only.
double checked_sqrt(double radicand, const char* what) {
  if (radicand < -kExact) {
    std::ostringstream msg;
    msg << what << " radicand is negative: " << radicand;
    throw ContractError(msg.str());
  }
  return std::sqrt(std::max(radicand, 0.0));
}

Complex phase_factor(double theta) { return std::polar(1.0, theta); }

}  // namespace

ThreeQubitSpec::ThreeQubitSpec(std::array<double, 3> l, std::array<double, 8> theta)
    : lambdas(l), phases(theta) {
  const auto [l1, l2, l3] = lambdas;
  if (!(l1 <= 1.0 + kExact && l1 >= l2 - kExact && l2 >= l3 - kExact && l3 >= 0.5 - kExact)) {
    std::ostringstream msg;
    msg << "eigenvalue triple (" << l1 << ", " << l2 << ", " << l3
        << ") violates 1 >= l1 >= l2 >= l3 >= 1/2";
    throw ContractError(msg.str());
  }
}

PureState8::PureState8(std::array<Complex, 8> amps) : amps_(amps) {
  double norm2 = 0.0;
  for (const Complex& a : amps_) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > kExact) {
    std::ostringstream msg;
    msg << "state is not unit norm: |x|^2 = " << norm2;
    throw ContractError(msg.str());
  }
}

ComplexVector PureState8::vector() const {
  ComplexVector v(8);
  for (int i = 0; i < 8; ++i) v[i] = amps_[static_cast<std::size_t>(i)];
  return v;
}

ComplexMatrix PureState8::projector() const {
  ComplexVector v = vector();
  return v * v.adjoint();
}

int tilde(int qubit, int klm) {
  if (qubit < 0 || qubit > 2) throw ContractError("tilde qubit must be 0, 1 or 2");
  if (klm < 0 || klm > 7) throw ContractError("tilde index must be a 3-bit value");
  const int k = (klm >> 2) & 1;
  const int l = (klm >> 1) & 1;
  const int m = klm & 1;
  switch (qubit) {
    case 0:
      return (k << 2) | (l << 1) | m;
    case 1:
      return (m << 2) | (k << 1) | l;
    default:
      return (l << 2) | (m << 1) | k;
  }
}

double Residuals::max() const {
  double best = norm;
  for (double r : eigenvalue) best = std::max(best, r);
  for (double r : off_diagonal) best = std::max(best, r);
  return best;
}

Residuals residuals(const PureState8& x, const ThreeQubitSpec& spec) {
  Residuals out;
  double norm2 = 0.0;
  for (int idx = 0; idx < 8; ++idx) norm2 += std::norm(x[idx]);
  out.norm = std::abs(norm2 - 1.0);
  for (int q = 0; q < 3; ++q) {
    double weight0 = 0.0;
    Complex cross = 0.0;
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        const int tail = (k << 1) | l;
        const Complex low = x[tilde(q, tail)];         // qubit q in |0>
        const Complex high = x[tilde(q, 4 | tail)];    // qubit q in |1>
        weight0 += std::norm(low);
        cross += high * std::conj(low);
      }
    }
    out.eigenvalue[static_cast<std::size_t>(q)] =
        std::abs(weight0 - spec.lambdas[static_cast<std::size_t>(q)]);
    out.off_diagonal[static_cast<std::size_t>(q)] = std::abs(cross);
  }
  return out;
}

PureState8 construct_y(const ThreeQubitSpec& spec) {
  const auto [l1, l2, l3] = spec.lambdas;
  if (l1 + l2 - l3 > 1.0 + kExact) {
    std::ostringstream msg;
    msg << "y family needs lambda1 + lambda2 - lambda3 <= 1, got " << l1 + l2 - l3;
    throw InfeasibleError(msg.str());
  }
  std::array<Complex, 8> amps{};
  amps[0b000] = phase_factor(spec.phases[0b000]) * checked_sqrt(2.0 * (l1 + l2 + l3 - 1.0), "y000") / 2.0;
  amps[0b011] = phase_factor(spec.phases[0b011]) * checked_sqrt(2.0 * (l1 - l2 - l3 + 1.0), "y011") / 2.0;
  amps[0b101] = phase_factor(spec.phases[0b101]) * checked_sqrt(2.0 * (-l1 + l2 - l3 + 1.0), "y101") / 2.0;
  amps[0b110] = phase_factor(spec.phases[0b110]) * checked_sqrt(2.0 * (-l1 - l2 + l3 + 1.0), "y110") / 2.0;
  return PureState8(amps);
}

PureState8 construct_z(const ThreeQubitSpec& spec) {
  const auto [l1, l2, l3] = spec.lambdas;
  if (l1 + l2 + l3 > 2.0 + kExact) {
    std::ostringstream msg;
    msg << "z family needs lambda1 + lambda2 + lambda3 <= 2, got " << l1 + l2 + l3;
    throw InfeasibleError(msg.str());
  }
  std::array<Complex, 8> amps{};
  amps[0b001] = phase_factor(spec.phases[0b001]) * checked_sqrt(2.0 * (l1 + l2 - l3), "z001") / 2.0;
  amps[0b010] = phase_factor(spec.phases[0b010]) * checked_sqrt(2.0 * (l1 - l2 + l3), "z010") / 2.0;
  amps[0b100] = phase_factor(spec.phases[0b100]) * checked_sqrt(2.0 * (-l1 + l2 + l3), "z100") / 2.0;
  amps[0b111] = phase_factor(spec.phases[0b111]) * checked_sqrt(2.0 * (-l1 - l2 - l3 + 2.0), "z111") / 2.0;
  return PureState8(amps);
}

std::optional<PureState8> solve_product_case(const ThreeQubitSpec& spec) {
  const auto [l1, l2, l3] = spec.lambdas;
  if (std::abs(l1 - 1.0) > kExact) {
    throw ContractError("product case requires lambda1 = 1");
  }
  if (std::abs(l2 - l3) > kExact) return std::nullopt;
  std::array<Complex, 8> amps{};
  amps[0b000] = std::sqrt(l2);
  amps[0b011] = std::sqrt(1.0 - l2);
  return PureState8(amps);
}

std::array<ComplexMatrix, 3> local_states(const PureState8& x) {
  const PartyLayout layout({2, 2, 2});
  const ComplexMatrix p = x.projector();
  return {partial_trace(p, layout, 0), partial_trace(p, layout, 1), partial_trace(p, layout, 2)};
}

namespace {

/// Eigenbasis of a 2x2 Hermitian matrix, columns ordered by descending
/// eigenvalue, each column's largest-modulus component made real positive.
ComplexMatrix ordered_eigenbasis(const ComplexMatrix& m, const char* side, const Tolerances& tol) {
  EigResult eig = hermitian_eig(m, tol);
  const Eigen::Index n = eig.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eig.values[a] > eig.values[b]; });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double gap = eig.values[order[i]] - eig.values[order[i + 1]];
    if (gap <= tol.degen) {
      std::ostringstream msg;
      msg << "degenerate spectrum of the local trace on " << side << ": gap " << gap;
      throw ContractError(msg.str());
    }
  }
  ComplexMatrix basis(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ComplexVector col = eig.vectors.col(order[static_cast<std::size_t>(i)]);
    Eigen::Index top = 0;
    col.cwiseAbs().maxCoeff(&top);
    const Complex pivot = col[top];
    if (std::abs(pivot) > 0.0) col *= std::conj(pivot) / std::abs(pivot);
    basis.col(i) = col;
  }
  return basis;
}

}  // namespace

EquivalenceResult equivalence_witness(const ComplexMatrix& sigma, const ComplexMatrix& tau,
                                      const Tolerances& tol) {
  if (sigma.rows() != 4 || sigma.cols() != 4 || tau.rows() != 4 || tau.cols() != 4) {
    throw LayoutError("equivalence witness expects 4x4 two-qubit states");
  }
  const PartyLayout layout({2, 2});
  const ComplexMatrix trace_b_sigma = partial_trace(sigma, layout, 0);
  const ComplexMatrix trace_a_sigma = partial_trace(sigma, layout, 1);
  const ComplexMatrix trace_b_tau = partial_trace(tau, layout, 0);
  const ComplexMatrix trace_a_tau = partial_trace(tau, layout, 1);
  const double diff_b = (trace_b_sigma - trace_b_tau).cwiseAbs().maxCoeff();
  const double diff_a = (trace_a_sigma - trace_a_tau).cwiseAbs().maxCoeff();
  if (diff_b > tol.eig || diff_a > tol.eig) {
    std::ostringstream msg;
    msg << "mismatched local traces: max deviations " << diff_b << " (A side), " << diff_a
        << " (B side)";
    throw ContractError(msg.str());
  }

  const ComplexMatrix basis_a = ordered_eigenbasis(trace_b_sigma, "A", tol);
  const ComplexMatrix basis_b = ordered_eigenbasis(trace_a_sigma, "B", tol);
  ordered_eigenbasis(trace_b_tau, "A (tau)", tol);
  ordered_eigenbasis(trace_a_tau, "B (tau)", tol);

  const ComplexMatrix product_basis = kron(basis_a, basis_b);
  const ComplexMatrix sigma_t = product_basis.adjoint() * sigma * product_basis;
  const ComplexMatrix tau_t = product_basis.adjoint() * tau * product_basis;

  EquivalenceResult result;
  result.sigma_00 = std::abs(sigma_t(0, 0));
  result.tau_00 = std::abs(tau_t(0, 0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double diff = std::abs(std::abs(sigma_t(i, j)) - std::abs(tau_t(i, j)));
      if (diff > result.max_modulus_diff) {
        result.max_modulus_diff = diff;
        result.offending_row = i;
        result.offending_col = j;
        result.offending_sigma = std::abs(sigma_t(i, j));
        result.offending_tau = std::abs(tau_t(i, j));
      }
    }
  }
  result.verdict = result.max_modulus_diff > tol.eig ? EquivalenceVerdict::not_equivalent
                                                     : EquivalenceVerdict::inconclusive;
  return result;
}

EquivalenceResult yz_equivalence(const ThreeQubitSpec& spec, const Tolerances& tol) {
  if (spec.lambdas[2] <= 0.5 + tol.degen) {
    std::ostringstream msg;
    msg << "degenerate local spectrum: the y/z witness requires lambda3 > 1/2, got "
        << spec.lambdas[2];
    throw ContractError(msg.str());
  }
  const PureState8 y = construct_y(spec);
  const PureState8 z = construct_z(spec);
  const PartyLayout layout({2, 2, 2});
  const ComplexMatrix sigma = trace_out(y.projector(), layout, 2);
  const ComplexMatrix tau = trace_out(z.projector(), layout, 2);
  return equivalence_witness(sigma, tau, tol);
}

AppendixBScenario appendix_b_scenario(double p, const Tolerances& tol) {
  if (p < 0.0 || p >= 1.0) throw ContractError("appendix B scenario requires 0 <= p < 1");
  ComplexVector h = ComplexVector::Zero(8);
  const double lead = std::sqrt(p / 3.0);
  const double rest = std::sqrt((1.0 - p) / 2.0);
  h[0] = lead;  // |000>
  h[1] = lead;  // |001>
  h[7] = lead;  // |111>
  h[2] = rest;  // |010>
  h[4] = rest;  // |100>

  MeasurementSet alice;
  alice.party = 0;
  ComplexMatrix even = ComplexMatrix::Zero(4, 4);
  even(0, 0) = 1.0;
  even(3, 3) = 1.0;
  ComplexMatrix odd = ComplexMatrix::Zero(4, 4);
  odd(1, 1) = 1.0;
  odd(2, 2) = 1.0;
  alice.ops = {even, odd};

  ComplexMatrix bob_pre(2, 2);
  bob_pre << Complex(1.0 - 2.0 * p / 3.0), Complex(p / 3.0), Complex(p / 3.0),
      Complex(2.0 * p / 3.0);
  const double split = std::sqrt(1.0 - 4.0 / 3.0 * p * (2.0 - 5.0 / 3.0 * p));
  Spectrum pre_spectrum({(1.0 + split) / 2.0, (1.0 - split) / 2.0});

  ComplexMatrix branch1(2, 2);
  branch1 << Complex(1.0 / 3.0), Complex(1.0 / 3.0), Complex(1.0 / 3.0), Complex(2.0 / 3.0);
  const double branch_split = std::sqrt(5.0) / 3.0;
  Spectrum branch1_spectrum({(1.0 + branch_split) / 2.0, (1.0 - branch_split) / 2.0});

  return AppendixBScenario{GlobalState(PartyLayout({4, 2}), projector(h), tol),
                           std::move(alice),
                           std::move(bob_pre),
                           std::move(pre_spectrum),
                           std::move(branch1),
                           std::move(branch1_spectrum),
                           0.2};
}

ExploreResult explore_existence(const ThreeQubitSpec& spec, int restarts, int iterations,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ExploreResult result;
  result.best_residual = std::numeric_limits<double>::infinity();

  auto normalize = [](std::array<Complex, 8>& amps) {
    double norm2 = 0.0;
    for (const Complex& a : amps) norm2 += std::norm(a);
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& a : amps) a *= inv;
  };
  auto evaluate = [&](const std::array<Complex, 8>& amps) {
    ++result.evaluations;
    return residuals(PureState8(amps), spec).max();
  };

  for (int r = 0; r < restarts; ++r) {
    std::array<Complex, 8> current;
    for (Complex& a : current) a = Complex(gauss(rng), gauss(rng));
    normalize(current);
    double current_res = evaluate(current);
    double step = 0.3;
    for (int it = 0; it < iterations; ++it) {
      std::array<Complex, 8> candidate = current;
      for (Complex& a : candidate) a += step * Complex(gauss(rng), gauss(rng));
      normalize(candidate);
      const double res = evaluate(candidate);
      if (res < current_res) {
        current = candidate;
        current_res = res;
      } else {
        step *= 0.995;
      }
    }
    result.best_residual = std::min(result.best_residual, current_res);
  }
  return result;
}

}  // namespace locc
