#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "locc/locc_engine.hpp"
#include "locc/spectra.hpp"
#include "locc/tensor_core.hpp"
#include "locc/types.hpp"

namespace locc {

/// Target local eigenvalue triple for three qubits plus optional phases.
/// lambdas[i] is the larger eigenvalue of qubit i's local state; the
/// constructor enforces 1 >= l1 >= l2 >= l3 >= 1/2. Phases are indexed by
/// the 3-bit basis index klm = 4k + 2l + m and default to zero.
struct ThreeQubitSpec {
  std::array<double, 3> lambdas;
  std::array<double, 8> phases{};

  explicit ThreeQubitSpec(std::array<double, 3> l, std::array<double, 8> theta = {});
};

/// Pure three-qubit state as amplitudes over |klm>, index 4k + 2l + m.
/// Unit norm within 1e-12 is an invariant of the checked constructor.
class PureState8 {
 public:
  explicit PureState8(std::array<Complex, 8> amps);

  const std::array<Complex, 8>& amplitudes() const { return amps_; }
  Complex operator[](int klm) const { return amps_[static_cast<std::size_t>(klm)]; }

  ComplexVector vector() const;
  ComplexMatrix projector() const;

 private:
  std::array<Complex, 8> amps_;
};

/// Index permutation attached to each qubit: qubit 0 leaves klm alone,
/// qubit 1 maps klm -> mkl, qubit 2 maps klm -> lmk (a right rotation of
/// the bit triple per qubit position).
int tilde(int qubit, int klm);

/// Residuals of the seven defining equations: norm, one eigenvalue
/// condition per qubit, one off-diagonal condition per qubit. A state
/// realizes the spec exactly when max() is ~0.
struct Residuals {
  double norm = 0.0;
  std::array<double, 3> eigenvalue{};
  std::array<double, 3> off_diagonal{};

  double max() const;
};

Residuals residuals(const PureState8& x, const ThreeQubitSpec& spec);

/// Even-parity solution family, defined when l1 + l2 - l3 <= 1. Throws
/// InfeasibleError naming the inequality otherwise.
PureState8 construct_y(const ThreeQubitSpec& spec);

/// Odd-parity solution family, defined when l1 + l2 + l3 <= 2.
PureState8 construct_z(const ThreeQubitSpec& spec);

/// Product case l1 = 1: a solution exists iff l2 == l3 (within 1e-12), in
/// which case it is sqrt(l2)|000> + sqrt(1-l2)|011>. Returns nullopt when
/// infeasible; throws ContractError when l1 != 1.
std::optional<PureState8> solve_product_case(const ThreeQubitSpec& spec);

/// The three 2x2 local states of a pure three-qubit state.
std::array<ComplexMatrix, 3> local_states(const PureState8& x);

enum class EquivalenceVerdict { not_equivalent, inconclusive };

/// Evidence from the local-unitary equivalence witness. Entry indices are
/// 0-based positions in the shared product eigenbasis, ordered by
/// descending local eigenvalue.
struct EquivalenceResult {
  EquivalenceVerdict verdict = EquivalenceVerdict::inconclusive;
  double sigma_00 = 0.0;  ///< |sigma| entry at (0,0) in the product eigenbasis
  double tau_00 = 0.0;
  double max_modulus_diff = 0.0;
  int offending_row = -1;
  int offending_col = -1;
  double offending_sigma = 0.0;
  double offending_tau = 0.0;
};

/// Necessary condition for local-unitary equivalence of two-qubit mixed
/// states sigma and tau with identical, nondegenerate local traces: all
/// entry moduli must agree in the product eigenbasis of the traces.
/// A modulus mismatch proves not_equivalent; agreement is inconclusive.
/// Preconditions (matching traces, nondegenerate local spectra) are
/// enforced with ContractError.
EquivalenceResult equivalence_witness(const ComplexMatrix& sigma, const ComplexMatrix& tau,
                                      const Tolerances& tol = {});

/// Runs the witness on the y/z pair of a spec: sigma = Tr_{Q3}(P_y),
/// tau = Tr_{Q3}(P_z). Requires l3 > 1/2 + tol.degen; at l3 = 1/2 the
/// third qubit's local spectrum is degenerate and the witness does not
/// apply. Requires the z-family condition so both states exist.
EquivalenceResult yz_equivalence(const ThreeQubitSpec& spec, const Tolerances& tol = {});

/// The two-qubit-vs-one-qubit counterexample scenario: global pure state
/// h(p) on layout [4, 2] (Alice holds qubits 1-2, Bob qubit 3) and Alice's
/// two-outcome parity measurement, plus the closed-form record the run is
/// checked against.
struct AppendixBScenario {
  GlobalState state;
  MeasurementSet alice;
  ComplexMatrix bob_pre;            ///< [[1-2p/3, p/3], [p/3, 2p/3]]
  Spectrum bob_pre_spectrum;        ///< (1 +- sqrt(1 - 4/3 p (2 - 5/3 p))) / 2
  ComplexMatrix branch1_bob;        ///< [[1/3, 1/3], [1/3, 2/3]]
  Spectrum branch1_bob_spectrum;    ///< (1 +- sqrt(5)/3) / 2
  double violation_threshold = 0.2; ///< branch 1 fails to majorize iff p < 0.2
};

AppendixBScenario appendix_b_scenario(double p, const Tolerances& tol = {});

/// Randomized residual minimization for lambda triples outside the known
/// families. Reports the best max-residual found; this is an exploration
/// aid only and never a feasibility verdict.
struct ExploreResult {
  double best_residual = 0.0;
  std::uint64_t evaluations = 0;
};

ExploreResult explore_existence(const ThreeQubitSpec& spec, int restarts, int iterations,
                                std::uint64_t seed);

}  // namespace locc
