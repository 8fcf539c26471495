#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "locc/spectra.hpp"
#include "locc/tensor_core.hpp"
#include "locc/types.hpp"

namespace locc {

/// Local generalized measurement: operators f_1..f_m on one party's factor
/// with sum_j f_j^dag f_j = id (checked by validate_measurement).
struct MeasurementSet {
  int party = 0;
  std::vector<ComplexMatrix> ops;
};

struct MeasurementReport {
  double completeness_defect = 0.0;
  bool pass(double tol) const { return completeness_defect <= tol; }
};

MeasurementReport validate_measurement(const MeasurementSet& m);

/// Protocol steps. Classical communication is a Broadcast: it never
/// changes the global state, it only appends its tag to the branch
/// history so that later steps can condition on it.
struct UnitaryStep {
  int party = 0;
  ComplexMatrix u;
};

struct MeasureStep {
  MeasurementSet mset;
  std::string label;  ///< outcome j appends "<label>=<j>" to the history
};

struct BroadcastStep {
  int party = 0;
  std::string message;  ///< appended verbatim to the history
};

using ProtocolStep = std::variant<UnitaryStep, MeasureStep, BroadcastStep>;

/// A step plus the outcome-history prefix that gates it. An empty guard
/// applies everywhere; otherwise the step runs only on branches whose
/// history starts with the guard tokens.
struct GuardedStep {
  std::vector<std::string> guard;
  ProtocolStep step;
};

struct Protocol {
  PartyLayout layout;
  std::vector<GuardedStep> steps;
};

/// Throws ContractError when the protocol is malformed against its layout:
/// out-of-range parties, shape mismatches, non-unitary unitaries,
/// incomplete measurements, duplicate measurement labels, or guards that
/// no reachable branch history can match.
void validate_protocol(const Protocol& p, const Tolerances& tol = {});

/// One measurement branch: relative probability and post-measurement state.
struct Branch {
  double prob = 0.0;
  GlobalState state;
};

/// Branching execution record. Nodes live in a flat arena; node 0 is the
/// root. prob is the absolute probability of reaching a node.
struct ProtocolNode {
  GlobalState state;
  double prob = 0.0;
  std::vector<std::string> history;
  int parent = -1;
  std::vector<int> children;
};

struct ProtocolTree {
  std::vector<ProtocolNode> nodes;

  const ProtocolNode& root() const { return nodes.front(); }
  std::vector<int> leaf_indices() const;
  double leaf_probability_sum() const;
};

/// Conjugates the state by the lifted local unitary. No renormalization is
/// needed: the normalization factor of a unitary is 1.
GlobalState apply_unitary(const GlobalState& state, int party, const ComplexMatrix& u,
                          const Tolerances& tol = {});

/// Applies a local generalized measurement, returning one branch per
/// recorded outcome: p_j = Tr(f'_j rho f'_j^dag), state f'_j rho f'_j^dag / p_j.
/// Branches with p_j <= tol.prob are dropped. Probabilities sum to 1.
std::vector<Branch> measure(const GlobalState& state, const MeasurementSet& m,
                            const Tolerances& tol = {});

/// Probability-weighted mix of the branches' local spectra for one party.
/// This is the expected spectrum, not the spectrum of the averaged state.
Spectrum expected_local_spectrum(const std::vector<Branch>& branches, int party,
                                 const Tolerances& tol = {});

/// Expands the full branch tree of a protocol. Branch order equals
/// measurement-operator order, so the result is deterministic; sibling
/// subtrees may be expanded on up to `threads` threads without changing
/// the result. Total pruned probability mass above 1e-9 is an error.
ProtocolTree run_protocol(const Protocol& p, const GlobalState& initial,
                          const Tolerances& tol = {}, int threads = 1);

/// Sampling mode: follows a single path, drawing one outcome per
/// measurement from the branch distribution seeded by `seed`.
struct SampledRun {
  GlobalState final_state;
  double prob = 1.0;  ///< joint probability of the sampled path
  std::vector<std::string> history;
  std::uint64_t seed = 0;
};

SampledRun run_protocol_sampled(const Protocol& p, const GlobalState& initial, std::uint64_t seed,
                                const Tolerances& tol = {});

/// Per-party verdict of the monotonicity theorem: the expected final local
/// spectrum (mixed over leaves) must majorize the initial local spectrum.
struct PartyMonotonicity {
  int party = 0;
  bool holds = false;
  Spectrum expected;
  Spectrum initial;
  std::vector<double> margins;  ///< expected prefix sum minus initial prefix sum
};

std::vector<PartyMonotonicity> check_monotonicity(const ProtocolTree& tree,
                                                  const GlobalState& initial,
                                                  const Tolerances& tol = {});

/// a is stronger than b: every party's local spectrum of a majorizes the
/// matching local spectrum of b.
bool stronger(const GlobalState& a, const GlobalState& b, const Tolerances& tol = {});

/// p-strength: every party's local spectrum of a p-majorizes b's, i.e.
/// c-majorization with c = p. Requires p in [0, 1].
bool p_stronger(const GlobalState& a, const GlobalState& b, double p, const Tolerances& tol = {});

}  // namespace locc
