#include "locc/locc_engine.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <set>
#include <sstream>

namespace locc {

namespace {

bool guard_matches(const std::vector<std::string>& guard, const std::vector<std::string>& history) {
  if (guard.size() > history.size()) return false;
  return std::equal(guard.begin(), guard.end(), history.begin());
}

std::string outcome_token(const std::string& label, int j) {
  return label + "=" + std::to_string(j);
}

void check_unitary(const ComplexMatrix& u, int dim, const Tolerances& tol) {
  if (u.rows() != dim || u.cols() != dim) throw LayoutError("unitary has the wrong shape for its party");
  const double defect =
      (u.adjoint() * u - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > tol.complete) {
    std::ostringstream msg;
    msg << "operator is not unitary: defect " << defect;
    throw ContractError(msg.str());
  }
}

}  // namespace

MeasurementReport validate_measurement(const MeasurementSet& m) {
  if (m.ops.empty()) throw ContractError("measurement set needs at least one operator");
  const Eigen::Index d = m.ops.front().rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const ComplexMatrix& f : m.ops) {
    if (f.rows() != d || f.cols() != d) {
      throw LayoutError("measurement operators must share one square shape");
    }
    total += f.adjoint() * f;
  }
  MeasurementReport report;
  report.completeness_defect = (total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  return report;
}

GlobalState apply_unitary(const GlobalState& state, int party, const ComplexMatrix& u,
                          const Tolerances& tol) {
  check_unitary(u, state.layout().dim(party), tol);
  ComplexMatrix lifted = lift_local(LocalOperator{party, u}, state.layout());
  // Normalization factor of a unitary is 1; conjugate directly.
  return GlobalState(state.layout(), lifted * state.rho() * lifted.adjoint(), tol);
}

std::vector<Branch> measure(const GlobalState& state, const MeasurementSet& m,
                            const Tolerances& tol) {
  MeasurementReport report = validate_measurement(m);
  if (!report.pass(tol.complete)) {
    std::ostringstream msg;
    msg << "incomplete measurement: completeness defect " << report.completeness_defect;
    throw ContractError(msg.str());
  }
  if (m.ops.front().rows() != state.layout().dim(m.party)) {
    throw LayoutError("measurement operators do not match the party dimension");
  }
  std::vector<Branch> branches;
  double total = 0.0;
  for (const ComplexMatrix& f : m.ops) {
    ComplexMatrix lifted = lift_local(LocalOperator{m.party, f}, state.layout());
    ComplexMatrix post = lifted * state.rho() * lifted.adjoint();
    const double p = post.trace().real();
    total += p;
    if (p <= tol.prob) continue;  // this outcome is never obtained
    branches.push_back(Branch{p, GlobalState(state.layout(), post / p, tol)});
  }
  if (std::abs(total - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "measurement branch probabilities sum to " << total;
    throw ContractError(msg.str());
  }
  return branches;
}

Spectrum expected_local_spectrum(const std::vector<Branch>& branches, int party,
                                 const Tolerances& tol) {
  WeightedSpectra mix;
  mix.pairs.reserve(branches.size());
  for (const Branch& b : branches) {
    mix.pairs.emplace_back(b.prob, spectrum_of(b.state.local_state(party), tol));
  }
  return mix_spectra(mix, tol);
}

void validate_protocol(const Protocol& p, const Tolerances& tol) {
  const int n = p.layout.parties();
  std::set<std::string> labels;
  // Possible branch histories so far; guards must match at least one.
  std::vector<std::vector<std::string>> histories{{}};
  constexpr std::size_t kHistoryCap = 8192;

  for (std::size_t idx = 0; idx < p.steps.size(); ++idx) {
    const GuardedStep& gs = p.steps[idx];
    std::vector<std::vector<std::string>> matched, rest;
    for (auto& h : histories) {
      (guard_matches(gs.guard, h) ? matched : rest).push_back(h);
    }
    if (matched.empty() && histories.size() < kHistoryCap) {
      std::ostringstream msg;
      msg << "step " << idx + 1 << ": guard matches no reachable branch history";
      throw ContractError(msg.str());
    }

    if (const auto* us = std::get_if<UnitaryStep>(&gs.step)) {
      if (us->party < 0 || us->party >= n) throw LayoutError("unitary step party out of range");
      check_unitary(us->u, p.layout.dim(us->party), tol);
      rest.insert(rest.end(), matched.begin(), matched.end());
    } else if (const auto* ms = std::get_if<MeasureStep>(&gs.step)) {
      if (ms->mset.party < 0 || ms->mset.party >= n) {
        throw LayoutError("measurement step party out of range");
      }
      MeasurementReport report = validate_measurement(ms->mset);
      if (!report.pass(tol.complete)) {
        std::ostringstream msg;
        msg << "step " << idx + 1 << ": incomplete measurement, defect "
            << report.completeness_defect;
        throw ContractError(msg.str());
      }
      if (ms->mset.ops.front().rows() != p.layout.dim(ms->mset.party)) {
        throw LayoutError("measurement operators do not match the party dimension");
      }
      if (ms->label.empty()) throw ContractError("measurement steps need a branch label");
      if (!labels.insert(ms->label).second) {
        throw ContractError("duplicate measurement label: " + ms->label);
      }
      for (auto& h : matched) {
        for (std::size_t j = 0; j < ms->mset.ops.size(); ++j) {
          if (rest.size() >= kHistoryCap) break;
          auto ext = h;
          ext.push_back(outcome_token(ms->label, static_cast<int>(j)));
          rest.push_back(std::move(ext));
        }
      }
    } else if (const auto* bs = std::get_if<BroadcastStep>(&gs.step)) {
      if (bs->party < 0 || bs->party >= n) throw LayoutError("broadcast step party out of range");
      if (bs->message.empty()) throw ContractError("broadcast steps need a message tag");
      for (auto& h : matched) {
        h.push_back(bs->message);
        rest.push_back(std::move(h));
      }
    }
    histories = std::move(rest);
  }
}

std::vector<int> ProtocolTree::leaf_indices() const {
  std::vector<int> leaves;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) leaves.push_back(static_cast<int>(i));
  }
  return leaves;
}

double ProtocolTree::leaf_probability_sum() const {
  double total = 0.0;
  for (int idx : leaf_indices()) total += nodes[static_cast<std::size_t>(idx)].prob;
  return total;
}

namespace {

/// Children spawned by applying one step to one node, plus the pruned mass.
struct Expansion {
  bool applied = false;
  std::vector<ProtocolNode> children;
  double pruned = 0.0;
};

Expansion expand_node(const ProtocolNode& node, const GuardedStep& gs, const Tolerances& tol) {
  Expansion out;
  if (!guard_matches(gs.guard, node.history)) return out;
  out.applied = true;
  if (const auto* us = std::get_if<UnitaryStep>(&gs.step)) {
    out.children.push_back(ProtocolNode{apply_unitary(node.state, us->party, us->u, tol),
                                        node.prob, node.history, -1, {}});
  } else if (const auto* ms = std::get_if<MeasureStep>(&gs.step)) {
    // Enumerate outcomes in operator order so the tree is deterministic.
    double kept = 0.0;
    int j = 0;
    const MeasurementSet& mset = ms->mset;
    for (const ComplexMatrix& f : mset.ops) {
      ComplexMatrix lifted = lift_local(LocalOperator{mset.party, f}, node.state.layout());
      ComplexMatrix post = lifted * node.state.rho() * lifted.adjoint();
      const double p = post.trace().real();
      if (p > tol.prob) {
        kept += p;
        auto history = node.history;
        history.push_back(outcome_token(ms->label, j));
        out.children.push_back(ProtocolNode{GlobalState(node.state.layout(), post / p, tol),
                                            node.prob * p, std::move(history), -1, {}});
      }
      ++j;
    }
    out.pruned = node.prob * std::max(0.0, 1.0 - kept);
  } else if (const auto* bs = std::get_if<BroadcastStep>(&gs.step)) {
    auto history = node.history;
    history.push_back(bs->message);
    out.children.push_back(ProtocolNode{node.state, node.prob, std::move(history), -1, {}});
  }
  return out;
}

}  // namespace

ProtocolTree run_protocol(const Protocol& p, const GlobalState& initial, const Tolerances& tol,
                          int threads) {
  if (!(initial.layout() == p.layout)) {
    throw LayoutError("initial state layout does not match the protocol layout");
  }
  validate_protocol(p, tol);

  ProtocolTree tree;
  tree.nodes.push_back(ProtocolNode{initial, 1.0, {}, -1, {}});
  std::vector<int> frontier{0};
  double pruned_mass = 0.0;

  for (const GuardedStep& gs : p.steps) {
    std::vector<Expansion> expansions(frontier.size());
    if (threads > 1 && frontier.size() > 1) {
      // Siblings are independent; expand them concurrently and reassemble
      // in frontier order so the result matches the sequential run.
      std::vector<std::future<Expansion>> futures;
      futures.reserve(frontier.size());
      for (int idx : frontier) {
        futures.push_back(std::async(std::launch::async, [&, idx] {
          return expand_node(tree.nodes[static_cast<std::size_t>(idx)], gs, tol);
        }));
      }
      for (std::size_t i = 0; i < futures.size(); ++i) expansions[i] = futures[i].get();
    } else {
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        expansions[i] = expand_node(tree.nodes[static_cast<std::size_t>(frontier[i])], gs, tol);
      }
    }

    std::vector<int> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      Expansion& exp = expansions[i];
      if (!exp.applied) {
        next.push_back(frontier[i]);
        continue;
      }
      pruned_mass += exp.pruned;
      for (ProtocolNode& child : exp.children) {
        child.parent = frontier[i];
        const int child_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(std::move(child));
        tree.nodes[static_cast<std::size_t>(frontier[i])].children.push_back(child_idx);
        next.push_back(child_idx);
      }
    }
    frontier = std::move(next);
  }

  if (pruned_mass >= 1e-9) {
    std::ostringstream msg;
    msg << "pruned probability mass " << pruned_mass << " exceeds 1e-9; refusing to renormalize";
    throw ContractError(msg.str());
  }
  const double total = tree.leaf_probability_sum();
  if (std::abs(total - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "leaf probabilities sum to " << total;
    throw ContractError(msg.str());
  }
  return tree;
}

SampledRun run_protocol_sampled(const Protocol& p, const GlobalState& initial, std::uint64_t seed,
                                const Tolerances& tol) {
  if (!(initial.layout() == p.layout)) {
    throw LayoutError("initial state layout does not match the protocol layout");
  }
  validate_protocol(p, tol);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  SampledRun run{initial, 1.0, {}, seed};

  for (const GuardedStep& gs : p.steps) {
    if (!guard_matches(gs.guard, run.history)) continue;
    if (const auto* us = std::get_if<UnitaryStep>(&gs.step)) {
      run.final_state = apply_unitary(run.final_state, us->party, us->u, tol);
    } else if (const auto* ms = std::get_if<MeasureStep>(&gs.step)) {
      // Draw an operator index from the outcome distribution, skipping
      // pruned outcomes; history tokens use operator order, as in the tree.
      std::vector<double> probs;
      std::vector<ComplexMatrix> posts;
      probs.reserve(ms->mset.ops.size());
      for (const ComplexMatrix& f : ms->mset.ops) {
        ComplexMatrix lifted =
            lift_local(LocalOperator{ms->mset.party, f}, run.final_state.layout());
        ComplexMatrix post = lifted * run.final_state.rho() * lifted.adjoint();
        double pj = post.trace().real();
        if (pj <= tol.prob) pj = 0.0;
        probs.push_back(pj);
        posts.push_back(std::move(post));
      }
      const double draw = uniform(rng);
      double acc = 0.0;
      std::size_t pick = probs.size();
      for (std::size_t j = 0; j < probs.size(); ++j) {
        acc += probs[j];
        if (probs[j] > 0.0 && draw < acc) {
          pick = j;
          break;
        }
      }
      if (pick == probs.size()) {  // round-off at the top of the CDF
        for (std::size_t j = probs.size(); j-- > 0;) {
          if (probs[j] > 0.0) {
            pick = j;
            break;
          }
        }
      }
      run.prob *= probs[pick];
      run.final_state =
          GlobalState(run.final_state.layout(), posts[pick] / probs[pick], tol);
      run.history.push_back(outcome_token(ms->label, static_cast<int>(pick)));
    } else if (const auto* bs = std::get_if<BroadcastStep>(&gs.step)) {
      run.history.push_back(bs->message);
    }
  }
  return run;
}

std::vector<PartyMonotonicity> check_monotonicity(const ProtocolTree& tree,
                                                  const GlobalState& initial,
                                                  const Tolerances& tol) {
  const std::vector<int> leaves = tree.leaf_indices();
  std::vector<PartyMonotonicity> reports;
  for (int party = 0; party < initial.layout().parties(); ++party) {
    WeightedSpectra mix;
    mix.pairs.reserve(leaves.size());
    for (int idx : leaves) {
      const ProtocolNode& node = tree.nodes[static_cast<std::size_t>(idx)];
      mix.pairs.emplace_back(node.prob, spectrum_of(node.state.local_state(party), tol));
    }
    PartyMonotonicity report;
    report.party = party;
    report.expected = mix_spectra(mix, tol);
    report.initial = spectrum_of(initial.local_state(party), tol);
    const std::size_t len = std::max(report.expected.size(), report.initial.size());
    const std::vector<double> pe = report.expected.prefix_sums(len);
    const std::vector<double> pi = report.initial.prefix_sums(len);
    report.holds = true;
    report.margins.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
      report.margins[k] = pe[k] - pi[k];
      if (report.margins[k] < -tol.major) report.holds = false;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

bool stronger(const GlobalState& a, const GlobalState& b, const Tolerances& tol) {
  if (!(a.layout() == b.layout())) throw LayoutError("stronger requires matching layouts");
  for (int party = 0; party < a.layout().parties(); ++party) {
    if (!majorizes(spectrum_of(a.local_state(party), tol), spectrum_of(b.local_state(party), tol),
                   tol)) {
      return false;
    }
  }
  return true;
}

bool p_stronger(const GlobalState& a, const GlobalState& b, double p, const Tolerances& tol) {
  if (!(a.layout() == b.layout())) throw LayoutError("p_stronger requires matching layouts");
  if (p < 0.0 || p > 1.0) throw ContractError("p_stronger requires p in [0, 1]");
  for (int party = 0; party < a.layout().parties(); ++party) {
    if (!c_majorizes(spectrum_of(a.local_state(party), tol),
                     spectrum_of(b.local_state(party), tol), p, tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace locc
