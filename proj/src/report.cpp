#include "locc/report.hpp"

#include <cmath>
#include <cstdio>

namespace locc {

double round_sig(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

Json json_spectrum(const Spectrum& s) {
  Json out = Json::array();
  for (double v : s.values()) out.push_back(round_sig(v));
  return out;
}

Json json_matrix(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({round_sig(m(i, j).real()), round_sig(m(i, j).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string input_digest(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Json json_local_spectra(const GlobalState& state, const Tolerances& tol) {
  Json out = Json::array();
  for (int party = 0; party < state.layout().parties(); ++party) {
    out.push_back(json_spectrum(spectrum_of(state.local_state(party), tol)));
  }
  return out;
}

}  // namespace

Json build_tree_report(const ProtocolTree& tree, const GlobalState& initial,
                       const Tolerances& tol) {
  Json report;
  report["layout"] = initial.layout().dims();
  report["initial_spectra"] = json_local_spectra(initial, tol);

  Json leaves = Json::array();
  double prob_sum = 0.0;
  bool states_valid = true;
  for (int idx : tree.leaf_indices()) {
    const ProtocolNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    prob_sum += node.prob;
    DensityReport density = validate_density(node.state.rho());
    states_valid = states_valid && density.pass(tol.psd);
    Json leaf;
    leaf["prob"] = round_sig(node.prob);
    leaf["history"] = node.history;
    leaf["local_spectra"] = json_local_spectra(node.state, tol);
    leaves.push_back(std::move(leaf));
  }
  report["leaves"] = std::move(leaves);

  const std::vector<PartyMonotonicity> mono = check_monotonicity(tree, initial, tol);
  Json expected = Json::array();
  Json monotonicity = Json::array();
  bool mono_ok = true;
  for (const PartyMonotonicity& pm : mono) {
    expected.push_back(json_spectrum(pm.expected));
    Json entry;
    entry["party"] = pm.party;
    entry["holds"] = pm.holds;
    Json margins = Json::array();
    for (double m : pm.margins) margins.push_back(round_sig(m));
    entry["margins"] = std::move(margins);
    monotonicity.push_back(std::move(entry));
    mono_ok = mono_ok && pm.holds;
  }
  report["expected_spectra"] = std::move(expected);
  report["monotonicity"] = std::move(monotonicity);

  const bool prob_ok = std::abs(prob_sum - 1.0) <= tol.trace;
  report["checks"]["leaf_prob_sum_ok"] = prob_ok;
  report["checks"]["states_valid"] = states_valid;
  report["checks"]["monotonicity_ok"] = mono_ok;
  report["pass"] = prob_ok && states_valid && mono_ok;
  return report;
}

Json build_sample_report(const SampledRun& run, const GlobalState& initial,
                         const Tolerances& tol) {
  Json report;
  report["layout"] = initial.layout().dims();
  report["initial_spectra"] = json_local_spectra(initial, tol);
  report["seed"] = run.seed;
  report["path"]["prob"] = round_sig(run.prob);
  report["path"]["history"] = run.history;
  report["path"]["local_spectra"] = json_local_spectra(run.final_state, tol);
  DensityReport density = validate_density(run.final_state.rho());
  const bool valid = density.pass(tol.psd);
  report["checks"]["states_valid"] = valid;
  report["pass"] = valid;
  return report;
}

bool report_passes(const Json& report) {
  if (report.contains("pass")) return report["pass"].get<bool>();
  return true;
}

}  // namespace locc
