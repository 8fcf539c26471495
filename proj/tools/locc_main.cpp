#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "locc/locc_engine.hpp"
#include "locc/protocol_format.hpp"
#include "locc/report.hpp"
#include "locc/scenarios.hpp"
#include "locc/three_qubit.hpp"

namespace {

using locc::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;      // usage, parse or input errors
constexpr int kExitViolation = 2;  // run completed but an invariant flag failed

void add_tolerance_flags(CLI::App* cmd, locc::Tolerances& tol) {
  cmd->add_option("--tol-herm", tol.herm, "hermiticity defect tolerance");
  cmd->add_option("--tol-trace", tol.trace, "trace defect tolerance");
  cmd->add_option("--tol-psd", tol.psd, "negative-eigenvalue tolerance");
  cmd->add_option("--tol-eig", tol.eig, "eigendecomposition tolerance");
  cmd->add_option("--tol-prob", tol.prob, "branch pruning threshold");
  cmd->add_option("--tol-major", tol.major, "prefix-sum comparison slack");
  cmd->add_option("--tol-complete", tol.complete, "measurement completeness tolerance");
  cmd->add_option("--tol-degen", tol.degen, "nondegeneracy gap");
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("LOCC_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return flag_seed;
}

int emit_report(const Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitUsage;
    }
    out << text;
  }
  return locc::report_passes(report) ? kExitOk : kExitViolation;
}

int run_protocol_command(const std::string& path, double p, bool p_given,
                         const std::string& mode, std::uint64_t seed, int threads,
                         const std::string& out_path, const locc::Tolerances& tol) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  locc::ParseResult parsed = locc::parse_protocol(text, tol);
  if (!parsed.ok()) {
    for (const locc::ParseError& e : parsed.errors) {
      std::cerr << path << ":" << e.line << ":" << e.col << ": " << e.message << "\n";
    }
    return kExitUsage;
  }
  const locc::ProtocolFile& file = *parsed.file;

  std::optional<locc::GlobalState> initial;
  try {
    switch (file.initial_kind) {
      case locc::ProtocolFile::InitialKind::vector:
        initial.emplace(file.protocol.layout, locc::projector(file.initial_vector), tol);
        break;
      case locc::ProtocolFile::InitialKind::matrix:
        initial.emplace(file.protocol.layout, file.initial_matrix, tol);
        break;
      case locc::ProtocolFile::InitialKind::scenario: {
        if (!p_given) {
          std::cerr << "error: " << path << " uses 'initial scenario "
                    << file.scenario_name << "'; pass --p\n";
          return kExitUsage;
        }
        locc::AppendixBScenario scenario = locc::appendix_b_scenario(p, tol);
        if (!(scenario.state.layout() == file.protocol.layout)) {
          std::cerr << "error: scenario layout does not match the file layout\n";
          return kExitUsage;
        }
        initial.emplace(std::move(scenario.state));
        break;
      }
      case locc::ProtocolFile::InitialKind::none:
        std::cerr << "error: " << path << " declares no initial state\n";
        return kExitUsage;
    }

    Json report;
    report["tool_version"] = locc::kToolVersion;
    report["input_digest"] = locc::input_digest(text);
    report["mode"] = mode;
    Json body;
    if (mode == "branch") {
      locc::ProtocolTree tree = locc::run_protocol(file.protocol, *initial, tol, threads);
      body = locc::build_tree_report(tree, *initial, tol);
    } else {
      locc::SampledRun run = locc::run_protocol_sampled(file.protocol, *initial, seed, tol);
      body = locc::build_sample_report(run, *initial, tol);
    }
    for (auto& [key, value] : body.items()) report[key] = value;
    return emit_report(report, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_threequbit_command(const std::vector<double>& l, const std::string& family,
                           const std::vector<std::string>& thetas, const std::string& out_path,
                           const locc::Tolerances& tol) {
  try {
    std::array<double, 8> phases{};
    for (const std::string& spec_text : thetas) {
      const std::size_t eq = spec_text.find('=');
      if (eq == std::string::npos || eq != 3) {
        throw locc::ContractError("--theta expects klm=value, e.g. 011=1.5707");
      }
      int idx = 0;
      for (char c : spec_text.substr(0, 3)) {
        if (c != '0' && c != '1') throw locc::ContractError("--theta index must be three bits");
        idx = (idx << 1) | (c - '0');
      }
      phases[static_cast<std::size_t>(idx)] = std::stod(spec_text.substr(eq + 1));
    }
    const locc::ThreeQubitSpec spec({l[0], l[1], l[2]}, phases);

    Json report;
    report["tool_version"] = locc::kToolVersion;
    {
      std::ostringstream digest;
      digest << "threequbit " << l[0] << " " << l[1] << " " << l[2] << " " << family;
      for (const auto& t : thetas) digest << " " << t;
      report["input_digest"] = locc::input_digest(digest.str());
    }
    report["lambdas"] =
        Json::array({locc::round_sig(l[0]), locc::round_sig(l[1]), locc::round_sig(l[2])});

    bool pass = true;
    std::array<std::optional<locc::PureState8>, 2> states;  // y, z
    const bool want_y = family == "y" || family == "both";
    const bool want_z = family == "z" || family == "both";

    auto family_report = [&](const char* name, bool wanted, int slot,
                             locc::PureState8 (*build)(const locc::ThreeQubitSpec&)) {
      if (!wanted) return;
      Json entry;
      try {
        locc::PureState8 state = build(spec);
        const double residual = locc::residuals(state, spec).max();
        entry["feasible"] = true;
        entry["max_residual"] = locc::round_sig(residual);
        Json amps = Json::array();
        for (const locc::Complex& a : state.amplitudes()) {
          amps.push_back(Json::array({locc::round_sig(a.real()), locc::round_sig(a.imag())}));
        }
        entry["amplitudes"] = std::move(amps);
        Json spectra = Json::array();
        for (const locc::ComplexMatrix& rho : locc::local_states(state)) {
          spectra.push_back(locc::json_spectrum(locc::spectrum_of(rho, tol)));
        }
        entry["local_spectra"] = std::move(spectra);
        pass = pass && residual <= 1e-12;
        states[static_cast<std::size_t>(slot)] = std::move(state);
      } catch (const locc::InfeasibleError& e) {
        entry["feasible"] = false;
        entry["reason"] = e.what();
      }
      report[name] = std::move(entry);
    };
    family_report("y", want_y, 0, locc::construct_y);
    family_report("z", want_z, 1, locc::construct_z);

    if (states[0] && states[1]) {
      double spectra_gap = 0.0;
      const auto rho_y = locc::local_states(*states[0]);
      const auto rho_z = locc::local_states(*states[1]);
      for (int i = 0; i < 3; ++i) {
        const locc::Spectrum sy = locc::spectrum_of(rho_y[static_cast<std::size_t>(i)], tol);
        const locc::Spectrum sz = locc::spectrum_of(rho_z[static_cast<std::size_t>(i)], tol);
        for (std::size_t k = 0; k < sy.size(); ++k) {
          spectra_gap = std::max(spectra_gap, std::abs(sy[k] - sz[k]));
        }
      }
      report["spectra_agree"] = spectra_gap <= 1e-10;
      report["max_spectra_gap"] = locc::round_sig(spectra_gap);
      pass = pass && spectra_gap <= 1e-10;

      Json witness;
      if (spec.lambdas[2] > 0.5 + tol.degen) {
        const locc::EquivalenceResult eq = locc::yz_equivalence(spec, tol);
        witness["applicable"] = true;
        witness["verdict"] = eq.verdict == locc::EquivalenceVerdict::not_equivalent
                                 ? "not_equivalent"
                                 : "inconclusive";
        witness["sigma_11"] = locc::round_sig(eq.sigma_00);
        witness["tau_11"] = locc::round_sig(eq.tau_00);
        witness["max_modulus_diff"] = locc::round_sig(eq.max_modulus_diff);
        witness["offending_entry"] = Json::array({eq.offending_row, eq.offending_col});
      } else {
        witness["applicable"] = false;
        witness["reason"] = "lambda3 at 1/2 makes the third local spectrum degenerate";
      }
      report["witness"] = std::move(witness);
    }

    report["pass"] = pass;
    return emit_report(report, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_scenario_command(const std::string& name, const locc::ScenarioOptions& options,
                         const std::string& out_path, const locc::Tolerances& tol) {
  if (name == "list") {
    for (const locc::Scenario& s : locc::scenario_registry()) {
      std::cout << s.name << " - " << s.summary << "\n";
    }
    return kExitOk;
  }
  const locc::Scenario* scenario = locc::find_scenario(name);
  if (scenario == nullptr) {
    std::cerr << "error: unknown scenario '" << name << "' (try 'locc scenario list')\n";
    return kExitUsage;
  }
  try {
    Json body = scenario->run(options, tol);
    Json report;
    report["tool_version"] = locc::kToolVersion;
    {
      std::ostringstream digest;
      digest << "scenario " << name << " p=" << options.p << " l=" << options.lambdas[0] << ","
             << options.lambdas[1] << "," << options.lambdas[2] << " l2=" << options.l2
             << " l3=" << options.l3 << " dim=" << options.dim << " q=" << options.q
             << " trials=" << options.trials << " iters=" << options.iters
             << " seed=" << options.seed;
      report["input_digest"] = locc::input_digest(digest.str());
    }
    report["scenario"] = name;
    for (auto& [key, value] : body.items()) report[key] = value;
    return emit_report(report, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_validate_command(const std::string& path, const locc::Tolerances& tol) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  locc::ParseResult parsed = locc::parse_protocol(buffer.str(), tol);
  if (!parsed.ok()) {
    for (const locc::ParseError& e : parsed.errors) {
      std::cerr << path << ":" << e.line << ":" << e.col << ": " << e.message << "\n";
    }
    return kExitUsage;
  }
  const auto& protocol = parsed.file->protocol;
  std::cout << path << ": ok (" << protocol.layout.parties() << " parties, "
            << protocol.steps.size() << " steps)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locc - n-party LOCC protocol simulator and majorization checker"};
  app.set_version_flag("--version", std::string("locc ") + locc::kToolVersion);
  app.require_subcommand(1);

  locc::Tolerances tol;

  // run
  auto* run_cmd = app.add_subcommand("run", "run a protocol file and report local spectra");
  std::string run_path, run_mode = "branch", run_out;
  double run_p = 0.0;
  std::uint64_t run_seed = 1;
  int run_threads = 1;
  run_cmd->add_option("file", run_path, "protocol file")->required();
  auto* p_opt = run_cmd->add_option("--p", run_p, "parameter for 'initial scenario' files");
  run_cmd->add_option("--mode", run_mode, "branch (full tree) or sample (one path)")
      ->check(CLI::IsMember({"branch", "sample"}));
  run_cmd->add_option("--seed", run_seed, "sampling seed (LOCC_SEED overrides)");
  run_cmd->add_option("--threads", run_threads, "parallel branch expansion")
      ->check(CLI::Range(1, 64));
  run_cmd->add_option("--out", run_out, "report path (stdout when omitted)");
  add_tolerance_flags(run_cmd, tol);

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "run a built-in scenario by name");
  std::string scenario_name, scenario_out;
  locc::ScenarioOptions scenario_options;
  std::vector<double> scenario_lambdas;
  scenario_cmd->add_option("name", scenario_name, "scenario name, or 'list'")->required();
  scenario_cmd->add_option("--p", scenario_options.p, "appendix-b parameter");
  scenario_cmd->add_option("--l", scenario_lambdas, "lambda triple")->expected(3);
  scenario_cmd->add_option("--l2", scenario_options.l2, "second eigenvalue (nosol)");
  scenario_cmd->add_option("--l3", scenario_options.l3, "third eigenvalue (nosol)");
  scenario_cmd->add_option("--dim", scenario_options.dim, "matrix dimension for sweeps");
  scenario_cmd->add_option("--q", scenario_options.q, "basis size for fan-sweep");
  scenario_cmd->add_option("--trials", scenario_options.trials, "trial count");
  scenario_cmd->add_option("--iters", scenario_options.iters, "iterations per restart");
  scenario_cmd->add_option("--seed", scenario_options.seed, "RNG seed (LOCC_SEED overrides)");
  scenario_cmd->add_option("--out", scenario_out, "report path (stdout when omitted)");
  add_tolerance_flags(scenario_cmd, tol);

  // threequbit
  auto* three_cmd = app.add_subcommand("threequbit", "construct the y/z families and compare them");
  std::vector<double> three_lambdas;
  std::string three_family = "both", three_out;
  std::vector<std::string> three_thetas;
  three_cmd->add_option("--l", three_lambdas, "lambda triple l1 l2 l3")->required()->expected(3);
  three_cmd->add_option("--family", three_family, "y, z or both")
      ->check(CLI::IsMember({"y", "z", "both"}));
  three_cmd->add_option("--theta", three_thetas, "phase, as klm=radians (repeatable)");
  three_cmd->add_option("--out", three_out, "report path (stdout when omitted)");
  add_tolerance_flags(three_cmd, tol);

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a protocol file");
  std::string validate_path;
  validate_cmd->add_option("file", validate_path, "protocol file")->required();
  add_tolerance_flags(validate_cmd, tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (run_cmd->parsed()) {
    return run_protocol_command(run_path, run_p, p_opt->count() > 0, run_mode,
                                effective_seed(run_seed), run_threads, run_out, tol);
  }
  if (scenario_cmd->parsed()) {
    if (scenario_lambdas.size() == 3) {
      scenario_options.lambdas = {scenario_lambdas[0], scenario_lambdas[1], scenario_lambdas[2]};
    }
    scenario_options.seed = effective_seed(scenario_options.seed);
    return run_scenario_command(scenario_name, scenario_options, scenario_out, tol);
  }
  if (three_cmd->parsed()) {
    return run_threequbit_command(three_lambdas, three_family, three_thetas, three_out, tol);
  }
  if (validate_cmd->parsed()) {
    return run_validate_command(validate_path, tol);
  }
  return kExitUsage;
}
