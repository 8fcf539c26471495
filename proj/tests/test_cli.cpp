#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "test_support.hpp"

using json = nlohmann::json;
using locc::testing::cli_path;
using locc::testing::fixture_path;
using locc::testing::read_file;
using locc::testing::run_command;

namespace {

std::string tmp_file(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

}  // namespace

TEST_CASE("run on the appendix B fixture") {
  const std::string out = tmp_file("locc_run_appendix_b.json");
  const int code = run_command(cli_path() + " run " + fixture_path("appendix_b.proto") +
                               " --p 0.1 --mode branch --out " + out + " >/dev/null 2>&1");
  CHECK(code == 0);
  json report = load_json(out);
  CHECK(report["pass"].get<bool>());
  CHECK(report["mode"] == "branch");
  // Bob's expected top eigenvalue
  CHECK(report["expected_spectra"][1][0].get<double>() == doctest::Approx(0.987268).epsilon(1e-6));
  CHECK(report["leaves"].size() == 2);
  CHECK(report["tool_version"] == "0.1.0");
}

TEST_CASE("threequbit report carries the witness verdict") {
  const std::string out = tmp_file("locc_threequbit.json");
  const int code = run_command(cli_path() + " threequbit --l 0.7 0.65 0.6 --family both --out " +
                               out + " >/dev/null 2>&1");
  CHECK(code == 0);
  json report = load_json(out);
  CHECK(report["witness"]["verdict"] == "not_equivalent");
  CHECK(report["witness"]["sigma_11"].get<double>() == doctest::Approx(0.475).epsilon(1e-9));
  CHECK(report["witness"]["tau_11"].get<double>() == doctest::Approx(0.375).epsilon(1e-9));
  CHECK(report["spectra_agree"].get<bool>());
  CHECK(report["y"]["max_residual"].get<double>() <= 1e-12);
  CHECK(report["z"]["max_residual"].get<double>() <= 1e-12);
}

TEST_CASE("missing protocol file exits 1") {
  CHECK(run_command(cli_path() + " run missing.proto >/dev/null 2>&1") == 1);
}

TEST_CASE("validate distinguishes good and bad fixtures") {
  CHECK(run_command(cli_path() + " validate " + fixture_path("minimal.proto") +
                    " >/dev/null 2>&1") == 0);
  CHECK(run_command(cli_path() + " validate " + fixture_path("bell_correct.proto") +
                    " >/dev/null 2>&1") == 0);
  CHECK(run_command(cli_path() + " validate " + fixture_path("bad_measure.proto") +
                    " >/dev/null 2>&1") == 1);
}

TEST_CASE("scenario list names at least six scenarios") {
  const std::string out = tmp_file("locc_scenario_list.txt");
  CHECK(run_command(cli_path() + " scenario list > " + out + " 2>/dev/null") == 0);
  std::ifstream in(out);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines >= 6);
}

TEST_CASE("scenario nosol reports infeasibility") {
  const std::string out = tmp_file("locc_nosol.json");
  const int code = run_command(cli_path() + " scenario nosol --l2 0.8 --l3 0.6 --out " + out +
                               " >/dev/null 2>&1");
  CHECK(code == 0);
  CHECK(load_json(out)["verdict"] == "infeasible");

  CHECK(run_command(cli_path() + " scenario no-such-scenario >/dev/null 2>&1") == 1);
}

TEST_CASE("scenario fan-sweep stays within the eigenvalue bound") {
  const std::string out = tmp_file("locc_fan.json");
  const int code = run_command(cli_path() +
                               " scenario fan-sweep --dim 5 --q 3 --trials 1000 --seed 7 --out " +
                               out + " >/dev/null 2>&1");
  CHECK(code == 0);
  json report = load_json(out);
  CHECK(report["pass"].get<bool>());
  CHECK(report["max_excess_over_top_q"].get<double>() <= 1e-9);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  const std::string out1 = tmp_file("locc_threads1.json");
  const std::string out4 = tmp_file("locc_threads4.json");
  const std::string base = cli_path() + " run " + fixture_path("appendix_b.proto") +
                           " --p 0.3 --mode branch";
  CHECK(run_command(base + " --threads 1 --out " + out1 + " >/dev/null 2>&1") == 0);
  CHECK(run_command(base + " --threads 4 --out " + out4 + " >/dev/null 2>&1") == 0);
  CHECK(read_file(out1) == read_file(out4));

  const std::string out1b = tmp_file("locc_threads1_again.json");
  CHECK(run_command(base + " --threads 1 --out " + out1b + " >/dev/null 2>&1") == 0);
  CHECK(read_file(out1) == read_file(out1b));
}

TEST_CASE("sample mode is seeded and env-overridable") {
  const std::string out_a = tmp_file("locc_sample_a.json");
  const std::string out_b = tmp_file("locc_sample_b.json");
  const std::string base = cli_path() + " run " + fixture_path("bell_correct.proto") +
                           " --mode sample";
  CHECK(run_command(base + " --seed 5 --out " + out_a + " >/dev/null 2>&1") == 0);
  CHECK(run_command(base + " --seed 5 --out " + out_b + " >/dev/null 2>&1") == 0);
  CHECK(read_file(out_a) == read_file(out_b));

  const std::string out_env = tmp_file("locc_sample_env.json");
  CHECK(run_command("LOCC_SEED=9 " + base + " --seed 5 --out " + out_env + " >/dev/null 2>&1") ==
        0);
  CHECK(load_json(out_env)["seed"].get<int>() == 9);
}
