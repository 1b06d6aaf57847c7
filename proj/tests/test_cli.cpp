// Exercises the installed command-line surface end to end: subcommands,
// exit-code classes, file outputs and byte-for-byte determinism.  The
// binary path comes from the HFSC_BIN environment variable set by CTest.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hfsc/config.hpp"

namespace {

std::string bin_path() {
  const char* p = std::getenv("HFSC_BIN");
  REQUIRE_MESSAGE(p != nullptr, "HFSC_BIN must point at the CLI binary");
  return p;
}

std::string work_dir() {
  const char* p = std::getenv("HFSC_WORK");
  return p ? p : ".";
}

int run(const std::string& args) {
  const std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), ("missing file " + path).c_str());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << body;
}

const char* kModelHeader = "alpha1 = 1\nalpha2 = 1\nalpha3 = 1\nk = 1\n";

}  // namespace

TEST_CASE("evaluate: dense window around the reference soliton peak") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/eval_peak.cfg";
  // peak of the reference soliton sits at xt = ln 2 / 0.6
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "axis = x 1.154 1.157 3001\n"
                 "fixed = t 0\nfixed = y 0\n"
                 "output_prefix = eval_peak\n");
  CHECK(run("evaluate --config " + cfg + " --out " + dir + " --quiet") == 0);

  const std::string csv = slurp(dir + "/eval_peak_field.csv");
  CHECK(csv.substr(0, 18) == "x,re_u,im_u,abs_u\n");
  double best = 0.0;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    best = std::max(best, std::stod(line.substr(pos + 1)));
    ++rows;
  }
  CHECK(rows == 3001);
  CHECK(std::abs(best - 0.6) < 1e-9);

  // sidecar carries the evaluator and schema version
  const auto j = nlohmann::json::parse(slurp(dir + "/eval_peak_field.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["evaluator"] == "general");
  CHECK(j["rows"] == 3001);

  // determinism: a second run produces byte-identical outputs
  const std::string first = csv;
  const std::string side = slurp(dir + "/eval_peak_field.json");
  CHECK(run("evaluate --config " + cfg + " --out " + dir + " --quiet") == 0);
  CHECK(slurp(dir + "/eval_peak_field.csv") == first);
  CHECK(slurp(dir + "/eval_peak_field.json") == side);
}

TEST_CASE("evaluate: 1x1 grid yields a two-line CSV") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/eval_one.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "axis = x 0 0 1\n"
                 "output_prefix = eval_one\n");
  CHECK(run("evaluate --config " + cfg + " --out " + dir + " --quiet") == 0);
  const std::string csv = slurp(dir + "/eval_one_field.csv");
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 2);
}

TEST_CASE("verify: reference one-soliton passes with default tolerances") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/verify_ok.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "output_prefix = verify_ok\n");
  CHECK(run("verify --config " + cfg + " --out " + dir + " --quiet") == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/verify_ok_verify.json"));
  CHECK(j["pass"] == true);
  CHECK(j["residual"]["order"].get<double>() > 1.8);
  CHECK(j["residual"]["order"].get<double>() < 2.2);

  // a rerun reproduces the report byte for byte
  const std::string report = slurp(dir + "/verify_ok_verify.json");
  CHECK(run("verify --config " + cfg + " --out " + dir + " --quiet") == 0);
  CHECK(slurp(dir + "/verify_ok_verify.json") == report);
}

TEST_CASE("features: collision movie with the two-soliton evaluator") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/feat2.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.1 0.3 1 0 1 0\n"
                 "soliton = 0.3 0.5 1 0 1 0\n"
                 "axis = x -130 130 5201\naxis = t -30 30 9\nfixed = y 0\n"
                 "output_prefix = feat2\n");
  CHECK(run("features --config " + cfg + " --out " + dir +
            " --evaluator two --quiet") == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/feat2_features.json"));
  CHECK(j["mode"] == "collision");
  REQUIRE(j.contains("pre_collision_amplitudes"));
  CHECK(std::abs(j["pre_collision_amplitudes"][0].get<double>() - 0.6) < 0.012);
  CHECK(std::abs(j["post_collision_amplitudes"][1].get<double>() - 1.0) < 0.02);
}

TEST_CASE("evaluate honors the evaluator override") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/eval_two.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.1 0.3 1 0 1 0\n"
                 "soliton = 0.3 0.5 1 0 1 0\n"
                 "axis = x -5 5 11\n"
                 "output_prefix = eval_two\n");
  CHECK(run("evaluate --config " + cfg + " --out " + dir +
            " --evaluator two --quiet") == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/eval_two_field.json"));
  CHECK(j["evaluator"] == "two");
}

TEST_CASE("verify: corrupted-field hook fails the zero-curvature check") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/verify_bad.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "corrupt_epsilon = 0.01\n"
                 "output_prefix = verify_bad\n");
  CHECK(run("verify --config " + cfg + " --out " + dir + " --quiet") == 3);
  const auto j = nlohmann::json::parse(slurp(dir + "/verify_bad_verify.json"));
  CHECK(j["pass"] == false);
  bool zc_failed = false;
  for (const auto& c : j["checks"]) {
    const std::string name = c["name"];
    if (name.rfind("zero_curvature", 0) == 0 && c["pass"] == false)
      zc_failed = true;
  }
  CHECK(zc_failed);
}

TEST_CASE("exit codes: config errors give 1, numerical failures give 2") {
  const std::string dir = work_dir();

  // alpha4 is not settable
  const std::string bad1 = dir + "/bad_alpha4.cfg";
  write(bad1, std::string(kModelHeader) + "alpha4 = -6\n" +
                  "soliton = 0.2 0.3 1 0 0.5 0\n");
  CHECK(run("evaluate --config " + bad1 + " --out " + dir + " --quiet") == 1);

  // spectrum in the wrong half-plane
  const std::string bad2 = dir + "/bad_sigma.cfg";
  write(bad2, std::string(kModelHeader) + "soliton = 0.2 -0.3 1 0 1 0\n");
  CHECK(run("evaluate --config " + bad2 + " --out " + dir + " --quiet") == 1);

  // no soliton entries at all
  const std::string bad3 = dir + "/bad_empty.cfg";
  write(bad3, kModelHeader);
  CHECK(run("verify --config " + bad3 + " --out " + dir + " --quiet") == 1);

  // missing config file
  CHECK(run("evaluate --config " + dir + "/no_such.cfg --quiet") == 2);

  // overflow guard: the phase exceeds the e^300 budget
  const std::string bad4 = dir + "/bad_overflow.cfg";
  write(bad4, std::string(kModelHeader) +
                  "soliton = 0.2 0.3 1 0 0.5 0\n"
                  "axis = x 0 5000 11\n"
                  "output_prefix = bad_overflow\n");
  CHECK(run("evaluate --config " + bad4 + " --out " + dir + " --quiet") == 2);

  // CLI misuse
  CHECK(run("") == 1);
  CHECK(run("evaluate") == 1);
}

TEST_CASE("propagate: short run writes snapshots and a report") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/prop.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "prop_domain = -60 60\nprop_modes = 1024\n"
                 "prop_dt = 0.001\nprop_t0 = 0\nprop_t_final = 0.5\n"
                 "output_prefix = prop\n");
  CHECK(run("propagate --config " + cfg + " --out " + dir + " --quiet") == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/prop_prop.json"));
  CHECK(j["steps"] == 500);
  CHECK(j["l_inf_error"].get<double>() < 1e-5);
  CHECK(j["mass_rel_drift"].get<double>() < 1e-10);
  CHECK(!j.contains("wall_seconds"));
  CHECK(slurp(dir + "/prop_prop_initial.csv").substr(0, 2) == "x,");
  CHECK(slurp(dir + "/prop_prop_final.csv").substr(0, 2) == "x,");
}

TEST_CASE("shipped presets verify cleanly") {
  const char* presets = std::getenv("HFSC_PRESETS");
  REQUIRE_MESSAGE(presets != nullptr, "HFSC_PRESETS must point at docs/examples");
  const std::string dir = work_dir();
  for (const char* name :
       {"one_soliton.cfg", "two_soliton_collision.cfg",
        "breather_stationary.cfg", "breather_moving.cfg"}) {
    CHECK_MESSAGE(run("verify --config " + std::string(presets) + "/" + name +
                      " --out " + dir + " --quiet") == 0,
                  name);
  }
}

TEST_CASE("features: one-soliton movie reports the expected velocity") {
  const std::string dir = work_dir();
  const std::string cfg = dir + "/feat.cfg";
  write(cfg, std::string(kModelHeader) +
                 "soliton = 0.2 0.3 1 0 0.5 0\n"
                 "axis = x -25 15 801\naxis = t 0 4 17\nfixed = y 0\n"
                 "output_prefix = feat\n");
  CHECK(run("features --config " + cfg + " --out " + dir + " --quiet") == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/feat_features.json"));
  CHECK(j["mode"] == "single");
  CHECK(std::abs(j["fitted_velocity"].get<double>() + 2.4) < 0.048);
  CHECK(std::abs(j["peak_amplitude"].get<double>() - 0.6) < 0.006);
}
