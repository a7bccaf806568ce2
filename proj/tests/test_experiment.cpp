#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ouvar/calibration.hpp"
#include "ouvar/experiment.hpp"

using namespace ouvar;
using namespace ouvar::experiment;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    to_experiment(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Smallest settings that still run every code path.
const char* kTiny = R"(
[experiment]
name = tiny
kinds = distribution large_time local
[measure]
distribution_masses = 1
large_time_masses = 2
local_j = 1 3
[grids]
t_points_small = 48
t_points_large = 32
x_nodes = 128
local_nodes = 128
refine = false
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse("# comment\n[experiment]\nname = run1 ; trailing\nkinds = local\n\n[rho]\nvalue=2.5\n");
  REQUIRE(c.find("experiment", "name") != nullptr);
  CHECK(c.find("experiment", "name")->value == "run1");
  CHECK(c.find("experiment", "name")->line == 3);
  CHECK(c.find("rho", "value")->value == "2.5");
  CHECK(c.find("rho", "missing") == nullptr);

  auto err = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(starts_with(err("[experiment]\nname = a\nname = b\n"), "test.cfg:3: duplicate key"));
  CHECK(starts_with(err("[nonsense]\n"), "test.cfg:1: unknown section"));
  CHECK(starts_with(err("[grids]\n\nx_nodez = 3\n"), "test.cfg:3: unknown key 'x_nodez'"));
  CHECK(starts_with(err("name = a\n"), "test.cfg:1: key outside"));
  CHECK(starts_with(err("[rho]\njust words\n"), "test.cfg:2: expected 'key = value'"));
  CHECK(starts_with(err("[rho\n"), "test.cfg:1: unterminated"));
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config values are validated with their line") {
  const std::string head = "[experiment]\nkinds = distribution\n";
  CHECK(starts_with(error_of(head + "[rho]\nvalue = 0.5\n"), "test.cfg:4: rho.value"));
  CHECK(starts_with(error_of(head + "[rho]\nvalue = abc\n"), "test.cfg:4: rho.value"));
  CHECK(starts_with(error_of(head + "[grids]\nx_nodes = 100000\n"), "test.cfg:4: grids.x_nodes"));
  CHECK(starts_with(error_of(head + "[grids]\nlocal_nodes = 101\n"), "test.cfg:4: grids.local_nodes"));
  CHECK(starts_with(error_of(head + "[grids]\nt_min = 2\n"), "test.cfg:4: grids.t_min"));
  CHECK(starts_with(error_of(head + "[grids]\nrefine = maybe\n"), "test.cfg:4: grids.refine"));
  CHECK(starts_with(error_of(head + "[measure]\natoms = 1:2 3\n"), "test.cfg:4: measure.atoms"));
  CHECK(starts_with(error_of("[experiment]\nkinds = weird\n"), "test.cfg:2: experiment.kinds"));
  CHECK(starts_with(error_of("[experiment]\nname = a b\nkinds = local\n"), "test.cfg:2: experiment.name"));
  CHECK(!error_of("[rho]\nvalue = 3\n").empty());  // kinds missing
  CHECK(error_of(head).empty());
}

TEST_CASE("measure files") {
  std::istringstream good("# two atoms\n0.5 1\n\n-1e-1 -2.5  # trailing\n");
  const auto m = read_measure(good, "m.txt");
  REQUIRE(m.size() == 2);
  CHECK(m.atoms()[0].location == -0.1);
  CHECK(m.atoms()[0].weight == -2.5);

  std::istringstream bad("0.5 1\n0.5\n");
  try {
    read_measure(bad, "m.txt");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(starts_with(e.what(), "m.txt:2:"));
  }
  std::istringstream nan("nan 1\n");
  CHECK_THROWS_AS(read_measure(nan, "m.txt"), ConfigError);
  CHECK_THROWS_AS(load_measure("/nonexistent/measure.txt"), ConfigError);

  const fs::path dir = fs::temp_directory_path() / "ouvar_test_measure";
  fs::create_directories(dir);
  std::ofstream(dir / "m.txt") << "1 2\n";
  std::ofstream(dir / "x.cfg") << "[experiment]\nkinds = local\n[measure]\nfile = m.txt\n";
  const auto cfg = load_experiment(dir / "x.cfg");
  REQUIRE(cfg.measure.has_value());
  CHECK(cfg.measure->atoms()[0].location == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("defaults and the built-in suite") {
  const auto cfg = to_experiment(parse("[experiment]\nkinds = distribution\n"));
  CHECK(cfg.rho == 3.0);
  CHECK(cfg.x_nodes == 2048);
  CHECK(cfg.envelopes.weak_type == calibration::kWeakType);
  CHECK(cfg.envelopes.large_time == calibration::kLargeTime);
  CHECK(cfg.envelopes.local == calibration::kLocalWeakType);

  const auto suite = standard_suite();
  CHECK(suite.kinds.size() == 3);
  CHECK(suite.distribution_masses == std::vector<double>{0.0, 1.0, 2.0, 4.0});
  CHECK(suite.local_j == std::vector<int>{1, 5, 20, 100});
  CHECK(suite.refine);
}

TEST_CASE("a small run end to end") {
  const auto cfg = to_experiment(parse(kTiny));
  const auto result = run_experiment(cfg);
  CHECK(result.warnings.empty());
  REQUIRE(result.runs.size() == 4);
  CHECK(result.runs[0].report.label == "distribution_u=1");
  CHECK(result.runs[3].report.label == "local_j=3");
  bool uniformity = false;
  for (const auto& c : result.checks) {
    CHECK(c.holds == (c.value <= c.bound));
    uniformity |= c.name == "local/uniformity";
  }
  CHECK(uniformity);

  auto out = cfg;
  out.output_dir = fs::temp_directory_path() / "ouvar_test_reports";
  fs::remove_all(out.output_dir);
  const auto written = write_reports(out, result, 17);
  CHECK(written.size() == 5);
  CHECK(fs::exists(out.output_dir / "tiny_distribution_u_1.csv"));
  std::ifstream csv(out.output_dir / "tiny_local_j_3.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "alpha,gamma,alpha_gamma,alpha_sqrtlog_gamma");

  std::ifstream js(out.output_dir / "tiny_summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["seed"] == 17);
  CHECK(j["runs"].size() == 4);
  CHECK(j["all_hold"] == result.all_hold());
  CHECK(j["runs"][0]["weak_constant"].get<double>() == result.runs[0].report.weak_constant);
  fs::remove_all(out.output_dir);
}

TEST_CASE("degenerate inputs") {
  // An empty custom measure gives an all-zero report rather than an error.
  const auto empty = to_experiment(parse("[experiment]\nkinds = distribution\n[measure]\natoms =\n"
                                         "[grids]\nx_nodes = 64\nt_points_small = 16\n"
                                         "t_points_large = 16\nrefine = false\n"));
  REQUIRE(empty.measure.has_value());
  CHECK(empty.measure->empty());
  const auto r = run_experiment(empty);
  REQUIRE(r.runs.size() == 1);
  CHECK(r.runs[0].report.weak_constant == 0.0);
  CHECK(r.runs[0].report.max_value == 0.0);
  CHECK(r.all_hold());

  auto low = to_experiment(parse(kTiny));
  low.kinds = {Kind::distribution};
  low.rho = 1.5;
  const auto warned = run_experiment(low);
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.warnings[0].find("rho = 1.5") != std::string::npos);

  auto custom_local = to_experiment(parse(kTiny));
  custom_local.kinds = {Kind::local};
  custom_local.measure = oukernel::DiscreteMeasure::point_mass(1.4);
  CHECK_THROWS_AS(run_experiment(custom_local), ConfigError);
  custom_local.local_j = {9};
  CHECK_THROWS_AS(run_experiment(custom_local), std::invalid_argument);  // atom not in I_9
  custom_local.local_j = {1};
  CHECK(run_experiment(custom_local).runs.size() == 1);
}
