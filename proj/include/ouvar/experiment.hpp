#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ouvar/harness.hpp"

namespace ouvar::experiment {

/// Malformed input. The message starts with "source:line: " when a line is
/// known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string value;
  std::string source;
  int line = 0;
};

/// INI-style key-value file: `[section]` headers, `key = value` lines,
/// `#` and `;` comments. Sections and keys are checked against the known
/// schema while parsing; duplicates are errors.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source);
  static Config load(const std::filesystem::path& path);

  const ConfigEntry* find(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const noexcept {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

/// `location weight` per line, `#` comments, blank lines ignored.
oukernel::DiscreteMeasure read_measure(std::istream& in, const std::string& source);
oukernel::DiscreteMeasure load_measure(const std::filesystem::path& path);

enum class Kind { distribution, large_time, local };

std::string to_string(Kind k);

struct Envelopes {
  double weak_type;
  double large_time;
  double local;
  double local_spread = 3.0;
  double refinement = 0.05;
};

Envelopes frozen_envelopes();

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<Kind> kinds;

  /// Custom input; replaces the unit-mass sweeps when present.
  std::optional<oukernel::DiscreteMeasure> measure;
  std::vector<double> distribution_masses{0.0, 1.0, 2.0, 4.0};
  std::vector<double> large_time_masses{1.0, 2.0, 4.0, 20.0};
  std::vector<int> local_j{1, 5, 20, 100};

  double t_min = 1e-6;
  double t_max = 20.0;
  std::size_t t_points_small = 512;
  std::size_t t_points_large = 256;
  std::size_t x_nodes = 2048;
  std::size_t local_nodes = 2048;
  bool refine = true;

  double rho = 3.0;
  harness::AlphaSpec alphas{};

  std::filesystem::path output_dir = ".";
  bool write_csv = true;
  bool write_json = true;

  Envelopes envelopes = frozen_envelopes();
};

/// Validates ranges and cross-field constraints. Relative paths in the
/// config resolve against `base_dir`.
ExperimentConfig to_experiment(const Config& c,
                               const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Built-in configuration for every experiment the acceptance suite needs.
ExperimentConfig standard_suite();

struct Run {
  Kind kind;
  std::string label;
  harness::ExperimentReport report;
};

struct EnvelopeCheck {
  std::string name;
  double value;
  double bound;
  bool holds;
};

struct SuiteResult {
  std::vector<Run> runs;
  std::vector<EnvelopeCheck> checks;
  std::vector<std::string> warnings;
  bool all_hold() const noexcept;
};

SuiteResult run_experiment(const ExperimentConfig& cfg);

/// Writes one CSV per run and `<name>_summary.json` into cfg.output_dir
/// (created if missing). Returns the paths written.
std::vector<std::filesystem::path> write_reports(const ExperimentConfig& cfg,
                                                 const SuiteResult& result,
                                                 std::uint64_t seed = 0);

void write_csv(std::ostream& out, const harness::ExperimentReport& r);

}  // namespace ouvar::experiment
