#include "ouvar/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ouvar/calibration.hpp"
#include "ouvar/partition.hpp"

namespace ouvar::experiment {

namespace fs = std::filesystem;
using oukernel::Atom;
using oukernel::DiscreteMeasure;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"name", "kinds"}},
      {"measure", {"atoms", "file", "distribution_masses", "large_time_masses", "local_j"}},
      {"grids",
       {"t_min", "t_max", "t_points_small", "t_points_large", "x_nodes", "local_nodes",
        "refine"}},
      {"rho", {"value"}},
      {"alpha", {"min", "max", "per_decade", "enhanced_min", "enhanced_max"}},
      {"outputs", {"dir", "csv", "json"}},
      {"envelopes", {"weak_type", "large_time", "local", "local_spread", "refinement"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& key, const std::string& msg) {
  fail(e.source, e.line, key + ": " + msg);
}

bool parse_number(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const ConfigEntry& e, const std::string& key) {
  double v = 0.0;
  if (!parse_number(e.value, v)) fail(e, key, "expected a finite number, got '" + e.value + "'");
  return v;
}

std::size_t to_count(const ConfigEntry& e, const std::string& key, std::size_t lo,
                     std::size_t hi) {
  const double v = to_double(e, key);
  if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(hi)) {
    fail(e, key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "], got '" + e.value + "'");
  }
  return static_cast<std::size_t>(v);
}

bool to_bool(const ConfigEntry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  fail(e, key, "expected true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const ConfigEntry& e, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split_list(e.value)) {
    double v = 0.0;
    if (!parse_number(tok, v)) fail(e, key, "bad list element '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string join_key(const std::string& section, const std::string& key) {
  return section + "." + key;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    const std::string text = trim(std::string_view(raw).substr(0, cut));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(source, line, "unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!schema().count(section)) fail(source, line, "unknown section [" + section + "]");
      c.sections_[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(source, line, "expected 'key = value'");
    if (section.empty()) fail(source, line, "key outside of any section");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (!schema().at(section).count(key)) {
      fail(source, line, "unknown key '" + key + "' in [" + section + "]");
    }
    auto& sec = c.sections_[section];
    if (const auto it = sec.find(key); it != sec.end()) {
      fail(source, line, "duplicate key '" + key + "' (first set on line " +
                             std::to_string(it->second.line) + ")");
    }
    sec.emplace(key, ConfigEntry{value, source, line});
  }
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse(in, path.string());
}

const ConfigEntry* Config::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

DiscreteMeasure read_measure(std::istream& in, const std::string& source) {
  std::vector<Atom> atoms;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    std::istringstream fields(text);
    std::string a, b, extra;
    fields >> a >> b;
    if (b.empty() || (fields >> extra)) {
      fail(source, line, "expected 'location weight'");
    }
    double u = 0.0, w = 0.0;
    if (!parse_number(a, u) || !parse_number(b, w)) {
      fail(source, line, "location and weight must be finite numbers");
    }
    atoms.push_back({u, w});
  }
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure load_measure(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open measure file");
  return read_measure(in, path.string());
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::distribution: return "distribution";
    case Kind::large_time: return "large_time";
    case Kind::local: return "local";
  }
  return "unknown";
}

Envelopes frozen_envelopes() {
  return {calibration::kWeakType, calibration::kLargeTime, calibration::kLocalWeakType};
}

ExperimentConfig to_experiment(const Config& c, const fs::path& base_dir) {
  ExperimentConfig cfg;
  cfg.kinds.clear();
  auto get = [&](const char* s, const char* k) { return c.find(s, k); };

  if (const auto* e = get("experiment", "name")) {
    if (e->value.empty() ||
        e->value.find_first_of("/\\ \t") != std::string::npos) {
      fail(*e, "experiment.name", "must be non-empty without spaces or slashes");
    }
    cfg.name = e->value;
  }
  if (const auto* e = get("experiment", "kinds")) {
    for (const auto& tok : split_list(e->value)) {
      if (tok == "distribution") cfg.kinds.push_back(Kind::distribution);
      else if (tok == "large_time") cfg.kinds.push_back(Kind::large_time);
      else if (tok == "local") cfg.kinds.push_back(Kind::local);
      else fail(*e, "experiment.kinds", "unknown kind '" + tok +
                                            "' (expected distribution, large_time, local)");
    }
  }
  if (cfg.kinds.empty()) {
    const auto* e = get("experiment", "kinds");
    if (e) fail(*e, "experiment.kinds", "no kinds listed");
    throw ConfigError("config: [experiment] kinds is required");
  }

  if (const auto* e = get("measure", "atoms")) {
    std::vector<Atom> atoms;
    for (const auto& tok : split_list(e->value)) {
      const auto colon = tok.find(':');
      double u = 0.0, w = 0.0;
      if (colon == std::string::npos || !parse_number(tok.substr(0, colon), u) ||
          !parse_number(tok.substr(colon + 1), w)) {
        fail(*e, "measure.atoms", "expected 'location:weight' tokens, got '" + tok + "'");
      }
      atoms.push_back({u, w});
    }
    cfg.measure = DiscreteMeasure(std::move(atoms));
  }
  if (const auto* e = get("measure", "file")) {
    if (cfg.measure) fail(*e, "measure.file", "give either atoms or file, not both");
    fs::path p = e->value;
    if (p.is_relative()) p = base_dir / p;
    try {
      cfg.measure = load_measure(p);
    } catch (const ConfigError& err) {
      fail(*e, "measure.file", err.what());
    }
  }
  if (const auto* e = get("measure", "distribution_masses")) {
    cfg.distribution_masses = to_list(*e, "measure.distribution_masses");
  }
  if (const auto* e = get("measure", "large_time_masses")) {
    cfg.large_time_masses = to_list(*e, "measure.large_time_masses");
  }
  if (const auto* e = get("measure", "local_j")) {
    cfg.local_j.clear();
    for (double v : to_list(*e, "measure.local_j")) {
      if (v != std::floor(v) || std::abs(v) > 100000) {
        fail(*e, "measure.local_j", "indices must be integers with |j| <= 100000");
      }
      cfg.local_j.push_back(static_cast<int>(v));
    }
  }

  if (const auto* e = get("grids", "t_min")) {
    cfg.t_min = to_double(*e, "grids.t_min");
    if (!(cfg.t_min > 0.0 && cfg.t_min < 1.0)) fail(*e, "grids.t_min", "must lie in (0, 1)");
  }
  if (const auto* e = get("grids", "t_max")) {
    cfg.t_max = to_double(*e, "grids.t_max");
    if (!(cfg.t_max > 1.0 && cfg.t_max <= 700.0)) fail(*e, "grids.t_max", "must lie in (1, 700]");
  }
  if (const auto* e = get("grids", "t_points_small")) {
    cfg.t_points_small = to_count(*e, "grids.t_points_small", 2, 1 << 20);
  }
  if (const auto* e = get("grids", "t_points_large")) {
    cfg.t_points_large = to_count(*e, "grids.t_points_large", 2, 1 << 20);
  }
  if (const auto* e = get("grids", "x_nodes")) {
    cfg.x_nodes = to_count(*e, "grids.x_nodes", 2, 8192);
  }
  if (const auto* e = get("grids", "local_nodes")) {
    cfg.local_nodes = to_count(*e, "grids.local_nodes", 2, 1 << 20);
    if (cfg.local_nodes % 2 != 0) fail(*e, "grids.local_nodes", "must be even");
  }
  if (const auto* e = get("grids", "refine")) cfg.refine = to_bool(*e, "grids.refine");

  if (const auto* e = get("rho", "value")) {
    cfg.rho = to_double(*e, "rho.value");
    if (!(cfg.rho >= 1.0)) fail(*e, "rho.value", "must be >= 1");
  }

  if (const auto* e = get("alpha", "min")) cfg.alphas.min = to_double(*e, "alpha.min");
  if (const auto* e = get("alpha", "max")) cfg.alphas.max = to_double(*e, "alpha.max");
  if (const auto* e = get("alpha", "per_decade")) {
    cfg.alphas.per_decade = to_count(*e, "alpha.per_decade", 1, 10000);
  }
  if (const auto* e = get("alpha", "enhanced_min")) {
    cfg.alphas.enhanced_lo = to_double(*e, "alpha.enhanced_min");
  }
  if (const auto* e = get("alpha", "enhanced_max")) {
    cfg.alphas.enhanced_hi = to_double(*e, "alpha.enhanced_max");
  }
  if (!(cfg.alphas.min > 0.0 && cfg.alphas.max > cfg.alphas.min)) {
    const auto* e = get("alpha", "max") ? get("alpha", "max") : get("alpha", "min");
    if (e) fail(*e, "alpha", "need 0 < min < max");
  }
  if (!(cfg.alphas.enhanced_lo > 1.0 && cfg.alphas.enhanced_hi > cfg.alphas.enhanced_lo)) {
    const auto* e = get("alpha", "enhanced_max") ? get("alpha", "enhanced_max")
                                                 : get("alpha", "enhanced_min");
    if (e) fail(*e, "alpha", "need 1 < enhanced_min < enhanced_max");
  }

  if (const auto* e = get("outputs", "dir")) {
    if (e->value.empty()) fail(*e, "outputs.dir", "must not be empty");
    cfg.output_dir = e->value;
    if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
  }
  if (const auto* e = get("outputs", "csv")) cfg.write_csv = to_bool(*e, "outputs.csv");
  if (const auto* e = get("outputs", "json")) cfg.write_json = to_bool(*e, "outputs.json");

  auto positive = [&](const char* key, double& slot) {
    if (const auto* e = get("envelopes", key)) {
      slot = to_double(*e, join_key("envelopes", key));
      if (!(slot > 0.0)) fail(*e, join_key("envelopes", key), "must be > 0");
    }
  };
  positive("weak_type", cfg.envelopes.weak_type);
  positive("large_time", cfg.envelopes.large_time);
  positive("local", cfg.envelopes.local);
  positive("local_spread", cfg.envelopes.local_spread);
  positive("refinement", cfg.envelopes.refinement);
  return cfg;
}

ExperimentConfig load_experiment(const fs::path& path) {
  return to_experiment(Config::load(path), path.parent_path());
}

ExperimentConfig standard_suite() {
  ExperimentConfig cfg;
  cfg.name = "standard-suite";
  cfg.kinds = {Kind::distribution, Kind::large_time, Kind::local};
  return cfg;
}

bool SuiteResult::all_hold() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

namespace {

std::string number_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check(SuiteResult& out, std::string name, double value, double bound) {
  out.checks.push_back({std::move(name), value, bound, value <= bound});
}

void check_refinement(SuiteResult& out, const Run& run, double bound) {
  if (!run.report.refined) return;
  check(out, to_string(run.kind) + "/" + run.label + "/refinement",
        run.report.refinement.relative_change, bound);
}

}  // namespace

SuiteResult run_experiment(const ExperimentConfig& cfg) {
  SuiteResult out;
  const varnorm::Rho rho(cfg.rho);
  if (cfg.rho <= 2.0) {
    out.warnings.push_back("rho = " + number_label(cfg.rho) +
                           " <= 2: the weak-type bounds are only claimed for rho > 2; "
                           "computing anyway");
  }

  for (Kind kind : cfg.kinds) {
    std::vector<Run> runs;
    if (kind == Kind::distribution) {
      harness::DistributionSpec spec{
          harness::TimeGrid::geometric(cfg.t_min, 1.0, cfg.t_points_small)
              .merged(harness::TimeGrid::geometric(1.0, cfg.t_max, cfg.t_points_large)),
          cfg.x_nodes, cfg.alphas, cfg.refine};
      if (cfg.measure) {
        runs.push_back({kind, "custom", harness::distribution(*cfg.measure, rho, spec)});
      } else {
        for (double u : cfg.distribution_masses) {
          runs.push_back({kind, "u=" + number_label(u),
                          harness::distribution(DiscreteMeasure::point_mass(u), rho, spec)});
        }
      }
      for (auto& r : runs) {
        check(out, "distribution/" + r.label + "/weak_type", r.report.weak_constant,
              cfg.envelopes.weak_type);
        check_refinement(out, r, cfg.envelopes.refinement);
      }
    } else if (kind == Kind::large_time) {
      harness::LargeTimeSpec spec{cfg.t_points_large, cfg.x_nodes, cfg.alphas, cfg.refine};
      if (cfg.measure) {
        runs.push_back(
            {kind, "custom", harness::large_time_distribution(*cfg.measure, rho, spec)});
      } else {
        for (double u : cfg.large_time_masses) {
          runs.push_back({kind, "u=" + number_label(u),
                          harness::large_time_distribution(DiscreteMeasure::point_mass(u),
                                                           rho, spec)});
        }
      }
      for (auto& r : runs) {
        check(out, "large_time/" + r.label + "/enhanced", r.report.enhanced_constant,
              cfg.envelopes.large_time);
        check_refinement(out, r, cfg.envelopes.refinement);
      }
    } else {
      harness::LocalSpec spec;
      spec.t_min = cfg.t_min;
      spec.t_points = cfg.t_points_small;
      spec.x_nodes = cfg.local_nodes;
      spec.alphas = cfg.alphas;
      spec.refine = cfg.refine;
      int jmax = 1;
      for (int j : cfg.local_j) jmax = std::max(jmax, std::abs(j) + 1);
      spec.jmax = jmax;
      const auto p = partition::Partition::build(jmax);
      if (cfg.measure && cfg.local_j.size() != 1) {
        throw ConfigError("config: a custom measure with kind 'local' needs exactly one local_j");
      }
      for (int j : cfg.local_j) {
        const DiscreteMeasure f = cfg.measure ? *cfg.measure : DiscreteMeasure::point_mass(p.point(j));
        runs.push_back({kind, "j=" + std::to_string(j), harness::local_distribution(f, j, rho, spec)});
      }
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (auto& r : runs) {
        check(out, "local/" + r.label + "/weak_type", r.report.weak_constant,
              cfg.envelopes.local);
        check_refinement(out, r, cfg.envelopes.refinement);
        lo = std::min(lo, r.report.weak_constant);
        hi = std::max(hi, r.report.weak_constant);
      }
      if (runs.size() >= 2 && lo > 0.0) {
        check(out, "local/uniformity", hi / lo, cfg.envelopes.local_spread);
      }
    }
    for (auto& r : runs) {
      r.report.label = to_string(r.kind) + "_" + r.label;
      out.runs.push_back(std::move(r));
    }
  }
  return out;
}

void write_csv(std::ostream& out, const harness::ExperimentReport& r) {
  out << "alpha,gamma,alpha_gamma,alpha_sqrtlog_gamma\n";
  out << std::setprecision(10);
  for (std::size_t i = 0; i < r.alphas.size(); ++i) {
    out << r.alphas[i] << ',' << r.measure[i] << ',' << r.alpha_measure[i] << ','
        << r.enhanced[i] << '\n';
  }
}

std::vector<fs::path> write_reports(const ExperimentConfig& cfg, const SuiteResult& result,
                                    std::uint64_t seed) {
  std::vector<fs::path> written;
  fs::create_directories(cfg.output_dir);
  auto file_label = [](std::string s) {
    std::replace(s.begin(), s.end(), '=', '_');
    return s;
  };
  if (cfg.write_csv) {
    for (const auto& run : result.runs) {
      const fs::path path = cfg.output_dir / (cfg.name + "_" + file_label(run.report.label) + ".csv");
      std::ofstream out(path);
      if (!out) throw std::runtime_error(path.string() + ": cannot write");
      write_csv(out, run.report);
      written.push_back(path);
    }
  }
  if (cfg.write_json) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["seed"] = seed;
    j["rho"] = cfg.rho;
    j["all_hold"] = result.all_hold();
    j["warnings"] = result.warnings;
    for (const auto& run : result.runs) {
      const auto& r = run.report;
      nlohmann::json e{{"kind", to_string(run.kind)},
                       {"label", run.label},
                       {"max_value", r.max_value},
                       {"weak_constant", r.weak_constant},
                       {"enhanced_constant", r.enhanced_constant},
                       {"slope", r.slope},
                       {"slope_points", r.slope_points}};
      if (r.refined) {
        e["refinement"] = {{"coarse", r.refinement.coarse},
                           {"fine", r.refinement.fine},
                           {"relative_change", r.refinement.relative_change}};
      }
      j["runs"].push_back(e);
    }
    for (const auto& c : result.checks) {
      j["checks"].push_back(
          {{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"holds", c.holds}});
    }
    const fs::path path = cfg.output_dir / (cfg.name + "_summary.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    out << j.dump(2) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace ouvar::experiment
