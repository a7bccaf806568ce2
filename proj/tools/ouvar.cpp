#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ouvar/decomp.hpp"
#include "ouvar/experiment.hpp"
#include "ouvar/localized.hpp"
#include "ouvar/oukernel.hpp"
#include "ouvar/partition.hpp"
#include "ouvar/varnorm.hpp"

using namespace ouvar;

namespace {

constexpr int kUsageError = 2;
constexpr int kEnvelopeViolation = 1;

void print(double v) { std::cout << std::setprecision(17) << v << '\n'; }

// Either one value per sample, or "time value" pairs, one per line.
varnorm::SampledPath read_path(std::istream& in) {
  std::vector<double> times, values;
  std::string line;
  int lineno = 0;
  bool paired = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    std::vector<double> nums{std::istream_iterator<double>(fields), {}};
    if (!fields.eof()) {
      throw std::invalid_argument("stdin:" + std::to_string(lineno) + ": not a number");
    }
    if (nums.empty()) continue;
    if (times.empty() && values.empty()) paired = nums.size() == 2;
    if (paired) {
      if (nums.size() != 2) {
        throw std::invalid_argument("stdin:" + std::to_string(lineno) +
                                    ": expected 'time value'");
      }
      times.push_back(nums[0]);
      values.push_back(nums[1]);
    } else {
      for (double v : nums) {
        times.push_back(static_cast<double>(times.size()));
        values.push_back(v);
      }
    }
  }
  return varnorm::SampledPath(std::move(times), std::move(values));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rho-variation experiments for the Ornstein-Uhlenbeck semigroup"};
  app.require_subcommand(1);

  // variation
  auto* var = app.add_subcommand("variation", "rho-variation of a path read from stdin");
  double rho = 2.0;
  bool oracle = false;
  var->add_option("--rho", rho, "Exponent, >= 1")->required();
  var->add_flag("--oracle", oracle, "Also print the brute-force value (<= 20 samples)");

  // kernel
  auto* kernel = app.add_subcommand("kernel", "Mehler kernel evaluations");
  kernel->require_subcommand(1);
  double kt = 0.0, kx = 0.0, ku = 0.0;
  auto* k_eval = kernel->add_subcommand("eval", "K_t(x,u)");
  auto* k_dt = kernel->add_subcommand("dt", "dK_t(x,u)/dt");
  for (auto* sub : {k_eval, k_dt}) {
    sub->add_option("--t", kt, "Time, > 0")->required();
    sub->add_option("--x", kx)->required();
    sub->add_option("--u", ku)->required();
  }
  auto* k_poly = kernel->add_subcommand("poly", "Coefficients of P_{x,u}(w), increasing degree");
  auto* k_zeros = kernel->add_subcommand("zeros", "Zeros of t -> dK/dt in (0, 1)");
  for (auto* sub : {k_poly, k_zeros}) {
    sub->add_option("--x", kx)->required();
    sub->add_option("--u", ku)->required();
  }

  // decomp
  auto* dec = app.add_subcommand("decomp", "Local/global split of H_t");
  dec->require_subcommand(1);
  auto* d_eval = dec->add_subcommand("eval", "Evaluate one part at (t, x)");
  std::string part = "full";
  std::string measure_path;
  d_eval->add_option("--part", part)->check(CLI::IsMember({"local", "global", "full"}))
      ->capture_default_str();
  d_eval->add_option("--t", kt)->required();
  d_eval->add_option("--x", kx)->required();
  d_eval->add_option("--measure", measure_path, "File of 'location weight' lines")
      ->required()
      ->check(CLI::ExistingFile);

  // partition
  auto* par = app.add_subcommand("partition", "Local intervals I_j");
  par->require_subcommand(1);
  int jmax = 100;
  std::string out_path;
  auto* p_build = par->add_subcommand("build", "Print 'j x_j z_j^2-4j' for 0 <= j <= jmax");
  p_build->add_option("--jmax", jmax)->required()->check(CLI::Range(1, 100000000));
  p_build->add_option("--out", out_path, "Write to a file instead of stdout");
  double px = 0.0;
  auto* p_locate = par->add_subcommand("locate", "Index j with x in I_j");
  p_locate->add_option("--x", px)->required();
  p_locate->add_option("--jmax", jmax)->capture_default_str()->check(CLI::Range(1, 100000000));

  // localized
  auto* loc = app.add_subcommand("localized", "Truncated intervals J_t(s, sigma)");
  loc->require_subcommand(1);
  double ls = 1.0, lsigma = 0.75;
  auto* l_geom = loc->add_subcommand("geometry", "Critical times and F profile");
  l_geom->add_option("--x", kx)->required()->check(CLI::NonNegativeNumber);
  l_geom->add_option("--s", ls)->required()->check(CLI::PositiveNumber);
  l_geom->add_option("--sigma", lsigma)->capture_default_str();
  l_geom->add_option("--rho", rho, "Exponent for the F variation")->default_val(3.0);
  auto* l_rec = loc->add_subcommand("reconstruct", "Rebuild the local operator from R_t");
  double tol = 1e-6;
  l_rec->add_option("--t", kt)->required();
  l_rec->add_option("--x", kx)->required();
  l_rec->add_option("--measure", measure_path)->required()->check(CLI::ExistingFile);
  l_rec->add_option("--tol", tol, "Tolerance relative to ||g||")->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Weak-type experiments");
  exp->require_subcommand(1);
  auto* e_run = exp->add_subcommand("run", "Run a config; exit 1 when an envelope fails");
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir;
  e_run->add_option("--config", config, "Config file, or 'standard-suite'")->required();
  e_run->add_option("--seed", seed, "Recorded in the summary")->capture_default_str();
  e_run->add_option("--out", out_dir, "Override [outputs] dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*var) {
      const varnorm::Rho r(rho);
      const auto path = read_path(std::cin);
      print(varnorm::variation(path, r));
      if (oracle) print(varnorm::variation_bruteforce(path, r));
    } else if (*k_eval) {
      print(oukernel::mehler(kt, kx, ku));
    } else if (*k_dt) {
      print(oukernel::mehler_dt(kt, kx, ku));
    } else if (*k_poly) {
      const auto c = oukernel::dt_polynomial(kx, ku);
      std::cout << std::setprecision(17) << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3]
                << ' ' << c[4] << '\n';
    } else if (*k_zeros) {
      for (double t : oukernel::dt_zeros(kx, ku)) print(t);
    } else if (*d_eval) {
      const auto f = experiment::load_measure(measure_path);
      if (part == "local") print(decomp::local_apply(f, kt, kx));
      else if (part == "global") print(decomp::global_apply(f, kt, kx));
      else print(oukernel::semigroup_apply(f, kt, kx));
    } else if (*p_build) {
      const auto p = partition::Partition::build(jmax);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error(out_path + ": cannot write");
      }
      std::ostream& os = out_path.empty() ? std::cout : file;
      os << std::setprecision(17);
      const auto& xs = p.nonnegative_points();
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double z = 1.0 + xs[j];
        os << j << ' ' << xs[j] << ' ' << z * z - 4.0 * static_cast<double>(j) << '\n';
      }
    } else if (*p_locate) {
      std::cout << partition::locate(px, partition::Partition::build(jmax)) << '\n';
    } else if (*l_geom) {
      const localized::LocalizedGeometry g(kx, ls, lsigma);
      const auto prof = localized::f_profile(g, varnorm::Rho(rho));
      std::cout << std::setprecision(17) << "zone=" << g.zone() << '\n'
                << "t_tilde=" << g.t_tilde() << '\n'
                << "t_zero=" << g.t_zero() << '\n'
                << "t_one=" << g.t_one() << '\n'
                << "t_cap=" << g.t_cap() << '\n'
                << "segments=" << prof.segments << '\n'
                << "sup_f_plus=" << prof.sup_plus << '\n'
                << "sup_f_minus=" << prof.sup_minus << '\n'
                << "var_f_plus=" << prof.var_plus << '\n'
                << "var_f_minus=" << prof.var_minus << '\n';
    } else if (*l_rec) {
      const auto f = experiment::load_measure(measure_path);
      localized::ReconstructOptions opt;
      opt.tolerance = tol;
      const auto r = localized::reconstruct_local(f, kt, kx, opt);
      std::cout << std::setprecision(17) << "value=" << r.value << '\n'
                << "direct=" << r.direct << '\n'
                << "error_estimate=" << r.error_estimate << '\n'
                << "converged=" << (r.converged ? "true" : "false") << '\n';
    } else if (*e_run) {
      auto cfg = config == "standard-suite" ? experiment::standard_suite()
                                         : experiment::load_experiment(config);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto result = experiment::run_experiment(cfg);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& path : experiment::write_reports(cfg, result, seed)) {
        std::cerr << "wrote " << path.string() << '\n';
      }
      for (const auto& c : result.checks) {
        std::cout << (c.holds ? "ok   " : "FAIL ") << c.name << ' ' << std::setprecision(6)
                  << c.value << " <= " << c.bound << '\n';
      }
      return result.all_hold() ? 0 : kEnvelopeViolation;
    }
  } catch (const experiment::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
