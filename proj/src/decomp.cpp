#include "ouvar/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ouvar/calibration.hpp"
#include "ouvar/varnorm.hpp"

namespace ouvar::decomp {

using oukernel::Atom;
using oukernel::DiscreteMeasure;

double Cutoff::eta(double y) {
  if (!(y >= 0.0)) {
    throw std::domain_error("eta: argument must be >= 0, got " + std::to_string(y));
  }
  if (y <= 0.5) return 1.0;
  if (y >= 1.0) return 0.0;
  const double s = 2.0 * y - 1.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double Cutoff::eta_prime(double y) {
  if (!(y >= 0.0)) {
    throw std::domain_error("eta_prime: argument must be >= 0, got " + std::to_string(y));
  }
  if (y <= 0.5 || y >= 1.0) return 0.0;
  const double s = 2.0 * y - 1.0;
  const double one_minus = 1.0 - s;
  return -60.0 * s * s * one_minus * one_minus;
}

double eta(double y) { return Cutoff::eta(y); }
double eta_prime(double y) { return Cutoff::eta_prime(y); }

double local_weight(double x, double u) {
  return eta((1.0 + std::abs(x)) * std::abs(x - u));
}

double local_apply(const DiscreteMeasure& f, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("local_apply: t must be > 0");
  double acc = 0.0;
  for (const Atom& a : f.atoms()) {
    const double w = local_weight(x, a.location);
    if (w == 0.0) continue;
    acc += a.weight * oukernel::mehler(t, x, a.location) * w;
  }
  return acc;
}

double global_apply(const DiscreteMeasure& f, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("global_apply: t must be > 0");
  double acc = 0.0;
  for (const Atom& a : f.atoms()) {
    const double w = 1.0 - local_weight(x, a.location);
    if (w == 0.0) continue;
    acc += a.weight * oukernel::mehler(t, x, a.location) * w;
  }
  return acc;
}

double global_kernel_sup_ratio(double x, double u) {
  const double cut = 1.0 - local_weight(x, u);
  if (cut == 0.0) return 0.0;
  auto g = [&](double log_t) {
    return oukernel::mehler_normalized(std::exp(log_t), x, u);
  };

  constexpr int kGrid = 600;
  const double lo = std::log(1e-12);
  const double hi = 0.0;
  const double h = (hi - lo) / kGrid;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = g(lo + h * i);
    if (v > best_val) { best_val = v; best = i; }
  }
  // Golden-section polish on the bracketing cells.
  double a = lo + h * std::max(0, best - 1);
  double b = lo + h * std::min(kGrid, best + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (gc > gd) { b = d; d = c; gd = gc; c = b - phi * (b - a); gc = g(c); }
    else { a = c; c = d; gc = gd; d = a + phi * (b - a); gd = g(d); }
  }
  best_val = std::max({best_val, gc, gd});
  return best_val * cut / (1.0 + std::abs(x));
}

GlobalVariationCheck global_variation_bound(const DiscreteMeasure& f, double x,
                                            std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("global_variation_bound: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || grid[i] > 1.0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument(
          "global_variation_bound: grid must be strictly increasing in (0, 1]");
    }
  }
  std::vector<double> path(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) path[i] = global_apply(f, grid[i], x);

  GlobalVariationCheck out;
  out.variation = varnorm::variation(path, varnorm::Rho(1.0));
  out.envelope = 10.0 * calibration::kGlobalKernelSup *
                 std::exp(oukernel::GaussianMeasure::exponent(x)) *
                 (1.0 + std::abs(x)) * f.norm();
  out.holds = out.variation <= out.envelope;
  return out;
}

}  // namespace ouvar::decomp
