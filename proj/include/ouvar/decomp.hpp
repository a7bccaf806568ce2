#pragma once

#include <span>

#include "ouvar/oukernel.hpp"

namespace ouvar::decomp {

/// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf), and 1 - p(2y - 1) in
/// between, with p(s) = 10 s^3 - 15 s^4 + 6 s^5 the quintic smoothstep
/// (p' = p'' = 0 at both ends, so eta is C^2).
struct Cutoff {
  static double eta(double y);
  static double eta_prime(double y);
};

double eta(double y);
double eta_prime(double y);

/// eta((1 + |x|) |x - u|): membership weight of u in the local zone of x.
double local_weight(double x, double u);

double local_apply(const oukernel::DiscreteMeasure& f, double t, double x);
double global_apply(const oukernel::DiscreteMeasure& f, double t, double x);

/// sup over t in (0, 1] of e^{-R(x)} K_t(x,u) (1 - eta) / (1 + |x|).
/// A dense log grid locates the maximum and golden-section search polishes it.
double global_kernel_sup_ratio(double x, double u);

/// Total variation in t of the global part on a grid,
/// against 10 * C * e^{R(x)} (1 + |x|) ||f|| with C the frozen global-kernel
/// constant (the factor 10 covers the zero count of dK/dt).
struct GlobalVariationCheck {
  double variation = 0.0;
  double envelope = 0.0;
  bool holds = true;
};

GlobalVariationCheck global_variation_bound(const oukernel::DiscreteMeasure& f,
                                            double x,
                                            std::span<const double> grid);

}  // namespace ouvar::decomp
