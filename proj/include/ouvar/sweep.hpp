#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ouvar/decomp.hpp"
#include "ouvar/oukernel.hpp"

// Seeded samplers shared by the calibration tool and the acceptance suite,
// so both draw the same configurations.
namespace ouvar::sweep {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

struct Geometry {
  double x, s, sigma;
};

/// x in [0, 20], s log-uniform in [1e-2, 10], sigma in (1/2, 1).
inline Geometry random_geometry(Rng& rng) {
  Geometry g{uniform(rng, 0.0, 20.0), log_uniform(rng, 1e-2, 10.0), 0.0};
  do {
    g.sigma = uniform(rng, 0.5, 1.0);
  } while (!(g.sigma > 0.5));
  return g;
}

struct Pair {
  double x, u;
};

/// x in [-8, 8] and u in [-12, 12] with a nonzero global weight.
inline Pair random_global_pair(Rng& rng) {
  for (;;) {
    const Pair p{uniform(rng, -8.0, 8.0), uniform(rng, -12.0, 12.0)};
    if (decomp::local_weight(p.x, p.u) < 1.0) return p;
  }
}

struct Triple {
  double t, x, u;
};

/// t log-uniform in [1, 60], x and u in [-6, 6].
inline Triple random_large_time(Rng& rng) {
  const double t = log_uniform(rng, 1.0, 60.0);
  return {t, uniform(rng, -6.0, 6.0), uniform(rng, -6.0, 6.0)};
}

struct LocalConfig {
  oukernel::DiscreteMeasure measure;
  double x;
  double t;
};

/// Base point x in [-4, 4], one to five atoms of signed weight inside the
/// local zone of x (never at x itself), t log-uniform in [1e-4, 1].
inline LocalConfig random_local_config(Rng& rng) {
  const double x = uniform(rng, -4.0, 4.0);
  const double zone = 1.0 / (1.0 + std::abs(x));
  const int n = std::uniform_int_distribution<int>(1, 5)(rng);
  std::vector<oukernel::Atom> atoms;
  while (static_cast<int>(atoms.size()) < n) {
    const double u = x + uniform(rng, -zone, zone);
    if (u == x) continue;
    atoms.push_back({u, uniform(rng, -1.0, 1.0)});
  }
  return {oukernel::DiscreteMeasure(std::move(atoms)), x, log_uniform(rng, 1e-4, 1.0)};
}

}  // namespace ouvar::sweep
