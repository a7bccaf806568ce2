#include "ouvar/localized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ouvar/decomp.hpp"
#include "ouvar/polynomial.hpp"
#include "ouvar/quadrature.hpp"

namespace ouvar::localized {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxRootTime = 300.0;

void require_time_in_range(const LocalizedGeometry& g, double t, const char* who) {
  if (!(t > 0.0) || t > g.t_cap()) {
    throw std::invalid_argument(std::string(who) + ": t = " + std::to_string(t) +
                                " outside (0, t_cap = " + std::to_string(g.t_cap()) + "]");
  }
}

// Root of an increasing function on (lo, hi) by bisection to full precision.
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

template <class F>
double bisect_decreasing(F&& f, double lo, double hi) {
  return bisect_increasing([&](double t) { return -f(t); }, lo, hi);
}

}  // namespace

LocalizedGeometry::LocalizedGeometry(double x, double s, double sigma)
    : x_(x), s_(s), sigma_(sigma) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument("localized geometry: x must be finite and >= 0");
  }
  if (!std::isfinite(s) || !(s > 0.0)) {
    throw std::invalid_argument("localized geometry: s must be finite and > 0");
  }
  if (!(sigma > 0.5 && sigma < 1.0)) {
    throw std::invalid_argument("localized geometry: sigma must lie in (1/2, 1)");
  }
  zone_ = sigma_ / (1.0 + x_);
  if (x_ > s_) {
    const double ratio = s_ / x_;
    t_tilde_ = -0.5 * std::log1p(-ratio * ratio);
    t_zero_ = std::log1p(2.0 * s_ * s_ / ((x_ - s_) * (x_ + s_)));
    t_one_ = q_root(zone_);
  } else {
    t_tilde_ = t_zero_ = t_one_ = kInf;
  }
  t_cap_ = std::min(1.0, t_one_);
}

double LocalizedGeometry::q(double t) const noexcept {
  return x_ * std::expm1(t) - s_ * std::sqrt(std::expm1(2.0 * t));
}

double LocalizedGeometry::q_root(double level) const {
  if (!(x_ > s_)) {
    throw std::invalid_argument("q_root: Q has no increasing branch when x <= s");
  }
  const double lo = t_tilde_;
  if (!(q(lo) < level)) {
    throw std::invalid_argument("q_root: level must exceed min Q = Q(t_tilde)");
  }
  double hi = lo + 1.0;
  while (q(hi) < level) {
    hi = lo + 2.0 * (hi - lo);
    if (hi > kMaxRootTime) return kInf;
  }
  return bisect_increasing([&](double t) { return q(t) - level; }, lo, hi);
}

LocalizedGeometry critical_times(double x, double s, double sigma) {
  return LocalizedGeometry(x, s, sigma);
}

double q_function(const LocalizedGeometry& g, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("q_function: t must be > 0");
  return g.q(t);
}

Endpoints interval_endpoints(const LocalizedGeometry& g, double t) {
  require_time_in_range(g, t, "interval_endpoints");
  const double zone = g.zone();
  const double spread = g.s() * std::sqrt(std::expm1(2.0 * t));
  Endpoints e{};
  e.plus_length = std::min(g.x() * std::expm1(t) + spread, zone);
  e.minus_offset = std::max(g.q(t), -zone);
  e.empty = (g.empty_at_cap() && t == g.t_cap()) || e.minus_offset >= e.plus_length;
  if (e.empty) e.minus_offset = e.plus_length;
  e.k_plus = g.x() + e.plus_length;
  e.k_minus = g.x() + e.minus_offset;
  return e;
}

double r_operator(const DiscreteMeasure& gm, const LocalizedGeometry& g, double t) {
  const Endpoints e = interval_endpoints(g, t);
  if (e.empty) return 0.0;
  return gm.open_sum(e.k_minus, e.k_plus) / std::sqrt(-std::expm1(-2.0 * t));
}

double one_sided_mean(const DiscreteMeasure& gm, double x, double tau, Side side) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("one_sided_mean: tau must be > 0, got " + std::to_string(tau));
  }
  const double sum = side == Side::plus ? gm.open_sum(x, x + tau) : gm.open_sum(x - tau, x);
  return sum / tau;
}

MeansDecomposition means_decomposition(const DiscreteMeasure& gm,
                                       const LocalizedGeometry& g, double t) {
  if (gm.has_atom_at(g.x())) {
    throw std::invalid_argument(
        "means_decomposition: x carries an atom; use a point off the support");
  }
  const Endpoints e = interval_endpoints(g, t);
  const double root_d = std::sqrt(-std::expm1(-2.0 * t));

  MeansDecomposition out;
  if (e.plus_length > 0.0) {
    out.term_plus = e.plus_length / root_d *
                    one_sided_mean(gm, g.x(), e.plus_length, Side::plus);
  }
  out.sign = e.minus_offset < 0.0 ? 1 : -1;
  const double minus_length = std::abs(e.minus_offset);
  if (minus_length > 0.0) {
    const Side side = out.sign > 0 ? Side::minus : Side::plus;
    out.term_minus = minus_length / root_d * one_sided_mean(gm, g.x(), minus_length, side);
  }
  return out;
}

FFactors f_factors(const LocalizedGeometry& g, double t) {
  require_time_in_range(g, t, "f_factors");
  const double root_d = std::sqrt(-std::expm1(-2.0 * t));
  const double drift = g.x() * std::expm1(t) / root_d;
  const double spread = g.s() * std::exp(t);
  const double cap = g.zone() / root_d;
  return {std::min(std::abs(drift + spread), cap), std::min(std::abs(drift - spread), cap)};
}

std::vector<double> monotone_segments(const LocalizedGeometry& g) {
  const double cap_t = g.t_cap();
  const double zone = g.zone();
  const double x = g.x();
  const double s = g.s();
  std::vector<double> bps;
  auto add = [&](double t) {
    if (t > 0.0 && t < cap_t) bps.push_back(t);
  };

  add(g.t_tilde());
  add(g.t_zero());

  // |J^+| = x(e^t - 1) + s sqrt(e^{2t} - 1) is increasing: one possible switch.
  auto plus_gap = [&](double t) {
    return x * std::expm1(t) + s * std::sqrt(std::expm1(2.0 * t)) - zone;
  };
  if (plus_gap(cap_t) > 0.0) add(bisect_increasing(plus_gap, 0.0, cap_t));

  // |Q| = zone with Q < 0: at most once on each monotone branch of Q.
  auto minus_gap = [&](double t) { return g.q(t) + zone; };
  const double fall_end = std::min(g.t_tilde(), cap_t);
  if (minus_gap(fall_end) < 0.0) add(bisect_decreasing(minus_gap, 0.0, fall_end));
  if (g.t_tilde() < cap_t) {
    const double rise_end = std::min(g.t_zero(), cap_t);
    if (minus_gap(g.t_tilde()) < 0.0 && minus_gap(rise_end) > 0.0) {
      add(bisect_increasing(minus_gap, g.t_tilde(), rise_end));
    }
  }

  // Critical points of x(e^t-1)/sqrt(1-e^{-2t}) -+ s e^t, squared into a
  // quartic in y = e^t.
  const Polynomial lead{-1.0, 1.0, 1.0};           // y^2 + y - 1
  const Polynomial yp1{1.0, 1.0}, ym1{-1.0, 1.0};  // y + 1, y - 1
  const Polynomial quartic = (x * x) * (lead * lead) - (s * s) * (yp1 * yp1 * yp1 * ym1);
  for (double y : quartic.roots_in(1.0, std::exp(cap_t))) {
    const double lhs = x * lead(y);
    const double rhs = s * std::pow(y + 1.0, 1.5) * std::sqrt(y - 1.0);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    if (std::abs(lhs - rhs) <= 1e-8 * scale || std::abs(lhs + rhs) <= 1e-8 * scale) {
      add(std::log(y));
    }
  }

  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

FProfile f_profile(const LocalizedGeometry& g, varnorm::Rho rho) {
  const std::vector<double> bps = monotone_segments(g);
  std::vector<double> plus{g.s()}, minus{g.s()};
  auto push = [&](double t) {
    const FFactors f = f_factors(g, t);
    plus.push_back(f.plus);
    minus.push_back(f.minus);
  };
  for (double t : bps) push(t);
  push(g.t_cap());

  FProfile out{};
  out.sup_plus = *std::max_element(plus.begin(), plus.end());
  out.sup_minus = *std::max_element(minus.begin(), minus.end());
  out.var_plus = varnorm::variation(plus, rho);
  out.var_minus = varnorm::variation(minus, rho);
  out.segments = bps.size() + 1;
  return out;
}

double local_operator_direct(const DiscreteMeasure& gm, double t, double x) {
  if (!(t > 0.0)) throw std::invalid_argument("local_operator_direct: t must be > 0");
  double acc = 0.0;
  for (const auto& a : gm.atoms()) {
    const double cut = decomp::local_weight(x, a.location);
    if (cut == 0.0) continue;
    acc += a.weight * oukernel::mehler_normalized(t, x, a.location) * cut;
  }
  return acc;
}

Reconstruction reconstruct_local(const DiscreteMeasure& gm, double t, double x,
                                 const ReconstructOptions& options) {
  if (!(t > 0.0) || t > 1.0) {
    throw std::invalid_argument("reconstruct_local: t must lie in (0, 1]");
  }
  if (x < 0.0) {
    Reconstruction r = reconstruct_local(gm.reflected(), t, -x, options);
    return r;
  }

  Reconstruction out;
  out.direct = local_operator_direct(gm, t, x);
  const double norm = gm.norm();
  if (norm == 0.0) {
    out.converged = true;
    return out;
  }

  const double root_d = std::sqrt(-std::expm1(-2.0 * t));
  const double spread = std::sqrt(std::expm1(2.0 * t));
  const double center = std::exp(t) * x;
  auto r_value = [&](double s, double sigma) {
    const double zone = sigma / (1.0 + x);
    const double lo = std::max(center - s * spread, x - zone);
    const double hi = std::min(center + s * spread, x + zone);
    return hi > lo ? gm.open_sum(lo, hi) / root_d : 0.0;
  };

  // The integrands jump where an atom enters a window.
  std::vector<double> s_breaks, sigma_breaks;
  for (const auto& a : gm.atoms()) {
    s_breaks.push_back(std::abs(std::exp(-t) * a.location - x) / root_d);
    sigma_breaks.push_back((1.0 + x) * std::abs(a.location - x));
  }

  const double abs_tol = options.tolerance * norm;
  bool inner_ok = true;
  double inner_err = 0.0;
  auto inner = [&](double s) {
    const QuadratureResult q = adaptive_integrate(
        [&](double sigma) { return decomp::eta_prime(sigma) * r_value(s, sigma); },
        0.5, 1.0, sigma_breaks, abs_tol, 0.0, options.max_panels);
    inner_ok = inner_ok && q.converged;
    inner_err = std::max(inner_err, q.error);
    return q.value;
  };
  const QuadratureResult outer = adaptive_integrate(
      [&](double s) { return -s * std::exp(-0.5 * s * s) * inner(s); }, 0.0,
      options.s_max, s_breaks, abs_tol, 0.0, options.max_panels);

  out.value = outer.value;
  out.error_estimate = outer.error + inner_err;
  out.converged = outer.converged && inner_ok;
  return out;
}

}  // namespace ouvar::localized
