#include "ouvar/harness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "ouvar/calibration.hpp"
#include "ouvar/decomp.hpp"
#include "ouvar/localized.hpp"
#include "ouvar/partition.hpp"

namespace ouvar::harness {

namespace {

const oukernel::GaussHermiteRule& rule_of_order(std::size_t order) {
  // Building a rule is O(n^2); the experiments reuse a handful of orders.
  static thread_local std::deque<oukernel::GaussHermiteRule> cache;
  for (const auto& r : cache) {
    if (r.order() == order) return r;
  }
  cache.emplace_back(order);
  return cache.back();
}

std::vector<double> rule_nodes(std::size_t order) {
  const auto nodes = rule_of_order(order).nodes();
  return {nodes.begin(), nodes.end()};
}

Refinement compare(double coarse, double fine) {
  Refinement r{coarse, fine, 0.0};
  if (fine != 0.0) {
    r.relative_change = std::abs(fine - coarse) / std::abs(fine);
  } else if (coarse != 0.0) {
    r.relative_change = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("TimeGrid: no points");
  if (!(points_.front() > 0.0)) {
    throw std::invalid_argument("TimeGrid: points must be > 0");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw std::invalid_argument("TimeGrid: non-finite point");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw std::invalid_argument("TimeGrid: points must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
  }
}

TimeGrid TimeGrid::geometric(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max)) {
    throw std::invalid_argument("TimeGrid::geometric: need 0 < t_min < t_max < inf");
  }
  if (count < 2) throw std::invalid_argument("TimeGrid::geometric: need at least 2 points");
  std::vector<double> pts(count);
  const double a = std::log(t_min);
  const double step = (std::log(t_max) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = std::exp(a + step * static_cast<double>(i));
  pts.front() = t_min;
  pts.back() = t_max;
  return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::standard(std::size_t density) {
  if (density == 0) throw std::invalid_argument("TimeGrid::standard: density must be >= 1");
  return geometric(1e-6, 1.0, 512 * density).merged(geometric(1.0, 20.0, 256 * density));
}

TimeGrid TimeGrid::merged(const TimeGrid& other) const {
  std::vector<double> pts;
  pts.reserve(points_.size() + other.points_.size());
  std::merge(points_.begin(), points_.end(), other.points_.begin(), other.points_.end(),
             std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::refined() const {
  std::vector<double> pts;
  pts.reserve(2 * points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) {
      const double mid = std::sqrt(points_[i - 1] * points_[i]);
      if (mid > points_[i - 1] && mid < points_[i]) pts.push_back(mid);
    }
    pts.push_back(points_[i]);
  }
  return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::restricted(double lo, double hi) const {
  std::vector<double> pts;
  for (double t : points_) {
    if (t >= lo && t <= hi) pts.push_back(t);
  }
  if (pts.size() < 2) {
    throw std::invalid_argument("TimeGrid::restricted: fewer than two points in range");
  }
  return TimeGrid(std::move(pts));
}

double apply(Operator op, const DiscreteMeasure& f, double t, double x) {
  switch (op) {
    case Operator::full: return oukernel::semigroup_apply(f, t, x);
    case Operator::local: return decomp::local_apply(f, t, x);
    case Operator::global: return decomp::global_apply(f, t, x);
    case Operator::local_lebesgue: return localized::local_operator_direct(f, t, x);
  }
  throw std::logic_error("apply: unknown operator");
}

double variation_operator(const DiscreteMeasure& f, double x, const TimeGrid& grid,
                          Rho rho, Operator op) {
  if (f.empty()) return 0.0;
  const auto ts = grid.points();
  std::vector<double> values(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) values[i] = apply(op, f, ts[i], x);
  return varnorm::variation(values, rho);
}

RefinedVariation variation_refined(const DiscreteMeasure& f, double x, TimeGrid grid,
                                   Rho rho, double tol, int max_doublings, Operator op) {
  RefinedVariation out;
  out.value = variation_operator(f, x, grid, rho, op);
  out.grid_size = grid.size();
  for (int k = 0; k < max_doublings; ++k) {
    grid = grid.refined();
    const double next = variation_operator(f, x, grid, rho, op);
    out.relative_change = next != 0.0 ? std::abs(next - out.value) / std::abs(next) : 0.0;
    out.value = next;
    out.grid_size = grid.size();
    if (out.relative_change < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<double> profile_serial(const DiscreteMeasure& f, const TimeGrid& grid,
                                   Rho rho, std::span<const double> xs, Operator op) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = variation_operator(f, xs[i], grid, rho, op);
  }
  return out;
}

std::vector<double> profile_parallel(const DiscreteMeasure& f, const TimeGrid& grid,
                                     Rho rho, std::span<const double> xs, Operator op) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = variation_operator(f, xs[i], grid, rho, op);
  }
  return out;
}

SuperlevelMeasure::SuperlevelMeasure(std::vector<double> nodes, std::vector<double> values,
                                     Reference ref, double domain_lo, double domain_hi)
    : nodes_(std::move(nodes)), values_(std::move(values)), ref_(ref),
      lo_(domain_lo), hi_(domain_hi) {
  if (nodes_.size() != values_.size() || nodes_.empty()) {
    throw std::invalid_argument("SuperlevelMeasure: need equally many nodes and values (>= 1)");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("SuperlevelMeasure: nodes must be strictly increasing");
    }
  }
  if (ref_ == Reference::lebesgue && !(lo_ <= nodes_.front() && nodes_.back() <= hi_)) {
    throw std::invalid_argument("SuperlevelMeasure: nodes must lie inside the domain");
  }
}

double SuperlevelMeasure::piece(double a, double b) const {
  if (!(b > a)) return 0.0;
  return ref_ == Reference::gaussian ? oukernel::GaussianMeasure::interval(a, b) : b - a;
}

double SuperlevelMeasure::operator()(double alpha) const {
  double total = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  const double left = ref_ == Reference::gaussian ? -inf : lo_;
  const double right = ref_ == Reference::gaussian ? inf : hi_;
  if (values_.front() > alpha) total += piece(left, nodes_.front());
  if (values_.back() > alpha) total += piece(nodes_.back(), right);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const double a = nodes_[i], b = nodes_[i + 1];
    const double va = values_[i], vb = values_[i + 1];
    const bool in_a = va > alpha, in_b = vb > alpha;
    if (in_a && in_b) {
      total += piece(a, b);
    } else if (in_a || in_b) {
      // Interpolate 1/V, which is linear near a 1/|x - u| spike; fall back
      // to V itself when an endpoint vanishes.
      double frac;
      if (va > 0.0 && vb > 0.0) {
        const double ra = 1.0 / va, rb = 1.0 / vb;
        frac = (1.0 / alpha - ra) / (rb - ra);
      } else {
        frac = (alpha - va) / (vb - va);
      }
      const double c = std::clamp(a + frac * (b - a), a, b);
      total += in_a ? piece(a, c) : piece(c, b);
    }
  }
  return ref_ == Reference::gaussian ? std::clamp(total, 0.0, 1.0) : total;
}

double SuperlevelMeasure::max_value() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

std::vector<double> alpha_grid(double alpha_min, double alpha_max, std::size_t per_decade) {
  if (!(alpha_min > 0.0) || !(alpha_max > alpha_min) || per_decade == 0) {
    throw std::invalid_argument("alpha_grid: need 0 < min < max and per_decade >= 1");
  }
  const double decades = std::log10(alpha_max / alpha_min);
  const auto steps = static_cast<std::size_t>(std::llround(decades * per_decade));
  std::vector<double> out(std::max<std::size_t>(steps, 1) + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha_min * std::pow(10.0, decades * static_cast<double>(i) /
                                            static_cast<double>(out.size() - 1));
  }
  out.back() = alpha_max;
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  return den > 0.0 ? (dn * sxy - sx * sy) / den : 0.0;
}

ExperimentReport summarize(const SuperlevelMeasure& m, const AlphaSpec& spec) {
  ExperimentReport r;
  r.alphas = alpha_grid(spec.min, spec.max, spec.per_decade);
  r.max_value = m.max_value();
  const std::size_t n = r.alphas.size();
  r.measure.resize(n);
  r.alpha_measure.resize(n);
  r.enhanced.resize(n);
  std::vector<double> fit_a, fit_g;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = r.alphas[i];
    const double g = m(a);
    r.measure[i] = g;
    r.alpha_measure[i] = a * g;
    r.enhanced[i] = a > 1.0 ? a * std::sqrt(std::log(a)) * g : 0.0;
    r.weak_constant = std::max(r.weak_constant, r.alpha_measure[i]);
    if (a >= spec.enhanced_lo && a <= spec.enhanced_hi) {
      r.enhanced_constant = std::max(r.enhanced_constant, r.enhanced[i]);
      if (g > 0.0) {
        fit_a.push_back(a);
        fit_g.push_back(g);
      }
    }
  }
  r.slope = loglog_slope(fit_a, fit_g);
  r.slope_points = fit_a.size();
  return r;
}

namespace {

ExperimentReport gaussian_report(const DiscreteMeasure& f, Rho rho, const TimeGrid& grid,
                                 std::size_t x_nodes, const AlphaSpec& alphas) {
  std::vector<double> xs = rule_nodes(x_nodes);
  std::vector<double> v = profile_parallel(f, grid, rho, xs);
  return summarize(SuperlevelMeasure(std::move(xs), std::move(v), Reference::gaussian),
                   alphas);
}

}  // namespace

ExperimentReport distribution(const DiscreteMeasure& f, Rho rho,
                              const DistributionSpec& spec) {
  const DiscreteMeasure g = f.normalized();
  ExperimentReport r = gaussian_report(g, rho, spec.grid, spec.x_nodes, spec.alphas);
  if (spec.refine) {
    const ExperimentReport fine =
        gaussian_report(g, rho, spec.grid.refined(), 2 * spec.x_nodes, spec.alphas);
    r.refined = true;
    r.refinement = compare(r.weak_constant, fine.weak_constant);
  }
  return r;
}

double large_time_horizon(const DiscreteMeasure& f, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("large_time_horizon: tol must be > 0");
  double umax = 0.0;
  for (const auto& a : f.atoms()) umax = std::max(umax, std::abs(a.location));
  const double c = calibration::kLargeTimeDerivative;
  // The tail is decreasing in T; solve by bisection on [1, 800].
  auto tail = [&](double T) { return c * (umax * std::exp(-T) + 0.5 * std::exp(-2.0 * T)); };
  double lo = 1.0, hi = 800.0;
  if (tail(lo) <= tol) return 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) > tol) lo = mid; else hi = mid;
  }
  return std::max(2.0, hi);
}

ExperimentReport large_time_distribution(const DiscreteMeasure& f, Rho rho,
                                         const LargeTimeSpec& spec) {
  const DiscreteMeasure g = f.normalized();
  const TimeGrid grid = TimeGrid::geometric(1.0, large_time_horizon(g), spec.t_points);
  ExperimentReport r = gaussian_report(g, rho, grid, spec.x_nodes, spec.alphas);
  if (spec.refine) {
    const ExperimentReport fine =
        gaussian_report(g, rho, grid.refined(), 2 * spec.x_nodes, spec.alphas);
    r.refined = true;
    r.refinement = compare(r.enhanced_constant, fine.enhanced_constant);
  }
  return r;
}

namespace {

ExperimentReport local_report(const DiscreteMeasure& g, const partition::Interval& zone,
                              Rho rho, const TimeGrid& grid, std::size_t x_nodes,
                              const AlphaSpec& alphas) {
  std::vector<double> xs(x_nodes);
  const double h = zone.length() / static_cast<double>(x_nodes);
  for (std::size_t i = 0; i < x_nodes; ++i) {
    xs[i] = zone.lo + (static_cast<double>(i) + 0.5) * h;
  }
  std::vector<double> v = profile_parallel(g, grid, rho, xs, Operator::local_lebesgue);
  return summarize(SuperlevelMeasure(std::move(xs), std::move(v), Reference::lebesgue,
                                     zone.lo, zone.hi),
                   alphas);
}

}  // namespace

ExperimentReport local_distribution(const DiscreteMeasure& f, int j, Rho rho,
                                    const LocalSpec& spec) {
  if (spec.x_nodes < 2 || spec.x_nodes % 2 != 0) {
    throw std::invalid_argument("local_distribution: x_nodes must be even and >= 2");
  }
  const partition::Partition p = partition::Partition::build(std::max(spec.jmax, std::abs(j) + 1));
  const partition::Interval home = p.interval(j);
  for (const auto& a : f.atoms()) {
    if (!home.contains(a.location)) {
      throw std::invalid_argument("local_distribution: atom at " + std::to_string(a.location) +
                                  " lies outside I_" + std::to_string(j));
    }
  }
  const DiscreteMeasure g = f.normalized();
  const partition::Interval zone = p.enlarged(j);
  const TimeGrid grid = TimeGrid::geometric(spec.t_min, 1.0, spec.t_points);
  ExperimentReport r = local_report(g, zone, rho, grid, spec.x_nodes, spec.alphas);
  if (spec.refine) {
    const ExperimentReport fine =
        local_report(g, zone, rho, grid.refined(), 2 * spec.x_nodes, spec.alphas);
    r.refined = true;
    r.refinement = compare(r.weak_constant, fine.weak_constant);
  }
  return r;
}

}  // namespace ouvar::harness
