#include "ouvar/oukernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ouvar::oukernel {

namespace {

void require_positive_time(double t, const char* who) {
  if (!(t > 0.0)) {
    throw std::domain_error(std::string(who) + ": t must be > 0, got " +
                            std::to_string(t));
  }
}

}  // namespace

double GaussianMeasure::density(double u) noexcept {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double GaussianMeasure::upper_tail(double a) noexcept {
  return 0.5 * std::erfc(a / std::numbers::sqrt2);
}

double GaussianMeasure::interval(double a, double b) noexcept {
  if (!(b > a)) return 0.0;
  // Take the difference on the side where both tails are small.
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
  return 1.0 - upper_tail(-a) - upper_tail(b);
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("discrete measure: non-finite atom");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && atoms_.back().location == a.location) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  std::erase_if(atoms_, [](const Atom& a) { return a.weight == 0.0; });
}

DiscreteMeasure DiscreteMeasure::point_mass(double location, double weight) {
  return DiscreteMeasure({Atom{location, weight}});
}

double DiscreteMeasure::norm() const noexcept {
  double n = 0.0;
  for (const Atom& a : atoms_) n += std::abs(a.weight);
  return n;
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.weight *= factor;
  return DiscreteMeasure(std::move(out));
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double n = norm();
  if (n == 0.0) return *this;
  return scaled(1.0 / n);
}

DiscreteMeasure DiscreteMeasure::reflected() const {
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.location = -a.location;
  return DiscreteMeasure(std::move(out));
}

double DiscreteMeasure::open_sum(double lo, double hi) const noexcept {
  if (!(hi > lo)) return 0.0;
  auto first = std::upper_bound(atoms_.begin(), atoms_.end(), lo,
                                [](double v, const Atom& a) { return v < a.location; });
  double sum = 0.0;
  for (auto it = first; it != atoms_.end() && it->location < hi; ++it) sum += it->weight;
  return sum;
}

bool DiscreteMeasure::has_atom_at(double u) const noexcept {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), u,
                             [](const Atom& a, double v) { return a.location < v; });
  return it != atoms_.end() && it->location == u;
}

double mehler(double t, double x, double u) {
  require_positive_time(t, "mehler");
  const double w = std::exp(-t);
  const double d = -std::expm1(-2.0 * t);
  const double diff = x - u;
  const double e = -w * w * diff * diff / (2.0 * d) + w * u * x / (1.0 + w);
  return std::exp(e) / std::sqrt(d);
}

double mehler_normalized(double t, double x, double u) {
  require_positive_time(t, "mehler_normalized");
  const double w = std::exp(-t);
  const double d = -std::expm1(-2.0 * t);
  const double a = w * u - x;
  return std::exp(-a * a / (2.0 * d)) / std::sqrt(d);
}

double mehler_dt(double t, double x, double u) {
  require_positive_time(t, "mehler_dt");
  const double w = std::exp(-t);
  const double w2 = w * w;
  const double d = -std::expm1(-2.0 * t);
  const double a = w * u - x;
  const double bracket = -w2 / d + w2 * a * a / (d * d) + w * u * a / d;
  return mehler(t, x, u) * bracket;
}

std::array<double, 5> dt_polynomial(double x, double u) {
  const double xu = x * u;
  return {0.0, -xu, x * x + u * u - 1.0, -xu, 1.0};
}

std::vector<double> dt_zeros(double x, double u, double t_lo, double t_hi) {
  const auto c = dt_polynomial(x, u);
  const Polynomial p({c[0], c[1], c[2], c[3], c[4]});
  // t in (t_lo, t_hi) corresponds to w = e^{-t} in (e^{-t_hi}, e^{-t_lo}).
  const double w_lo = std::exp(-t_hi);
  const double w_hi = std::exp(-t_lo);
  std::vector<double> ts;
  for (double w : p.roots_in(w_lo, w_hi)) ts.push_back(-std::log(w));
  std::sort(ts.begin(), ts.end());
  return ts;
}

double semigroup_apply(const DiscreteMeasure& f, double t, double x) {
  require_positive_time(t, "semigroup_apply");
  double acc = 0.0;
  for (const Atom& a : f.atoms()) acc += a.weight * mehler(t, x, a.location);
  return acc;
}

namespace {

// Orthonormal (w.r.t. gamma) Hermite recurrence at x, rescaled by powers of
// two. Returns p_n(x)/p_n'(x) and log2 of sum_{k<n} p_k(x)^2.
struct HermiteEval {
  double newton_ratio;
  double sum_scaled;
  int sum_exp2;
};

HermiteEval hermite_eval(double x, std::size_t n) {
  double p_prev = 0.0, p = 1.0;
  double dp_prev = 0.0, dp = 0.0;
  double sum = 1.0;  // p_0^2
  int shift = 0;     // true value = scaled * 2^shift for p, 2^(2 shift) for sum
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double inv = 1.0 / std::sqrt(kk + 1.0);
    const double p_next = (x * p - std::sqrt(kk) * p_prev) * inv;
    const double dp_next = (p + x * dp - std::sqrt(kk) * dp_prev) * inv;
    p_prev = p; p = p_next;
    dp_prev = dp; dp = dp_next;
    if (k + 1 < n) sum += p * p;
    if (std::abs(p) > 0x1p400) {
      p *= 0x1p-400; p_prev *= 0x1p-400;
      dp *= 0x1p-400; dp_prev *= 0x1p-400;
      sum *= 0x1p-800;
      shift += 400;
    }
  }
  return {p / dp, sum, 2 * shift};
}

}  // namespace

GaussHermiteRule::GaussHermiteRule(std::size_t order) {
  if (order < 1) throw std::invalid_argument("Gauss-Hermite order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  nodes_.resize(order);
  weights_.resize(order);
  if (order == 1) {
    nodes_[0] = 0.0;
    weights_[0] = 1.0;
    return;
  }

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (Eigen::Index k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Gauss-Hermite: tridiagonal eigensolver failed");
  }
  const Eigen::VectorXd ev = solver.eigenvalues();

  for (std::size_t i = 0; i < order; ++i) {
    double x = ev[static_cast<Eigen::Index>(i)];
    for (int it = 0; it < 3; ++it) {
      const double step = hermite_eval(x, order).newton_ratio;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    nodes_[i] = x;
  }
  // The rule is symmetric; enforce it exactly.
  for (std::size_t i = 0; i < order / 2; ++i) {
    const double m = 0.5 * (nodes_[order - 1 - i] - nodes_[i]);
    nodes_[i] = -m;
    nodes_[order - 1 - i] = m;
  }
  if (order % 2 == 1) nodes_[order / 2] = 0.0;

  for (std::size_t i = 0; i < order; ++i) {
    const HermiteEval h = hermite_eval(nodes_[i], order);
    weights_[i] = std::ldexp(1.0 / h.sum_scaled, -h.sum_exp2);
  }
}

double GaussHermiteRule::integrate(std::span<const double> values) const {
  if (values.size() != nodes_.size()) {
    throw std::invalid_argument("Gauss-Hermite: expected " + std::to_string(nodes_.size()) +
                                " values, got " + std::to_string(values.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights_[i] * values[i];
  return acc;
}

double semigroup_density(const GaussHermiteRule& rule,
                         std::span<const double> values, double t, double x) {
  require_positive_time(t, "semigroup_density");
  if (values.size() != rule.order()) {
    throw std::invalid_argument("semigroup_density: " + std::to_string(values.size()) +
                                " values for a rule of order " +
                                std::to_string(rule.order()));
  }
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i] * values[i] * mehler(t, x, nodes[i]);
  }
  return acc;
}

}  // namespace ouvar::oukernel
