#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ouvar/polynomial.hpp"

namespace ouvar::oukernel {

/// The standard Gaussian probability measure on the line,
/// d gamma(u) = (2 pi)^{-1/2} exp(-R(u)) du with R(u) = u^2/2.
struct GaussianMeasure {
  static double exponent(double u) noexcept { return 0.5 * u * u; }
  static double density(double u) noexcept;
  /// gamma((a, +inf)), accurate far into the tail.
  static double upper_tail(double a) noexcept;
  /// gamma((a, b)) for a <= b.
  static double interval(double a, double b) noexcept;
};

struct Atom {
  double location;
  double weight;
};

/// Finite signed measure sum_k w_k delta_{u_k}. Atoms are kept sorted by
/// location; repeated locations are merged and zero weights dropped.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  static DiscreteMeasure point_mass(double location, double weight = 1.0);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  /// Total variation sum |w_k|.
  double norm() const noexcept;
  DiscreteMeasure scaled(double factor) const;
  /// Divides by `norm()`; the empty measure is returned unchanged.
  DiscreteMeasure normalized() const;
  /// Image under u -> -u.
  DiscreteMeasure reflected() const;

  /// Sum of the weights of atoms with lo < u < hi.
  double open_sum(double lo, double hi) const noexcept;
  bool has_atom_at(double u) const noexcept;

 private:
  std::vector<Atom> atoms_;
};

/// Mehler kernel K_t(x,u) of the Ornstein-Uhlenbeck semigroup relative to
/// the Gaussian measure. Evaluated in the manifestly symmetric form
///   K_t = (1 - w^2)^{-1/2} exp(-w^2 (x-u)^2 / (2(1-w^2)) + w u x / (1+w)),
/// w = e^{-t}, which never forms e^{R(x)} on its own and is bitwise
/// symmetric in (x, u). Throws std::domain_error for t <= 0.
double mehler(double t, double x, double u);

/// The kernel with the factor e^{R(x)} removed:
/// (1-e^{-2t})^{-1/2} exp(-(e^{-t}u - x)^2 / (2(1-e^{-2t}))).
double mehler_normalized(double t, double x, double u);

/// Time derivative of the kernel, from the closed three-term bracket.
double mehler_dt(double t, double x, double u);

/// Coefficients c[0..4] (increasing degree) of P_{x,u}(w) such that
///   dK/dt = K_t(x,u) P_{x,u}(e^{-t}) / (1 - e^{-2t})^2.
/// P(w) = w^4 - xu w^3 + (x^2 + u^2 - 1) w^2 - xu w.
std::array<double, 5> dt_polynomial(double x, double u);

/// Zeros of t -> dK/dt in (t_lo, t_hi), located through P_{x,u}.
std::vector<double> dt_zeros(double x, double u, double t_lo = 0.0,
                             double t_hi = 1.0);

/// H_t f(x) for f dgamma = sum_k w_k delta_{u_k}.
double semigroup_apply(const DiscreteMeasure& f, double t, double x);

/// Gauss quadrature for the Gaussian measure: nodes are the zeros of the
/// probabilists' Hermite polynomial He_n and the weights sum to one.
///
/// Nodes come from the eigenvalues of the symmetric Jacobi matrix, polished
/// by Newton steps; weights are Christoffel numbers 1 / sum_k p_k(x)^2 with
/// the orthonormal recurrence rescaled to stay in range. Weights of the
/// outermost nodes underflow to zero for large orders.
class GaussHermiteRule {
 public:
  static constexpr std::size_t kDefaultOrder = 128;

  explicit GaussHermiteRule(std::size_t order = kDefaultOrder);

  std::size_t order() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// sum_i weights[i] * values[i].
  double integrate(std::span<const double> values) const;

  template <class F>
  double integrate_fn(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Quadrature approximation of H_t f(x) = int f(u) K_t(x,u) dgamma(u), with f
/// given by its values on the nodes of `rule`.
double semigroup_density(const GaussHermiteRule& rule,
                         std::span<const double> values, double t, double x);

}  // namespace ouvar::oukernel
