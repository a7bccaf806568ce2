#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ouvar/oukernel.hpp"
#include "ouvar/varnorm.hpp"

namespace ouvar::harness {

using oukernel::DiscreteMeasure;
using varnorm::Rho;

/// Strictly increasing sample times in (0, inf).
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// `count` >= 2 log-spaced points from t_min to t_max inclusive.
  static TimeGrid geometric(double t_min, double t_max, std::size_t count);
  /// 512 points on [1e-6, 1] and 256 on [1, 20], each count scaled by
  /// `density`.
  static TimeGrid standard(std::size_t density = 1);

  /// Union of two grids (a shared endpoint is kept once).
  TimeGrid merged(const TimeGrid& other) const;
  /// Inserts the geometric midpoint of every gap: a superset with
  /// 2n - 1 points.
  TimeGrid refined() const;
  /// Points inside [lo, hi]. Throws if fewer than two remain.
  TimeGrid restricted(double lo, double hi) const;

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double front() const noexcept { return points_.front(); }
  double back() const noexcept { return points_.back(); }

 private:
  std::vector<double> points_;
};

/// Which operator the path t -> (op f)(x) is built from.
enum class Operator {
  full,           // H_t f(x)
  local,          // local part, Gaussian normalization
  global,         // global part
  local_lebesgue  // local part with e^{R(x)} removed (Lebesgue normalization)
};

double apply(Operator op, const DiscreteMeasure& f, double t, double x);

/// v(rho) of t -> (op f)(x) sampled on `grid`. A lower bound for the
/// continuous seminorm that increases under refinement.
double variation_operator(const DiscreteMeasure& f, double x, const TimeGrid& grid,
                          Rho rho, Operator op = Operator::full);

struct RefinedVariation {
  double value = 0.0;
  double relative_change = 0.0;  // between the last two grids
  std::size_t grid_size = 0;     // of the last grid
  bool converged = false;
};

/// Doubles the grid (TimeGrid::refined) until the value changes by less
/// than `tol` relative, at most `max_doublings` times.
RefinedVariation variation_refined(const DiscreteMeasure& f, double x, TimeGrid grid,
                                   Rho rho, double tol = 1e-3, int max_doublings = 8,
                                   Operator op = Operator::full);

/// V(x_i) for every node, one node at a time. Reference for the parallel
/// version.
std::vector<double> profile_serial(const DiscreteMeasure& f, const TimeGrid& grid,
                                   Rho rho, std::span<const double> xs,
                                   Operator op = Operator::full);

/// Same values as `profile_serial`, bit for bit, with the nodes split over
/// OpenMP threads.
std::vector<double> profile_parallel(const DiscreteMeasure& f, const TimeGrid& grid,
                                     Rho rho, std::span<const double> xs,
                                     Operator op = Operator::full);

enum class Reference { gaussian, lebesgue };

/// Measure of {V > alpha} for V known on sorted nodes, with 1/V linearly
/// interpolated between them (V itself where an endpoint is <= 0).
/// With `gaussian` V is held constant beyond the outermost nodes and the
/// pieces are integrated exactly against the Gaussian density; with
/// `lebesgue` the domain is [domain_lo, domain_hi] and V is held constant
/// from the outer nodes to the domain ends.
class SuperlevelMeasure {
 public:
  SuperlevelMeasure(std::vector<double> nodes, std::vector<double> values,
                    Reference ref, double domain_lo = 0.0, double domain_hi = 0.0);

  double operator()(double alpha) const;

  double max_value() const noexcept;

 private:
  double piece(double a, double b) const;
  std::vector<double> nodes_, values_;
  Reference ref_;
  double lo_, hi_;
};

/// 64 log-spaced points per decade over [1e-2, 1e6] by default.
std::vector<double> alpha_grid(double alpha_min = 1e-2, double alpha_max = 1e6,
                               std::size_t per_decade = 64);

struct Refinement {
  double coarse = 0.0;
  double fine = 0.0;
  /// |fine - coarse| / fine (0 when both vanish).
  double relative_change = 0.0;
};

struct ExperimentReport {
  std::string label;
  std::vector<double> alphas;
  std::vector<double> measure;          // gamma{V > alpha}
  std::vector<double> alpha_measure;    // alpha gamma
  std::vector<double> enhanced;         // alpha sqrt(log alpha) gamma, 0 for alpha <= 1
  double max_value = 0.0;               // max over nodes of V
  double weak_constant = 0.0;           // sup alpha gamma
  double enhanced_constant = 0.0;       // sup over [enhanced_lo, enhanced_hi] of `enhanced`
  double slope = 0.0;                   // least-squares slope of log gamma vs log alpha
  std::size_t slope_points = 0;
  bool refined = false;
  Refinement refinement;                // of weak_constant (or enhanced_constant for large t)
};

struct AlphaSpec {
  double min = 1e-2;
  double max = 1e6;
  std::size_t per_decade = 64;
  /// Range for the enhanced product and the slope fit.
  double enhanced_lo = 2.0;
  double enhanced_hi = 1e4;
};

/// Report of the superlevel measure on the alpha grid.
ExperimentReport summarize(const SuperlevelMeasure& m, const AlphaSpec& alphas);

struct DistributionSpec {
  TimeGrid grid = TimeGrid::standard();
  std::size_t x_nodes = 2048;
  AlphaSpec alphas{};
  /// Also run with doubled t and x grids and record the change.
  bool refine = true;
};

/// Weak-type report for V(x) = v(rho)(t -> H_t f(x)) over Gaussian
/// quadrature nodes. f is normalized first; the empty measure gives zeros.
ExperimentReport distribution(const DiscreteMeasure& f, Rho rho,
                              const DistributionSpec& spec = {});

/// Smallest T with C (|u| e^{-T} + e^{-2T}/2) <= tol for every atom, where
/// C is the frozen large-time derivative constant. Never below 2.
double large_time_horizon(const DiscreteMeasure& f, double tol = 1e-6);

struct LargeTimeSpec {
  std::size_t t_points = 256;
  std::size_t x_nodes = 2048;
  AlphaSpec alphas{};
  bool refine = true;
};

/// Report for V(x) = v(rho) over [1, T_max], T_max = large_time_horizon(f).
ExperimentReport large_time_distribution(const DiscreteMeasure& f, Rho rho,
                                         const LargeTimeSpec& spec = {});

struct LocalSpec {
  /// Geometric grid on [t_min, 1].
  double t_min = 1e-6;
  std::size_t t_points = 512;
  /// Uniform cell midpoints over the enlarged interval; even, so that the
  /// centre of the interval is not a node.
  std::size_t x_nodes = 2048;
  int jmax = 200;
  AlphaSpec alphas{};
  bool refine = true;
};

/// Lebesgue weak-type report for the local operator, f supported in I_j,
/// nodes over the enlarged interval. The constant is divided by ||f||.
/// Throws std::invalid_argument when an atom lies outside I_j.
ExperimentReport local_distribution(const DiscreteMeasure& f, int j, Rho rho,
                                    const LocalSpec& spec = {});

/// Least-squares slope of log y against log x over the pairs with y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace ouvar::harness
