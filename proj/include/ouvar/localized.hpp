#pragma once

#include <vector>

#include "ouvar/oukernel.hpp"
#include "ouvar/varnorm.hpp"

namespace ouvar::localized {

using oukernel::DiscreteMeasure;

/// Geometry of the truncated interval
///   J_t = {u : |u - e^t x| < s sqrt(e^{2t} - 1), |u - x| < sigma/(1+x)}
/// for a base point x >= 0, Gaussian level s > 0 and cutoff level
/// sigma in (1/2, 1). It is governed by the gap function
///   Q(t) = x (e^t - 1) - s sqrt(e^{2t} - 1),
/// which decreases up to t_tilde and increases after it (when x > s);
/// Q < 0 exactly on (0, t_zero) and J_t is nonempty exactly on (0, t_one).
/// All three times are +inf when x <= s. t_cap = min(1, t_one).
class LocalizedGeometry {
 public:
  LocalizedGeometry(double x, double s, double sigma);

  double x() const noexcept { return x_; }
  double s() const noexcept { return s_; }
  double sigma() const noexcept { return sigma_; }
  /// sigma / (1 + x), the half-width of the cutoff zone.
  double zone() const noexcept { return zone_; }

  double t_tilde() const noexcept { return t_tilde_; }
  double t_zero() const noexcept { return t_zero_; }
  double t_one() const noexcept { return t_one_; }
  double t_cap() const noexcept { return t_cap_; }
  /// True when J is empty at t = t_cap (t_one <= 1).
  bool empty_at_cap() const noexcept { return t_one_ <= 1.0; }

  double q(double t) const noexcept;
  /// Root of Q(t) = level on (t_tilde, inf), by bisection to full precision.
  /// Requires x > s and level > Q(t_tilde); +inf if the root lies beyond
  /// t = 300.
  double q_root(double level) const;

 private:
  double x_, s_, sigma_, zone_;
  double t_tilde_, t_zero_, t_one_, t_cap_;
};

LocalizedGeometry critical_times(double x, double s, double sigma);
double q_function(const LocalizedGeometry& g, double t);

/// Endpoints of J_t, stored as offsets from x so that lengths keep their
/// relative precision. At t = t_cap with an empty J both endpoints are
/// x + zone.
struct Endpoints {
  double k_minus;
  double k_plus;
  double plus_length;   // |J_t^+| = k_plus - x
  double minus_offset;  // k_minus - x; negative iff t < t_zero
  bool empty;
};

/// Throws std::invalid_argument unless 0 < t <= t_cap.
Endpoints interval_endpoints(const LocalizedGeometry& g, double t);

/// (1 - e^{-2t})^{-1/2} * (sum of the weights in the open interval J_t).
double r_operator(const DiscreteMeasure& gm, const LocalizedGeometry& g, double t);

enum class Side { plus, minus };

/// (1/tau) * sum of weights in (x, x + tau) for `plus`, (x - tau, x) for
/// `minus`. Throws std::invalid_argument for tau <= 0.
double one_sided_mean(const DiscreteMeasure& gm, double x, double tau, Side side);

struct MeansDecomposition {
  double term_plus = 0.0;
  double term_minus = 0.0;
  /// +1 when k_minus < x (the minus side is the left mean), -1 otherwise.
  int sign = 1;

  double value() const noexcept { return term_plus + sign * term_minus; }
};

/// Splits r_operator into F_+ M^+_{|J^+|} and F_- M^{-/+}_{|J^-|}.
/// x must not carry an atom (the decomposition needs a Lebesgue point);
/// violating that throws std::invalid_argument. A zero length gives a zero
/// term.
MeansDecomposition means_decomposition(const DiscreteMeasure& gm,
                                       const LocalizedGeometry& g, double t);

struct FFactors {
  double plus;
  double minus;
};

/// F_+- = |x(e^t - 1)/sqrt(1 - e^{-2t}) +- s e^t|  min  sigma/((1+x) sqrt(1 - e^{-2t})).
FFactors f_factors(const LocalizedGeometry& g, double t);

/// Interior breakpoints of (0, t_cap) between which F_+ and F_- are both
/// monotone: t_tilde, t_zero, the points where the minimum in F_+- switches
/// branch, and the critical points of x(e^t - 1)/sqrt(1 - e^{-2t}) +- s e^t
/// (roots in e^t of x^2 (y^2+y-1)^2 = s^2 (y+1)^3 (y-1), kept when the
/// unsquared equation holds). Sorted, without duplicates.
std::vector<double> monotone_segments(const LocalizedGeometry& g);

/// Sup and rho-variation of F_+ and F_- over (0, t_cap], evaluated exactly
/// from the values at the breakpoints (F is monotone between them) and the
/// limit F(0+) = s.
struct FProfile {
  double sup_plus, sup_minus;
  double var_plus, var_minus;
  std::size_t segments;
};

FProfile f_profile(const LocalizedGeometry& g, varnorm::Rho rho);

/// Lebesgue-normalized local operator, evaluated directly:
/// sum_k w_k exp(-(e^{-t}u_k - x)^2 / (2(1-e^{-2t}))) eta((1+|x|)|x-u_k|) / sqrt(1-e^{-2t}).
double local_operator_direct(const DiscreteMeasure& gm, double t, double x);

struct ReconstructOptions {
  double s_max = 10.0;
  /// Absolute tolerance of the outer s-integral, relative to ||gm||.
  double tolerance = 1e-6;
  std::size_t max_panels = 2000;
};

struct Reconstruction {
  double value = 0.0;
  double direct = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Rebuilds the local operator from the interval averages:
///   int_0^inf (d/ds e^{-s^2/2}) int_{1/2}^1 eta'(sigma) R_t^{s,sigma} gm(x) dsigma ds,
/// with both integrals done by adaptive Gauss-Kronrod that only samples
/// R, split where an atom enters a window. Negative x is handled by reflecting the measure. `direct` carries
/// local_operator_direct for comparison. Requires 0 < t <= 1.
Reconstruction reconstruct_local(const DiscreteMeasure& gm, double t, double x,
                                 const ReconstructOptions& options = {});

}  // namespace ouvar::localized
