#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ouvar::varnorm {

/// Exponent of the variation seminorm. Any finite value >= 1 is accepted;
/// the weak-type theorems need rho > 2 but the seminorm itself does not.
class Rho {
 public:
  explicit Rho(double value);

  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// A real function sampled on a strictly increasing time grid.
class SampledPath {
 public:
  SampledPath(std::vector<double> times, std::vector<double> values);

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// rho-variation of the samples: the supremum over every increasing
/// subsequence of (sum |v_{i_k} - v_{i_{k-1}}|^rho)^{1/rho}.
///
/// The sequence is first reduced to its alternating extrema (an interior
/// point of a monotone run never improves a subsequence, since x^rho is
/// superadditive for rho >= 1), then the O(m^2) recurrence
///   V[j] = max(0, max_{i<j} V[i] + |v_j - v_i|^rho)
/// runs on the m surviving points. Differences are scaled by the value range
/// so that neither underflow nor overflow can occur in the powers.
double variation(std::span<const double> values, Rho rho);
double variation(const SampledPath& path, Rho rho);

/// Exhaustive enumeration of all 2^n subsequences. Oracle for `variation`.
/// Throws std::invalid_argument when the path has more than 20 samples.
double variation_bruteforce(const SampledPath& path, Rho rho);

inline constexpr std::size_t kBruteforceMaxSamples = 20;

/// Variation on the samples with time <= tau and on those with time >= tau.
/// tau must be one of the sample times, strictly inside the grid.
std::pair<double, double> variation_split(const SampledPath& path, Rho rho,
                                          double tau);

/// Alternating-extrema reduction used by `variation`. Exposed for tests.
std::vector<double> turning_points(std::span<const double> values);

double sup_norm(std::span<const double> values) noexcept;

}  // namespace ouvar::varnorm
