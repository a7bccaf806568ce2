#pragma once

#include <utility>
#include <vector>

namespace ouvar::partition {

struct Interval {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double length() const noexcept { return hi - lo; }
};

/// The points 0 = x_0 < x_1 < ... with
///   x_{j+1} - 1/(1 + x_{j+1}) = x_j + 1/(1 + x_j),
/// reflected to j < 0 by x_{-j} = -x_j. I_j has half-width 1/(1+|x_j|),
/// the enlarged interval has half-width 4/(1+|x_j|).
class Partition {
 public:
  /// Builds x_0 .. x_jmax. Each step brackets the root of the increasing
  /// map y -> y - 1/(1+y) in (x_j, x_j + 2), bisects to 1e-6 and polishes
  /// with Newton to 1e-13. Throws std::invalid_argument for jmax < 1.
  static Partition build(int jmax);

  int jmax() const noexcept { return static_cast<int>(points_.size()) - 1; }
  double point(int j) const;
  double half_width(int j) const;
  Interval interval(int j) const;
  Interval enlarged(int j) const;

  /// |(x_{j+1} - 1/(1+x_{j+1})) - (x_j + 1/(1+x_j))| for 0 <= j < jmax.
  double recursion_residual(int j) const;

  const std::vector<double>& nonnegative_points() const noexcept { return points_; }

 private:
  explicit Partition(std::vector<double> pts) : points_(std::move(pts)) {}
  std::vector<double> points_;
};

/// Index j with x in I_j; on a shared endpoint the lower index wins.
/// Throws std::out_of_range outside the built range.
int locate(double x, const Partition& p);

/// Maximum number of enlarged intervals sharing a point, over the whole
/// built range (exact sweep over the sorted endpoints).
int overlap_count(const Partition& p);

struct TelescopeSummary {
  /// min_j (z_{j+1}^2 - z_j^2), z_j = 1 + x_j.
  double min_increment;
  /// max_j |z_j^2 - 4 j|.
  double max_deviation;
};

TelescopeSummary telescope_check(const Partition& p);

/// max over 1 <= j <= jmax of |x_j - (2 sqrt(j) - 1)| sqrt(j).
double asymptotic_deviation(const Partition& p);

}  // namespace ouvar::partition
