#include "ouvar/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace ouvar::partition {

namespace {

double next_point(double xj) {
  const double target = xj + 1.0 / (1.0 + xj);
  auto residual = [target](double y) { return y - 1.0 / (1.0 + y) - target; };

  double lo = xj;        // residual(lo) = -2/(1+xj) < 0
  double hi = xj + 2.0;  // residual(hi) > 0 for xj >= 0
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) lo = mid; else hi = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double inv = 1.0 / (1.0 + y);
    const double step = residual(y) / (1.0 + inv * inv);
    y -= step;
    if (std::abs(step) <= 1e-13) break;
  }
  return y;
}

}  // namespace

Partition Partition::build(int jmax) {
  if (jmax < 1) {
    throw std::invalid_argument("partition: jmax must be >= 1, got " + std::to_string(jmax));
  }
  std::vector<double> pts(static_cast<std::size_t>(jmax) + 1);
  pts[0] = 0.0;
  for (int j = 0; j < jmax; ++j) pts[j + 1] = next_point(pts[j]);
  return Partition(std::move(pts));
}

double Partition::point(int j) const {
  const int a = std::abs(j);
  if (a > jmax()) {
    throw std::out_of_range("partition: index " + std::to_string(j) +
                            " outside the built range; rebuild with a larger jmax");
  }
  const double v = points_[static_cast<std::size_t>(a)];
  return j < 0 ? -v : v;
}

double Partition::half_width(int j) const {
  return 1.0 / (1.0 + std::abs(point(j)));
}

Interval Partition::interval(int j) const {
  const double c = point(j);
  const double h = half_width(j);
  return {c - h, c + h};
}

Interval Partition::enlarged(int j) const {
  const double c = point(j);
  const double h = 4.0 * half_width(j);
  return {c - h, c + h};
}

double Partition::recursion_residual(int j) const {
  const double a = point(j);
  const double b = point(j + 1);
  return std::abs((b - 1.0 / (1.0 + b)) - (a + 1.0 / (1.0 + a)));
}

int locate(double x, const Partition& p) {
  const int jmax = p.jmax();
  const double edge = p.interval(jmax).hi;
  if (!(std::abs(x) <= edge)) {
    throw std::out_of_range("locate: x = " + std::to_string(x) +
                            " lies outside the built partition (|x| <= " +
                            std::to_string(edge) + "); rebuild with a larger jmax");
  }
  // Smallest j in [-jmax, jmax] with x <= right endpoint of I_j.
  int lo = -jmax, hi = jmax;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (x <= p.interval(mid).hi) hi = mid; else lo = mid + 1;
  }
  return lo;
}

int overlap_count(const Partition& p) {
  std::vector<std::pair<double, int>> events;
  const int jmax = p.jmax();
  events.reserve(4 * static_cast<std::size_t>(jmax) + 2);
  for (int j = -jmax; j <= jmax; ++j) {
    const Interval iv = p.enlarged(j);
    events.emplace_back(iv.lo, +1);
    events.emplace_back(iv.hi, -1);
  }
  // Closed intervals: openings sort before closings at equal coordinates.
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  });
  int cur = 0, best = 0;
  for (const auto& e : events) {
    cur += e.second;
    best = std::max(best, cur);
  }
  return best;
}

TelescopeSummary telescope_check(const Partition& p) {
  const auto& x = p.nonnegative_points();
  TelescopeSummary out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double z = 1.0 + x[j];
    out.max_deviation = std::max(out.max_deviation, std::abs(z * z - 4.0 * static_cast<double>(j)));
    if (j + 1 < x.size()) {
      const double zn = 1.0 + x[j + 1];
      out.min_increment = std::min(out.min_increment, zn * zn - z * z);
    }
  }
  return out;
}

double asymptotic_deviation(const Partition& p) {
  const auto& x = p.nonnegative_points();
  double worst = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double rj = std::sqrt(static_cast<double>(j));
    worst = std::max(worst, std::abs(x[j] - (2.0 * rj - 1.0)) * rj);
  }
  return worst;
}

}  // namespace ouvar::partition
