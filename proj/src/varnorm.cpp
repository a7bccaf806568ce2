#include "ouvar/varnorm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ouvar::varnorm {

Rho::Rho(double value) : value_(value) {
  if (!std::isfinite(value) || value < 1.0) {
    throw std::invalid_argument("rho must be a finite number >= 1, got " +
                                std::to_string(value));
  }
}

SampledPath::SampledPath(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty()) {
    throw std::invalid_argument("sampled path needs at least one sample");
  }
  if (times_.size() != values_.size()) {
    throw std::invalid_argument("sampled path: times and values differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw std::invalid_argument("sampled path: non-finite sample at index " +
                                  std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument(
          "sampled path: times must be strictly increasing (index " +
          std::to_string(i) + ")");
    }
  }
}

std::vector<double> turning_points(std::span<const double> values) {
  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    const std::size_t m = kept.size();
    if (m == 0) {
      kept.push_back(v);
    } else if (m == 1) {
      if (v == kept[0]) continue;
      kept.push_back(v);
    } else {
      // Last kept point sits inside a monotone run (or a plateau): slide it.
      const double prev = kept[m - 1] - kept[m - 2];
      const double next = v - kept[m - 1];
      if ((prev > 0 && next >= 0) || (prev < 0 && next <= 0)) {
        kept[m - 1] = v;
      } else {
        kept.push_back(v);
      }
    }
  }
  return kept;
}

namespace {

// |d|^rho for d in [0, 1].
class UnitPower {
 public:
  explicit UnitPower(double rho) : rho_(rho) {
    if (rho == 1.0) kind_ = 1;
    else if (rho == 2.0) kind_ = 2;
    else if (rho == 3.0) kind_ = 3;
    else if (rho == 4.0) kind_ = 4;
  }

  double operator()(double d) const {
    switch (kind_) {
      case 1: return d;
      case 2: return d * d;
      case 3: return d * d * d;
      case 4: { const double q = d * d; return q * q; }
      default: return d == 0.0 ? 0.0 : std::exp(rho_ * std::log(d));
    }
  }

 private:
  double rho_;
  int kind_ = 0;
};

}  // namespace

double variation(std::span<const double> values, Rho rho) {
  if (values.size() < 2) return 0.0;
  const std::vector<double> pts = turning_points(values);
  const std::size_t m = pts.size();
  if (m < 2) return 0.0;

  const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
  const double scale = *hi - *lo;
  if (!(scale > 0.0)) return 0.0;
  if (!std::isfinite(scale)) {
    throw std::invalid_argument("variation: value range is not finite");
  }

  const UnitPower power(rho.value());
  std::vector<double> best(m, 0.0);
  double overall = 0.0;
  for (std::size_t j = 1; j < m; ++j) {
    double bj = 0.0;
    const double vj = pts[j];
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + power(std::abs(vj - pts[i]) / scale);
      if (cand > bj) bj = cand;
    }
    best[j] = bj;
    if (bj > overall) overall = bj;
  }
  if (rho.value() == 1.0) return scale * overall;
  return scale * std::pow(overall, 1.0 / rho.value());
}

double variation(const SampledPath& path, Rho rho) {
  return variation(path.values(), rho);
}

double variation_bruteforce(const SampledPath& path, Rho rho) {
  const std::size_t n = path.size();
  if (n > kBruteforceMaxSamples) {
    throw std::invalid_argument("variation_bruteforce: at most " +
                                std::to_string(kBruteforceMaxSamples) +
                                " samples, got " + std::to_string(n));
  }
  if (n < 2) return 0.0;
  const auto v = path.values();
  const double r = rho.value();

  std::vector<double> pair(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pair[i * n + j] = std::pow(std::abs(v[j] - v[i]), r);
    }
  }

  double best = 0.0;
  const std::size_t subsets = std::size_t{1} << n;
  for (std::size_t mask = 3; mask < subsets; ++mask) {
    double sum = 0.0;
    std::size_t prev = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(mask >> k & 1U)) continue;
      if (prev != n) sum += pair[prev * n + k];
      prev = k;
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / r);
}

std::pair<double, double> variation_split(const SampledPath& path, Rho rho,
                                          double tau) {
  const auto t = path.times();
  const auto it = std::lower_bound(t.begin(), t.end(), tau);
  if (it == t.end() || *it != tau) {
    throw std::invalid_argument("variation_split: tau is not a sample time");
  }
  const auto k = static_cast<std::size_t>(it - t.begin());
  if (k == 0 || k + 1 == t.size()) {
    throw std::invalid_argument("variation_split: tau must be an interior sample time");
  }
  const auto v = path.values();
  return {variation(v.first(k + 1), rho), variation(v.subspan(k), rho)};
}

double sup_norm(std::span<const double> values) noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace ouvar::varnorm
