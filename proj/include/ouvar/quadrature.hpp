#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstddef>
#include <algorithm>
#include <queue>
#include <vector>

namespace ouvar {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol * |value|) or `max_panels` is reached.
template <class F>
QuadratureResult adaptive_integrate(F&& f, double a, double b, double abs_tol,
                                    double rel_tol = 0.0,
                                    std::size_t max_panels = 4000) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    return Panel{lo, hi, v, err};
  };

  QuadratureResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  Panel first = eval(a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  while (heap.size() < max_panels &&
         error > std::max(abs_tol, rel_tol * std::abs(total))) {
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Panel left = eval(worst.a, mid);
    const Panel right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  out.panels = heap.size();
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

/// Same, split at the interior `breaks` (unsorted, out-of-range ones ignored)
/// so that jumps there never sit inside a panel. The tolerance is shared
/// evenly between the pieces.
template <class F>
QuadratureResult adaptive_integrate(F&& f, double a, double b, std::vector<double> breaks,
                                    double abs_tol, double rel_tol = 0.0,
                                    std::size_t max_panels = 4000) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double c) { return !(c > a && c < b); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.insert(breaks.begin(), a);
  breaks.push_back(b);

  const double share = abs_tol / static_cast<double>(breaks.size() - 1);
  QuadratureResult out;
  out.converged = true;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const QuadratureResult piece =
        adaptive_integrate(f, breaks[i], breaks[i + 1], share, rel_tol, max_panels);
    out.value += piece.value;
    out.error += piece.error;
    out.panels += piece.panels;
    out.converged = out.converged && piece.converged;
  }
  return out;
}

}  // namespace ouvar
