#include "ouvar/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace ouvar {

Polynomial::Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) {
  trim();
}

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  trim();
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

int Polynomial::degree() const noexcept {
  return static_cast<int>(c_.size()) - 1;
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() < 2) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) {
    d[k - 1] = static_cast<double>(k) * c_[k];
  }
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
  return Polynomial(std::move(r));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-1.0) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(r));
}

Polynomial operator*(double k, const Polynomial& a) {
  std::vector<double> r(a.c_);
  for (double& v : r) v *= k;
  return Polynomial(std::move(r));
}

std::vector<double> Polynomial::roots_in(double lo, double hi) const {
  std::vector<double> roots;
  if (!(hi > lo) || degree() < 1) return roots;

  std::vector<double> cuts{lo};
  for (double c : derivative().roots_in(lo, hi)) cuts.push_back(c);
  cuts.push_back(hi);

  const auto& p = *this;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double a = cuts[k];
    double b = cuts[k + 1];
    const double fa = p(a);
    const double fb = p(b);
    if (k + 1 < cuts.size() - 1 && fb == 0.0) {
      roots.push_back(b);
      continue;
    }
    if (fa == 0.0 || fb == 0.0 || std::signbit(fa) == std::signbit(fb)) continue;
    const bool rising = fb > 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = p(mid);
      if (fm == 0.0) { a = b = mid; break; }
      if ((fm > 0.0) == rising) b = mid; else a = mid;
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

}  // namespace ouvar
