#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace ouvar {

/// Dense real polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs);
  explicit Polynomial(std::vector<double> coeffs);

  int degree() const noexcept;
  std::span<const double> coefficients() const noexcept { return c_; }

  double operator()(double x) const noexcept;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

  /// Real roots in the open interval (lo, hi), ascending. The interval is cut
  /// at the roots of the derivative (found recursively), so that the
  /// polynomial is monotone on every piece, and each sign change is bisected
  /// to full precision. Double roots touching zero without a sign change are
  /// reported only when the polynomial evaluates to exactly zero there.
  std::vector<double> roots_in(double lo, double hi) const;

 private:
  void trim();
  std::vector<double> c_;
};

}  // namespace ouvar
