#pragma once

#include <array>
#include <map>

#include "vmblab/quadrature.hpp"

namespace vmb {

using Exponent = std::array<int, 3>;

/// Sparse polynomial in (v1, v2, v3).
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial coordinate(int axis);
  static Polynomial monomial(const Exponent& e, double c = 1.0);
  // |v|^2
  static Polynomial speed_squared();

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(int axis) const;
  double evaluate(const Vec3& v) const;
  int degree() const;
  const std::map<Exponent, double>& terms() const { return terms_; }

 private:
  void prune();
  std::map<Exponent, double> terms_;
};

/// Polynomial part q of d/dv_axis (p sqrt(M)) = q sqrt(M).
Polynomial gaussian_derivative(const Polynomial& p, int axis);

}  // namespace vmb
