#include "vmblab/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace vmb {

Polynomial Polynomial::constant(double c) { return monomial({0, 0, 0}, c); }

Polynomial Polynomial::coordinate(int axis) {
  Exponent e{0, 0, 0};
  e[axis] = 1;
  return monomial(e);
}

Polynomial Polynomial::monomial(const Exponent& e, double c) {
  Polynomial p;
  if (c != 0.0) p.terms_[e] = c;
  return p;
}

Polynomial Polynomial::speed_squared() {
  return monomial({2, 0, 0}) + monomial({0, 2, 0}) + monomial({0, 0, 2});
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) terms_[e] += c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) terms_[e] -= c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& [e, c] : terms_) c *= s;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      r.terms_[e] += ca * cb;
    }
  r.prune();
  return r;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial r;
  for (const auto& [e, c] : terms_) {
    if (e[axis] == 0) continue;
    Exponent f = e;
    f[axis] -= 1;
    r.terms_[f] += c * e[axis];
  }
  r.prune();
  return r;
}

double Polynomial::evaluate(const Vec3& v) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_)
    s += c * std::pow(v[0], e[0]) * std::pow(v[1], e[1]) * std::pow(v[2], e[2]);
  return s;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });
}

Polynomial gaussian_derivative(const Polynomial& p, int axis) {
  return p.derivative(axis) - 0.5 * (Polynomial::coordinate(axis) * p);
}

}  // namespace vmb
