#pragma once

#include <array>
#include <vector>

namespace vmb {

using Vec3 = std::array<double, 3>;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss rules from the Golub-Welsch eigenproblem.
// weight exp(-x^2/2)/sqrt(2 pi); weights sum to 1
Rule1D gauss_hermite_prob(int n);
// weight exp(-x^2); weights sum to sqrt(pi)
Rule1D gauss_hermite_phys(int n);
// weight 1 on [-1, 1]
Rule1D gauss_legendre(int n);
// weight t^alpha exp(-t) on [0, inf)
Rule1D gauss_laguerre(int n, double alpha);

/// Averaging rule on the unit sphere (weights sum to 1).
struct SphereRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  int degree = 0;
  int size() const { return static_cast<int>(points.size()); }
};

// 26-point symmetric rule, exact through degree 7.
SphereRule lebedev26();
// Gauss-Legendre in cos(theta) times trapezoid in phi, exact through `degree`.
SphereRule product_sphere_rule(int degree);

}  // namespace vmb
