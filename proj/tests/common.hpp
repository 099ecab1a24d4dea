#pragma once

#include <memory>
#include <random>

#include "vmblab/collision.hpp"
#include "vmblab/velocity_basis.hpp"

namespace vmbtest {

/// Operators shared by every case in one binary.
inline std::shared_ptr<const vmb::CollisionOperators> operators(int order = 3) {
  static std::map<int, std::shared_ptr<const vmb::CollisionOperators>> cache;
  auto& p = cache[order];
  if (!p) {
    auto basis = std::make_shared<const vmb::VelocityBasis>(order, vmb::QuadratureSpec{});
    p = std::make_shared<const vmb::CollisionOperators>(basis, vmb::resolve_collision_quadrature(order, {}));
  }
  return p;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline double double_factorial(int n) {
  double r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace vmbtest
