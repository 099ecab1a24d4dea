#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>

namespace vmb {

/// Fourier grid on the torus [0, 2 pi)^d, d in {1, 2, 3}.
/// Coefficients are stored column-per-mode: a field block is (fields x size()).
/// Forward transform is normalized so that f(x) = sum_k f_k exp(i k.x).
class SpectralGrid {
 public:
  SpectralGrid(int dim, int modes);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid& other);
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  int size() const { return size_; }
  double volume() const;
  int zero_mode() const { return 0; }

  // integer wavenumbers, size() x 3 (zero for unused axes)
  const Eigen::MatrixXd& wavenumbers() const { return k_; }
  const Eigen::VectorXd& k_squared() const { return k2_; }
  // 1 where every |k_a| <= modes/3, else 0
  const Eigen::ArrayXd& dealias_mask() const { return mask_; }
  double max_dealiased_k() const;
  // physical coordinates, size() x 3
  Eigen::MatrixXd points() const;

  void dealias(Eigen::MatrixXcd& spec) const;
  Eigen::MatrixXd to_physical(const Eigen::MatrixXcd& spec) const;
  Eigen::MatrixXcd to_spectral(const Eigen::MatrixXd& phys) const;

  /// L2 norm over the torus of the fields stored as rows.
  double l2_norm(const Eigen::MatrixXcd& spec) const;
  /// int_T f . conj(g) dx summed over rows, real part.
  double inner(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g) const;

  /// i k_a f for one axis.
  Eigen::MatrixXcd derivative(const Eigen::MatrixXcd& spec, int axis) const;
  /// divergence of a 3 x size() vector field
  Eigen::MatrixXcd divergence(const Eigen::MatrixXcd& v) const;
  /// i k x v
  Eigen::MatrixXcd curl(const Eigen::MatrixXcd& v) const;
  /// gradient of a scalar, 3 x size()
  Eigen::MatrixXcd gradient(const Eigen::MatrixXcd& s) const;
  /// (I - k k^T / |k|^2) v; zero mode untouched
  Eigen::MatrixXcd leray(const Eigen::MatrixXcd& v) const;

  bool same_shape(const SpectralGrid& o) const { return dim_ == o.dim_ && modes_ == o.modes_; }

 private:
  struct Plans;
  int dim_, modes_, size_;
  Eigen::MatrixXd k_;
  Eigen::VectorXd k2_;
  Eigen::ArrayXd mask_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace vmb
