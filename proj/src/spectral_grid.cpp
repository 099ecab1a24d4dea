#include "vmblab/spectral_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "vmblab/error.hpp"

namespace vmb {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct SpectralGrid::Plans {
  int dim, modes;
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> cache;

  fftw_plan get(int rows, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({rows, sign});
    if (it != cache.end()) return it->second;
    int n[3] = {modes, modes, modes};
    int total = 1;
    for (int a = 0; a < dim; ++a) total *= modes;
    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(rows) * total);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(rows) * total);
    fftw_plan p;
    {
      std::lock_guard<std::mutex> plock(planner_mutex());
      p = fftw_plan_many_dft(dim, n, rows, in, nullptr, rows, 1, out, nullptr, rows, 1, sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(in);
    fftw_free(out);
    if (!p) throw ConstructionError("FFTW planning failed");
    cache[{rows, sign}] = p;
    return p;
  }

  ~Plans() {
    std::lock_guard<std::mutex> plock(planner_mutex());
    for (auto& [key, p] : cache) fftw_destroy_plan(p);
  }
};

SpectralGrid::SpectralGrid(int dim, int modes) : dim_(dim), modes_(modes) {
  if (dim < 1 || dim > 3) throw ArgumentError("spatial dimension must be 1, 2 or 3");
  if (modes < 4 || modes > 256) throw ArgumentError("modes per axis must lie in [4, 256]");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= modes;
  k_ = Eigen::MatrixXd::Zero(size_, 3);
  k2_.resize(size_);
  mask_.resize(size_);
  const int cut = modes / 3;
  for (int m = 0; m < size_; ++m) {
    int rest = m;
    bool keep = true;
    for (int a = dim - 1; a >= 0; --a) {
      const int i = rest % modes;
      rest /= modes;
      const int k = i <= modes / 2 ? i : i - modes;
      k_(m, a) = (2 * i == modes) ? 0.0 : k;  // Nyquist carries no derivative
      if (std::abs(k) > cut) keep = false;
    }
    k2_(m) = k_.row(m).squaredNorm();
    mask_(m) = keep ? 1.0 : 0.0;
  }
  plans_ = std::make_unique<Plans>();
  plans_->dim = dim;
  plans_->modes = modes;
}

SpectralGrid::SpectralGrid(const SpectralGrid& o) : SpectralGrid(o.dim_, o.modes_) {}

SpectralGrid::~SpectralGrid() = default;

double SpectralGrid::volume() const { return std::pow(2.0 * std::numbers::pi, dim_); }

double SpectralGrid::max_dealiased_k() const {
  double m = 0.0;
  for (int i = 0; i < size_; ++i)
    if (mask_(i) > 0) m = std::max(m, std::sqrt(k2_(i)));
  return m;
}

Eigen::MatrixXd SpectralGrid::points() const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(size_, 3);
  for (int m = 0; m < size_; ++m) {
    int rest = m;
    for (int a = dim_ - 1; a >= 0; --a) {
      x(m, a) = 2.0 * std::numbers::pi * (rest % modes_) / modes_;
      rest /= modes_;
    }
  }
  return x;
}

void SpectralGrid::dealias(Eigen::MatrixXcd& spec) const {
  for (int m = 0; m < size_; ++m)
    if (mask_(m) == 0.0) spec.col(m).setZero();
}

Eigen::MatrixXd SpectralGrid::to_physical(const Eigen::MatrixXcd& spec) const {
  if (spec.cols() != size_) throw ArgumentError("to_physical: column count must equal grid size");
  const int rows = static_cast<int>(spec.rows());
  Eigen::MatrixXcd out(rows, size_);
  fftw_plan p = plans_->get(rows, FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(spec.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out.real();
}

Eigen::MatrixXcd SpectralGrid::to_spectral(const Eigen::MatrixXd& phys) const {
  if (phys.cols() != size_) throw ArgumentError("to_spectral: column count must equal grid size");
  const int rows = static_cast<int>(phys.rows());
  Eigen::MatrixXcd in = phys.cast<std::complex<double>>();
  Eigen::MatrixXcd out(rows, size_);
  fftw_plan p = plans_->get(rows, FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  out /= static_cast<double>(size_);
  return out;
}

double SpectralGrid::l2_norm(const Eigen::MatrixXcd& spec) const {
  return std::sqrt(volume() * spec.squaredNorm());
}

double SpectralGrid::inner(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g) const {
  return volume() * (f.array() * g.array().conjugate()).real().sum();
}

Eigen::MatrixXcd SpectralGrid::derivative(const Eigen::MatrixXcd& spec, int axis) const {
  Eigen::MatrixXcd out = spec;
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < size_; ++m) out.col(m) *= I * k_(m, axis);
  return out;
}

Eigen::MatrixXcd SpectralGrid::divergence(const Eigen::MatrixXcd& v) const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(1, size_);
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < size_; ++m)
    d(0, m) = I * (k_(m, 0) * v(0, m) + k_(m, 1) * v(1, m) + k_(m, 2) * v(2, m));
  return d;
}

Eigen::MatrixXcd SpectralGrid::curl(const Eigen::MatrixXcd& v) const {
  Eigen::MatrixXcd c(3, size_);
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < size_; ++m) {
    const double k1 = k_(m, 0), k2 = k_(m, 1), k3 = k_(m, 2);
    c(0, m) = I * (k2 * v(2, m) - k3 * v(1, m));
    c(1, m) = I * (k3 * v(0, m) - k1 * v(2, m));
    c(2, m) = I * (k1 * v(1, m) - k2 * v(0, m));
  }
  return c;
}

Eigen::MatrixXcd SpectralGrid::gradient(const Eigen::MatrixXcd& s) const {
  Eigen::MatrixXcd g(3, size_);
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < size_; ++m)
    for (int a = 0; a < 3; ++a) g(a, m) = I * k_(m, a) * s(0, m);
  return g;
}

Eigen::MatrixXcd SpectralGrid::leray(const Eigen::MatrixXcd& v) const {
  Eigen::MatrixXcd out = v;
  for (int m = 0; m < size_; ++m) {
    if (k2_(m) == 0.0) continue;
    const Eigen::Vector3d k = k_.row(m).transpose();
    const std::complex<double> kv = k(0) * v(0, m) + k(1) * v(1, m) + k(2) * v(2, m);
    for (int a = 0; a < 3; ++a) out(a, m) -= k(a) * kv / k2_(m);
  }
  return out;
}

}  // namespace vmb
