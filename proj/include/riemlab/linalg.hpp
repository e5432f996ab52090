#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>

namespace riemlab {

/// Largest manifold dimension supported. Fixed-capacity Eigen types keep the
/// integrator free of heap traffic.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Christoffel symbols of the second kind, Γ^i_{jk}, symmetric in (j, k).
class Christoffel {
 public:
  Christoffel() {}  // NOLINT: leaves storage uninitialized
  explicit Christoffel(int n) : n_(n) { std::fill_n(data_.begin(), used(), 0.0); }
  // Copies touch only the n^3 entries in use.
  Christoffel(const Christoffel& o) : n_(o.n_) { std::copy_n(o.data_.begin(), used(), data_.begin()); }
  Christoffel& operator=(const Christoffel& o) {
    n_ = o.n_;
    std::copy_n(o.data_.begin(), used(), data_.begin());
    return *this;
  }

  int dim() const { return n_; }

  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  /// Γ(u, w)^i = Γ^i_{jk} u^j w^k.
  Vec contract(const Vec& u, const Vec& w) const {
    Vec out = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) {
        double row = 0.0;
        for (int k = 0; k < n_; ++k) row += (*this)(i, j, k) * w[k];
        s += u[j] * row;
      }
      out[i] = s;
    }
    return out;
  }

  /// Matrix B^i_j = Γ^i_{jk} w^k, so that Γ(u, w) = B u.
  Mat contract_last(const Vec& w) const {
    Mat b(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double s = 0.0;
        for (int k = 0; k < n_; ++k) s += (*this)(i, j, k) * w[k];
        b(i, j) = s;
      }
    return b;
  }

  Christoffel& operator+=(const Christoffel& o) {
    for (int q = 0; q < used(); ++q) data_[q] += o.data_[q];
    return *this;
  }
  Christoffel& operator*=(double s) {
    for (int q = 0; q < used(); ++q) data_[q] *= s;
    return *this;
  }
  friend Christoffel operator-(Christoffel a, const Christoffel& b) {
    for (int q = 0; q < a.used(); ++q) a.data_[q] -= b.data_[q];
    return a;
  }

 private:
  // Packed n x n x n storage.
  int index(int i, int j, int k) const { return (i * n_ + j) * n_ + k; }
  int used() const { return n_ * n_ * n_; }

  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

/// Riemann tensor R^i_{jkl} with R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i.
class Riemann {
 public:
  Riemann() = default;
  explicit Riemann(int n) : n_(n) { data_.fill(0.0); }

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

 private:
  int index(int i, int j, int k, int l) const { return ((i * n_ + j) * n_ + k) * n_ + l; }

  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_{};
};

}  // namespace riemlab
