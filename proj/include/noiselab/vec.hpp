#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace noiselab {

// Desk-scale dimension cap. Everything in this library runs in d <= 3.
inline constexpr int kMaxDim = 3;

// Small fixed-capacity vector. Value type, no heap traffic in inner loops.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : n_(check_dim(dim)) {}
  Vec(std::initializer_list<double> xs) {
    n_ = check_dim(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) c_[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }
  static Vec fill(int dim, double v) {
    Vec r(dim);
    for (int i = 0; i < dim; ++i) r.c_[i] = v;
    return r;
  }

  int dim() const { return n_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < n_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  double norm_inf() const {
    double m = 0;
    for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(c_[i]));
    return m;
  }
  bool finite() const {
    for (int i = 0; i < n_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

 private:
  static int check_dim(int d) {
    if (d < 0 || d > kMaxDim) throw std::invalid_argument("Vec: dim out of range");
    return d;
  }
  std::array<double, kMaxDim> c_{};
  int n_ = 0;
};

// Small square matrix, row-major.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int dim) : n_(dim) {
    if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Mat: dim out of range");
  }
  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return n_; }
  double& operator()(int i, int j) { return c_[i * kMaxDim + j]; }
  double operator()(int i, int j) const { return c_[i * kMaxDim + j]; }

  Mat& operator+=(const Mat& o) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
    return *this;
  }
  Mat& operator*=(double s) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
    return *this;
  }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator*(double s, Mat a) { return a *= s; }

  Vec operator*(const Vec& v) const {
    Vec r(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }
  Mat operator*(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double s = 0;
        for (int k = 0; k < n_; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  double trace() const {
    double s = 0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }
  double frobenius() const {
    double s = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }
  double det() const {
    if (n_ == 0) return 1.0;
    if (n_ == 1) return (*this)(0, 0);
    if (n_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
    // n_ == 3
    return (*this)(0, 0) * ((*this)(1, 1) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 1)) -
           (*this)(0, 1) * ((*this)(1, 0) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 0)) +
           (*this)(0, 2) * ((*this)(1, 0) * (*this)(2, 1) - (*this)(1, 1) * (*this)(2, 0));
  }

 private:
  std::array<double, kMaxDim * kMaxDim> c_{};
  int n_ = 0;
};

// Axis-aligned box.
struct Box {
  Vec lo, hi;

  static Box cube(int dim, double half_width) {
    Box b;
    b.lo = Vec::fill(dim, -half_width);
    b.hi = Vec::fill(dim, half_width);
    return b;
  }
  static Box interval(double a, double b) { return Box{{a}, {b}}; }

  int dim() const { return lo.dim(); }
  bool contains(const Vec& x, double pad = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
    return true;
  }
  // Box shrunk inward by r on every side; empty boxes are reported by valid().
  Box shrunk(double r) const {
    Box b = *this;
    for (int i = 0; i < dim(); ++i) {
      b.lo[i] += r;
      b.hi[i] -= r;
    }
    return b;
  }
  Box padded(double r) const { return shrunk(-r); }
  bool valid() const {
    for (int i = 0; i < dim(); ++i)
      if (lo[i] > hi[i]) return false;
    return true;
  }
  double side(int i) const { return hi[i] - lo[i]; }
};

}  // namespace noiselab
