#pragma once

#include <Eigen/Dense>

#include <span>

namespace tme {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Dims3 {
  int j = 0;
  int k = 0;
  int l = 0;
  friend bool operator==(const Dims3&, const Dims3&) = default;
  long long count() const { return 1LL * j * k * l; }
};

/// Dense third-order tensor. Values are immutable after construction and are
/// stored first-index-fastest: entry (j,k,l), zero-based, sits at linear
/// position j + k*J + l*J*K. With this ordering the vectorization of a
/// separable Gaussian has covariance omega (x) psi (x) sigma, and every
/// unfolding below is consistent with that convention.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims3 dims);     // zero tensor
  Tensor3(Dims3 dims, Vec values);  // validates length and finiteness

  const Dims3& dims() const { return dims_; }
  const Vec& values() const { return values_; }
  long long size() const { return dims_.count(); }

  double operator()(int a, int b, int c) const {
    return values_[a + 1LL * b * dims_.j + 1LL * c * dims_.j * dims_.k];
  }

  friend Tensor3 operator+(const Tensor3& x, const Tensor3& y);
  friend Tensor3 operator-(const Tensor3& x, const Tensor3& y);
  friend Tensor3 operator*(double s, const Tensor3& x);

 private:
  Dims3 dims_;
  Vec values_;
};

/// Flattens a tensor into a vector in canonical (first-index-fastest) order.
Vec vec(const Tensor3& t);

/// Inverse of vec.
Tensor3 unvec(const Vec& v, Dims3 dims);

/// Mode-k unfolding. Mode 1 gives J x KL with column index k + l*K, mode 2
/// gives K x JL with column j + l*J, mode 3 gives L x JK with column j + k*J
/// (all zero-based).
Mat matricize(const Tensor3& t, int mode);

/// Inverse of matricize for the given mode and target dimensions.
Tensor3 tensorize(const Mat& m, int mode, Dims3 dims);

/// Contracts mode k of t against u (u.cols must equal the mode-k dimension);
/// the result has mode-k dimension u.rows.
Tensor3 mode_product(const Tensor3& t, int mode, const Mat& u);

/// core x1 a1 x2 a2 x3 a3.
Tensor3 tucker_apply(const Tensor3& core, const Mat& a1, const Mat& a2,
                     const Mat& a3);

/// t x_mode inv(L) for lower-triangular L, via a triangular solve on the
/// mode unfolding. Used to whiten one mode of a separable Gaussian.
Tensor3 mode_solve_lower(const Tensor3& t, int mode, const Mat& lower);

/// Kronecker product, block a(i,j) * b.
Mat kron(const Mat& a, const Mat& b);

double frob_norm(const Tensor3& t);
double frob_norm(const Mat& m);

/// Elementwise mean of a nonempty batch of equally sized tensors.
Tensor3 mean_tensor(std::span<const Tensor3> ts);

}  // namespace tme
