#pragma once

#include "tme/tensor.hpp"

namespace tme {

/// Symmetric positive-definite matrix with a cached Cholesky factor and
/// log-determinant. Construction fails if the matrix is asymmetric beyond
/// 1e-12 relative or not positive definite.
class SpdMatrix {
 public:
  explicit SpdMatrix(Mat m);
  static SpdMatrix identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  const Mat& chol_lower() const { return chol_; }
  double log_det() const { return logdet_; }

  /// A^{-1} * rhs using the cached factorization.
  Mat solve(const Mat& rhs) const;
  Mat inverse() const;

 private:
  Mat m_;
  Mat chol_;
  double logdet_ = 0.0;
};

/// Symmetrizes m, floors its eigenvalues at floor_ratio * trace / dim and
/// refactorizes, yielding a valid SpdMatrix for any square input. If the
/// trace is not positive the floor falls back to floor_ratio itself.
/// floored_events, when given, is incremented if any eigenvalue was raised.
SpdMatrix spd_project(const Mat& m, double floor_ratio = 1e-10,
                      int* floored_events = nullptr);

}  // namespace tme
