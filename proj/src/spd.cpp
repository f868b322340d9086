#include "tme/spd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace tme {

SpdMatrix::SpdMatrix(Mat m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw std::invalid_argument("SpdMatrix: matrix must be square and nonempty");
  }
  if (!m_.allFinite()) {
    throw std::invalid_argument("SpdMatrix: entries must be finite");
  }
  const double scale = m_.cwiseAbs().maxCoeff();
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("SpdMatrix: matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("SpdMatrix: matrix is not positive definite");
  }
  chol_ = llt.matrixL();
  logdet_ = 2.0 * chol_.diagonal().array().log().sum();
}

SpdMatrix SpdMatrix::identity(int dim) { return SpdMatrix(Mat::Identity(dim, dim)); }

Mat SpdMatrix::solve(const Mat& rhs) const {
  Mat x = chol_.triangularView<Eigen::Lower>().solve(rhs);
  return chol_.transpose().triangularView<Eigen::Upper>().solve(x);
}

Mat SpdMatrix::inverse() const { return solve(Mat::Identity(dim(), dim())); }

SpdMatrix spd_project(const Mat& m, double floor_ratio, int* floored_events) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("spd_project: matrix must be square and nonempty");
  }
  Mat sym = 0.5 * (m + m.transpose());
  const double base = sym.trace() / static_cast<double>(sym.rows());
  const double floor = floor_ratio * (base > 0.0 ? base : 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  Vec ev = es.eigenvalues();
  bool floored = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < floor) {
      ev[i] = floor;
      floored = true;
    }
  }
  if (floored && floored_events != nullptr) {
    ++(*floored_events);
  }
  if (!floored) {
    // Already PD with margin; keep the input (symmetrized) bit-for-bit.
    return SpdMatrix(std::move(sym));
  }
  Mat rebuilt = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return SpdMatrix(0.5 * (rebuilt + rebuilt.transpose()));
}

}  // namespace tme
