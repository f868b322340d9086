#include "tme/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tme {

namespace {

void check_dims(const Dims3& d) {
  if (d.j <= 0 || d.k <= 0 || d.l <= 0) {
    throw std::invalid_argument("Tensor3: dimensions must be positive");
  }
}

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("mode must be 1, 2 or 3, got " +
                                std::to_string(mode));
  }
}

}  // namespace

Tensor3::Tensor3(Dims3 dims) : dims_(dims), values_(Vec::Zero(dims.count())) {
  check_dims(dims);
}

Tensor3::Tensor3(Dims3 dims, Vec values)
    : dims_(dims), values_(std::move(values)) {
  check_dims(dims);
  if (values_.size() != dims.count()) {
    throw std::invalid_argument("Tensor3: expected " +
                                std::to_string(dims.count()) + " values, got " +
                                std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("Tensor3: values must be finite");
  }
}

Tensor3 operator+(const Tensor3& x, const Tensor3& y) {
  if (!(x.dims() == y.dims())) {
    throw std::invalid_argument("Tensor3 +: dimension mismatch");
  }
  return Tensor3(x.dims_, x.values_ + y.values_);
}

Tensor3 operator-(const Tensor3& x, const Tensor3& y) {
  if (!(x.dims() == y.dims())) {
    throw std::invalid_argument("Tensor3 -: dimension mismatch");
  }
  return Tensor3(x.dims_, x.values_ - y.values_);
}

Tensor3 operator*(double s, const Tensor3& x) {
  return Tensor3(x.dims_, s * x.values_);
}

Vec vec(const Tensor3& t) { return t.values(); }

Tensor3 unvec(const Vec& v, Dims3 dims) { return Tensor3(dims, v); }

Mat matricize(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [j, k, l] = t.dims();
  const double* data = t.values().data();
  switch (mode) {
    case 1:
      // Canonical storage is column-major J x (KL) already.
      return Eigen::Map<const Mat>(data, j, 1LL * k * l);
    case 2: {
      Mat m(k, 1LL * j * l);
      for (int c = 0; c < l; ++c) {
        m.middleCols(1LL * c * j, j) =
            Eigen::Map<const Mat>(data + 1LL * c * j * k, j, k).transpose();
      }
      return m;
    }
    default:
      return Eigen::Map<const Mat>(data, 1LL * j * k, l).transpose();
  }
}

Tensor3 tensorize(const Mat& m, int mode, Dims3 dims) {
  check_mode(mode);
  check_dims(dims);
  const auto [j, k, l] = dims;
  const long long rows = mode == 1 ? j : mode == 2 ? k : l;
  const long long cols = dims.count() / rows;
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(
        "tensorize: matrix shape does not match mode/dims");
  }
  Vec v(dims.count());
  switch (mode) {
    case 1:
      Eigen::Map<Mat>(v.data(), j, 1LL * k * l) = m;
      break;
    case 2:
      for (int c = 0; c < l; ++c) {
        Eigen::Map<Mat>(v.data() + 1LL * c * j * k, j, k) =
            m.middleCols(1LL * c * j, j).transpose();
      }
      break;
    default:
      Eigen::Map<Mat>(v.data(), 1LL * j * k, l) = m.transpose();
      break;
  }
  return Tensor3(dims, std::move(v));
}

Tensor3 mode_product(const Tensor3& t, int mode, const Mat& u) {
  check_mode(mode);
  const auto [j, k, l] = t.dims();
  const int mode_dim = mode == 1 ? j : mode == 2 ? k : l;
  if (u.cols() != mode_dim) {
    throw std::invalid_argument("mode_product: u has " +
                                std::to_string(u.cols()) +
                                " columns but mode-" + std::to_string(mode) +
                                " dimension is " + std::to_string(mode_dim));
  }
  Dims3 out = t.dims();
  (mode == 1 ? out.j : mode == 2 ? out.k : out.l) = static_cast<int>(u.rows());
  return tensorize(u * matricize(t, mode), mode, out);
}

Tensor3 tucker_apply(const Tensor3& core, const Mat& a1, const Mat& a2,
                     const Mat& a3) {
  return mode_product(mode_product(mode_product(core, 1, a1), 2, a2), 3, a3);
}

Tensor3 mode_solve_lower(const Tensor3& t, int mode, const Mat& lower) {
  Mat m = lower.triangularView<Eigen::Lower>().solve(matricize(t, mode));
  return tensorize(m, mode, t.dims());
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double frob_norm(const Tensor3& t) { return t.values().norm(); }

double frob_norm(const Mat& m) { return m.norm(); }

Tensor3 mean_tensor(std::span<const Tensor3> ts) {
  if (ts.empty()) {
    throw std::invalid_argument("mean_tensor: empty batch");
  }
  Vec acc = Vec::Zero(ts[0].size());
  for (const Tensor3& t : ts) {
    if (!(t.dims() == ts[0].dims())) {
      throw std::invalid_argument("mean_tensor: inconsistent dimensions");
    }
    acc += t.values();
  }
  return Tensor3(ts[0].dims(), acc / static_cast<double>(ts.size()));
}

}  // namespace tme
