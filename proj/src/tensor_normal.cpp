#include "tme/tensor_normal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tme {

TensorNormal3::TensorNormal3(Tensor3 mean_, SpdMatrix sigma_, SpdMatrix psi_,
                             SpdMatrix omega_)
    : mean(std::move(mean_)),
      sigma(std::move(sigma_)),
      psi(std::move(psi_)),
      omega(std::move(omega_)) {
  const Dims3& d = mean.dims();
  if (sigma.dim() != d.j || psi.dim() != d.k || omega.dim() != d.l) {
    throw std::invalid_argument(
        "TensorNormal3: covariance dimensions must match the mean tensor");
  }
}

double log_density(const TensorNormal3& d, const Tensor3& y, int mode) {
  if (!(y.dims() == d.mean.dims())) {
    throw std::invalid_argument("log_density: dimension mismatch");
  }
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("log_density: mode must be 1, 2 or 3");
  }
  const auto [j, k, l] = y.dims();
  Tensor3 r = y - d.mean;

  // Whitening order follows the chosen matrix-normal factorization: the row
  // mode first, then the two column modes.
  Tensor3 z = r;
  const int order1[3] = {1, 2, 3};
  const int order2[3] = {2, 1, 3};
  const int order3[3] = {3, 1, 2};
  const int* order = mode == 1 ? order1 : mode == 2 ? order2 : order3;
  for (int s = 0; s < 3; ++s) {
    const int m = order[s];
    const Mat& chol = m == 1   ? d.sigma.chol_lower()
                      : m == 2 ? d.psi.chol_lower()
                               : d.omega.chol_lower();
    z = mode_solve_lower(z, m, chol);
  }
  const double quad = z.values().squaredNorm();

  const double log2pi = std::log(2.0 * std::numbers::pi);
  double logdet_terms;
  switch (mode) {
    case 1:
      // Row covariance sigma, column covariance omega (x) psi.
      logdet_terms = (1.0 * k * l) * d.sigma.log_det() +
                     1.0 * j * (k * d.omega.log_det() + l * d.psi.log_det());
      break;
    case 2:
      logdet_terms = (1.0 * j * l) * d.psi.log_det() +
                     1.0 * k * (j * d.omega.log_det() + l * d.sigma.log_det());
      break;
    default:
      logdet_terms = (1.0 * j * k) * d.omega.log_det() +
                     1.0 * l * (j * d.psi.log_det() + k * d.sigma.log_det());
      break;
  }
  return -0.5 * (1.0 * j * k * l * log2pi + logdet_terms + quad);
}

std::vector<Tensor3> sample(const TensorNormal3& d, int n,
                            std::mt19937_64& rng) {
  if (n < 1) {
    throw std::invalid_argument("sample: n must be >= 1");
  }
  const Dims3 dims = d.mean.dims();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Tensor3> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec z(dims.count());
    for (Eigen::Index p = 0; p < z.size(); ++p) {
      z[p] = gauss(rng);
    }
    Tensor3 noise(dims, std::move(z));
    Tensor3 shaped = mode_product(
        mode_product(mode_product(noise, 1, d.sigma.chol_lower()), 2,
                     d.psi.chol_lower()),
        3, d.omega.chol_lower());
    out.push_back(d.mean + shaped);
  }
  return out;
}

}  // namespace tme
