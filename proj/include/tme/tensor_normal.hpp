#pragma once

#include "tme/spd.hpp"
#include "tme/tensor.hpp"

#include <random>
#include <vector>

namespace tme {

/// Array-normal distribution on J x K x L tensors: vec(Y) is Gaussian with
/// mean vec(mean) and covariance omega (x) psi (x) sigma.
struct TensorNormal3 {
  TensorNormal3(Tensor3 mean_, SpdMatrix sigma_, SpdMatrix psi_,
                SpdMatrix omega_);

  Tensor3 mean;
  SpdMatrix sigma;
  SpdMatrix psi;
  SpdMatrix omega;
};

/// Exact log-density of y under d. The quadratic form is evaluated through
/// per-mode triangular solves, never materializing the JKL x JKL covariance.
/// mode selects which matrix-normal factorization of the density groups the
/// terms (all three agree mathematically; they differ only in rounding).
double log_density(const TensorNormal3& d, const Tensor3& y, int mode = 1);

/// Draws n tensors as mean + Z x1 L_sigma x2 L_psi x3 L_omega with Z iid
/// standard normal; deterministic for a fixed generator state.
std::vector<Tensor3> sample(const TensorNormal3& d, int n,
                            std::mt19937_64& rng);

}  // namespace tme
