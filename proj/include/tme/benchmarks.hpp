#pragma once

#include "tme/model.hpp"

#include <array>
#include <optional>

namespace tme {

enum class BenchKind { tfe, td };

/// Fit of one of the two comparison estimators: the fixed-effects-only
/// Flip-Flop model (TFE) or the Tucker decomposition of the batch mean (TD).
struct BenchFit {
  BenchKind kind = BenchKind::tfe;
  Tensor3 f_hat;          // core estimate
  Tensor3 fixed_full;     // expanded mean fit, the prediction for every sample
  std::optional<CovTriple> residual;          // TFE only
  std::optional<std::array<Mat, 3>> factors;  // TD only
  ConvergenceTrace trace;                     // TFE loop
  double seconds = 0.0;
};

/// Single Flip-Flop loop alternating the GLS core estimate with residual
/// covariance sweeps; the residual triple plays the total-covariance role.
BenchFit fit_tfe(std::span<const Tensor3> y, const TmeDesign& design,
                 const TmeConfig& config);

/// HOOI Tucker decomposition of the batch mean; the reconstruction is the
/// prediction for every sample.
BenchFit fit_td(std::span<const Tensor3> y, Ranks3 ranks);

/// Fitted value for one sample: the expanded fixed effects plus, when
/// include_random is set, the expanded conditional random-effects estimate
/// recomputed from y_i.
Tensor3 predict(const TmeFit& fit, const Tensor3& y_i,
                bool include_random = true);
Tensor3 predict(const BenchFit& fit, const Tensor3& y_i);

/// ||y - y_hat||_F^2 / (J*K*L).
double mse(const Tensor3& y, const Tensor3& y_hat);

}  // namespace tme
