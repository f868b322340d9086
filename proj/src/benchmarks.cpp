#include "tme/benchmarks.hpp"

#include "tme/errors.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tme {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double l1_delta_index(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().sum() /
         (static_cast<double>(a.rows()) * static_cast<double>(a.rows()));
}

}  // namespace

BenchFit fit_tfe(std::span<const Tensor3> y, const TmeDesign& design,
                 const TmeConfig& config) {
  config.validate();
  design.validate();
  if (y.empty()) {
    throw std::invalid_argument("fit_tfe: sample batch is empty");
  }
  const Dims3 dims = y[0].dims();
  if (!(design.data_dims() == dims)) {
    throw std::invalid_argument("fit_tfe: design does not match data");
  }
  const ExistenceReport ex = existence_check(
      dims, static_cast<long long>(y.size()), config.residual_structure);
  if (ex.verdict == Existence::necessary_violated) {
    throw ExistenceError("fit_tfe: " + ex.message);
  }

  const auto start = Clock::now();
  BenchFit fit;
  fit.kind = BenchKind::tfe;
  auto expand = [&](const Tensor3& core) {
    return tucker_apply(core, design.a1, design.a2, design.a3);
  };
  CovTriple residual = CovTriple::identity(dims);
  Tensor3 f_hat = estimate_fixed(y, design, residual);
  for (int it = 1; it <= config.loop1_max; ++it) {
    const auto t0 = Clock::now();
    const CovTriple prev = residual;
    residual = update_total_cov(y, expand(f_hat), residual,
                                config.normalization,
                                config.eigen_floor_ratio,
                                &fit.trace.spd_floor_events);
    f_hat = estimate_fixed(y, design, residual);
    const double ll = loglik(y, expand(f_hat), residual);
    if (!std::isfinite(ll)) {
      throw DivergenceError(
          "fit_tfe: log-likelihood became non-finite at iteration " +
              std::to_string(it),
          it);
    }
    TraceRecord rec{
        l1_delta_index(prev.sigma.matrix(), residual.sigma.matrix()),
        l1_delta_index(prev.psi.matrix(), residual.psi.matrix()),
        l1_delta_index(prev.omega.matrix(), residual.omega.matrix()), ll,
        seconds_since(t0)};
    fit.trace.records.push_back(rec);
    if (rec.idx_sigma < config.loop1_tol && rec.idx_psi < config.loop1_tol &&
        rec.idx_omega < config.loop1_tol) {
      fit.trace.converged = true;
      break;
    }
  }
  fit.f_hat = f_hat;
  fit.fixed_full = expand(f_hat);
  fit.residual = std::move(residual);
  fit.seconds = seconds_since(start);
  return fit;
}

BenchFit fit_td(std::span<const Tensor3> y, Ranks3 ranks) {
  if (y.empty()) {
    throw std::invalid_argument("fit_td: sample batch is empty");
  }
  const auto start = Clock::now();
  TuckerDecomp td = hooi(mean_tensor(y), ranks);
  BenchFit fit;
  fit.kind = BenchKind::td;
  fit.fixed_full = tucker_apply(td.core, td.f1, td.f2, td.f3);
  fit.f_hat = std::move(td.core);
  fit.factors = {std::move(td.f1), std::move(td.f2), std::move(td.f3)};
  fit.seconds = seconds_since(start);
  return fit;
}

Tensor3 predict(const TmeFit& fit, const Tensor3& y_i, bool include_random) {
  Tensor3 fixed = fit.fixed_full();
  if (!(y_i.dims() == fixed.dims())) {
    throw std::invalid_argument("predict: sample dimensions mismatch");
  }
  if (!include_random) {
    return fixed;
  }
  Tensor3 r = estimate_random_effects(y_i, fixed, fit.design, fit.random_fx,
                                      fit.total);
  return fixed + tucker_apply(r, fit.design.b1, fit.design.b2, fit.design.b3);
}

Tensor3 predict(const BenchFit& fit, const Tensor3& y_i) {
  if (!(y_i.dims() == fit.fixed_full.dims())) {
    throw std::invalid_argument("predict: sample dimensions mismatch");
  }
  return fit.fixed_full;
}

double mse(const Tensor3& y, const Tensor3& y_hat) {
  if (!(y.dims() == y_hat.dims())) {
    throw std::invalid_argument("mse: dimension mismatch");
  }
  const double d = frob_norm(y - y_hat);
  return d * d / static_cast<double>(y.size());
}

}  // namespace tme
