#include "tme/model.hpp"

#include "tme/errors.hpp"
#include "tme/tensor_normal.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
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

void check_orthonormal(const Mat& m, const char* name) {
  if (m.rows() < 1 || m.cols() < 1 || m.rows() < m.cols()) {
    throw std::invalid_argument(std::string("TmeDesign: ") + name +
                                " must be tall with at least one column");
  }
  Mat gram = m.transpose() * m;
  const double err =
      (gram - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-8) {
    throw std::invalid_argument(std::string("TmeDesign: ") + name +
                                " does not have orthonormal columns");
  }
}

/// Entrywise L1 norm of the difference divided by dim^2, the convergence
/// index tracked per covariance factor.
double l1_delta_index(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().sum() /
         (static_cast<double>(a.rows()) * static_cast<double>(a.rows()));
}

bool diagonal_like(const ResidualStructure& s) {
  return s.form == ResidualForm::diagonal ||
         s.form == ResidualForm::isotropic ||
         s.form == ResidualForm::given_diagonal;
}

/// Constrained conditional MLE of one covariance factor given the
/// unconstrained Flip-Flop update m.
Mat enforce_structure(const Mat& m, const ResidualStructure& st,
                      double floor_ratio) {
  const Eigen::Index d = m.rows();
  switch (st.form) {
    case ResidualForm::general:
      return m;
    case ResidualForm::diagonal:
      return m.diagonal().asDiagonal();
    case ResidualForm::isotropic:
      return (m.trace() / static_cast<double>(d)) * Mat::Identity(d, d);
    case ResidualForm::given_diagonal: {
      if (st.profile.size() != d) {
        throw std::invalid_argument(
            "update_residual_cov: given_diagonal profile length " +
            std::to_string(st.profile.size()) + " does not match dimension " +
            std::to_string(d));
      }
      if ((st.profile.array() <= 0.0).any()) {
        throw std::invalid_argument(
            "update_residual_cov: given_diagonal profile must be positive");
      }
      double s = (m.diagonal().array() / st.profile.array()).mean();
      s = std::max(s, floor_ratio);
      return (s * st.profile).asDiagonal();
    }
  }
  throw std::logic_error("unreachable");
}

struct SweepAccumulator {
  // One Flip-Flop sweep over (sigma, psi, omega) given centered residuals.
  // Each factor uses the freshest other two, through per-mode triangular
  // solves rather than Kronecker inverses.
  static CovTriple run(const std::vector<Tensor3>& residuals,
                       const CovTriple& current,
                       const ResidualStructure3* structure,
                       Normalization normalization, double floor_ratio,
                       int* floor_events) {
    const Dims3 dims = residuals.front().dims();
    const auto [j, k, l] = dims;
    const double n = static_cast<double>(residuals.size());

    auto factor_update = [&](int mode, const SpdMatrix& other_a,
                             int mode_a, const SpdMatrix& other_b,
                             int mode_b, double denom,
                             const ResidualStructure* st) {
      const int dim = mode == 1 ? j : mode == 2 ? k : l;
      Mat acc = Mat::Zero(dim, dim);
      for (const Tensor3& d : residuals) {
        Tensor3 w = mode_solve_lower(d, mode_a, other_a.chol_lower());
        w = mode_solve_lower(w, mode_b, other_b.chol_lower());
        Mat u = matricize(w, mode);
        acc.noalias() += u * u.transpose();
      }
      Mat raw = acc / (denom * n);
      if (st != nullptr) {
        raw = enforce_structure(raw, *st, floor_ratio);
      }
      return spd_project(raw, floor_ratio, floor_events);
    };

    SpdMatrix sigma =
        factor_update(1, current.psi, 2, current.omega, 3,
                      static_cast<double>(k) * l,
                      structure ? &structure->sigma : nullptr);
    SpdMatrix psi =
        factor_update(2, sigma, 1, current.omega, 3,
                      static_cast<double>(j) * l,
                      structure ? &structure->psi : nullptr);
    SpdMatrix omega =
        factor_update(3, sigma, 1, psi, 2, static_cast<double>(j) * k,
                      structure ? &structure->omega : nullptr);
    return normalize_identifiability({std::move(sigma), std::move(psi),
                                      std::move(omega)},
                                     normalization);
  }
};

void check_batch(std::span<const Tensor3> y) {
  if (y.empty()) {
    throw std::invalid_argument("sample batch is empty");
  }
  for (const Tensor3& t : y) {
    if (!(t.dims() == y[0].dims())) {
      throw std::invalid_argument("sample batch has inconsistent dimensions");
    }
  }
}

}  // namespace

Dims3 TmeDesign::data_dims() const {
  return {static_cast<int>(a1.rows()), static_cast<int>(a2.rows()),
          static_cast<int>(a3.rows())};
}

Ranks3 TmeDesign::fixed_ranks() const {
  return {static_cast<int>(a1.cols()), static_cast<int>(a2.cols()),
          static_cast<int>(a3.cols())};
}

Ranks3 TmeDesign::random_ranks() const {
  return {static_cast<int>(b1.cols()), static_cast<int>(b2.cols()),
          static_cast<int>(b3.cols())};
}

void TmeDesign::validate() const {
  check_orthonormal(a1, "a1");
  check_orthonormal(a2, "a2");
  check_orthonormal(a3, "a3");
  check_orthonormal(b1, "b1");
  check_orthonormal(b2, "b2");
  check_orthonormal(b3, "b3");
  if (b1.rows() != a1.rows() || b2.rows() != a2.rows() ||
      b3.rows() != a3.rows()) {
    throw std::invalid_argument(
        "TmeDesign: a- and b-matrices disagree on data dimensions");
  }
}

TmeDesign TmeDesign::from_factors(Mat a1, Mat a2, Mat a3, Ranks3 random_ranks,
                                  const std::vector<int>& b_cols1,
                                  const std::vector<int>& b_cols2,
                                  const std::vector<int>& b_cols3) {
  auto subset = [](const Mat& a, int count, const std::vector<int>& cols,
                   const char* name) {
    if (cols.empty()) {
      if (count < 1 || count > a.cols()) {
        throw std::invalid_argument(std::string("TmeDesign: random rank for ") +
                                    name + " out of range");
      }
      return Mat(a.leftCols(count));
    }
    Mat b(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] < 0 || cols[i] >= a.cols()) {
        throw std::invalid_argument(std::string("TmeDesign: column index for ") +
                                    name + " out of range");
      }
      b.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
    }
    return b;
  };
  TmeDesign d;
  d.b1 = subset(a1, random_ranks.p, b_cols1, "b1");
  d.b2 = subset(a2, random_ranks.q, b_cols2, "b2");
  d.b3 = subset(a3, random_ranks.r, b_cols3, "b3");
  d.a1 = std::move(a1);
  d.a2 = std::move(a2);
  d.a3 = std::move(a3);
  d.validate();
  return d;
}

void TmeConfig::validate() const {
  if (loop1_tol <= 0.0 || loop2_tol <= 0.0) {
    throw std::invalid_argument("TmeConfig: tolerances must be positive");
  }
  if (loop1_max < 1 || loop2_max < 1) {
    throw std::invalid_argument("TmeConfig: iteration limits must be >= 1");
  }
  if (eigen_floor_ratio <= 0.0) {
    throw std::invalid_argument("TmeConfig: eigen_floor_ratio must be positive");
  }
  for (const ResidualStructure* s :
       {&residual_structure.sigma, &residual_structure.psi,
        &residual_structure.omega}) {
    if (s->form == ResidualForm::given_diagonal &&
        (s->profile.size() == 0 || (s->profile.array() <= 0.0).any())) {
      throw std::invalid_argument(
          "TmeConfig: given_diagonal requires a strictly positive profile");
    }
  }
}

CovTriple CovTriple::identity(Dims3 dims) {
  return {SpdMatrix::identity(dims.j), SpdMatrix::identity(dims.k),
          SpdMatrix::identity(dims.l)};
}

CovTriple CovTriple::identity(Ranks3 ranks) {
  return {SpdMatrix::identity(ranks.p), SpdMatrix::identity(ranks.q),
          SpdMatrix::identity(ranks.r)};
}

Tensor3 TmeFit::fixed_full() const {
  return tucker_apply(f_hat, design.a1, design.a2, design.a3);
}

ExistenceReport existence_check(Dims3 dims, long long n,
                                const ResidualStructure3& structure) {
  if (dims.j < 1 || dims.k < 1 || dims.l < 1) {
    throw std::invalid_argument("existence_check: dimensions must be positive");
  }
  const double j = dims.j, k = dims.k, l = dims.l;
  ExistenceReport rep;
  rep.necessary_bound =
      std::max({j / (k * l), k / (j * l), l / (j * k)}) + 1.0;
  rep.product_bound = dims.count();
  rep.diagonal_sigma = diagonal_like(structure.sigma);
  rep.diagonal_bound = static_cast<long long>(
      std::ceil(std::max(k * l, rep.necessary_bound)));

  const double nd = static_cast<double>(n);
  if (nd < rep.necessary_bound) {
    rep.verdict = Existence::necessary_violated;
    rep.message = "N = " + std::to_string(n) +
                  " is below the necessary bound max(J/KL, K/JL, L/JK) + 1 = " +
                  std::to_string(rep.necessary_bound);
  } else if (n >= rep.product_bound) {
    rep.verdict = Existence::ok;
    rep.message = "MLE exists with probability 1 (N >= JKL)";
  } else if (rep.diagonal_sigma && nd >= std::max(k * l, rep.necessary_bound)) {
    rep.verdict = Existence::ok;
    rep.message =
        "MLE exists with probability 1 (diagonal sigma and N >= max(KL, "
        "necessary bound))";
  } else {
    rep.verdict = Existence::sufficient_unmet;
    rep.message = "existence not guaranteed: necessary bound met but N < JKL" +
                  std::string(rep.diagonal_sigma
                                  ? " and N < max(KL, necessary bound)"
                                  : "");
  }
  return rep;
}

namespace {

/// Assembles and solves the normal equations of the GLS core estimate from
/// per-sample Gram factors. The small P1*Q1*R1 system is formed explicitly;
/// the right-hand side is built through mode products, never a JKL Kronecker.
Tensor3 solve_fixed(const std::vector<const TmeDesign*>& designs,
                    const std::vector<const CovTriple*>& totals,
                    std::span<const Tensor3> y) {
  const TmeDesign& d0 = *designs.front();
  const Ranks3 ranks = d0.fixed_ranks();
  const Eigen::Index p = 1LL * ranks.p * ranks.q * ranks.r;
  Mat normal = Mat::Zero(p, p);
  Vec rhs = Vec::Zero(p);
  Mat gram1, gram2, gram3;  // kept for the rank diagnosis below
  Mat g1sum, g2sum, g3sum;
  for (size_t i = 0; i < y.size(); ++i) {
    const TmeDesign& dz = *designs[i];
    const CovTriple& tot = *totals[i];
    Mat s1 = tot.sigma.solve(dz.a1);  // Sigma^{-1} A1
    Mat s2 = tot.psi.solve(dz.a2);
    Mat s3 = tot.omega.solve(dz.a3);
    gram1 = dz.a1.transpose() * s1;
    gram2 = dz.a2.transpose() * s2;
    gram3 = dz.a3.transpose() * s3;
    if (i == 0) {
      g1sum = gram1;
      g2sum = gram2;
      g3sum = gram3;
    } else {
      g1sum += gram1;
      g2sum += gram2;
      g3sum += gram3;
    }
    normal.noalias() += kron(kron(gram3, gram2), gram1);
    rhs += vec(tucker_apply(y[i], s1.transpose(), s2.transpose(),
                            s3.transpose()));
  }
  Eigen::LLT<Mat> llt(normal);
  if (llt.info() != Eigen::Success) {
    const Mat* grams[3] = {&g1sum, &g2sum, &g3sum};
    for (int m = 0; m < 3; ++m) {
      if (Eigen::LLT<Mat>(*grams[m]).info() != Eigen::Success) {
        throw RankDeficiencyError(
            "estimate_fixed: mode-" + std::to_string(m + 1) +
            " design factor is rank deficient");
      }
    }
    throw RankDeficiencyError(
        "estimate_fixed: normal equations are singular");
  }
  return unvec(llt.solve(rhs), {ranks.p, ranks.q, ranks.r});
}

}  // namespace

Tensor3 estimate_fixed(std::span<const Tensor3> y, const TmeDesign& design,
                       const CovTriple& total) {
  check_batch(y);
  if (!(design.data_dims() == y[0].dims())) {
    throw std::invalid_argument("estimate_fixed: design does not match data");
  }
  // Shared design and covariances: the normal matrix is N times the
  // one-sample matrix and the right-hand side is N times the batch-mean term,
  // so the N cancels in the solve.
  const Ranks3 ranks = design.fixed_ranks();
  Mat s1 = total.sigma.solve(design.a1);
  Mat s2 = total.psi.solve(design.a2);
  Mat s3 = total.omega.solve(design.a3);
  Mat gram1 = design.a1.transpose() * s1;
  Mat gram2 = design.a2.transpose() * s2;
  Mat gram3 = design.a3.transpose() * s3;
  Mat normal = kron(kron(gram3, gram2), gram1);
  Tensor3 ybar = mean_tensor(y);
  Vec rhs =
      vec(tucker_apply(ybar, s1.transpose(), s2.transpose(), s3.transpose()));
  Eigen::LLT<Mat> llt(normal);
  if (llt.info() != Eigen::Success) {
    const Mat* grams[3] = {&gram1, &gram2, &gram3};
    for (int m = 0; m < 3; ++m) {
      if (Eigen::LLT<Mat>(*grams[m]).info() != Eigen::Success) {
        throw RankDeficiencyError("estimate_fixed: mode-" +
                                  std::to_string(m + 1) +
                                  " design factor is rank deficient");
      }
    }
    throw RankDeficiencyError("estimate_fixed: normal equations are singular");
  }
  return unvec(llt.solve(rhs), {ranks.p, ranks.q, ranks.r});
}

Tensor3 estimate_fixed(std::span<const Tensor3> y,
                       const std::vector<TmeDesign>& designs,
                       const std::vector<CovTriple>& totals) {
  check_batch(y);
  if (designs.size() != y.size() || totals.size() != y.size()) {
    throw std::invalid_argument(
        "estimate_fixed: need one design and covariance triple per sample");
  }
  const Ranks3 r0 = designs.front().fixed_ranks();
  std::vector<const TmeDesign*> dp;
  std::vector<const CovTriple*> tp;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(designs[i].data_dims() == y[i].dims()) ||
        !(designs[i].fixed_ranks() == r0)) {
      throw std::invalid_argument(
          "estimate_fixed: per-sample designs are inconsistent");
    }
    dp.push_back(&designs[i]);
    tp.push_back(&totals[i]);
  }
  return solve_fixed(dp, tp, y);
}

CovTriple update_total_cov(std::span<const Tensor3> y, const Tensor3& center,
                           const CovTriple& current,
                           Normalization normalization, double floor_ratio,
                           int* floor_events) {
  check_batch(y);
  if (!(center.dims() == y[0].dims())) {
    throw std::invalid_argument("update_total_cov: center dims mismatch");
  }
  const ExistenceReport ex =
      existence_check(y[0].dims(), static_cast<long long>(y.size()), {});
  if (ex.verdict == Existence::necessary_violated) {
    throw ExistenceError("update_total_cov: " + ex.message);
  }
  std::vector<Tensor3> residuals;
  residuals.reserve(y.size());
  for (const Tensor3& t : y) {
    residuals.push_back(t - center);
  }
  return SweepAccumulator::run(residuals, current, nullptr, normalization,
                               floor_ratio, floor_events);
}

CovTriple normalize_identifiability(const CovTriple& triple,
                                    Normalization normalization) {
  const int k = triple.psi.dim();
  const int l = triple.omega.dim();
  double c_psi, c_omega;
  if (normalization == Normalization::trace) {
    c_psi = static_cast<double>(k) / triple.psi.matrix().trace();
    c_omega = static_cast<double>(l) / triple.omega.matrix().trace();
  } else {
    c_psi = std::exp(-triple.psi.log_det() / k);
    c_omega = std::exp(-triple.omega.log_det() / l);
  }
  return {SpdMatrix(triple.sigma.matrix() / (c_psi * c_omega)),
          SpdMatrix(c_psi * triple.psi.matrix()),
          SpdMatrix(c_omega * triple.omega.matrix())};
}

Tensor3 estimate_random_effects(const Tensor3& y_i, const Tensor3& fixed_full,
                                const TmeDesign& design,
                                const CovTriple& random_fx,
                                const CovTriple& total) {
  if (!(y_i.dims() == fixed_full.dims()) ||
      !(design.data_dims() == y_i.dims())) {
    throw std::invalid_argument("estimate_random_effects: dimension mismatch");
  }
  // Gain matrices Sigma_r B1' Sigma_i^{-1} and analogues.
  Mat g1 = random_fx.sigma.matrix() * total.sigma.solve(design.b1).transpose();
  Mat g2 = random_fx.psi.matrix() * total.psi.solve(design.b2).transpose();
  Mat g3 = random_fx.omega.matrix() * total.omega.solve(design.b3).transpose();
  return tucker_apply(y_i - fixed_full, g1, g2, g3);
}

CovTriple update_residual_cov(std::span<const Tensor3> y,
                              const Tensor3& fixed_full,
                              std::span<const Tensor3> r_full,
                              const CovTriple& current,
                              const ResidualStructure3& structure,
                              Normalization normalization, double floor_ratio,
                              int* floor_events) {
  check_batch(y);
  if (r_full.size() != y.size()) {
    throw std::invalid_argument(
        "update_residual_cov: need one expanded random-effects tensor per "
        "sample");
  }
  std::vector<Tensor3> residuals;
  residuals.reserve(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    residuals.push_back(y[i] - fixed_full - r_full[i]);
  }
  return SweepAccumulator::run(residuals, current, &structure, normalization,
                               floor_ratio, floor_events);
}

CovTriple recover_random_cov(const CovTriple& total, const CovTriple& residual,
                             const TmeDesign& design, double floor_ratio,
                             int* floor_events) {
  Mat sr = design.b1.transpose() *
           (total.sigma.matrix() - residual.sigma.matrix()) * design.b1;
  Mat pr = design.b2.transpose() *
           (total.psi.matrix() - residual.psi.matrix()) * design.b2;
  Mat omr = design.b3.transpose() *
            (total.omega.matrix() - residual.omega.matrix()) * design.b3;
  return {spd_project(sr, floor_ratio, floor_events),
          spd_project(pr, floor_ratio, floor_events),
          spd_project(omr, floor_ratio, floor_events)};
}

double loglik(std::span<const Tensor3> y, const Tensor3& fixed_full,
              const CovTriple& total) {
  check_batch(y);
  TensorNormal3 dist(fixed_full, total.sigma, total.psi, total.omega);
  double acc = 0.0;
  for (const Tensor3& t : y) {
    acc += log_density(dist, t);
  }
  return acc;
}

TmeFit fit_tme(std::span<const Tensor3> y, const TmeDesign& design,
               const TmeConfig& config) {
  config.validate();
  design.validate();
  check_batch(y);
  const Dims3 dims = y[0].dims();
  if (!(design.data_dims() == dims)) {
    throw std::invalid_argument("fit_tme: design does not match data");
  }
  const long long n = static_cast<long long>(y.size());
  const ExistenceReport ex =
      existence_check(dims, n, config.residual_structure);
  if (ex.verdict == Existence::necessary_violated) {
    throw ExistenceError("fit_tme: " + ex.message);
  }

  TmeFit fit{.f_hat = Tensor3(),
             .total = CovTriple::identity(dims),
             .residual = CovTriple::identity(dims),
             .random_fx = CovTriple::identity(design.random_ranks()),
             .r_hat = {},
             .trace1 = {},
             .trace2 = {},
             .loglik = 0.0,
             .design = design};

  auto expand = [&](const Tensor3& core) {
    return tucker_apply(core, design.a1, design.a2, design.a3);
  };

  // Loop 1: total covariances and fixed effects. The core starts from the
  // identity-covariance GLS estimate.
  CovTriple total = CovTriple::identity(dims);
  Tensor3 f_hat = estimate_fixed(y, design, total);
  for (int it = 1; it <= config.loop1_max; ++it) {
    const auto t0 = Clock::now();
    const CovTriple prev = total;
    total = update_total_cov(y, expand(f_hat), total, config.normalization,
                             config.eigen_floor_ratio,
                             &fit.trace1.spd_floor_events);
    f_hat = estimate_fixed(y, design, total);
    const double ll = loglik(y, expand(f_hat), total);
    if (!std::isfinite(ll)) {
      throw DivergenceError(
          "fit_tme: loop-1 log-likelihood became non-finite at iteration " +
              std::to_string(it),
          it);
    }
    TraceRecord rec{l1_delta_index(prev.sigma.matrix(), total.sigma.matrix()),
                    l1_delta_index(prev.psi.matrix(), total.psi.matrix()),
                    l1_delta_index(prev.omega.matrix(), total.omega.matrix()),
                    ll, seconds_since(t0)};
    fit.trace1.records.push_back(rec);
    if (rec.idx_sigma < config.loop1_tol && rec.idx_psi < config.loop1_tol &&
        rec.idx_omega < config.loop1_tol) {
      fit.trace1.converged = true;
      break;
    }
  }
  fit.f_hat = f_hat;
  fit.total = total;
  const Tensor3 fixed_full = expand(f_hat);

  // Loop 2: residual covariances and random effects. The random-effects
  // triple is refreshed from the total/residual difference before every
  // conditional-expectation step.
  CovTriple residual = CovTriple::identity(dims);
  CovTriple random_fx = recover_random_cov(total, residual, design,
                                           config.eigen_floor_ratio,
                                           &fit.trace2.spd_floor_events);
  std::vector<Tensor3> r_hat(y.size(), Tensor3());
  std::vector<Tensor3> r_full(y.size(), Tensor3());
  auto refresh_random_effects = [&]() {
    for (size_t i = 0; i < y.size(); ++i) {
      r_hat[i] = estimate_random_effects(y[i], fixed_full, design, random_fx,
                                         total);
      r_full[i] = tucker_apply(r_hat[i], design.b1, design.b2, design.b3);
    }
  };
  refresh_random_effects();
  for (int it = 1; it <= config.loop2_max; ++it) {
    const auto t0 = Clock::now();
    const CovTriple prev = residual;
    residual = update_residual_cov(y, fixed_full, r_full, residual,
                                   config.residual_structure,
                                   config.normalization,
                                   config.eigen_floor_ratio,
                                   &fit.trace2.spd_floor_events);
    random_fx = recover_random_cov(total, residual, design,
                                   config.eigen_floor_ratio,
                                   &fit.trace2.spd_floor_events);
    refresh_random_effects();
    TensorNormal3 noise(Tensor3(dims), residual.sigma, residual.psi,
                        residual.omega);
    double ll = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      ll += log_density(noise, y[i] - fixed_full - r_full[i]);
    }
    if (!std::isfinite(ll)) {
      throw DivergenceError(
          "fit_tme: loop-2 log-likelihood became non-finite at iteration " +
              std::to_string(it),
          it);
    }
    TraceRecord rec{
        l1_delta_index(prev.sigma.matrix(), residual.sigma.matrix()),
        l1_delta_index(prev.psi.matrix(), residual.psi.matrix()),
        l1_delta_index(prev.omega.matrix(), residual.omega.matrix()), ll,
        seconds_since(t0)};
    fit.trace2.records.push_back(rec);
    if (rec.idx_sigma < config.loop2_tol && rec.idx_psi < config.loop2_tol &&
        rec.idx_omega < config.loop2_tol) {
      fit.trace2.converged = true;
      break;
    }
  }
  fit.residual = residual;
  fit.random_fx = random_fx;
  fit.r_hat = std::move(r_hat);
  fit.loglik = loglik(y, fixed_full, total);
  return fit;
}

TmeFit fit_tme(std::span<const Tensor3> y, const TmeConfig& config) {
  config.validate();
  check_batch(y);
  const Ranks3 fr = config.fixed_ranks;
  const Ranks3 rr = config.random_ranks;
  if (fr.p < 1 || fr.q < 1 || fr.r < 1 || rr.p < 1 || rr.q < 1 || rr.r < 1) {
    throw std::invalid_argument(
        "fit_tme: auto design needs positive fixed and random ranks");
  }
  TuckerDecomp td = hooi(mean_tensor(y), fr);
  TmeDesign design =
      TmeDesign::from_factors(std::move(td.f1), std::move(td.f2),
                              std::move(td.f3), rr, config.b_cols1,
                              config.b_cols2, config.b_cols3);
  return fit_tme(y, design, config);
}

}  // namespace tme
