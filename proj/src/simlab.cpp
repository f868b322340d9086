#include "tme/simlab.hpp"

#include "tme/rng.hpp"
#include "tme/tensor_normal.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tme {

namespace {

/// Orthonormal columns from the QR of a Gaussian matrix, with the sign fixed
/// so the R diagonal is positive.
Mat random_orthonormal(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      g(r, c) = gauss(rng);
    }
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(rows, cols);
  Mat r = q.transpose() * g;
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (r(c, c) < 0.0) {
      q.col(c) = -q.col(c);
    }
  }
  return q;
}

SpdMatrix random_spd(int dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      g(r, c) = gauss(rng);
    }
  }
  return spd_project(scale * (g * g.transpose()) / static_cast<double>(dim));
}

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) {
    return 0.0;
  }
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  out.mean = sample_mean(xs);
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - out.mean) * (x - out.mean);
    }
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void put_mean_sd(std::ostream& os, const MeanSd& ms) {
  os << ',' << fmt(ms.mean) << ',' << fmt(ms.sd);
}

}  // namespace

void SimConfig::validate() const {
  if (dims.j < 1 || dims.k < 1 || dims.l < 1) {
    throw std::invalid_argument("SimConfig: dimensions must be positive");
  }
  auto rank_ok = [](int r, int d) { return r >= 1 && r <= d; };
  if (!rank_ok(fixed_ranks.p, dims.j) || !rank_ok(fixed_ranks.q, dims.k) ||
      !rank_ok(fixed_ranks.r, dims.l) ||
      !rank_ok(random_ranks.p, fixed_ranks.p) ||
      !rank_ok(random_ranks.q, fixed_ranks.q) ||
      !rank_ok(random_ranks.r, fixed_ranks.r)) {
    throw std::invalid_argument("SimConfig: infeasible rank configuration");
  }
  if (n < 1 || replicates < 1) {
    throw std::invalid_argument("SimConfig: n and replicates must be >= 1");
  }
  if (recipe == NoiseRecipe::raman_5_2 && signal_profile.size() > 0) {
    if (signal_profile.size() != dims.j ||
        (signal_profile.array() <= 0.0).any()) {
      throw std::invalid_argument(
          "SimConfig: signal profile must have length J and be strictly "
          "positive");
    }
  }
  if (fixed_effect_scale <= 0.0 || random_cov_scale <= 0.0 ||
      noise_sigma_scale <= 0.0 || noise_iso_min <= 0.0 ||
      noise_iso_max < noise_iso_min) {
    throw std::invalid_argument("SimConfig: scales must be positive");
  }
}

Vec raman_signal_profile(int j) {
  if (j < 1) {
    throw std::invalid_argument("raman_signal_profile: J must be positive");
  }
  // Baseline plus three bands, scaled to the channel count.
  Vec p(j);
  const double centers[3] = {0.25, 0.55, 0.80};
  const double widths[3] = {0.03, 0.05, 0.02};
  const double heights[3] = {6.0, 3.0, 9.0};
  for (int i = 0; i < j; ++i) {
    const double x = (i + 0.5) / j;
    double v = 0.5;
    for (int b = 0; b < 3; ++b) {
      const double z = (x - centers[b]) / widths[b];
      v += heights[b] * std::exp(-0.5 * z * z);
    }
    p[i] = v;
  }
  return p;
}

CovTriple SimTruth::total() const {
  Mat s = design.b1 * random_fx.sigma.matrix() * design.b1.transpose() +
          residual.sigma.matrix();
  Mat p = design.b2 * random_fx.psi.matrix() * design.b2.transpose() +
          residual.psi.matrix();
  Mat o = design.b3 * random_fx.omega.matrix() * design.b3.transpose() +
          residual.omega.matrix();
  return {spd_project(s), spd_project(p), spd_project(o)};
}

SimTruth gen_truth(const SimConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const auto [j, k, l] = cfg.dims;

  Mat a1 = random_orthonormal(j, cfg.fixed_ranks.p, rng);
  Mat a2 = random_orthonormal(k, cfg.fixed_ranks.q, rng);
  Mat a3 = random_orthonormal(l, cfg.fixed_ranks.r, rng);
  TmeDesign design = TmeDesign::from_factors(std::move(a1), std::move(a2),
                                             std::move(a3), cfg.random_ranks);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec fv(cfg.fixed_ranks.p * 1LL * cfg.fixed_ranks.q * cfg.fixed_ranks.r);
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv[i] = cfg.fixed_effect_scale * gauss(rng);
  }
  Tensor3 f({cfg.fixed_ranks.p, cfg.fixed_ranks.q, cfg.fixed_ranks.r},
            std::move(fv));

  CovTriple random_fx{
      random_spd(cfg.random_ranks.p, cfg.random_cov_scale, rng),
      random_spd(cfg.random_ranks.q, cfg.random_cov_scale, rng),
      random_spd(cfg.random_ranks.r, cfg.random_cov_scale, rng)};

  SpdMatrix sigma_e = SpdMatrix::identity(j);
  SpdMatrix psi_e = SpdMatrix::identity(k);
  SpdMatrix omega_e = SpdMatrix::identity(l);
  if (cfg.recipe == NoiseRecipe::generic_5_1) {
    sigma_e = random_spd(j, cfg.noise_sigma_scale, rng);
    std::uniform_real_distribution<double> iso(cfg.noise_iso_min,
                                               cfg.noise_iso_max);
    psi_e = SpdMatrix(iso(rng) * Mat::Identity(k, k));
    omega_e = SpdMatrix(iso(rng) * Mat::Identity(l, l));
  } else {
    Vec profile = cfg.signal_profile.size() > 0 ? cfg.signal_profile
                                                : raman_signal_profile(j);
    sigma_e = SpdMatrix(Mat(profile.asDiagonal()));
  }
  CovTriple residual{std::move(sigma_e), std::move(psi_e), std::move(omega_e)};

  SimTruth truth{std::move(design), std::move(f), Tensor3(), std::move(random_fx),
                 std::move(residual), {}};
  truth.fixed_full = tucker_apply(truth.f, truth.design.a1, truth.design.a2,
                                  truth.design.a3);

  const Dims3 rdims{cfg.random_ranks.p, cfg.random_ranks.q,
                    cfg.random_ranks.r};
  TensorNormal3 r_dist(Tensor3(rdims), truth.random_fx.sigma,
                       truth.random_fx.psi, truth.random_fx.omega);
  TensorNormal3 e_dist(Tensor3(cfg.dims), truth.residual.sigma,
                       truth.residual.psi, truth.residual.omega);
  truth.samples.reserve(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    Tensor3 r = sample(r_dist, 1, rng)[0];
    Tensor3 e = sample(e_dist, 1, rng)[0];
    truth.samples.push_back(
        truth.fixed_full +
        tucker_apply(r, truth.design.b1, truth.design.b2, truth.design.b3) +
        e);
  }
  return truth;
}

double metric_D(const Tensor3& estimate, const Tensor3& truth) {
  const double denom = frob_norm(truth);
  if (denom == 0.0) {
    throw std::invalid_argument("metric_D: truth has zero norm");
  }
  return frob_norm(estimate - truth) / denom;
}

double metric_D(const Mat& estimate, const Mat& truth) {
  const double denom = frob_norm(truth);
  if (denom == 0.0) {
    throw std::invalid_argument("metric_D: truth has zero norm");
  }
  return frob_norm(Mat(estimate - truth)) / denom;
}

TripleD metric_D_gauge(const CovTriple& estimate, const CovTriple& truth,
                       Normalization normalization) {
  CovTriple e = normalize_identifiability(estimate, normalization);
  CovTriple t = normalize_identifiability(truth, normalization);
  return {metric_D(e.sigma.matrix(), t.sigma.matrix()),
          metric_D(e.psi.matrix(), t.psi.matrix()),
          metric_D(e.omega.matrix(), t.omega.matrix())};
}

namespace {

double mean_trace_seconds(const ConvergenceTrace& trace) {
  if (trace.records.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const TraceRecord& r : trace.records) {
    acc += r.seconds;
  }
  return acc / static_cast<double>(trace.records.size());
}

double mean_mse(std::span<const Tensor3> y, auto&& predict_one) {
  double acc = 0.0;
  for (const Tensor3& s : y) {
    acc += mse(s, predict_one(s));
  }
  return acc / static_cast<double>(y.size());
}

}  // namespace

StudyReport run_study(const SimConfig& cfg, const std::vector<int>& sizes,
                      const StudyMethods& methods,
                      const TmeConfig& fit_config) {
  cfg.validate();
  fit_config.validate();
  if (sizes.empty()) {
    throw std::invalid_argument("run_study: empty sample-size grid");
  }
  StudyReport report;
  report.sizes = sizes;
  report.methods = methods;

  for (size_t si = 0; si < sizes.size(); ++si) {
    std::vector<double> iters1, d_f, d_si, d_pi, d_oi, t1;
    std::vector<double> d_se, d_pe, d_oe, t2;
    std::vector<double> mse_tme, mse_tfe, mse_td;
    double sec_tme = 0.0, sec_tfe = 0.0, sec_td = 0.0;
    int failures = 0;

    for (int rep = 0; rep < cfg.replicates; ++rep) {
      ReplicateRecord rec;
      rec.n = sizes[si];
      rec.replicate = rep;
      SimConfig cell = cfg;
      cell.n = sizes[si];
      std::mt19937_64 rng =
          make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(si),
                               static_cast<std::uint64_t>(rep)));
      SimTruth truth = gen_truth(cell, rng);

      if (methods.tme) {
        try {
          const auto t_start = std::chrono::steady_clock::now();
          TmeFit fit = fit_tme(truth.samples, truth.design, fit_config);
          rec.tme_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t_start)
                                .count();
          rec.tme_ok = true;
          rec.iters1 = fit.trace1.iterations();
          rec.iters2 = fit.trace2.iterations();
          rec.time1 = mean_trace_seconds(fit.trace1);
          rec.time2 = mean_trace_seconds(fit.trace2);
          rec.d_f = metric_D(fit.f_hat, truth.f);
          TripleD dt = metric_D_gauge(fit.total, truth.total(),
                                      fit_config.normalization);
          rec.d_sigma_i = dt.sigma;
          rec.d_psi_i = dt.psi;
          rec.d_omega_i = dt.omega;
          TripleD de = metric_D_gauge(fit.residual, truth.residual,
                                      fit_config.normalization);
          rec.d_sigma_e = de.sigma;
          rec.d_psi_e = de.psi;
          rec.d_omega_e = de.omega;
          rec.tme_mse = mean_mse(truth.samples, [&](const Tensor3& s) {
            return predict(fit, s, true);
          });
        } catch (const std::exception& e) {
          rec.error = e.what();
          ++failures;
        }
      }
      if (methods.tfe) {
        try {
          BenchFit fit = fit_tfe(truth.samples, truth.design, fit_config);
          rec.tfe_ok = true;
          rec.tfe_seconds = fit.seconds;
          rec.tfe_mse = mean_mse(truth.samples, [&](const Tensor3& s) {
            return predict(fit, s);
          });
        } catch (const std::exception& e) {
          rec.error += std::string(rec.error.empty() ? "" : "; ") + e.what();
        }
      }
      if (methods.td) {
        try {
          BenchFit fit = fit_td(truth.samples, cell.fixed_ranks);
          rec.td_ok = true;
          rec.td_seconds = fit.seconds;
          rec.td_mse = mean_mse(truth.samples, [&](const Tensor3& s) {
            return predict(fit, s);
          });
        } catch (const std::exception& e) {
          rec.error += std::string(rec.error.empty() ? "" : "; ") + e.what();
        }
      }

      if (rec.tme_ok) {
        iters1.push_back(rec.iters1);
        d_f.push_back(rec.d_f);
        d_si.push_back(rec.d_sigma_i);
        d_pi.push_back(rec.d_psi_i);
        d_oi.push_back(rec.d_omega_i);
        t1.push_back(rec.time1);
        d_se.push_back(rec.d_sigma_e);
        d_pe.push_back(rec.d_psi_e);
        d_oe.push_back(rec.d_omega_e);
        t2.push_back(rec.time2);
        mse_tme.push_back(rec.tme_mse);
        sec_tme += rec.tme_seconds;
      }
      if (rec.tfe_ok) {
        mse_tfe.push_back(rec.tfe_mse);
        sec_tfe += rec.tfe_seconds;
      }
      if (rec.td_ok) {
        mse_td.push_back(rec.td_mse);
        sec_td += rec.td_seconds;
      }
      report.records.push_back(std::move(rec));
    }

    StudyRow row;
    row.n = sizes[si];
    row.replicates = cfg.replicates;
    row.failures = failures;
    row.iters1 = mean_sd(iters1);
    row.d_f = mean_sd(d_f);
    row.d_sigma_i = mean_sd(d_si);
    row.d_psi_i = mean_sd(d_pi);
    row.d_omega_i = mean_sd(d_oi);
    row.time1 = mean_sd(t1);
    row.d_sigma_e = mean_sd(d_se);
    row.d_psi_e = mean_sd(d_pe);
    row.d_omega_e = mean_sd(d_oe);
    row.time2 = mean_sd(t2);
    row.tme_mse = mean_sd(mse_tme);
    row.tfe_mse = mean_sd(mse_tfe);
    row.td_mse = mean_sd(mse_td);
    row.tme_seconds = sec_tme;
    row.tfe_seconds = sec_tfe;
    row.td_seconds = sec_td;
    report.rows.push_back(row);
  }
  return report;
}

void StudyReport::write_table2_csv(std::ostream& os,
                                   bool include_timings) const {
  os << "n,replicates,failures,iters_mean,iters_sd,d_f_mean,d_f_sd,"
        "d_sigma_i_mean,d_sigma_i_sd,d_psi_i_mean,d_psi_i_sd,"
        "d_omega_i_mean,d_omega_i_sd,time1_mean,time1_sd,"
        "d_sigma_e_mean,d_sigma_e_sd,d_psi_e_mean,d_psi_e_sd,"
        "d_omega_e_mean,d_omega_e_sd,time2_mean,time2_sd\n";
  for (const StudyRow& r : rows) {
    os << r.n << ',' << r.replicates << ',' << r.failures;
    put_mean_sd(os, r.iters1);
    put_mean_sd(os, r.d_f);
    put_mean_sd(os, r.d_sigma_i);
    put_mean_sd(os, r.d_psi_i);
    put_mean_sd(os, r.d_omega_i);
    put_mean_sd(os, include_timings ? r.time1 : MeanSd{});
    put_mean_sd(os, r.d_sigma_e);
    put_mean_sd(os, r.d_psi_e);
    put_mean_sd(os, r.d_omega_e);
    put_mean_sd(os, include_timings ? r.time2 : MeanSd{});
    os << '\n';
  }
}

void StudyReport::write_table3_csv(std::ostream& os,
                                   bool include_timings) const {
  os << "n,tme_mse_mean,tme_mse_sd,tme_time,tfe_mse_mean,tfe_mse_sd,"
        "tfe_time,td_mse_mean,td_mse_sd,td_time,tme_beats_tfe\n";
  for (const StudyRow& r : rows) {
    os << r.n;
    put_mean_sd(os, r.tme_mse);
    os << ',' << fmt(include_timings ? r.tme_seconds : 0.0);
    put_mean_sd(os, r.tfe_mse);
    os << ',' << fmt(include_timings ? r.tfe_seconds : 0.0);
    put_mean_sd(os, r.td_mse);
    os << ',' << fmt(include_timings ? r.td_seconds : 0.0);
    const bool pass =
        methods.tme && methods.tfe && r.tme_mse.mean < r.tfe_mse.mean;
    os << ',' << (pass ? "PASS" : "FAIL") << '\n';
  }
}

void StudyReport::write_replicates_csv(std::ostream& os,
                                       bool include_timings) const {
  os << "n,replicate,iters1,iters2,d_f,d_sigma_i,d_psi_i,d_omega_i,"
        "d_sigma_e,d_psi_e,d_omega_e,time1,time2,tme_mse,tfe_mse,td_mse,"
        "error\n";
  for (const ReplicateRecord& r : records) {
    os << r.n << ',' << r.replicate << ',' << r.iters1 << ',' << r.iters2
       << ',' << fmt(r.d_f) << ',' << fmt(r.d_sigma_i) << ',' << fmt(r.d_psi_i)
       << ',' << fmt(r.d_omega_i) << ',' << fmt(r.d_sigma_e) << ','
       << fmt(r.d_psi_e) << ',' << fmt(r.d_omega_e) << ','
       << fmt(include_timings ? r.time1 : 0.0) << ','
       << fmt(include_timings ? r.time2 : 0.0) << ',' << fmt(r.tme_mse) << ','
       << fmt(r.tfe_mse) << ',' << fmt(r.td_mse) << ',' << r.error << '\n';
  }
}

}  // namespace tme
