#pragma once

#include "tme/benchmarks.hpp"
#include "tme/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace tme {

enum class NoiseRecipe {
  generic_5_1,  // isotropic K and L noise factors, one general PD J factor
  raman_5_2,    // identity K and L factors, diagonal J factor from a profile
};

/// Ground-truth generator configuration. The scale fields control the size
/// of the fixed effects and of the random/residual covariances; the defaults
/// put the residual variance near 10 per entry with the random effects
/// contributing roughly a sixth of the total.
struct SimConfig {
  Dims3 dims{30, 5, 5};
  Ranks3 fixed_ranks{8, 3, 3};
  Ranks3 random_ranks{3, 2, 2};
  int n = 1000;
  int replicates = 20;
  std::uint64_t seed = 20250809;
  NoiseRecipe recipe = NoiseRecipe::generic_5_1;
  Vec signal_profile;  // raman recipe; empty selects a synthetic profile
  double fixed_effect_scale = 50.0;
  double random_cov_scale = 5.0;
  double noise_sigma_scale = 1.0;  // generic recipe J-mode factor
  double noise_iso_min = 2.8;      // generic recipe K/L isotropic factors
  double noise_iso_max = 3.6;

  void validate() const;
};

/// A generated dataset together with every parameter that produced it.
struct SimTruth {
  TmeDesign design;
  Tensor3 f;           // fixed-effects core
  Tensor3 fixed_full;  // core expanded through the design
  CovTriple random_fx;
  CovTriple residual;
  std::vector<Tensor3> samples;

  /// Per-mode total covariances, B Sigma_r B' + Sigma_e and analogues.
  CovTriple total() const;
};

/// Draws a design (QR of Gaussian matrices, b-matrices the leading columns),
/// a Gaussian core, covariances per the recipe, and assembles the samples.
/// Deterministic given the generator state.
SimTruth gen_truth(const SimConfig& cfg, std::mt19937_64& rng);

/// Synthetic strictly positive spectrum-like profile used by the raman
/// recipe when none is supplied: a baseline plus a few Gaussian peaks.
Vec raman_signal_profile(int j);

/// Relative Frobenius estimation error ||est - truth||_F / ||truth||_F.
double metric_D(const Tensor3& estimate, const Tensor3& truth);
double metric_D(const Mat& estimate, const Mat& truth);

struct TripleD {
  double sigma = 0.0, psi = 0.0, omega = 0.0;
};

/// Factor-wise metric_D after putting both triples in the same
/// identifiability gauge.
TripleD metric_D_gauge(const CovTriple& estimate, const CovTriple& truth,
                       Normalization normalization = Normalization::trace);

struct StudyMethods {
  bool tme = true;
  bool tfe = true;
  bool td = true;
};

/// One replicate of the study: per-fit accuracy metrics, iteration counts,
/// timings and mean per-sample MSE for each requested method. Failed fits
/// carry the error text instead of aborting the study.
struct ReplicateRecord {
  int n = 0;
  int replicate = 0;
  std::string error;  // empty on success
  int iters1 = 0, iters2 = 0;
  double d_f = 0.0;
  double d_sigma_i = 0.0, d_psi_i = 0.0, d_omega_i = 0.0;
  double d_sigma_e = 0.0, d_psi_e = 0.0, d_omega_e = 0.0;
  double time1 = 0.0, time2 = 0.0;  // mean seconds per loop iteration
  double tme_mse = 0.0, tfe_mse = 0.0, td_mse = 0.0;
  double tme_seconds = 0.0, tfe_seconds = 0.0, td_seconds = 0.0;
  bool tme_ok = false, tfe_ok = false, td_ok = false;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Aggregates for one sample size.
struct StudyRow {
  int n = 0;
  int replicates = 0;
  int failures = 0;
  MeanSd iters1, d_f, d_sigma_i, d_psi_i, d_omega_i, time1;
  MeanSd d_sigma_e, d_psi_e, d_omega_e, time2;
  MeanSd tme_mse, tfe_mse, td_mse;
  double tme_seconds = 0.0, tfe_seconds = 0.0, td_seconds = 0.0;
};

struct StudyReport {
  std::vector<int> sizes;
  StudyMethods methods;
  std::vector<ReplicateRecord> records;
  std::vector<StudyRow> rows;

  void write_table2_csv(std::ostream& os, bool include_timings = true) const;
  void write_table3_csv(std::ostream& os, bool include_timings = true) const;
  void write_replicates_csv(std::ostream& os,
                            bool include_timings = true) const;
};

/// Runs cfg.replicates independent replicates at every sample size, fitting
/// the requested methods against freshly generated truths (the fits use the
/// true design matrices). Deterministic given cfg.seed.
StudyReport run_study(const SimConfig& cfg, const std::vector<int>& sizes,
                      const StudyMethods& methods, const TmeConfig& fit_config);

}  // namespace tme
