#pragma once

#include "tme/spd.hpp"
#include "tme/tensor.hpp"
#include "tme/tucker.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tme {

/// Shared design matrices of the mixed-effects decomposition: a-matrices span
/// the fixed-effects subspaces, b-matrices the random-effects subspaces. All
/// six must have orthonormal columns.
struct TmeDesign {
  Mat a1, a2, a3;  // J x P1, K x Q1, L x R1
  Mat b1, b2, b3;  // J x P2, K x Q2, L x R2
  bool shared = true;

  Dims3 data_dims() const;
  Ranks3 fixed_ranks() const;
  Ranks3 random_ranks() const;
  void validate() const;  // throws std::invalid_argument on violation

  /// Builds a design from fixed-effects factors, taking the b-matrices as
  /// column subsets of the a-matrices (leading columns when the index lists
  /// are empty).
  static TmeDesign from_factors(Mat a1, Mat a2, Mat a3, Ranks3 random_ranks,
                                const std::vector<int>& b_cols1 = {},
                                const std::vector<int>& b_cols2 = {},
                                const std::vector<int>& b_cols3 = {});
};

/// Structural constraint applied to one residual covariance factor after each
/// update ("adjust according to given constraints").
enum class ResidualForm {
  general,         // no constraint beyond positive definiteness
  diagonal,        // off-diagonal entries zeroed
  isotropic,       // replaced by (trace/dim) * I
  given_diagonal,  // fitted positive scalar times a fixed diagonal profile
};

struct ResidualStructure {
  ResidualForm form = ResidualForm::general;
  Vec profile;  // required (strictly positive) for given_diagonal

  static ResidualStructure general() { return {}; }
  static ResidualStructure diagonal() { return {ResidualForm::diagonal, {}}; }
  static ResidualStructure isotropic() { return {ResidualForm::isotropic, {}}; }
  static ResidualStructure given(Vec profile) {
    return {ResidualForm::given_diagonal, std::move(profile)};
  }
};

/// Per-mode residual structures for (sigma, psi, omega).
struct ResidualStructure3 {
  ResidualStructure sigma, psi, omega;
};

enum class Normalization { trace, determinant };

struct TmeConfig {
  double loop1_tol = 1e-4;
  double loop2_tol = 1e-4;
  int loop1_max = 100;
  int loop2_max = 100;
  ResidualStructure3 residual_structure;
  Normalization normalization = Normalization::trace;
  double eigen_floor_ratio = 1e-10;
  Ranks3 fixed_ranks{0, 0, 0};   // used by the auto-design path
  Ranks3 random_ranks{0, 0, 0};  // idem
  std::vector<int> b_cols1, b_cols2, b_cols3;  // optional column subsets

  void validate() const;
};

/// One covariance factor per mode.
struct CovTriple {
  SpdMatrix sigma, psi, omega;

  static CovTriple identity(Dims3 dims);
  static CovTriple identity(Ranks3 ranks);
};

struct TraceRecord {
  double idx_sigma = 0.0;  // ||delta Sigma||_1 / (J*J)
  double idx_psi = 0.0;
  double idx_omega = 0.0;
  double loglik = 0.0;
  double seconds = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  int spd_floor_events = 0;

  int iterations() const { return static_cast<int>(records.size()); }
};

/// Full fitted model: fixed-effects core, the three covariance triples,
/// per-sample random-effects cores and both loop traces.
struct TmeFit {
  Tensor3 f_hat;                         // P1 x Q1 x R1
  CovTriple total;                       // Sigma_i, Psi_i, Omega_i
  CovTriple residual;                    // Sigma_e, Psi_e, Omega_e
  CovTriple random_fx;                   // Sigma_r, Psi_r, Omega_r
  std::vector<Tensor3> r_hat;            // P2 x Q2 x R2, one per sample
  ConvergenceTrace trace1, trace2;
  double loglik = 0.0;
  TmeDesign design;

  Tensor3 fixed_full() const;  // f_hat expanded through the a-matrices

  bool converged() const { return trace1.converged && trace2.converged; }
};

enum class Existence { ok, sufficient_unmet, necessary_violated };

struct ExistenceReport {
  Existence verdict = Existence::ok;
  double necessary_bound = 0.0;  // max(J/KL, K/JL, L/JK) + 1
  long long product_bound = 0;   // J*K*L
  long long diagonal_bound = 0;  // valid when diagonal_sigma
  bool diagonal_sigma = false;
  std::string message;
};

/// Sample-size gate: the necessary condition N >= max(J/KL,K/JL,L/JK)+1 is a
/// hard error for fitting; sufficiency holds when N >= JKL, or under a
/// diagonal sigma structure when N >= max(KL, necessary bound). In between
/// the verdict is a warning that existence is not guaranteed.
ExistenceReport existence_check(Dims3 dims, long long n,
                                const ResidualStructure3& structure);

/// Generalized least squares estimate of the fixed-effects core (shared
/// design and covariance triple across samples).
Tensor3 estimate_fixed(std::span<const Tensor3> y, const TmeDesign& design,
                       const CovTriple& total);

/// Per-sample designs and covariance triples.
Tensor3 estimate_fixed(std::span<const Tensor3> y,
                       const std::vector<TmeDesign>& designs,
                       const std::vector<CovTriple>& totals);

/// One Flip-Flop sweep over the total covariance triple given a centering
/// tensor (either the expanded fixed effects or the batch mean): sigma, then
/// psi using the new sigma, then omega using both, each floored to SPD; the
/// returned triple is identifiability-normalized.
CovTriple update_total_cov(std::span<const Tensor3> y, const Tensor3& center,
                           const CovTriple& current,
                           Normalization normalization = Normalization::trace,
                           double floor_ratio = 1e-10,
                           int* floor_events = nullptr);

/// Rescales psi and omega to a fixed gauge (trace K and L, or determinant 1),
/// absorbing both factors into sigma; the Kronecker product is unchanged.
CovTriple normalize_identifiability(const CovTriple& triple,
                                    Normalization normalization);

/// Conditional expectation of one random-effects core given its sample
/// (three mode products with the per-mode gain matrices).
Tensor3 estimate_random_effects(const Tensor3& y_i, const Tensor3& fixed_full,
                                const TmeDesign& design,
                                const CovTriple& random_fx,
                                const CovTriple& total);

/// One Flip-Flop sweep over the residual covariance triple using residuals
/// y_i - fixed_full - r_full[i]; each factor update is projected onto its
/// declared structure, floored to SPD, and the sweep ends with
/// identifiability normalization.
CovTriple update_residual_cov(std::span<const Tensor3> y,
                              const Tensor3& fixed_full,
                              std::span<const Tensor3> r_full,
                              const CovTriple& current,
                              const ResidualStructure3& structure,
                              Normalization normalization = Normalization::trace,
                              double floor_ratio = 1e-10,
                              int* floor_events = nullptr);

/// Projects the difference of total and residual factors onto the
/// random-effects subspaces: Sigma_r = B1' (Sigma_i - Sigma_e) B1, floored to
/// SPD, and likewise for psi and omega.
CovTriple recover_random_cov(const CovTriple& total, const CovTriple& residual,
                             const TmeDesign& design,
                             double floor_ratio = 1e-10,
                             int* floor_events = nullptr);

/// Sum of per-sample log-densities under the total covariance model.
double loglik(std::span<const Tensor3> y, const Tensor3& fixed_full,
              const CovTriple& total);

/// Double Flip-Flop fit with a caller-supplied design.
TmeFit fit_tme(std::span<const Tensor3> y, const TmeDesign& design,
               const TmeConfig& config);

/// Double Flip-Flop fit with the design initialized from a HOOI Tucker
/// decomposition of the batch mean (b-matrices are column subsets of the
/// fitted factors).
TmeFit fit_tme(std::span<const Tensor3> y, const TmeConfig& config);

}  // namespace tme
