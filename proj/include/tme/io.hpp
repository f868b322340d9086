#pragma once

#include "tme/model.hpp"
#include "tme/simlab.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tme {

// Tensor batch file (text):
//   TME-TENSOR3 v1
//   J K L N
//   N blocks of J*K*L whitespace-separated values in canonical order.
void write_tensor_batch(std::ostream& os, std::span<const Tensor3> batch);
void write_tensor_batch(const std::string& path,
                        std::span<const Tensor3> batch);
std::vector<Tensor3> read_tensor_batch(std::istream& is);
std::vector<Tensor3> read_tensor_batch(const std::string& path);

/// Reading view of a fitted-model file.
struct FitFile {
  Dims3 dims;
  Ranks3 fixed_ranks;
  Ranks3 random_ranks;
  long long n_samples = 0;
  Tensor3 f_hat;
  Mat sigma_i, psi_i, omega_i;
  Mat sigma_e, psi_e, omega_e;
  Mat sigma_r, psi_r, omega_r;
  struct TraceRow {
    int loop = 0;
    int iter = 0;
    double idx_sigma = 0.0, idx_psi = 0.0, idx_omega = 0.0;
    double loglik = 0.0, seconds = 0.0;
  };
  std::vector<TraceRow> trace;
};

// Fitted-model file (text): header `TME-FIT v1`, a dimension line
// `J K L P1 Q1 R1 P2 Q2 R2 N`, named sections F_HAT, SIGMA_I, PSI_I, OMEGA_I,
// SIGMA_E, PSI_E, OMEGA_E, SIGMA_R, PSI_R, OMEGA_R with row-major values, and
// a TRACE section of CSV lines `loop,iter,idx_sigma,idx_psi,idx_omega,
// loglik,seconds`.
void write_fit(std::ostream& os, const TmeFit& fit, long long n_samples,
               bool include_timings = true);
void write_fit(const std::string& path, const TmeFit& fit, long long n_samples,
               bool include_timings = true);
FitFile read_fit(std::istream& is);
FitFile read_fit(const std::string& path);

/// Trace CSV with the same columns as the TRACE section.
void write_trace_csv(std::ostream& os, const TmeFit& fit,
                     bool include_timings = true);

// Ground-truth file (text): header `TME-TRUTH v1`, the dimension line, then
// sections A1,A2,A3,B1,B2,B3,F,SIGMA_R,PSI_R,OMEGA_R,SIGMA_E,PSI_E,OMEGA_E.
// Samples are stored separately in a tensor batch file.
void write_truth(std::ostream& os, const SimTruth& truth);
void write_truth(const std::string& path, const SimTruth& truth);
SimTruth read_truth(std::istream& is);  // samples left empty
SimTruth read_truth(const std::string& path);

}  // namespace tme
