#pragma once

#include "tme/tensor.hpp"

#include <vector>

namespace tme {

struct Ranks3 {
  int p = 0;
  int q = 0;
  int r = 0;
  friend bool operator==(const Ranks3&, const Ranks3&) = default;
  int sum() const { return p + q + r; }
};

/// Rank-(P,Q,R) Tucker decomposition: t ~ core x1 f1 x2 f2 x3 f3 with
/// orthonormal-column factors.
struct TuckerDecomp {
  Tensor3 core;
  Mat f1, f2, f3;
  double rel_error = 0.0;            // ||t - reconstruction||_F / ||t||_F
  std::vector<double> history;       // rel_error after each HOOI sweep
};

/// Higher-order SVD: factor k is the leading left singular vectors of the
/// mode-k unfolding; the core is the projection of t onto those factors.
TuckerDecomp hosvd(const Tensor3& t, Ranks3 ranks);

/// Higher-order orthogonal iteration, initialized by hosvd. Alternates
/// per-mode SVD updates until the rel_error improvement falls below tol or
/// max_iter sweeps are done. The objective is non-increasing across sweeps.
TuckerDecomp hooi(const Tensor3& t, Ranks3 ranks, int max_iter = 50,
                  double tol = 1e-8);

struct RankCandidate {
  Ranks3 ranks;
  double objective = 0.0;  // HOOI rel_error
  bool passed = false;     // sparsity criterion satisfied
};

struct RankSelection {
  Ranks3 chosen;
  double sparsity_threshold = 0.0;
  std::vector<RankCandidate> candidates_evaluated;
};

/// Runs HOOI for each candidate and keeps those whose core has L1 mass above
/// sparsity_threshold in every mode-1 row. Among passing candidates picks the
/// largest P+Q+R (ties: smaller rel_error, then lexicographic ranks).
/// Throws RankSelectionError if no candidate passes.
RankSelection rank_select(const Tensor3& t,
                          const std::vector<Ranks3>& candidate_ranks,
                          double sparsity_threshold);

/// Candidate grids with ranks roughly proportional to the tensor dimensions,
/// one candidate per step from 1/steps to max_fraction of each dimension.
std::vector<Ranks3> proportional_rank_grid(Dims3 dims, int steps,
                                           double max_fraction = 1.0);

}  // namespace tme
