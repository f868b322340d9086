#include "tme/tucker.hpp"

#include "tme/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tme {

namespace {

void check_ranks(const Tensor3& t, Ranks3 ranks) {
  const auto [j, k, l] = t.dims();
  if (ranks.p < 1 || ranks.q < 1 || ranks.r < 1 || ranks.p > j ||
      ranks.q > k || ranks.r > l) {
    throw std::invalid_argument("tucker: ranks must satisfy 1 <= rank <= dim");
  }
}

/// Leading r left singular vectors with a deterministic sign: the
/// largest-magnitude entry of each vector is made positive.
Mat leading_singular_vectors(const Mat& m, int r) {
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  Mat u = svd.matrixU().leftCols(r);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0.0) {
      u.col(c) = -u.col(c);
    }
  }
  return u;
}

Tensor3 project_core(const Tensor3& t, const Mat& f1, const Mat& f2,
                     const Mat& f3) {
  return tucker_apply(t, f1.transpose(), f2.transpose(), f3.transpose());
}

double reconstruction_rel_error(const Tensor3& t, const TuckerDecomp& d,
                                double t_norm) {
  if (t_norm == 0.0) {
    return 0.0;
  }
  Tensor3 rec = tucker_apply(d.core, d.f1, d.f2, d.f3);
  return frob_norm(t - rec) / t_norm;
}

}  // namespace

TuckerDecomp hosvd(const Tensor3& t, Ranks3 ranks) {
  check_ranks(t, ranks);
  TuckerDecomp d;
  d.f1 = leading_singular_vectors(matricize(t, 1), ranks.p);
  d.f2 = leading_singular_vectors(matricize(t, 2), ranks.q);
  d.f3 = leading_singular_vectors(matricize(t, 3), ranks.r);
  d.core = project_core(t, d.f1, d.f2, d.f3);
  d.rel_error = reconstruction_rel_error(t, d, frob_norm(t));
  return d;
}

TuckerDecomp hooi(const Tensor3& t, Ranks3 ranks, int max_iter, double tol) {
  if (max_iter < 1) {
    throw std::invalid_argument("hooi: max_iter must be >= 1");
  }
  TuckerDecomp d = hosvd(t, ranks);
  const double t_norm = frob_norm(t);
  if (t_norm == 0.0) {
    return d;
  }
  double prev = d.rel_error;
  for (int it = 0; it < max_iter; ++it) {
    d.f1 = leading_singular_vectors(
        matricize(mode_product(mode_product(t, 2, d.f2.transpose()), 3,
                               d.f3.transpose()),
                  1),
        ranks.p);
    d.f2 = leading_singular_vectors(
        matricize(mode_product(mode_product(t, 1, d.f1.transpose()), 3,
                               d.f3.transpose()),
                  2),
        ranks.q);
    d.f3 = leading_singular_vectors(
        matricize(mode_product(mode_product(t, 1, d.f1.transpose()), 2,
                               d.f2.transpose()),
                  3),
        ranks.r);
    d.core = project_core(t, d.f1, d.f2, d.f3);
    d.rel_error = reconstruction_rel_error(t, d, t_norm);
    d.history.push_back(d.rel_error);
    if (prev - d.rel_error < tol) {
      break;
    }
    prev = d.rel_error;
  }
  return d;
}

RankSelection rank_select(const Tensor3& t,
                          const std::vector<Ranks3>& candidate_ranks,
                          double sparsity_threshold) {
  if (candidate_ranks.empty()) {
    throw std::invalid_argument("rank_select: candidate list is empty");
  }
  RankSelection sel;
  sel.sparsity_threshold = sparsity_threshold;
  bool have_choice = false;
  TuckerDecomp best;
  for (const Ranks3& ranks : candidate_ranks) {
    TuckerDecomp d = hooi(t, ranks);
    Mat core1 = matricize(d.core, 1);
    bool passed = true;
    for (Eigen::Index row = 0; row < core1.rows(); ++row) {
      if (!(core1.row(row).cwiseAbs().sum() > sparsity_threshold)) {
        passed = false;
        break;
      }
    }
    sel.candidates_evaluated.push_back({ranks, d.rel_error, passed});
    if (!passed) {
      continue;
    }
    const Ranks3 cur = sel.chosen;
    const bool better =
        !have_choice || ranks.sum() > cur.sum() ||
        (ranks.sum() == cur.sum() &&
         (d.rel_error < best.rel_error ||
          (d.rel_error == best.rel_error &&
           std::tie(ranks.p, ranks.q, ranks.r) <
               std::tie(cur.p, cur.q, cur.r))));
    if (better) {
      have_choice = true;
      sel.chosen = ranks;
      best = std::move(d);
    }
  }
  if (!have_choice) {
    throw RankSelectionError(
        "rank_select: no admissible rank satisfies the sparsity criterion");
  }
  return sel;
}

std::vector<Ranks3> proportional_rank_grid(Dims3 dims, int steps,
                                           double max_fraction) {
  if (steps < 1 || max_fraction <= 0.0 || max_fraction > 1.0) {
    throw std::invalid_argument("proportional_rank_grid: bad arguments");
  }
  std::vector<Ranks3> grid;
  for (int s = 1; s <= steps; ++s) {
    const double f = max_fraction * s / steps;
    Ranks3 r{std::max(1, static_cast<int>(std::lround(f * dims.j))),
             std::max(1, static_cast<int>(std::lround(f * dims.k))),
             std::max(1, static_cast<int>(std::lround(f * dims.l)))};
    if (grid.empty() || !(grid.back() == r)) {
      grid.push_back(r);
    }
  }
  return grid;
}

}  // namespace tme
