// Finite-difference gradient oracles. Each check reconstructs the gradient
// implied by one SGD step, (w_before - w_after) / eta, and compares it
// against central differences of the corresponding regularized objective
// with the active-weight selections and hinge activations frozen at the
// evaluation point. Sampling rejects points near hinge kinks or arg-max
// ties so the frozen objective agrees with the live one locally.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "labelrank/amm_model.hpp"
#include "labelrank/amm_multiclass.hpp"
#include "labelrank/amm_rank.hpp"
#include "labelrank/baselines.hpp"
#include "test_oracles.hpp"

namespace gradcheck {

using namespace labelrank;

constexpr double kKinkMargin = 1e-3;
constexpr double kFdStep = 1e-5;

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

inline SparseVector random_sparse(Rng& rng, int d) {
  std::vector<std::pair<int, double>> feats;
  for (int f = 1; f <= d; ++f) {
    if (rng.below(3) != 0) feats.emplace_back(f, rng.gaussian());
  }
  if (feats.empty()) feats.emplace_back(1 + static_cast<int>(rng.below(d)), 1.0);
  return SparseVector::from_entries(std::move(feats), d);
}

inline AmmModel random_amm(Rng& rng, int L, int d, int max_b = 3) {
  AmmModel m(L, d);
  for (int i = 1; i <= L; ++i) {
    const int b = static_cast<int>(rng.below(max_b + 1));
    for (int j = 0; j < b; ++j) {
      std::vector<double> w(d);
      for (double& v : w) v = rng.gaussian();
      m.promote_or_update(i, AmmModel::kZeroSlot, w);
    }
  }
  return m;
}

// Every class's arg-max must win by a clear margin (against both the
// runner-up stored weight and the zero slot) so selections are stable in
// the FD neighborhood.
inline bool selections_stable(const AmmModel& m, const SparseVector& x) {
  for (int i = 1; i <= m.num_labels(); ++i) {
    std::vector<double> dots;
    for (int j = 0; j < m.weight_count(i); ++j) {
      dots.push_back(m.weight_dot(i, j, x));
    }
    dots.push_back(0.0);  // zero slot
    double best = dots[0], second = -1e300;
    for (std::size_t j = 1; j < dots.size(); ++j) {
      if (dots[j] > best) {
        second = best;
        best = dots[j];
      } else if (dots[j] > second) {
        second = dots[j];
      }
    }
    if (dots.size() > 1 && best - second < kKinkMargin) return false;
  }
  return true;
}

// Explicit per-class weight lists with the z-selected zero slots
// materialized, so the FD objective can perturb every relevant coordinate.
struct ExplicitWeights {
  std::vector<std::vector<std::vector<double>>> w;  // [class-1][j][f]
  std::vector<int> z;                               // index into w[i]
  std::vector<bool> z_is_zero_slot;
};

inline ExplicitWeights materialize(const AmmModel& m, const SparseVector& x) {
  ExplicitWeights ew;
  const int L = m.num_labels();
  ew.w.resize(L);
  ew.z.resize(L);
  ew.z_is_zero_slot.resize(L);
  for (int i = 1; i <= L; ++i) {
    for (int j = 0; j < m.weight_count(i); ++j) {
      ew.w[i - 1].push_back(m.effective_weight(i, j));
    }
    const int z = m.active_weight_index(x, i);
    if (z == AmmModel::kZeroSlot) {
      ew.w[i - 1].push_back(std::vector<double>(m.dim(), 0.0));
      ew.z[i - 1] = static_cast<int>(ew.w[i - 1].size()) - 1;
      ew.z_is_zero_slot[i - 1] = true;
    } else {
      ew.z[i - 1] = z;
      ew.z_is_zero_slot[i - 1] = false;
    }
  }
  return ew;
}

inline double ew_dot(const ExplicitWeights& ew, int label, int j,
                     const SparseVector& x) {
  double s = 0.0;
  for (const auto& [idx, val] : x.entries) s += ew.w[label - 1][j][idx - 1] * val;
  return s;
}

inline double frobenius_sq(const ExplicitWeights& ew) {
  double s = 0.0;
  for (const auto& block : ew.w) {
    for (const auto& w : block) {
      for (double v : w) s += v * v;
    }
  }
  return s;
}

// Gradient implied by one step, matched against the explicit layout
// (a weight grown during the step corresponds to the materialized slot).
inline ExplicitWeights implied_gradient(const ExplicitWeights& before,
                                        const AmmModel& after, double eta) {
  ExplicitWeights grad = before;
  const int L = static_cast<int>(before.w.size());
  for (int i = 1; i <= L; ++i) {
    const int stored =
        static_cast<int>(before.w[i - 1].size()) -
        (before.z_is_zero_slot[i - 1] ? 1 : 0);
    for (int j = 0; j < static_cast<int>(before.w[i - 1].size()); ++j) {
      std::vector<double> after_w;
      if (j < stored) {
        after_w = after.effective_weight(i, j);
      } else if (after.weight_count(i) > stored) {
        after_w = after.effective_weight(i, stored);  // grown this step
      } else {
        after_w = std::vector<double>(before.w[i - 1][j].size(), 0.0);
      }
      for (std::size_t f = 0; f < after_w.size(); ++f) {
        grad.w[i - 1][j][f] = (before.w[i - 1][j][f] - after_w[f]) / eta;
      }
    }
  }
  return grad;
}

template <typename Objective>
inline double max_fd_rel_err(const ExplicitWeights& base,
                             const ExplicitWeights& grad,
                             Objective&& objective) {
  ExplicitWeights probe = base;
  double worst = 0.0;
  for (std::size_t i = 0; i < base.w.size(); ++i) {
    for (std::size_t j = 0; j < base.w[i].size(); ++j) {
      for (std::size_t f = 0; f < base.w[i][j].size(); ++f) {
        const double keep = probe.w[i][j][f];
        probe.w[i][j][f] = keep + kFdStep;
        const double up = objective(probe);
        probe.w[i][j][f] = keep - kFdStep;
        const double down = objective(probe);
        probe.w[i][j][f] = keep;
        const double fd = (up - down) / (2.0 * kFdStep);
        worst = std::max(worst, rel_err(fd, grad.w[i][j][f]));
      }
    }
  }
  return worst;
}

// One AMM-rank triple; returns the worst relative error, or nullopt when
// the sample landed too close to a kink.
inline std::optional<double> rank_fd_trial(Rng& rng) {
  const int L = 2 + static_cast<int>(rng.below(4));
  const int d = 2 + static_cast<int>(rng.below(5));
  const double lambda = 0.3;
  const long long t = 3;
  const NuMode mode = rng.below(2) == 0 ? NuMode::kConstant : NuMode::kInverseRank;

  AmmModel model = random_amm(rng, L, d);
  const SparseVector x = random_sparse(rng, d);
  const Ranking pi = oracle::random_partial(rng, L);
  if (!selections_stable(model, x)) return std::nullopt;

  std::vector<double> score(L);
  model.scores(x, score);
  const std::vector<int> pos = ranking_positions(pi, L);

  struct Pair {
    int rank_pos;
    int better;
    int worse;
  };
  std::vector<Pair> active;
  for (int p = 1; p <= pi.length(); ++p) {
    const int better = pi.labels[p - 1];
    for (int j = 1; j <= L; ++j) {
      const bool worse = pos[j] == 0 || pos[j] > p;
      if (!worse) continue;
      const double slack = 1.0 + score[j - 1] - score[better - 1];
      if (std::abs(slack) < kKinkMargin) return std::nullopt;
      if (slack > 0.0) active.push_back({p, better, j});
    }
  }

  const ExplicitWeights base = materialize(model, x);
  auto objective = [&](const ExplicitWeights& ew) {
    double obj = 0.5 * lambda * frobenius_sq(ew);
    for (const auto& pr : active) {
      obj += nu(pr.rank_pos, mode) *
             (1.0 + ew_dot(ew, pr.worse, ew.z[pr.worse - 1], x) -
              ew_dot(ew, pr.better, ew.z[pr.better - 1], x));
    }
    return obj;
  };

  AmmModel stepped = model;
  rank_sgd_step(stepped, x, pi, t, lambda, mode);
  const double eta = 1.0 / (lambda * static_cast<double>(t));
  const ExplicitWeights grad = implied_gradient(base, stepped, eta);
  return max_fd_rel_err(base, grad, objective);
}

// One multiclass triple.
inline std::optional<double> multiclass_fd_trial(Rng& rng) {
  const int L = 2 + static_cast<int>(rng.below(4));
  const int d = 2 + static_cast<int>(rng.below(5));
  const double lambda = 0.3;
  const long long t = 3;

  AmmModel model = random_amm(rng, L, d);
  const SparseVector x = random_sparse(rng, d);
  const int y = 1 + static_cast<int>(rng.below(L));
  if (!selections_stable(model, x)) return std::nullopt;

  std::vector<double> score(L);
  model.scores(x, score);
  int competitor = 0;
  double best_other = 0.0, second_other = -1e300;
  for (int i = 1; i <= L; ++i) {
    if (i == y) continue;
    if (competitor == 0 || score[i - 1] > best_other) {
      second_other = competitor == 0 ? second_other : best_other;
      best_other = score[i - 1];
      competitor = i;
    } else if (score[i - 1] > second_other) {
      second_other = score[i - 1];
    }
  }
  // the competitor arg-max must be stable too
  if (L > 2 && best_other - second_other < kKinkMargin) return std::nullopt;
  const double slack = 1.0 + best_other - score[y - 1];
  if (std::abs(slack) < kKinkMargin) return std::nullopt;
  const bool is_active = slack > 0.0;

  const ExplicitWeights base = materialize(model, x);
  const int comp = competitor;
  auto objective = [&](const ExplicitWeights& ew) {
    double obj = 0.5 * lambda * frobenius_sq(ew);
    if (is_active) {
      obj += 1.0 + ew_dot(ew, comp, ew.z[comp - 1], x) -
             ew_dot(ew, y, ew.z[y - 1], x);
    }
    return obj;
  };

  AmmModel stepped = model;
  multiclass_sgd_step(stepped, x, y, t, lambda);
  const double eta = 1.0 / (lambda * static_cast<double>(t));
  const ExplicitWeights grad = implied_gradient(base, stepped, eta);
  return max_fd_rel_err(base, grad, objective);
}

// Logistic SGD step vs the smooth regularized log-loss objective.
inline double logistic_fd_trial(Rng& rng) {
  const int d = 2 + static_cast<int>(rng.below(6));
  const double lambda = 0.3;
  BinaryLogit logit(d);
  for (double& v : logit.w) v = 0.5 * rng.gaussian();
  logit.bias = 0.5 * rng.gaussian();
  logit.t = 2;  // next step runs at t = 3
  const SparseVector x = random_sparse(rng, d);
  const int y = rng.below(2) == 0 ? 1 : -1;

  const std::vector<double> w_before = logit.w;
  const double b_before = logit.bias;
  BinaryLogit stepped = logit;
  stepped.sgd_step(x, y, lambda);
  stepped.fold();
  const double eta = 1.0 / (lambda * 3.0);

  auto objective = [&](const std::vector<double>& w, double b) {
    double s = b;
    for (const auto& [idx, val] : x.entries) s += w[idx - 1] * val;
    double sq = 0.0;
    for (double v : w) sq += v * v;
    return 0.5 * lambda * sq + std::log1p(std::exp(-y * s));
  };

  double worst = 0.0;
  std::vector<double> probe = w_before;
  for (int f = 0; f < d; ++f) {
    const double keep = probe[f];
    probe[f] = keep + kFdStep;
    const double up = objective(probe, b_before);
    probe[f] = keep - kFdStep;
    const double down = objective(probe, b_before);
    probe[f] = keep;
    const double fd = (up - down) / (2.0 * kFdStep);
    const double implied = (w_before[f] - stepped.w[f]) / eta;
    worst = std::max(worst, rel_err(fd, implied));
  }
  const double fd_b = (objective(w_before, b_before + kFdStep) -
                       objective(w_before, b_before - kFdStep)) /
                      (2.0 * kFdStep);
  const double implied_b = (b_before - stepped.bias) / eta;
  worst = std::max(worst, rel_err(fd_b, implied_b));
  return worst;
}

// Runs trials until `wanted` kink-free samples succeeded; returns the worst
// relative error seen.
template <typename Trial>
inline double run_trials(Rng& rng, int wanted, Trial&& trial) {
  double worst = 0.0;
  int done = 0;
  int attempts = 0;
  while (done < wanted) {
    if (++attempts > wanted * 50) break;  // sampling starved; fail loudly
    const auto err = trial(rng);
    if (!err.has_value()) continue;
    worst = std::max(worst, *err);
    ++done;
  }
  if (done < wanted) return 1.0;
  return worst;
}

}  // namespace gradcheck
