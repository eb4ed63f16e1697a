#include "labelrank/amm_rank.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace labelrank {

double nu(int rank_position, NuMode mode) {
  if (rank_position < 1) throw std::invalid_argument("rank position must be >= 1");
  return mode == NuMode::kConstant ? 1.0 : 1.0 / rank_position;
}

ActiveIndexVector active_indices(const AmmModel& model,
                                 const SparseVector& x) {
  ActiveIndexVector z(static_cast<std::size_t>(model.num_labels()));
  for (int i = 1; i <= model.num_labels(); ++i) {
    z[i - 1] = model.active_weight_index(x, i);
  }
  return z;
}

double rank_loss(const AmmModel& model, const SparseVector& x,
                 const Ranking& pi, const ActiveIndexVector& z, NuMode mode) {
  const int L = model.num_labels();
  if (static_cast<int>(z.size()) != L) {
    throw std::invalid_argument("active-index vector size mismatch");
  }
  const std::vector<int> pos = ranking_positions(
      Ranking::validated(pi.labels, L), L);

  std::vector<double> score(static_cast<std::size_t>(L));
  model.scores(x, score);

  double loss = 0.0;
  for (int p = 1; p <= pi.length(); ++p) {
    const int better = pi.labels[p - 1];
    const double own = model.weight_dot(better, z[better - 1], x);
    const double weight = nu(p, mode);
    for (int j = 1; j <= L; ++j) {
      const bool worse = pos[j] == 0 || pos[j] > p;
      if (!worse) continue;
      loss += weight * std::max(0.0, 1.0 + score[j - 1] - own);
    }
  }
  return loss;
}

void rank_sgd_step(AmmModel& model, const SparseVector& x, const Ranking& pi,
                   long long t, double lambda, NuMode mode) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  const int L = model.num_labels();
  const std::vector<int> pos = ranking_positions(pi, L);

  std::vector<double> score(static_cast<std::size_t>(L));
  std::vector<int> active(static_cast<std::size_t>(L));
  model.scores_and_active(x, score, active);

  // net pull (+) / push (-) coefficient per label, from all violated pairs
  std::vector<double> coef(static_cast<std::size_t>(L), 0.0);
  for (int p = 1; p <= pi.length(); ++p) {
    const int better = pi.labels[p - 1];
    const double weight = nu(p, mode);
    for (int j = 1; j <= L; ++j) {
      const bool worse = pos[j] == 0 || pos[j] > p;
      if (!worse) continue;
      if (1.0 + score[j - 1] > score[better - 1]) {
        coef[better - 1] += weight;
        coef[j - 1] -= weight;
      }
    }
  }

  model.shrink(1.0 - 1.0 / static_cast<double>(t));
  const double eta = 1.0 / (lambda * static_cast<double>(t));
  for (int i = 1; i <= L; ++i) {
    if (coef[i - 1] != 0.0) {
      model.promote_or_update(i, active[i - 1], eta * coef[i - 1], x);
    }
  }
}

AmmModel train_rank(const RankedDataset& data, const TrainConfig& cfg) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return train_rank(data, all, cfg);
}

AmmModel train_rank(const RankedDataset& data, std::span<const int> indices,
                    const TrainConfig& cfg) {
  cfg.validate();
  if (indices.empty()) throw std::invalid_argument("empty dataset");

  AmmModel model(data.num_labels, data.dim, cfg.max_weights_per_class);
  const long long prune_every = cfg.resolved_prune_period(data.dim);
  Rng rng(cfg.seed);
  std::vector<int> order(indices.begin(), indices.end());
  long long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int idx : order) {
      const auto& inst = data.instances[static_cast<std::size_t>(idx)];
      ++t;
      if (cfg.l2_normalize) {
        rank_sgd_step(model, inst.features.normalized(), inst.truth, t,
                      cfg.lambda, cfg.nu_mode);
      } else {
        rank_sgd_step(model, inst.features, inst.truth, t, cfg.lambda,
                      cfg.nu_mode);
      }
      if (prune_every > 0 && t % prune_every == 0) {
        model.prune(cfg.prune_threshold);
      }
    }
  }
  model.fold_multiplier();
  return model;
}

}  // namespace labelrank
