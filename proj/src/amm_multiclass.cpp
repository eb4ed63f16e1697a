#include "labelrank/amm_multiclass.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace labelrank {

double multiclass_loss(const AmmModel& model, const SparseVector& x, int y,
                       int z) {
  const int L = model.num_labels();
  if (y < 1 || y > L) throw std::invalid_argument("bad true class");
  double best_other = 0.0;
  bool first = true;
  for (int i = 1; i <= L; ++i) {
    if (i == y) continue;
    const double s = model.class_score(x, i);
    if (first || s > best_other) {
      best_other = s;
      first = false;
    }
  }
  if (first) throw std::invalid_argument("need at least two classes");
  const double own = model.weight_dot(y, z, x);
  return std::max(0.0, 1.0 + best_other - own);
}

void multiclass_sgd_step(AmmModel& model, const SparseVector& x, int y,
                         long long t, double lambda) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  const int L = model.num_labels();
  std::vector<double> score(static_cast<std::size_t>(L));
  std::vector<int> active(static_cast<std::size_t>(L));
  model.scores_and_active(x, score, active);

  // Strongest competitor (i_t, j_t); ties resolved by lowest class id.
  int competitor = 0;
  double best_other = 0.0;
  for (int i = 1; i <= L; ++i) {
    if (i == y) continue;
    if (competitor == 0 || score[i - 1] > best_other) {
      best_other = score[i - 1];
      competitor = i;
    }
  }
  const double own = model.weight_dot(y, active[y - 1], x);
  const bool violated = 1.0 + best_other - own > 0.0;

  model.shrink(1.0 - 1.0 / static_cast<double>(t));
  if (violated) {
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    model.promote_or_update(y, active[y - 1], eta, x);
    model.promote_or_update(competitor, active[competitor - 1], -eta, x);
  }
}

AmmModel train_multiclass(const RankedDataset& data, const TrainConfig& cfg) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return train_multiclass(data, all, cfg);
}

AmmModel train_multiclass(const RankedDataset& data,
                          std::span<const int> indices,
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
      const int y = inst.truth.labels.front();
      ++t;
      if (cfg.l2_normalize) {
        multiclass_sgd_step(model, inst.features.normalized(), y, t,
                            cfg.lambda);
      } else {
        multiclass_sgd_step(model, inst.features, y, t, cfg.lambda);
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
