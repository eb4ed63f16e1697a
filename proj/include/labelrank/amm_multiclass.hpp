// Multiclass AMM trained with Pegasos-style SGD on the one-vs-rest hinge.
// Used as the naive label-ranking baseline: it trains on the top-ranked
// label only and ranks by sorting all class scores at prediction time.
#pragma once

#include "labelrank/amm_model.hpp"
#include "labelrank/core.hpp"

namespace labelrank {

// max(0, 1 + max_{i != y} g(i, x) - w_{y,z}^T x). z may be kZeroSlot.
double multiclass_loss(const AmmModel& model, const SparseVector& x, int y,
                       int z);

// One SGD round at iteration t >= 1 with learning rate 1/(lambda*t):
// every weight is shrunk by (1 - 1/t); when the hinge is active the true
// class's arg-max weight moves toward x and the strongest competitor's
// arg-max weight moves away. Indicator decisions use pre-update scores.
void multiclass_sgd_step(AmmModel& model, const SparseVector& x, int y,
                         long long t, double lambda);

AmmModel train_multiclass(const RankedDataset& data, const TrainConfig& cfg);
// Trains on a subset given by instance indices; the public overload uses all.
AmmModel train_multiclass(const RankedDataset& data,
                          std::span<const int> indices,
                          const TrainConfig& cfg);

}  // namespace labelrank
