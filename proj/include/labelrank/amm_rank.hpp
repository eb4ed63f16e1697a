// AMM-rank: multi-hyperplane label ranking trained by SGD on a regularized
// rank hinge loss. For every preference pair (better, worse) implied by the
// ground-truth ranking -- including ranked-over-unranked pairs -- a hinge
// penalty is incurred unless the better label's score wins by margin 1.
// Per pair, the better label's active weight is pulled toward the example
// and the worse label's active weight is pushed away, both weighted by the
// importance nu of the better label's rank position.
#pragma once

#include <span>
#include <vector>

#include "labelrank/amm_model.hpp"
#include "labelrank/core.hpp"

namespace labelrank {

// Importance of rank position i >= 1: 1 in constant mode, 1/i otherwise.
double nu(int rank_position, NuMode mode);

// Per-class active weight indices z for one example (entry i-1 holds z_i).
using ActiveIndexVector = std::vector<int>;

ActiveIndexVector active_indices(const AmmModel& model, const SparseVector& x);

// Rank hinge loss of one example under the given active-index vector:
//   sum_{i=1..L_t} nu(i) sum_{j worse than pi_i} max(0, 1 + g(j,x) - w_{pi_i,z}^T x)
// where the worse set of position i holds the labels ranked below i plus
// every unranked label.
double rank_loss(const AmmModel& model, const SparseVector& x,
                 const Ranking& pi, const ActiveIndexVector& z, NuMode mode);

// One SGD round at iteration t >= 1. Active indices and all hinge
// indicators are computed from pre-update scores, then the shrink and the
// accumulated per-class updates are applied atomically.
void rank_sgd_step(AmmModel& model, const SparseVector& x, const Ranking& pi,
                   long long t, double lambda, NuMode mode);

AmmModel train_rank(const RankedDataset& data, const TrainConfig& cfg);
AmmModel train_rank(const RankedDataset& data, std::span<const int> indices,
                    const TrainConfig& cfg);

}  // namespace labelrank
