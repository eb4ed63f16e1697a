// Label-ranking baselines: population central ranking, demographic-group
// central rankings, instance-based (k-NN) aggregation, one-vs-rest logistic
// regression, and pairwise logistic regression.
//
// Central rankings are aggregated with Borda positional credit as a fast
// surrogate for the Mallows maximum-likelihood center; an exact Kemeny
// search over all permutations is provided as a small-L test oracle.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "labelrank/amm_model.hpp"
#include "labelrank/core.hpp"

namespace labelrank {

// Positional-credit aggregation. A label ranked at position p earns L - p;
// each unranked label earns the average credit of the unoccupied positions,
// so every voter hands out the same total. Ties resolve by label id.
Ranking borda_aggregate(std::span<const Ranking> rankings, int num_labels);

// Number of input preference pairs (ranked-above-ranked and
// ranked-above-unranked) that candidate orders the other way.
long long total_pairwise_disagreement(const Ranking& candidate,
                                      std::span<const Ranking> rankings,
                                      int num_labels);

// Exact Kemeny aggregation by exhaustive permutation search; requires
// num_labels <= 10. Ties resolve to the lexicographically smallest optimum.
Ranking kemeny_exact(std::span<const Ranking> rankings, int num_labels);

// --- Central-Mal -----------------------------------------------------------

struct CentralRankModel {
  int num_labels = 0;
  Ranking central;
};

CentralRankModel fit_central(const RankedDataset& data);
CentralRankModel fit_central(const RankedDataset& data,
                             std::span<const int> indices);

// --- AG-Mal ----------------------------------------------------------------

// 1-based feature indices of the demographic one-hots.
struct DemoLayout {
  std::array<int, 9> age_indices{};
  std::array<int, 2> gender_indices{};
};

// Derives the canonical layout from the pipeline dimensionality
// d = 2*G*L + 9 + 2 with G in {4, 5}; throws if d does not fit.
DemoLayout demo_layout_from_dims(int num_labels, int dim);

struct GroupedRankModel {
  int num_labels = 0;
  int dim = 0;
  DemoLayout layout;
  std::map<std::pair<int, int>, Ranking> groups;  // (age bucket, gender)
  Ranking fallback;
};

GroupedRankModel fit_ag(const RankedDataset& data, const DemoLayout& layout);
GroupedRankModel fit_ag(const RankedDataset& data,
                        std::span<const int> indices,
                        const DemoLayout& layout);
// Reads the active demographic one-hots from x; missing or ambiguous
// demographics and unseen groups fall back to the global central ranking.
Ranking predict_ag(const GroupedRankModel& model, const SparseVector& x);

// --- IB-Mal ----------------------------------------------------------------

struct IbPool {
  const RankedDataset* data = nullptr;
  std::vector<int> indices;  // subsampled, in seeded order
};

// Seeded subsample of the training instances, size min(max_size, N).
IbPool make_ib_pool(const RankedDataset& data, std::span<const int> indices,
                    int max_size, std::uint64_t seed);
// Borda aggregate over the k nearest neighbors by Euclidean feature
// distance; distance ties resolve by pool order.
Ranking predict_ib(const IbPool& pool, const SparseVector& x, int k);

// --- Logistic baselines ----------------------------------------------------

// One L2-regularized binary logistic model trained by Pegasos-style SGD
// with learning rate 1/(lambda*t). The shrink is applied lazily via a
// scalar multiplier; the bias is unregularized.
struct BinaryLogit {
  std::vector<double> w;
  double bias = 0.0;
  double multiplier = 1.0;
  long long t = 0;

  explicit BinaryLogit(int dim)
      : w(static_cast<std::size_t>(dim), 0.0) {}

  double raw_score(const SparseVector& x) const;
  // label is +1 or -1; increments this model's iteration counter.
  void sgd_step(const SparseVector& x, int label, double lambda);
  void fold();
};

struct LinearOvrModel {
  int num_labels = 0;
  int dim = 0;
  std::vector<std::vector<double>> weights;  // per label
  std::vector<double> biases;
};

// Binary target for label c: positive iff c appears in the truth ranking.
LinearOvrModel fit_lr(const RankedDataset& data, const TrainConfig& cfg);
LinearOvrModel fit_lr(const RankedDataset& data, std::span<const int> indices,
                      const TrainConfig& cfg);
Ranking predict_lr(const LinearOvrModel& model, const SparseVector& x);

struct PairwiseModel {
  int num_labels = 0;
  int dim = 0;
  // Pair (i, j), i < j, at pair_index(i, j); predicts P(i preferred over j).
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;

  static int pair_count(int num_labels) {
    return num_labels * (num_labels - 1) / 2;
  }
  int pair_index(int i, int j) const;
};

// A pair trains on an instance only when the preference is determined:
// both labels ranked (order from the ranking) or exactly one ranked.
PairwiseModel fit_pw(const RankedDataset& data, const TrainConfig& cfg);
PairwiseModel fit_pw(const RankedDataset& data, std::span<const int> indices,
                     const TrainConfig& cfg);
// Soft voting: vote(i) += p_ij, vote(j) += 1 - p_ij over all pairs.
Ranking predict_pw(const PairwiseModel& model, const SparseVector& x);

}  // namespace labelrank
