#include "labelrank/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace labelrank {

Ranking borda_aggregate(std::span<const Ranking> rankings, int num_labels) {
  if (rankings.empty()) throw std::invalid_argument("no rankings to aggregate");
  const int L = num_labels;
  std::vector<double> credit(static_cast<std::size_t>(L), 0.0);
  for (const Ranking& r : rankings) {
    const int lt = r.length();
    for (int p = 1; p <= lt; ++p) credit[r.labels[p - 1] - 1] += L - p;
    if (lt < L) {
      const double avg = (L - lt - 1) / 2.0;  // mean credit of open positions
      if (avg != 0.0) {
        const std::vector<int> pos = ranking_positions(r, L);
        for (int c = 1; c <= L; ++c) {
          if (pos[c] == 0) credit[c - 1] += avg;
        }
      }
    }
  }
  return ranking_from_scores(credit);
}

namespace {

// pref[a-1][b-1] = number of voters preferring a over b.
std::vector<std::vector<long long>> preference_counts(
    std::span<const Ranking> rankings, int L) {
  std::vector<std::vector<long long>> pref(
      static_cast<std::size_t>(L),
      std::vector<long long>(static_cast<std::size_t>(L), 0));
  for (const Ranking& r : rankings) {
    const std::vector<int> pos = ranking_positions(r, L);
    for (int p = 1; p <= r.length(); ++p) {
      const int a = r.labels[p - 1];
      for (int b = 1; b <= L; ++b) {
        if (b == a) continue;
        if (pos[b] == 0 || pos[b] > p) ++pref[a - 1][b - 1];
      }
    }
  }
  return pref;
}

long long candidate_cost(const std::vector<int>& order,
                         const std::vector<std::vector<long long>>& pref) {
  long long cost = 0;
  for (std::size_t u = 0; u < order.size(); ++u) {
    for (std::size_t v = u + 1; v < order.size(); ++v) {
      cost += pref[order[v] - 1][order[u] - 1];
    }
  }
  return cost;
}

}  // namespace

long long total_pairwise_disagreement(const Ranking& candidate,
                                      std::span<const Ranking> rankings,
                                      int num_labels) {
  if (candidate.length() != num_labels) {
    throw std::invalid_argument("candidate must be a full ranking");
  }
  return candidate_cost(candidate.labels,
                        preference_counts(rankings, num_labels));
}

Ranking kemeny_exact(std::span<const Ranking> rankings, int num_labels) {
  if (rankings.empty()) throw std::invalid_argument("no rankings to aggregate");
  if (num_labels > 10) {
    throw std::invalid_argument("kemeny_exact requires L <= 10");
  }
  const auto pref = preference_counts(rankings, num_labels);
  std::vector<int> order(static_cast<std::size_t>(num_labels));
  std::iota(order.begin(), order.end(), 1);

  std::vector<int> best = order;
  long long best_cost = candidate_cost(order, pref);
  while (std::next_permutation(order.begin(), order.end())) {
    const long long cost = candidate_cost(order, pref);
    if (cost < best_cost) {
      best_cost = cost;
      best = order;
    }
  }
  return Ranking(std::move(best));
}

// --- Central-Mal -----------------------------------------------------------

CentralRankModel fit_central(const RankedDataset& data) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_central(data, all);
}

CentralRankModel fit_central(const RankedDataset& data,
                             std::span<const int> indices) {
  if (indices.empty()) throw std::invalid_argument("empty dataset");
  std::vector<Ranking> truths;
  truths.reserve(indices.size());
  for (int i : indices) {
    truths.push_back(data.instances[static_cast<std::size_t>(i)].truth);
  }
  CentralRankModel model;
  model.num_labels = data.num_labels;
  model.central = borda_aggregate(truths, data.num_labels);
  return model;
}

// --- AG-Mal ----------------------------------------------------------------

DemoLayout demo_layout_from_dims(int num_labels, int dim) {
  const int demo = 11;
  const int block = dim - demo;
  if (num_labels < 1 || block < 0 || block % (2 * num_labels) != 0) {
    throw std::invalid_argument("dim does not fit the feature layout");
  }
  const int groups = block / (2 * num_labels);
  if (groups != 4 && groups != 5) {
    throw std::invalid_argument("dim does not fit the feature layout");
  }
  DemoLayout layout;
  for (int b = 0; b < 9; ++b) layout.age_indices[b] = block + 1 + b;
  layout.gender_indices[0] = block + 10;
  layout.gender_indices[1] = block + 11;
  return layout;
}

namespace {

double value_at(const SparseVector& x, int index) {
  auto it = std::lower_bound(
      x.entries.begin(), x.entries.end(), index,
      [](const auto& e, int idx) { return e.first < idx; });
  if (it != x.entries.end() && it->first == index) return it->second;
  return 0.0;
}

// (age, gender) or (-1, -1) when missing/ambiguous.
std::pair<int, int> decode_group(const SparseVector& x,
                                 const DemoLayout& layout) {
  int age = -1, gender = -1;
  for (int b = 0; b < 9; ++b) {
    if (value_at(x, layout.age_indices[b]) != 0.0) {
      if (age != -1) return {-1, -1};
      age = b;
    }
  }
  for (int g = 0; g < 2; ++g) {
    if (value_at(x, layout.gender_indices[g]) != 0.0) {
      if (gender != -1) return {-1, -1};
      gender = g;
    }
  }
  if (age == -1 || gender == -1) return {-1, -1};
  return {age, gender};
}

}  // namespace

GroupedRankModel fit_ag(const RankedDataset& data, const DemoLayout& layout) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_ag(data, all, layout);
}

GroupedRankModel fit_ag(const RankedDataset& data,
                        std::span<const int> indices,
                        const DemoLayout& layout) {
  if (indices.empty()) throw std::invalid_argument("empty dataset");
  for (int idx : layout.age_indices) {
    if (idx < 1 || idx > data.dim) {
      throw std::invalid_argument("demographic layout outside feature space");
    }
  }
  for (int idx : layout.gender_indices) {
    if (idx < 1 || idx > data.dim) {
      throw std::invalid_argument("demographic layout outside feature space");
    }
  }

  GroupedRankModel model;
  model.num_labels = data.num_labels;
  model.dim = data.dim;
  model.layout = layout;

  std::map<std::pair<int, int>, std::vector<Ranking>> per_group;
  std::vector<Ranking> all_truths;
  all_truths.reserve(indices.size());
  for (int i : indices) {
    const auto& inst = data.instances[static_cast<std::size_t>(i)];
    all_truths.push_back(inst.truth);
    const auto group = decode_group(inst.features, layout);
    if (group.first >= 0) per_group[group].push_back(inst.truth);
  }
  model.fallback = borda_aggregate(all_truths, data.num_labels);
  for (const auto& [group, truths] : per_group) {
    model.groups.emplace(group, borda_aggregate(truths, data.num_labels));
  }
  return model;
}

Ranking predict_ag(const GroupedRankModel& model, const SparseVector& x) {
  const auto group = decode_group(x, model.layout);
  if (group.first >= 0) {
    auto it = model.groups.find(group);
    if (it != model.groups.end()) return it->second;
  }
  return model.fallback;
}

// --- IB-Mal ----------------------------------------------------------------

IbPool make_ib_pool(const RankedDataset& data, std::span<const int> indices,
                    int max_size, std::uint64_t seed) {
  if (indices.empty()) throw std::invalid_argument("empty pool");
  if (max_size < 1) throw std::invalid_argument("pool size must be >= 1");
  IbPool pool;
  pool.data = &data;
  pool.indices.assign(indices.begin(), indices.end());
  Rng rng(seed);
  rng.shuffle(pool.indices);
  if (static_cast<int>(pool.indices.size()) > max_size) {
    pool.indices.resize(static_cast<std::size_t>(max_size));
  }
  return pool;
}

Ranking predict_ib(const IbPool& pool, const SparseVector& x, int k) {
  if (pool.data == nullptr || pool.indices.empty()) {
    throw std::invalid_argument("empty pool");
  }
  if (k < 1 || k > static_cast<int>(pool.indices.size())) {
    throw std::invalid_argument("k out of range");
  }
  std::vector<std::pair<double, int>> by_dist;  // (distance^2, pool position)
  by_dist.reserve(pool.indices.size());
  for (int p = 0; p < static_cast<int>(pool.indices.size()); ++p) {
    const auto& inst =
        pool.data->instances[static_cast<std::size_t>(pool.indices[p])];
    by_dist.emplace_back(squared_distance(inst.features, x), p);
  }
  std::partial_sort(by_dist.begin(), by_dist.begin() + k, by_dist.end());
  std::vector<Ranking> neighbors;
  neighbors.reserve(static_cast<std::size_t>(k));
  for (int n = 0; n < k; ++n) {
    const int idx = pool.indices[static_cast<std::size_t>(by_dist[n].second)];
    neighbors.push_back(pool.data->instances[static_cast<std::size_t>(idx)].truth);
  }
  return borda_aggregate(neighbors, pool.data->num_labels);
}

// --- Logistic baselines ----------------------------------------------------

namespace {
constexpr double kFoldFloor = 1e-6;

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }
}  // namespace

double BinaryLogit::raw_score(const SparseVector& x) const {
  double s = 0.0;
  for (const auto& [idx, val] : x.entries) s += w[idx - 1] * val;
  return multiplier * s + bias;
}

void BinaryLogit::fold() {
  if (multiplier == 1.0) return;
  for (double& v : w) v *= multiplier;
  multiplier = 1.0;
}

void BinaryLogit::sgd_step(const SparseVector& x, int label, double lambda) {
  ++t;
  const double eta = 1.0 / (lambda * static_cast<double>(t));
  const double margin = label * raw_score(x);
  const double p = sigmoid(-margin);  // d(logloss)/d(margin) magnitude
  multiplier *= 1.0 - 1.0 / static_cast<double>(t);
  if (multiplier < kFoldFloor) fold();
  const double c = eta * label * p / multiplier;
  for (const auto& [idx, val] : x.entries) w[idx - 1] += c * val;
  bias += eta * label * p;
}

namespace {

// Shared epoch loop: hands each (instance, features) to a visitor in
// seeded shuffled order.
template <typename Visit>
void sgd_epochs(const RankedDataset& data, std::span<const int> indices,
                const TrainConfig& cfg, Visit&& visit) {
  cfg.validate();
  if (indices.empty()) throw std::invalid_argument("empty dataset");
  Rng rng(cfg.seed);
  std::vector<int> order(indices.begin(), indices.end());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int idx : order) {
      const auto& inst = data.instances[static_cast<std::size_t>(idx)];
      if (cfg.l2_normalize) {
        visit(inst, inst.features.normalized());
      } else {
        visit(inst, inst.features);
      }
    }
  }
}

}  // namespace

LinearOvrModel fit_lr(const RankedDataset& data, const TrainConfig& cfg) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_lr(data, all, cfg);
}

LinearOvrModel fit_lr(const RankedDataset& data, std::span<const int> indices,
                      const TrainConfig& cfg) {
  const int L = data.num_labels;
  std::vector<BinaryLogit> logits(static_cast<std::size_t>(L),
                                  BinaryLogit(data.dim));
  std::vector<char> member(static_cast<std::size_t>(L));
  sgd_epochs(data, indices, cfg,
             [&](const RankedInstance& inst, const SparseVector& x) {
               std::fill(member.begin(), member.end(), 0);
               for (int l : inst.truth.labels) member[l - 1] = 1;
               for (int c = 1; c <= L; ++c) {
                 logits[c - 1].sgd_step(x, member[c - 1] ? 1 : -1, cfg.lambda);
               }
             });
  LinearOvrModel model;
  model.num_labels = L;
  model.dim = data.dim;
  for (auto& logit : logits) {
    logit.fold();
    model.weights.push_back(std::move(logit.w));
    model.biases.push_back(logit.bias);
  }
  return model;
}

Ranking predict_lr(const LinearOvrModel& model, const SparseVector& x) {
  std::vector<double> scores(static_cast<std::size_t>(model.num_labels));
  for (int c = 1; c <= model.num_labels; ++c) {
    scores[c - 1] = dot(model.weights[c - 1], x) + model.biases[c - 1];
  }
  return ranking_from_scores(scores);
}

int PairwiseModel::pair_index(int i, int j) const {
  // row-major over i < j
  return (i - 1) * num_labels - (i - 1) * i / 2 + (j - i - 1);
}

PairwiseModel fit_pw(const RankedDataset& data, const TrainConfig& cfg) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_pw(data, all, cfg);
}

PairwiseModel fit_pw(const RankedDataset& data, std::span<const int> indices,
                     const TrainConfig& cfg) {
  const int L = data.num_labels;
  std::vector<BinaryLogit> logits(
      static_cast<std::size_t>(PairwiseModel::pair_count(L)),
      BinaryLogit(data.dim));
  PairwiseModel model;
  model.num_labels = L;
  model.dim = data.dim;

  sgd_epochs(data, indices, cfg,
             [&](const RankedInstance& inst, const SparseVector& x) {
               const std::vector<int> pos = ranking_positions(inst.truth, L);
               for (int i = 1; i <= L; ++i) {
                 for (int j = i + 1; j <= L; ++j) {
                   if (pos[i] == 0 && pos[j] == 0) continue;  // undetermined
                   int target;
                   if (pos[j] == 0) {
                     target = 1;
                   } else if (pos[i] == 0) {
                     target = -1;
                   } else {
                     target = pos[i] < pos[j] ? 1 : -1;
                   }
                   logits[static_cast<std::size_t>(model.pair_index(i, j))]
                       .sgd_step(x, target, cfg.lambda);
                 }
               }
             });
  for (auto& logit : logits) {
    logit.fold();
    model.weights.push_back(std::move(logit.w));
    model.biases.push_back(logit.bias);
  }
  return model;
}

Ranking predict_pw(const PairwiseModel& model, const SparseVector& x) {
  const int L = model.num_labels;
  std::vector<double> votes(static_cast<std::size_t>(L), 0.0);
  for (int i = 1; i <= L; ++i) {
    for (int j = i + 1; j <= L; ++j) {
      const int pidx = model.pair_index(i, j);
      const double s = dot(model.weights[pidx], x) + model.biases[pidx];
      const double p = sigmoid(s);
      votes[i - 1] += p;
      votes[j - 1] += 1.0 - p;
    }
  }
  return ranking_from_scores(votes);
}

}  // namespace labelrank
