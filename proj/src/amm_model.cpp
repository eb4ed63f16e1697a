#include "labelrank/amm_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace labelrank {

namespace {
// Below this the multiplier is folded in to keep stored values well scaled.
constexpr double kFoldFloor = 1e-6;
}  // namespace

NuMode nu_mode_from_string(const std::string& s) {
  if (s == "constant") return NuMode::kConstant;
  if (s == "inverse-rank" || s == "inverse_rank") return NuMode::kInverseRank;
  throw std::invalid_argument("unknown nu mode '" + s + "'");
}

std::string to_string(NuMode mode) {
  return mode == NuMode::kConstant ? "constant" : "inverse-rank";
}

void TrainConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (max_weights_per_class < 1) {
    throw std::invalid_argument("max_weights_per_class must be >= 1");
  }
  if (prune_threshold < 0.0) {
    throw std::invalid_argument("prune_threshold must be >= 0");
  }
  if (prune_period < -1) {
    throw std::invalid_argument("prune_period must be -1 (auto), 0 (off), or positive");
  }
}

long long TrainConfig::resolved_prune_period(int dim) const {
  if (prune_period == -1) return 10LL * std::max(dim, 1);
  return prune_period;  // 0 disables
}

AmmModel::AmmModel(int num_labels, int dim, int max_weights_per_class)
    : num_labels_(num_labels),
      dim_(dim),
      max_weights_(max_weights_per_class),
      blocks_(static_cast<std::size_t>(num_labels)) {
  if (num_labels < 1) throw std::invalid_argument("num_labels must be >= 1");
  if (dim < 0) throw std::invalid_argument("dim must be >= 0");
  if (max_weights_per_class < 1) {
    throw std::invalid_argument("max_weights_per_class must be >= 1");
  }
}

void AmmModel::check_label(int label) const {
  if (label < 1 || label > num_labels_) {
    throw std::invalid_argument("label " + std::to_string(label) +
                                " out of range [1, " +
                                std::to_string(num_labels_) + "]");
  }
}

void AmmModel::check_dim(const SparseVector& x) const {
  if (x.dim != dim_) {
    throw std::invalid_argument("feature dim " + std::to_string(x.dim) +
                                " does not match model dim " +
                                std::to_string(dim_));
  }
}

int AmmModel::weight_count(int label) const {
  check_label(label);
  return static_cast<int>(blocks_[label - 1].size());
}

int AmmModel::total_weights() const {
  int n = 0;
  for (const auto& block : blocks_) n += static_cast<int>(block.size());
  return n;
}

std::vector<double> AmmModel::effective_weight(int label, int j) const {
  check_label(label);
  const auto& w = blocks_[label - 1].at(static_cast<std::size_t>(j));
  std::vector<double> out(w);
  for (double& v : out) v *= multiplier_;
  return out;
}

double AmmModel::raw_dot(int label, int j, const SparseVector& x) const {
  const auto& w = blocks_[label - 1][static_cast<std::size_t>(j)];
  double s = 0.0;
  for (const auto& [idx, val] : x.entries) s += w[idx - 1] * val;
  return s;
}

double AmmModel::weight_dot(int label, int j, const SparseVector& x) const {
  check_label(label);
  check_dim(x);
  if (j == kZeroSlot) return 0.0;
  if (j < 0 || j >= weight_count(label)) {
    throw std::invalid_argument("weight index out of range");
  }
  return multiplier_ * raw_dot(label, j, x);
}

std::pair<double, int> AmmModel::best_stored(const SparseVector& x,
                                             int label) const {
  const auto& block = blocks_[label - 1];
  double best = 0.0;
  int best_j = kZeroSlot;
  for (int j = 0; j < static_cast<int>(block.size()); ++j) {
    const double d = raw_dot(label, j, x);
    if (best_j == kZeroSlot ? d >= 0.0 : d > best) {
      best = d;
      best_j = j;
    }
  }
  return {best, best_j};
}

double AmmModel::class_score(const SparseVector& x, int label) const {
  check_label(label);
  check_dim(x);
  const auto [best, best_j] = best_stored(x, label);
  if (best_j == kZeroSlot) return 0.0;
  return std::max(0.0, multiplier_ * best);
}

int AmmModel::active_weight_index(const SparseVector& x, int label) const {
  check_label(label);
  check_dim(x);
  return best_stored(x, label).second;
}

void AmmModel::scores(const SparseVector& x, std::span<double> out) const {
  check_dim(x);
  for (int i = 1; i <= num_labels_; ++i) {
    const auto [best, best_j] = best_stored(x, i);
    out[i - 1] = best_j == kZeroSlot ? 0.0 : std::max(0.0, multiplier_ * best);
  }
}

void AmmModel::scores_and_active(const SparseVector& x,
                                 std::span<double> score_out,
                                 std::span<int> active_out) const {
  check_dim(x);
  for (int i = 1; i <= num_labels_; ++i) {
    const auto [best, best_j] = best_stored(x, i);
    score_out[i - 1] =
        best_j == kZeroSlot ? 0.0 : std::max(0.0, multiplier_ * best);
    active_out[i - 1] = best_j;
  }
}

Ranking AmmModel::predict_ranking(const SparseVector& x) const {
  std::vector<double> s(static_cast<std::size_t>(num_labels_));
  scores(x, s);
  return ranking_from_scores(s);
}

void AmmModel::promote_or_update(int label, int j,
                                 std::span<const double> delta) {
  check_label(label);
  if (static_cast<int>(delta.size()) != dim_) {
    throw std::invalid_argument("delta dim mismatch");
  }
  auto& block = blocks_[label - 1];
  if (j == kZeroSlot) {
    const bool all_zero =
        std::all_of(delta.begin(), delta.end(), [](double v) { return v == 0.0; });
    if (all_zero) return;
    if (static_cast<int>(block.size()) < max_weights_) {
      std::vector<double> w(delta.begin(), delta.end());
      for (double& v : w) v /= multiplier_;
      block.push_back(std::move(w));
      return;
    }
    // At the cap: redirect to the stored weight most aligned with delta.
    int target = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(block.size()); ++k) {
      double d = 0.0;
      for (int f = 0; f < dim_; ++f) d += block[k][f] * delta[f];
      if (d > best) {
        best = d;
        target = k;
      }
    }
    j = target;
  }
  if (j < 0 || j >= static_cast<int>(block.size())) {
    throw std::invalid_argument("weight index out of range");
  }
  auto& w = block[static_cast<std::size_t>(j)];
  for (int f = 0; f < dim_; ++f) w[f] += delta[f] / multiplier_;
}

void AmmModel::promote_or_update(int label, int j, double coef,
                                 const SparseVector& x) {
  check_label(label);
  check_dim(x);
  auto& block = blocks_[label - 1];
  if (j == kZeroSlot) {
    if (coef == 0.0 || x.empty()) return;
    if (static_cast<int>(block.size()) < max_weights_) {
      std::vector<double> w(static_cast<std::size_t>(dim_), 0.0);
      const double c = coef / multiplier_;
      for (const auto& [idx, val] : x.entries) w[idx - 1] = c * val;
      block.push_back(std::move(w));
      return;
    }
    int target = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(block.size()); ++k) {
      const double d = coef * raw_dot(label, k, x);
      if (d > best) {
        best = d;
        target = k;
      }
    }
    j = target;
  }
  if (j < 0 || j >= static_cast<int>(block.size())) {
    throw std::invalid_argument("weight index out of range");
  }
  auto& w = block[static_cast<std::size_t>(j)];
  const double c = coef / multiplier_;
  for (const auto& [idx, val] : x.entries) w[idx - 1] += c * val;
}

void AmmModel::shrink(double factor) {
  multiplier_ *= factor;
  if (multiplier_ < kFoldFloor) fold_multiplier();
}

void AmmModel::fold_multiplier() {
  if (multiplier_ == 1.0) return;
  for (auto& block : blocks_) {
    for (auto& w : block) {
      for (double& v : w) v *= multiplier_;
    }
  }
  multiplier_ = 1.0;
}

void AmmModel::prune(double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
  fold_multiplier();
  for (auto& block : blocks_) {
    std::erase_if(block, [&](const std::vector<double>& w) {
      double sq = 0.0;
      for (double v : w) sq += v * v;
      return sq <= threshold;
    });
  }
}

void AmmModel::save(std::ostream& out) const {
  // Saved weights are literal: the multiplier must be folded first. A const
  // model is kept fold-free by writing the product instead.
  out << "#amm L=" << num_labels_ << " d=" << dim_ << "\n";
  for (int i = 1; i <= num_labels_; ++i) {
    for (const auto& w : blocks_[i - 1]) {
      out << i;
      for (double v : w) out << ' ' << format_double(v * multiplier_);
      out << "\n";
    }
  }
}

void AmmModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
}

AmmModel AmmModel::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("empty model file");
  }
  int L = 0, d = 0;
  if (std::sscanf(header.c_str(), "#amm L=%d d=%d", &L, &d) != 2) {
    throw std::runtime_error("bad model header '" + header + "'");
  }
  AmmModel model(L, d);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ls(line);
    int label = 0;
    if (!(ls >> label) || label < 1 || label > L) {
      throw std::runtime_error("model line " + std::to_string(line_no) +
                               ": bad class id");
    }
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) {
      if (!(ls >> w[f])) {
        throw std::runtime_error("model line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(d) +
                                 " values");
      }
    }
    model.blocks_[label - 1].push_back(std::move(w));
  }
  return model;
}

AmmModel AmmModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

}  // namespace labelrank
