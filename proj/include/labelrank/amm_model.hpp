// Multi-hyperplane weight structure shared by the multiclass and ranking
// trainers. Each class owns a variable-size block of dense weight vectors
// plus one implicit zero weight that always participates in the class score
//   g(i, x) = max_j w_{i,j}^T x
// so scores never drop below zero and empty classes score exactly zero.
//
// The uniform (1 - 1/t) regularization shrink is applied lazily through a
// single scalar multiplier, so an SGD step touches only the sparse support
// of the example; the multiplier is folded in before prediction-critical
// reads, pruning, and saving.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "labelrank/core.hpp"

namespace labelrank {

enum class NuMode { kConstant, kInverseRank };

NuMode nu_mode_from_string(const std::string& s);
std::string to_string(NuMode mode);

struct TrainConfig {
  double lambda = 1e-5;
  int epochs = 5;
  std::uint64_t seed = 1;
  int max_weights_per_class = 20;
  // -1: default schedule (every 10*d updates); 0: pruning off; >0: period.
  long long prune_period = -1;
  double prune_threshold = 1e-8;
  NuMode nu_mode = NuMode::kConstant;
  bool l2_normalize = false;

  void validate() const;  // throws std::invalid_argument
  long long resolved_prune_period(int dim) const;
};

class AmmModel {
 public:
  // Sentinel weight index for the implicit zero weight of a class.
  static constexpr int kZeroSlot = -1;

  AmmModel() = default;
  AmmModel(int num_labels, int dim, int max_weights_per_class = 20);

  int num_labels() const { return num_labels_; }
  int dim() const { return dim_; }
  int max_weights_per_class() const { return max_weights_; }
  int weight_count(int label) const;  // b_i
  int total_weights() const;

  // Stored weight j of a class with the lazy multiplier applied.
  std::vector<double> effective_weight(int label, int j) const;
  // w_{label,j}^T x including the multiplier; the zero slot dots to 0.
  double weight_dot(int label, int j, const SparseVector& x) const;

  double class_score(const SparseVector& x, int label) const;
  // Arg-max weight of the class for x: a stored index, or kZeroSlot when
  // every stored dot is negative (or the class is empty). Ties go to the
  // lowest stored index; a stored weight beats the zero slot at exact ties.
  int active_weight_index(const SparseVector& x, int label) const;
  void scores(const SparseVector& x, std::span<double> out) const;
  // Scores and active indices for all classes in one pass.
  void scores_and_active(const SparseVector& x, std::span<double> score_out,
                         std::span<int> active_out) const;
  Ranking predict_ranking(const SparseVector& x) const;

  // Adds delta to weight j of the class. A zero-slot update with a nonzero
  // delta grows the class (b_i += 1) unless the class is at
  // max_weights_per_class, in which case the update lands on the stored
  // weight with the highest dot product with delta.
  void promote_or_update(int label, int j, std::span<const double> delta);
  void promote_or_update(int label, int j, double coef, const SparseVector& x);

  // Multiplies every weight by factor (lazily). factor in [0, 1].
  void shrink(double factor);
  // Removes stored weights with squared norm <= threshold.
  void prune(double threshold);
  void fold_multiplier();

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static AmmModel load(std::istream& in);
  static AmmModel load_file(const std::string& path);

 private:
  int num_labels_ = 0;
  int dim_ = 0;
  int max_weights_ = 20;
  double multiplier_ = 1.0;
  // blocks_[label-1][j] is a dense vector of size dim_.
  std::vector<std::vector<std::vector<double>>> blocks_;

  double raw_dot(int label, int j, const SparseVector& x) const;
  // (best raw dot, best stored index or kZeroSlot) honoring the tie rule.
  std::pair<double, int> best_stored(const SparseVector& x, int label) const;
  void check_label(int label) const;
  void check_dim(const SparseVector& x) const;
};

}  // namespace labelrank
