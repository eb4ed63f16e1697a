// Evaluation measures: pairwise disagreement error and top-K retrieval
// metrics (precision/recall/F1), averaged over a test set.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "labelrank/core.hpp"

namespace labelrank {

// Fraction of ground-truth preference pairs ordered incorrectly by the
// prediction. Per instance the pair count is L_t * (L - 0.5*(L_t+1)), i.e.
// ranked-vs-lower-ranked plus ranked-vs-unranked pairs; instances are
// averaged with equal weight. preds must be full permutations of [1..L].
double disagreement_error(std::span<const Ranking> preds,
                          std::span<const Ranking> truths, int num_labels);

struct TopkResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// precision@K = mean_t |top-K(pred_t) ∩ truth_t| / K
// recall@K    = mean_t |top-K(pred_t) ∩ truth_t| / L_t
// f1 is the harmonic mean of the two aggregates (0 when both are 0).
TopkResult topk_metrics(std::span<const Ranking> preds,
                        std::span<const Ranking> truths, int K);

struct EvalReport {
  int n_test = 0;
  double dis_error = 0.0;
  struct Row {
    int k;
    double precision;
    double recall;
    double f1;
  };
  std::vector<Row> topk;

  void write_kv(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
  void save(const std::string& kv_path, const std::string& csv_path) const;
};

EvalReport evaluate_rankings(std::span<const Ranking> preds,
                             std::span<const Ranking> truths, int num_labels,
                             int topk_max);

}  // namespace labelrank
