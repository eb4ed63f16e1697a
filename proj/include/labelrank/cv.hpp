// Seeded k-fold cross-validation across the ranking algorithms, with an
// optional inner held-out slice for lambda selection. Folds partition the
// dataset exactly; per-fold training stays single-threaded while folds of
// one algorithm may run concurrently.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "labelrank/amm_model.hpp"
#include "labelrank/core.hpp"
#include "labelrank/metrics.hpp"

namespace labelrank {

// Algorithm ids accepted by train/cv:
//   amm, amm-rank, central-mal, ag-mal, ib-mal, lr, pw-lr
bool algo_is_known(const std::string& algo);
bool algo_uses_lambda(const std::string& algo);

struct CvOptions {
  int folds = 5;
  std::vector<std::string> algos;
  std::vector<double> lambda_grid = {1e-5};
  TrainConfig base;  // epochs/seed/nu/normalization shared by every learner
  int topk_max = 10;  // clamped to L

  int ib_k = 10;
  int ib_subsample = 100000;
  bool parallel = true;
};

struct CvAlgoSummary {
  std::string algo;
  EvalReport report;  // pooled over fold test splits
  std::vector<double> fold_dis_error;
  std::vector<double> fold_lambda;  // chosen per fold (0 when not applicable)
};

struct CvResult {
  int folds = 0;
  int n_instances = 0;
  std::vector<CvAlgoSummary> algos;
};

// Exact partition of [0, N) into `folds` chunks of a seeded shuffle.
std::vector<std::vector<int>> make_folds(int n, int folds,
                                         std::uint64_t seed);

CvResult run_cv(const RankedDataset& data, const CvOptions& opt);

void write_cv_summary_csv(const CvResult& result, std::ostream& out);
void write_cv_topk_csv(const CvResult& result, std::ostream& out);
void write_cv_table(const CvResult& result, std::ostream& out);

}  // namespace labelrank
