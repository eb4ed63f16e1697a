#include "labelrank/cv.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "labelrank/amm_multiclass.hpp"
#include "labelrank/amm_rank.hpp"
#include "labelrank/baselines.hpp"

namespace labelrank {

bool algo_is_known(const std::string& algo) {
  return algo == "amm" || algo == "amm-rank" || algo == "central-mal" ||
         algo == "ag-mal" || algo == "ib-mal" || algo == "lr" ||
         algo == "pw-lr";
}

bool algo_uses_lambda(const std::string& algo) {
  return algo == "amm" || algo == "amm-rank" || algo == "lr" ||
         algo == "pw-lr";
}

std::vector<std::vector<int>> make_folds(int n, int folds,
                                         std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (folds > n) throw std::invalid_argument("fold count exceeds dataset size");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const int begin = static_cast<int>(static_cast<long long>(n) * f / folds);
    const int end =
        static_cast<int>(static_cast<long long>(n) * (f + 1) / folds);
    out[f].assign(order.begin() + begin, order.begin() + end);
  }
  return out;
}

namespace {

std::vector<Ranking> predict_with_algo(const std::string& algo,
                                       const RankedDataset& data,
                                       std::span<const int> train_idx,
                                       std::span<const int> test_idx,
                                       const TrainConfig& cfg,
                                       const CvOptions& opt) {
  std::vector<Ranking> preds;
  preds.reserve(test_idx.size());
  auto predict_all = [&](auto&& predict_one) {
    for (int i : test_idx) {
      preds.push_back(
          predict_one(data.instances[static_cast<std::size_t>(i)].features));
    }
  };

  if (algo == "amm") {
    const AmmModel model = train_multiclass(data, train_idx, cfg);
    predict_all([&](const SparseVector& x) { return model.predict_ranking(x); });
  } else if (algo == "amm-rank") {
    const AmmModel model = train_rank(data, train_idx, cfg);
    predict_all([&](const SparseVector& x) { return model.predict_ranking(x); });
  } else if (algo == "central-mal") {
    const CentralRankModel model = fit_central(data, train_idx);
    predict_all([&](const SparseVector&) { return model.central; });
  } else if (algo == "ag-mal") {
    const GroupedRankModel model =
        fit_ag(data, train_idx, demo_layout_from_dims(data.num_labels, data.dim));
    predict_all([&](const SparseVector& x) { return predict_ag(model, x); });
  } else if (algo == "ib-mal") {
    const IbPool pool =
        make_ib_pool(data, train_idx, opt.ib_subsample, cfg.seed);
    const int k = std::min<int>(opt.ib_k, static_cast<int>(pool.indices.size()));
    predict_all([&](const SparseVector& x) { return predict_ib(pool, x, k); });
  } else if (algo == "lr") {
    const LinearOvrModel model = fit_lr(data, train_idx, cfg);
    predict_all([&](const SparseVector& x) { return predict_lr(model, x); });
  } else if (algo == "pw-lr") {
    const PairwiseModel model = fit_pw(data, train_idx, cfg);
    predict_all([&](const SparseVector& x) { return predict_pw(model, x); });
  } else {
    throw std::invalid_argument("unknown algo '" + algo + "'");
  }
  return preds;
}

struct FoldOutcome {
  std::vector<Ranking> preds;
  double dis_error = 0.0;
  double lambda = 0.0;
};

FoldOutcome run_fold(const std::string& algo, const RankedDataset& data,
                     const std::vector<int>& train_idx,
                     const std::vector<int>& test_idx, const CvOptions& opt,
                     int fold) {
  TrainConfig cfg = opt.base;
  cfg.seed = opt.base.seed + static_cast<std::uint64_t>(fold);

  FoldOutcome out;
  if (algo_uses_lambda(algo)) {
    double best_lambda = opt.lambda_grid.front();
    if (opt.lambda_grid.size() > 1) {
      // Inner 80/20 split of the training slice for lambda selection.
      const std::size_t cut = train_idx.size() - train_idx.size() / 5;
      const std::vector<int> inner_train(train_idx.begin(),
                                         train_idx.begin() + cut);
      const std::vector<int> inner_val(train_idx.begin() + cut,
                                       train_idx.end());
      std::vector<Ranking> val_truths;
      val_truths.reserve(inner_val.size());
      for (int i : inner_val) {
        val_truths.push_back(data.instances[static_cast<std::size_t>(i)].truth);
      }
      double best_err = 0.0;
      bool first = true;
      for (double lambda : opt.lambda_grid) {
        TrainConfig inner_cfg = cfg;
        inner_cfg.lambda = lambda;
        const std::vector<Ranking> val_preds = predict_with_algo(
            algo, data, inner_train, inner_val, inner_cfg, opt);
        const double err =
            disagreement_error(val_preds, val_truths, data.num_labels);
        if (first || err < best_err) {
          best_err = err;
          best_lambda = lambda;
          first = false;
        }
      }
    }
    cfg.lambda = best_lambda;
    out.lambda = best_lambda;
  }

  out.preds = predict_with_algo(algo, data, train_idx, test_idx, cfg, opt);
  std::vector<Ranking> truths;
  truths.reserve(test_idx.size());
  for (int i : test_idx) {
    truths.push_back(data.instances[static_cast<std::size_t>(i)].truth);
  }
  out.dis_error = disagreement_error(out.preds, truths, data.num_labels);
  return out;
}

}  // namespace

CvResult run_cv(const RankedDataset& data, const CvOptions& opt) {
  if (opt.algos.empty()) throw std::invalid_argument("no algorithms selected");
  for (const auto& algo : opt.algos) {
    if (!algo_is_known(algo)) {
      throw std::invalid_argument("unknown algo '" + algo + "'");
    }
  }
  if (opt.lambda_grid.empty()) {
    throw std::invalid_argument("empty lambda grid");
  }
  opt.base.validate();

  const int n = static_cast<int>(data.size());
  const auto folds = make_folds(n, opt.folds, opt.base.seed);

  // train_idx per fold = all other folds' chunks, in fold order
  std::vector<std::vector<int>> train_sets(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g == f) continue;
      train_sets[f].insert(train_sets[f].end(), folds[g].begin(),
                           folds[g].end());
    }
  }

  CvResult result;
  result.folds = opt.folds;
  result.n_instances = n;
  for (const auto& algo : opt.algos) {
    std::vector<FoldOutcome> outcomes(folds.size());
    if (opt.parallel) {
      std::vector<std::future<FoldOutcome>> futures;
      futures.reserve(folds.size());
      for (std::size_t f = 0; f < folds.size(); ++f) {
        futures.push_back(std::async(std::launch::async, [&, f] {
          return run_fold(algo, data, train_sets[f], folds[f], opt,
                          static_cast<int>(f));
        }));
      }
      for (std::size_t f = 0; f < folds.size(); ++f) {
        outcomes[f] = futures[f].get();
      }
    } else {
      for (std::size_t f = 0; f < folds.size(); ++f) {
        outcomes[f] =
            run_fold(algo, data, train_sets[f], folds[f], opt,
                     static_cast<int>(f));
      }
    }

    // Pool fold test predictions; metrics over the pool equal the
    // instance-weighted CV average.
    std::vector<Ranking> preds, truths;
    preds.reserve(static_cast<std::size_t>(n));
    truths.reserve(static_cast<std::size_t>(n));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      for (std::size_t i = 0; i < folds[f].size(); ++i) {
        preds.push_back(outcomes[f].preds[i]);
        truths.push_back(
            data.instances[static_cast<std::size_t>(folds[f][i])].truth);
      }
    }
    CvAlgoSummary summary;
    summary.algo = algo;
    summary.report = evaluate_rankings(preds, truths, data.num_labels,
                                       std::min(opt.topk_max, data.num_labels));
    for (const auto& o : outcomes) {
      summary.fold_dis_error.push_back(o.dis_error);
      summary.fold_lambda.push_back(o.lambda);
    }
    result.algos.push_back(std::move(summary));
  }
  return result;
}

void write_cv_summary_csv(const CvResult& result, std::ostream& out) {
  out << "algorithm,eps_dis\n";
  for (const auto& a : result.algos) {
    out << a.algo << ',' << format_double(a.report.dis_error) << "\n";
  }
}

void write_cv_topk_csv(const CvResult& result, std::ostream& out) {
  out << "algorithm,K,precision,recall,f1\n";
  for (const auto& a : result.algos) {
    for (const auto& row : a.report.topk) {
      out << a.algo << ',' << row.k << ',' << format_double(row.precision)
          << ',' << format_double(row.recall) << ','
          << format_double(row.f1) << "\n";
    }
  }
}

void write_cv_table(const CvResult& result, std::ostream& out) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %8s %8s %8s\n", "algorithm",
                "eps_dis", "P@1", "R@1", "F1@1");
  out << buf;
  for (const auto& a : result.algos) {
    const auto& top1 = a.report.topk.front();
    std::snprintf(buf, sizeof(buf), "%-12s %10.4f %8.4f %8.4f %8.4f\n",
                  a.algo.c_str(), a.report.dis_error, top1.precision,
                  top1.recall, top1.f1);
    out << buf;
  }
}

}  // namespace labelrank
