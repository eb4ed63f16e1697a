#include "labelrank/metrics.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace labelrank {

namespace {

void check_lengths(std::span<const Ranking> preds,
                   std::span<const Ranking> truths) {
  if (preds.size() != truths.size()) {
    throw std::invalid_argument("prediction/truth list length mismatch");
  }
  if (preds.empty()) throw std::invalid_argument("empty evaluation set");
}

}  // namespace

double disagreement_error(std::span<const Ranking> preds,
                          std::span<const Ranking> truths, int num_labels) {
  check_lengths(preds, truths);
  const int L = num_labels;
  double total = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const Ranking& pred = preds[n];
    const Ranking& truth = truths[n];
    if (pred.length() != L) {
      throw std::invalid_argument("prediction is not a full ranking");
    }
    const std::vector<int> pred_pos = ranking_positions(pred, L);
    const std::vector<int> truth_pos = ranking_positions(truth, L);
    const int lt = truth.length();

    long long violated = 0;
    for (int p = 1; p <= lt; ++p) {
      const int a = truth.labels[p - 1];
      for (int b = 1; b <= L; ++b) {
        const bool worse = truth_pos[b] == 0 || truth_pos[b] > p;
        if (worse && pred_pos[a] > pred_pos[b]) ++violated;
      }
    }
    const double pairs = lt * (L - 0.5 * (lt + 1));
    total += static_cast<double>(violated) / pairs;
  }
  return total / static_cast<double>(preds.size());
}

TopkResult topk_metrics(std::span<const Ranking> preds,
                        std::span<const Ranking> truths, int K) {
  check_lengths(preds, truths);
  double psum = 0.0, rsum = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const Ranking& pred = preds[n];
    if (K < 1 || K > pred.length()) {
      throw std::invalid_argument("K out of range");
    }
    int hits = 0;
    for (int i = 0; i < K; ++i) {
      if (truths[n].contains(pred.labels[i])) ++hits;
    }
    psum += static_cast<double>(hits) / K;
    rsum += static_cast<double>(hits) / truths[n].length();
  }
  TopkResult r;
  r.precision = psum / static_cast<double>(preds.size());
  r.recall = rsum / static_cast<double>(preds.size());
  r.f1 = (r.precision + r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

void EvalReport::write_kv(std::ostream& out) const {
  out << "n_test " << n_test << "\n";
  out << "dis_error " << format_double(dis_error) << "\n";
  for (const auto& row : topk) {
    out << "precision@" << row.k << ' ' << format_double(row.precision)
        << "\n";
    out << "recall@" << row.k << ' ' << format_double(row.recall) << "\n";
    out << "f1@" << row.k << ' ' << format_double(row.f1) << "\n";
  }
}

void EvalReport::write_csv(std::ostream& out) const {
  out << "K,precision,recall,f1\n";
  for (const auto& row : topk) {
    out << row.k << ',' << format_double(row.precision) << ','
        << format_double(row.recall) << ',' << format_double(row.f1) << "\n";
  }
}

void EvalReport::save(const std::string& kv_path,
                      const std::string& csv_path) const {
  std::ofstream kv(kv_path);
  if (!kv) throw std::runtime_error("cannot write " + kv_path);
  write_kv(kv);
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  write_csv(csv);
}

EvalReport evaluate_rankings(std::span<const Ranking> preds,
                             std::span<const Ranking> truths, int num_labels,
                             int topk_max) {
  if (topk_max < 1 || topk_max > num_labels) {
    throw std::invalid_argument("topk_max out of range");
  }
  EvalReport report;
  report.n_test = static_cast<int>(preds.size());
  report.dis_error = disagreement_error(preds, truths, num_labels);
  for (int k = 1; k <= topk_max; ++k) {
    const TopkResult r = topk_metrics(preds, truths, k);
    report.topk.push_back({k, r.precision, r.recall, r.f1});
  }
  return report;
}

}  // namespace labelrank
