#include "labelrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace labelrank {

SparseVector SparseVector::from_entries(
    std::vector<std::pair<int, double>> entries, int dim) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> kept;
  kept.reserve(entries.size());
  int prev = 0;
  for (const auto& [idx, val] : entries) {
    if (idx < 1 || idx > dim) {
      throw std::invalid_argument("feature index " + std::to_string(idx) +
                                  " out of range [1, " + std::to_string(dim) +
                                  "]");
    }
    if (idx == prev) {
      throw std::invalid_argument("duplicate feature index " +
                                  std::to_string(idx));
    }
    prev = idx;
    if (val != 0.0) kept.emplace_back(idx, val);
  }
  SparseVector x;
  x.entries = std::move(kept);
  x.dim = dim;
  return x;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& [idx, val] : entries) s += val * val;
  return s;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

SparseVector SparseVector::normalized() const {
  const double n = norm();
  if (n == 0.0) return *this;
  SparseVector out = *this;
  for (auto& [idx, val] : out.entries) val /= n;
  return out;
}

double dot(std::span<const double> dense, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [idx, val] : x.entries) s += dense[idx - 1] * val;
  return s;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  // ||a-b||^2 expanded; safe because entries are exact inputs, not residuals.
  double d = a.squared_norm() + b.squared_norm() - 2.0 * dot(a, b);
  return d > 0.0 ? d : 0.0;
}

bool Ranking::contains(int label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

Ranking Ranking::validated(std::vector<int> labels, int max_label) {
  if (labels.empty()) throw std::invalid_argument("empty ranking");
  std::vector<bool> seen(static_cast<std::size_t>(max_label) + 1, false);
  for (int l : labels) {
    if (l < 1 || l > max_label) {
      throw std::invalid_argument("label " + std::to_string(l) +
                                  " out of range [1, " +
                                  std::to_string(max_label) + "]");
    }
    if (seen[l]) {
      throw std::invalid_argument("duplicate label " + std::to_string(l));
    }
    seen[l] = true;
  }
  return Ranking(std::move(labels));
}

std::vector<int> ranking_positions(const Ranking& r, int num_labels) {
  std::vector<int> pos(static_cast<std::size_t>(num_labels) + 1, 0);
  for (int i = 0; i < r.length(); ++i) pos[r.labels[i]] = i + 1;
  return pos;
}

Ranking ranking_from_scores(std::span<const double> scores) {
  const int L = static_cast<int>(scores.size());
  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a - 1] != scores[b - 1]) return scores[a - 1] > scores[b - 1];
    return a < b;
  });
  return Ranking(std::move(order));
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

// "1:0.5" -> (1, 0.5)
std::pair<int, double> parse_feature_term(const std::string& term,
                                          std::size_t line_no) {
  const auto colon = term.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == term.size()) {
    parse_fail(line_no, "malformed feature term '" + term + "'");
  }
  try {
    std::size_t used = 0;
    int idx = std::stoi(term.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    std::size_t vused = 0;
    const std::string vs = term.substr(colon + 1);
    double val = std::stod(vs, &vused);
    if (vused != vs.size()) throw std::invalid_argument("");
    return {idx, val};
  } catch (const std::exception&) {
    parse_fail(line_no, "malformed feature term '" + term + "'");
  }
}

}  // namespace

RankedDataset parse_ranked_dataset(std::istream& in) {
  RankedDataset data;
  bool have_header = false;
  int header_L = 0, header_d = 0;

  struct RawInstance {
    std::vector<int> labels;
    std::vector<std::pair<int, double>> feats;
    std::size_t line_no;
  };
  std::vector<RawInstance> raw;
  int max_label = 0, max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (first_content_line &&
          std::sscanf(line.c_str(), "#L=%d d=%d", &header_L, &header_d) == 2) {
        if (header_L < 1 || header_d < 0) parse_fail(line_no, "bad header");
        have_header = true;
        first_content_line = false;
        continue;
      }
      parse_fail(line_no, "unexpected comment line");
    }
    first_content_line = false;

    const auto bar = line.find('|');
    if (bar == std::string::npos) parse_fail(line_no, "missing '|' separator");

    RawInstance inst;
    inst.line_no = line_no;
    {
      std::stringstream ls(line.substr(0, bar));
      std::string tok;
      while (std::getline(ls, tok, ',')) {
        // trim
        const auto b = tok.find_first_not_of(" \t");
        if (b == std::string::npos) parse_fail(line_no, "empty label token");
        const auto e = tok.find_last_not_of(" \t");
        tok = tok.substr(b, e - b + 1);
        try {
          std::size_t used = 0;
          int l = std::stoi(tok, &used);
          if (used != tok.size()) throw std::invalid_argument("");
          inst.labels.push_back(l);
        } catch (const std::exception&) {
          parse_fail(line_no, "malformed label '" + tok + "'");
        }
      }
    }
    if (inst.labels.empty()) parse_fail(line_no, "empty ranking");
    {
      std::stringstream fs(line.substr(bar + 1));
      std::string term;
      while (fs >> term) {
        inst.feats.push_back(parse_feature_term(term, line_no));
      }
    }
    for (int l : inst.labels) max_label = std::max(max_label, l);
    for (const auto& [idx, val] : inst.feats)
      max_index = std::max(max_index, idx);
    raw.push_back(std::move(inst));
  }

  data.num_labels = have_header ? header_L : max_label;
  data.dim = have_header ? header_d : max_index;

  data.instances.reserve(raw.size());
  for (auto& inst : raw) {
    try {
      RankedInstance ri;
      ri.truth = Ranking::validated(std::move(inst.labels), data.num_labels);
      ri.features =
          SparseVector::from_entries(std::move(inst.feats), data.dim);
      data.instances.push_back(std::move(ri));
    } catch (const std::invalid_argument& e) {
      parse_fail(inst.line_no, e.what());
    }
  }
  return data;
}

RankedDataset load_ranked_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return parse_ranked_dataset(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void serialize_ranked_dataset(const RankedDataset& data, std::ostream& out) {
  out << "#L=" << data.num_labels << " d=" << data.dim << "\n";
  for (const auto& inst : data.instances) {
    for (std::size_t i = 0; i < inst.truth.labels.size(); ++i) {
      if (i) out << ',';
      out << inst.truth.labels[i];
    }
    out << " |";
    for (const auto& [idx, val] : inst.features.entries) {
      out << ' ' << idx << ':' << format_double(val);
    }
    out << "\n";
  }
}

void save_ranked_dataset(const RankedDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  serialize_ranked_dataset(data, out);
}

std::string format_double(double v) {
  char buf[40];
  // %.17g always round-trips; prefer the shortest form that does.
  for (int prec = 9; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Modulo with rejection to stay unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = unit();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double Rng::exponential() {
  double u = unit();
  if (u >= 1.0) u = 1.0 - 0x1.0p-53;
  return -std::log(1.0 - u);
}

int Rng::poisson(double mean) {
  // Knuth's method; fine for the modest rates used here.
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= unit();
  } while (p > limit);
  return k - 1;
}

}  // namespace labelrank
