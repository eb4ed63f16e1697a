#include "labelrank/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace labelrank {

namespace {

void write_ranking_csv(const Ranking& r, std::ostream& out) {
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    if (i) out << ',';
    out << r.labels[i];
  }
}

Ranking parse_ranking_csv(const std::string& s, int num_labels) {
  std::vector<int> labels;
  std::stringstream ls(s);
  std::string tok;
  while (std::getline(ls, tok, ',')) labels.push_back(std::stoi(tok));
  return Ranking::validated(std::move(labels), num_labels);
}

void write_dense(std::ostream& out, const std::vector<double>& w) {
  for (double v : w) out << ' ' << format_double(v);
}

std::runtime_error bad_model(const std::string& what) {
  return std::runtime_error("model file: " + what);
}

}  // namespace

void save_model(const CentralRankModel& model, std::ostream& out) {
  out << "#central L=" << model.num_labels << "\n";
  write_ranking_csv(model.central, out);
  out << "\n";
}

void save_model(const GroupedRankModel& model, std::ostream& out) {
  out << "#ag L=" << model.num_labels << " d=" << model.dim << "\n";
  out << "fallback ";
  write_ranking_csv(model.fallback, out);
  out << "\n";
  for (const auto& [group, ranking] : model.groups) {
    out << group.first << ' ' << group.second << ' ';
    write_ranking_csv(ranking, out);
    out << "\n";
  }
}

void save_model(const LinearOvrModel& model, std::ostream& out) {
  out << "#lr L=" << model.num_labels << " d=" << model.dim << "\n";
  for (int c = 1; c <= model.num_labels; ++c) {
    out << c << ' ' << format_double(model.biases[c - 1]);
    write_dense(out, model.weights[c - 1]);
    out << "\n";
  }
}

void save_model(const PairwiseModel& model, std::ostream& out) {
  out << "#pw L=" << model.num_labels << " d=" << model.dim << "\n";
  for (int i = 1; i <= model.num_labels; ++i) {
    for (int j = i + 1; j <= model.num_labels; ++j) {
      const int p = model.pair_index(i, j);
      out << i << ' ' << j << ' ' << format_double(model.biases[p]);
      write_dense(out, model.weights[p]);
      out << "\n";
    }
  }
}

void save_any_model(const AnyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::visit([&](const auto& m) {
    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, AmmModel>) {
      m.save(out);
    } else {
      save_model(m, out);
    }
  }, model);
}

namespace {

CentralRankModel load_central(std::istream& in, int L) {
  CentralRankModel model;
  model.num_labels = L;
  std::string line;
  if (!std::getline(in, line)) throw bad_model("missing central ranking");
  model.central = parse_ranking_csv(line, L);
  if (model.central.length() != L) {
    throw bad_model("central ranking must be a full permutation");
  }
  return model;
}

GroupedRankModel load_ag(std::istream& in, int L, int d) {
  GroupedRankModel model;
  model.num_labels = L;
  model.dim = d;
  model.layout = demo_layout_from_dims(L, d);
  std::string line;
  bool have_fallback = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "fallback") {
      std::string csv;
      ls >> csv;
      model.fallback = parse_ranking_csv(csv, L);
      have_fallback = true;
    } else {
      int gender;
      std::string csv;
      if (!(ls >> gender >> csv)) throw bad_model("bad group line");
      const int age = std::stoi(first);
      if (age < 0 || age > 8 || gender < 0 || gender > 1) {
        throw bad_model("bad group key");
      }
      model.groups.emplace(std::make_pair(age, gender),
                           parse_ranking_csv(csv, L));
    }
  }
  if (!have_fallback) throw bad_model("missing fallback ranking");
  return model;
}

LinearOvrModel load_lr(std::istream& in, int L, int d) {
  LinearOvrModel model;
  model.num_labels = L;
  model.dim = d;
  model.weights.assign(static_cast<std::size_t>(L),
                       std::vector<double>(static_cast<std::size_t>(d), 0.0));
  model.biases.assign(static_cast<std::size_t>(L), 0.0);
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    int c;
    if (!(ls >> c) || c < 1 || c > L) throw bad_model("bad class id");
    if (!(ls >> model.biases[c - 1])) throw bad_model("missing bias");
    for (int f = 0; f < d; ++f) {
      if (!(ls >> model.weights[c - 1][f])) throw bad_model("short weight row");
    }
    ++seen;
  }
  if (seen != L) throw bad_model("expected one row per class");
  return model;
}

PairwiseModel load_pw(std::istream& in, int L, int d) {
  PairwiseModel model;
  model.num_labels = L;
  model.dim = d;
  const int pairs = PairwiseModel::pair_count(L);
  model.weights.assign(static_cast<std::size_t>(pairs),
                       std::vector<double>(static_cast<std::size_t>(d), 0.0));
  model.biases.assign(static_cast<std::size_t>(pairs), 0.0);
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    int i, j;
    if (!(ls >> i >> j) || i < 1 || j <= i || j > L) {
      throw bad_model("bad pair key");
    }
    const int p = model.pair_index(i, j);
    if (!(ls >> model.biases[p])) throw bad_model("missing bias");
    for (int f = 0; f < d; ++f) {
      if (!(ls >> model.weights[p][f])) throw bad_model("short weight row");
    }
    ++seen;
  }
  if (seen != pairs) throw bad_model("expected one row per label pair");
  return model;
}

}  // namespace

AnyModel load_any_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw bad_model("empty file");
  int L = 0, d = 0;
  if (std::sscanf(header.c_str(), "#amm L=%d d=%d", &L, &d) == 2) {
    in.seekg(0);
    return AmmModel::load(in);
  }
  if (std::sscanf(header.c_str(), "#central L=%d", &L) == 1) {
    return load_central(in, L);
  }
  if (std::sscanf(header.c_str(), "#ag L=%d d=%d", &L, &d) == 2) {
    return load_ag(in, L, d);
  }
  if (std::sscanf(header.c_str(), "#lr L=%d d=%d", &L, &d) == 2) {
    return load_lr(in, L, d);
  }
  if (std::sscanf(header.c_str(), "#pw L=%d d=%d", &L, &d) == 2) {
    return load_pw(in, L, d);
  }
  throw bad_model("unrecognized header '" + header + "'");
}

Ranking predict_any(const AnyModel& model, const SparseVector& x) {
  return std::visit(
      [&](const auto& m) -> Ranking {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AmmModel>) {
          return m.predict_ranking(x);
        } else if constexpr (std::is_same_v<T, CentralRankModel>) {
          return m.central;
        } else if constexpr (std::is_same_v<T, GroupedRankModel>) {
          return predict_ag(m, x);
        } else if constexpr (std::is_same_v<T, LinearOvrModel>) {
          return predict_lr(m, x);
        } else {
          return predict_pw(m, x);
        }
      },
      model);
}

int model_num_labels(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AmmModel>) {
          return m.num_labels();
        } else {
          return m.num_labels;
        }
      },
      model);
}

int model_dim(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AmmModel>) {
          return m.dim();
        } else if constexpr (std::is_same_v<T, CentralRankModel>) {
          return -1;
        } else {
          return m.dim;
        }
      },
      model);
}

}  // namespace labelrank
