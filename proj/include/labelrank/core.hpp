// Core domain types for label ranking: sparse feature vectors, rankings,
// datasets, and the rank-extended sparse text format.
//
// File format, one instance per line:
//   <label,label,...> | <index>:<value> <index>:<value> ...
// with an optional first line "#L=<int> d=<int>". Labels are listed in
// descending preference; labels and feature indices are 1-based.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace labelrank {

// Sparse vector with strictly increasing 1-based indices and no stored zeros.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;
  int dim = 0;

  // Validates and canonicalizes (sorts entries, drops zeros). Throws
  // std::invalid_argument on duplicate or out-of-range indices.
  static SparseVector from_entries(std::vector<std::pair<int, double>> entries,
                                   int dim);

  bool empty() const { return entries.empty(); }
  double squared_norm() const;
  double norm() const;
  // Unit L2 norm; the zero vector is returned unchanged.
  SparseVector normalized() const;
};

// dense is 0-based with size >= x.dim.
double dot(std::span<const double> dense, const SparseVector& x);
double dot(const SparseVector& a, const SparseVector& b);
double squared_distance(const SparseVector& a, const SparseVector& b);

// Ordered list of distinct labels in [1, L], most preferred first.
// May be partial: any ranked label is preferred over every unranked one.
struct Ranking {
  std::vector<int> labels;

  Ranking() = default;
  explicit Ranking(std::vector<int> l) : labels(std::move(l)) {}

  int length() const { return static_cast<int>(labels.size()); }
  bool contains(int label) const;

  // Throws std::invalid_argument on duplicates, empty list, or labels
  // outside [1, max_label].
  static Ranking validated(std::vector<int> labels, int max_label);

  bool operator==(const Ranking&) const = default;
};

// 1-based position per label (index 0 unused); 0 means unranked.
std::vector<int> ranking_positions(const Ranking& r, int num_labels);

// Labels 1..L sorted by score descending, ties broken by ascending label id.
Ranking ranking_from_scores(std::span<const double> scores);

struct RankedInstance {
  SparseVector features;
  Ranking truth;
};

struct RankedDataset {
  int num_labels = 0;   // L
  int dim = 0;          // d
  std::vector<RankedInstance> instances;

  std::size_t size() const { return instances.size(); }
};

// Throws std::runtime_error with a line number on malformed input.
RankedDataset parse_ranked_dataset(std::istream& in);
RankedDataset load_ranked_dataset(const std::string& path);
void serialize_ranked_dataset(const RankedDataset& data, std::ostream& out);
void save_ranked_dataset(const RankedDataset& data, const std::string& path);

// Shortest decimal form that round-trips exactly.
std::string format_double(double v);

// Deterministic RNG helpers. mt19937_64 output is standardized; the
// std <random> distributions are not, so everything here is derived from
// raw engine output to keep seeded runs byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1) with 53 random bits.
  double unit();
  double gaussian();
  double exponential();  // rate 1
  int poisson(double mean);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace labelrank
