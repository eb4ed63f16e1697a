#include <doctest.h>

#include <sstream>

#include "labelrank/core.hpp"

using namespace labelrank;

TEST_CASE("parse: header line and one instance") {
  std::stringstream in("#L=4 d=3\n3,1 | 1:0.5 3:1.0\n");
  const RankedDataset data = parse_ranked_dataset(in);
  CHECK(data.num_labels == 4);
  CHECK(data.dim == 3);
  REQUIRE(data.size() == 1);
  CHECK(data.instances[0].truth.labels == std::vector<int>{3, 1});
  REQUIRE(data.instances[0].features.entries.size() == 2);
  CHECK(data.instances[0].features.entries[0] == std::pair<int, double>{1, 0.5});
  CHECK(data.instances[0].features.entries[1] == std::pair<int, double>{3, 1.0});
}

TEST_CASE("parse: duplicate label is rejected") {
  std::stringstream in("3,3 | 1:0.5\n");
  CHECK_THROWS_WITH_AS(parse_ranked_dataset(in),
                       doctest::Contains("duplicate label"),
                       std::runtime_error);
}

TEST_CASE("parse: empty rank list is rejected") {
  std::stringstream in("| 1:0.5\n");
  CHECK_THROWS_WITH_AS(parse_ranked_dataset(in),
                       doctest::Contains("empty ranking"), std::runtime_error);
}

TEST_CASE("parse: errors carry line numbers") {
  std::stringstream in("1 | 1:0.5\n2,2 | 1:1\n");
  CHECK_THROWS_WITH_AS(parse_ranked_dataset(in), doctest::Contains("line 2"),
                       std::runtime_error);
}

TEST_CASE("parse: out-of-bounds index with header") {
  std::stringstream in("#L=2 d=2\n1 | 3:0.5\n");
  CHECK_THROWS_AS(parse_ranked_dataset(in), std::runtime_error);
}

TEST_CASE("parse: L and d inferred without header") {
  std::stringstream in("5,2 | 7:1.5\n1 | 2:0.5\n");
  const RankedDataset data = parse_ranked_dataset(in);
  CHECK(data.num_labels == 5);
  CHECK(data.dim == 7);
}

TEST_CASE("ranking_from_scores basics") {
  CHECK(ranking_from_scores(std::vector<double>{0.5, 0.9, 0.1}).labels ==
        std::vector<int>{2, 1, 3});
  CHECK(ranking_from_scores(std::vector<double>{0, 0, 0}).labels ==
        std::vector<int>{1, 2, 3});
  CHECK(ranking_from_scores(std::vector<double>{-1.0, -0.5}).labels ==
        std::vector<int>{2, 1});
}

TEST_CASE("ranking_from_scores always yields a permutation") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 1 + static_cast<int>(rng.below(12));
    std::vector<double> scores(L);
    for (double& s : scores) {
      s = rng.gaussian();
      if (rng.below(4) == 0) s = 0.0;  // force some ties
    }
    const Ranking r = ranking_from_scores(scores);
    REQUIRE(r.length() == L);
    std::vector<bool> seen(L + 1, false);
    for (int l : r.labels) {
      REQUIRE(l >= 1);
      REQUIRE(l <= L);
      REQUIRE(!seen[l]);
      seen[l] = true;
    }
    // descending by score with id tie-break
    for (int i = 1; i < L; ++i) {
      const double prev = scores[r.labels[i - 1] - 1];
      const double cur = scores[r.labels[i] - 1];
      CHECK(prev >= cur);
      if (prev == cur) CHECK(r.labels[i - 1] < r.labels[i]);
    }
  }
}

TEST_CASE("ranking_from_scores is invariant under increasing transforms") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 2 + static_cast<int>(rng.below(10));
    std::vector<double> scores(L), mapped(L);
    for (int i = 0; i < L; ++i) {
      scores[i] = rng.gaussian();
      mapped[i] = 3.0 * scores[i] + 1.0;  // strictly increasing
    }
    CHECK(ranking_from_scores(scores).labels ==
          ranking_from_scores(mapped).labels);
  }
}

TEST_CASE("parse round-trips serialize") {
  Rng rng(3);
  RankedDataset data;
  data.num_labels = 6;
  data.dim = 15;
  for (int n = 0; n < 40; ++n) {
    std::vector<int> pool{1, 2, 3, 4, 5, 6};
    rng.shuffle(pool);
    const int lt = 1 + static_cast<int>(rng.below(6));
    pool.resize(lt);
    std::vector<std::pair<int, double>> feats;
    for (int idx = 1; idx <= 15; ++idx) {
      if (rng.below(3) == 0) feats.emplace_back(idx, rng.gaussian());
    }
    data.instances.push_back(
        {SparseVector::from_entries(std::move(feats), 15),
         Ranking::validated(std::move(pool), 6)});
  }
  std::stringstream buf;
  serialize_ranked_dataset(data, buf);
  const RankedDataset back = parse_ranked_dataset(buf);
  REQUIRE(back.size() == data.size());
  CHECK(back.num_labels == data.num_labels);
  CHECK(back.dim == data.dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.instances[i].truth.labels == data.instances[i].truth.labels);
    CHECK(back.instances[i].features.entries ==
          data.instances[i].features.entries);
  }
  // and serialize again: byte-identical
  std::stringstream buf2;
  serialize_ranked_dataset(back, buf2);
  CHECK(buf2.str() == buf.str());
}

TEST_CASE("sparse vector helpers") {
  const auto x = SparseVector::from_entries({{3, 4.0}, {1, 3.0}}, 5);
  CHECK(x.entries.front().first == 1);  // sorted
  CHECK(x.squared_norm() == doctest::Approx(25.0));
  CHECK(x.normalized().norm() == doctest::Approx(1.0));
  const auto y = SparseVector::from_entries({{3, 1.0}, {5, 2.0}}, 5);
  CHECK(dot(x, y) == doctest::Approx(4.0));
  CHECK(squared_distance(x, y) ==
        doctest::Approx(9.0 + 9.0 + 4.0));  // (3-0)^2+(4-1)^2+(0-2)^2
  CHECK_THROWS_AS(SparseVector::from_entries({{0, 1.0}}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseVector::from_entries({{2, 1.0}, {2, 2.0}}, 5),
                  std::invalid_argument);
  // zeros dropped
  CHECK(SparseVector::from_entries({{2, 0.0}}, 5).entries.empty());
}
