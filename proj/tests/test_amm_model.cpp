#include <doctest.h>

#include <sstream>

#include "labelrank/amm_model.hpp"

using namespace labelrank;

namespace {

SparseVector dense2(double a, double b) {
  return SparseVector::from_entries({{1, a}, {2, b}}, 2);
}

// model over 2 features with stored weights (1,0) and (0,1) for class 1
AmmModel two_weight_model() {
  AmmModel m(2, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 0});
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0, 1});
  return m;
}

}  // namespace

TEST_CASE("class_score takes the max over weights and the zero slot") {
  AmmModel m = two_weight_model();
  CHECK(m.class_score(dense2(2, 3), 1) == doctest::Approx(3.0));

  AmmModel empty(3, 2);
  CHECK(empty.class_score(dense2(5, -1), 2) == 0.0);

  AmmModel neg(2, 2);
  neg.promote_or_update(2, AmmModel::kZeroSlot, std::vector<double>{-1, -1});
  CHECK(neg.class_score(dense2(1, 1), 2) == 0.0);  // zero slot wins
}

TEST_CASE("class_score is never negative") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 1 + static_cast<int>(rng.below(4));
    const int d = 1 + static_cast<int>(rng.below(6));
    AmmModel m(L, d);
    for (int i = 1; i <= L; ++i) {
      const int b = static_cast<int>(rng.below(3));
      for (int j = 0; j < b; ++j) {
        std::vector<double> w(d);
        for (double& v : w) v = rng.gaussian();
        m.promote_or_update(i, AmmModel::kZeroSlot, w);
      }
    }
    std::vector<std::pair<int, double>> feats;
    for (int f = 1; f <= d; ++f) feats.emplace_back(f, rng.gaussian());
    const auto x = SparseVector::from_entries(std::move(feats), d);
    for (int i = 1; i <= L; ++i) CHECK(m.class_score(x, i) >= 0.0);
  }
}

TEST_CASE("active_weight_index arg-max and tie rules") {
  AmmModel m = two_weight_model();
  CHECK(m.active_weight_index(dense2(2, 3), 1) == 1);  // 3 > 2

  AmmModel empty(2, 2);
  CHECK(empty.active_weight_index(dense2(1, 1), 1) == AmmModel::kZeroSlot);

  // stored dot exactly 0 ties with the zero slot: stored wins
  AmmModel tie(2, 2);
  tie.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 0});
  CHECK(tie.active_weight_index(dense2(0, 5), 1) == 0);

  // equal stored dots: lowest index wins
  AmmModel dup(1, 2);
  dup.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 1});
  dup.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 1});
  CHECK(dup.active_weight_index(dense2(1, 1), 1) == 0);
}

TEST_CASE("predict_ranking sorts class scores") {
  AmmModel empty(4, 2);
  CHECK(empty.predict_ranking(dense2(1, 1)).labels ==
        std::vector<int>{1, 2, 3, 4});

  AmmModel m(3, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0.5, 0});
  m.promote_or_update(2, AmmModel::kZeroSlot, std::vector<double>{2.0, 0});
  m.promote_or_update(3, AmmModel::kZeroSlot, std::vector<double>{-0.2, 0});
  CHECK(m.predict_ranking(dense2(1, 0)).labels == std::vector<int>{2, 1, 3});

  AmmModel single(1, 2);
  CHECK(single.predict_ranking(dense2(3, -2)).labels == std::vector<int>{1});
}

TEST_CASE("predict_ranking unchanged by duplicating a stored weight") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = 2 + static_cast<int>(rng.below(4));
    const int d = 2 + static_cast<int>(rng.below(4));
    AmmModel m(L, d);
    for (int i = 1; i <= L; ++i) {
      const int b = 1 + static_cast<int>(rng.below(2));
      for (int j = 0; j < b; ++j) {
        std::vector<double> w(d);
        for (double& v : w) v = rng.gaussian();
        m.promote_or_update(i, AmmModel::kZeroSlot, w);
      }
    }
    const int dup_class = 1 + static_cast<int>(rng.below(L));
    AmmModel dup = m;
    dup.promote_or_update(dup_class, AmmModel::kZeroSlot,
                          dup.effective_weight(dup_class, 0));
    std::vector<std::pair<int, double>> feats;
    for (int f = 1; f <= d; ++f) feats.emplace_back(f, rng.gaussian());
    const auto x = SparseVector::from_entries(std::move(feats), d);
    CHECK(m.predict_ranking(x).labels == dup.predict_ranking(x).labels);
  }
}

TEST_CASE("promote_or_update growth, addition, and cap") {
  AmmModel m(2, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 0});
  CHECK(m.weight_count(1) == 1);
  CHECK(m.effective_weight(1, 0) == std::vector<double>{1, 0});

  m.promote_or_update(1, 0, std::vector<double>{0.5, 0});
  CHECK(m.weight_count(1) == 1);
  CHECK(m.effective_weight(1, 0) == std::vector<double>{1.5, 0});

  // zero delta on the zero slot is a no-op
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0, 0});
  CHECK(m.weight_count(1) == 1);

  // at the cap the zero-slot update lands on the best-aligned stored weight
  AmmModel capped(1, 2, 2);
  capped.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1, 0});
  capped.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0, 1});
  capped.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0, 2});
  CHECK(capped.weight_count(1) == 2);
  CHECK(capped.effective_weight(1, 0) == std::vector<double>{1, 0});
  CHECK(capped.effective_weight(1, 1) == std::vector<double>{0, 3});
}

TEST_CASE("promote_or_update changes b_i by at most one, never dim") {
  Rng rng(23);
  AmmModel m(3, 4);
  for (int step = 0; step < 100; ++step) {
    const int label = 1 + static_cast<int>(rng.below(3));
    const int before = m.weight_count(label);
    std::vector<double> delta(4);
    for (double& v : delta) v = rng.gaussian();
    const int j = rng.below(2) == 0 ? AmmModel::kZeroSlot
                                    : (before > 0 ? 0 : AmmModel::kZeroSlot);
    m.promote_or_update(label, j, delta);
    CHECK(m.dim() == 4);
    const int after = m.weight_count(label);
    CHECK(after >= before);
    CHECK(after - before <= 1);
  }
}

TEST_CASE("prune removes weights at or below the squared-norm threshold") {
  AmmModel m(2, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1e-6, 0});
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{2, 0});
  m.prune(1e-6);  // norms^2: 1e-12 and 4
  CHECK(m.weight_count(1) == 1);
  CHECK(m.effective_weight(1, 0) == std::vector<double>{2, 0});

  // threshold 0 removes exactly-zero weights only
  AmmModel z(1, 2);
  z.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1e-30, 0});
  z.promote_or_update(1, 0, std::vector<double>{-1e-30, 0});  // now exactly 0
  CHECK(z.weight_count(1) == 1);
  z.prune(0.0);
  CHECK(z.weight_count(1) == 0);

  // all above threshold: no-op
  AmmModel keep = two_weight_model();
  keep.prune(1e-8);
  CHECK(keep.weight_count(1) == 2);
}

TEST_CASE("after prune every stored weight exceeds the threshold") {
  Rng rng(31);
  AmmModel m(4, 3);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double scale = rng.below(2) == 0 ? 1e-5 : 1.0;
      std::vector<double> w(3);
      for (double& v : w) v = scale * rng.gaussian();
      m.promote_or_update(i, AmmModel::kZeroSlot, w);
    }
  }
  const double threshold = 1e-8;
  m.prune(threshold);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 0; j < m.weight_count(i); ++j) {
      const auto w = m.effective_weight(i, j);
      double sq = 0.0;
      for (double v : w) sq += v * v;
      CHECK(sq > threshold);
    }
  }
}

TEST_CASE("lazy shrink multiplier matches direct scaling") {
  AmmModel lazy = two_weight_model();
  lazy.shrink(0.5);
  lazy.shrink(0.25);
  CHECK(lazy.effective_weight(1, 0)[0] == doctest::Approx(0.125));
  CHECK(lazy.class_score(dense2(2, 3), 1) == doctest::Approx(3 * 0.125));
  // shrink to zero (t = 1 case) zeroes every weight
  lazy.shrink(0.0);
  CHECK(lazy.class_score(dense2(2, 3), 1) == 0.0);
  CHECK(lazy.effective_weight(1, 0) == std::vector<double>{0, 0});
}

TEST_CASE("model save/load round trip") {
  AmmModel m(3, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0.25, -1});
  m.promote_or_update(3, AmmModel::kZeroSlot, std::vector<double>{1e-3, 7});
  m.shrink(0.5);
  std::stringstream buf;
  m.save(buf);
  const AmmModel back = AmmModel::load(buf);
  CHECK(back.num_labels() == 3);
  CHECK(back.dim() == 2);
  CHECK(back.weight_count(1) == 1);
  CHECK(back.weight_count(2) == 0);
  CHECK(back.weight_count(3) == 1);
  // saved weights carry the folded multiplier
  CHECK(back.effective_weight(1, 0) == std::vector<double>{0.125, -0.5});
  std::stringstream buf2;
  back.save(buf2);
  std::stringstream buf3;
  m.save(buf3);
  CHECK(buf2.str() == buf3.str());
}

TEST_CASE("dimension mismatch is rejected") {
  AmmModel m(2, 3);
  const auto x = dense2(1, 1);  // dim 2
  CHECK_THROWS_AS(m.class_score(x, 1), std::invalid_argument);
  CHECK_THROWS_AS(m.active_weight_index(x, 1), std::invalid_argument);
  CHECK_THROWS_AS(m.predict_ranking(x), std::invalid_argument);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lambda = 1e-5;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.epochs = 1;
  CHECK(cfg.resolved_prune_period(20) == 200);
  cfg.prune_period = 0;
  CHECK(cfg.resolved_prune_period(20) == 0);
  cfg.prune_period = 7;
  CHECK(cfg.resolved_prune_period(20) == 7);
}
