#include <doctest.h>

#include <sstream>

#include "labelrank/amm_multiclass.hpp"
#include "test_gradcheck.hpp"

using namespace labelrank;

namespace {

SparseVector dense2(double a, double b) {
  return SparseVector::from_entries({{1, a}, {2, b}}, 2);
}

// y = 1 iff x1 > 0, two gaussian features
RankedDataset separable_toy(int n, Rng& rng) {
  RankedDataset data;
  data.num_labels = 2;
  data.dim = 2;
  for (int i = 0; i < n; ++i) {
    const double x1 = rng.gaussian() + (i % 2 == 0 ? 2.0 : -2.0);
    const double x2 = rng.gaussian();
    data.instances.push_back(
        {SparseVector::from_entries({{1, x1}, {2, x2}}, 2),
         Ranking({x1 > 0 ? 1 : 2})});
  }
  return data;
}

std::string serialized(const AmmModel& m) {
  std::stringstream buf;
  m.save(buf);
  return buf.str();
}

}  // namespace

TEST_CASE("multiclass_loss worked examples") {
  AmmModel empty(2, 2);
  CHECK(multiclass_loss(empty, dense2(1, 0), 2, AmmModel::kZeroSlot) ==
        doctest::Approx(1.0));

  // margin satisfied: best other 0.2, own 1.5
  AmmModel m(2, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{1.5, 0});
  m.promote_or_update(2, AmmModel::kZeroSlot, std::vector<double>{0.2, 0});
  CHECK(multiclass_loss(m, dense2(1, 0), 1, 0) == doctest::Approx(0.0));

  // hinge arithmetic: best other 0.2, own 0.9
  AmmModel h(2, 2);
  h.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{0.9, 0});
  h.promote_or_update(2, AmmModel::kZeroSlot, std::vector<double>{0.2, 0});
  CHECK(multiclass_loss(h, dense2(1, 0), 1, 0) == doctest::Approx(0.3));
}

TEST_CASE("multiclass_loss is non-negative; zero means margin met") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 2 + static_cast<int>(rng.below(4));
    const int d = 2 + static_cast<int>(rng.below(4));
    AmmModel m = gradcheck::random_amm(rng, L, d);
    const SparseVector x = gradcheck::random_sparse(rng, d);
    const int y = 1 + static_cast<int>(rng.below(L));
    const int z = m.active_weight_index(x, y);
    const double loss = multiclass_loss(m, x, y, z);
    CHECK(loss >= 0.0);
    if (loss == 0.0) {
      // own score beats every other class by >= 1
      const double own = m.weight_dot(y, z, x);
      for (int i = 1; i <= L; ++i) {
        if (i != y) CHECK(own >= m.class_score(x, i) + 1.0);
      }
      CHECK(m.predict_ranking(x).labels.front() == y);
    }
  }
}

TEST_CASE("multiclass_sgd_step on the empty model grows both classes") {
  AmmModel m(2, 2);
  multiclass_sgd_step(m, dense2(1, 0), 2, 1, 1.0);
  REQUIRE(m.weight_count(2) == 1);
  REQUIRE(m.weight_count(1) == 1);
  CHECK(m.effective_weight(2, 0) == std::vector<double>{1, 0});
  CHECK(m.effective_weight(1, 0) == std::vector<double>{-1, 0});
}

TEST_CASE("multiclass_sgd_step with zero loss only shrinks") {
  AmmModel m(2, 2);
  m.promote_or_update(1, AmmModel::kZeroSlot, std::vector<double>{3, 0});
  multiclass_sgd_step(m, dense2(1, 0), 1, 2, 1.0);  // own 3 vs other 0 + 1
  CHECK(m.weight_count(1) == 1);
  CHECK(m.weight_count(2) == 0);
  CHECK(m.effective_weight(1, 0) == std::vector<double>{1.5, 0});  // *(1-1/2)
}

TEST_CASE("learning rate decays as 1/(lambda t)") {
  AmmModel m(2, 2);
  const long long t = 1000000;
  multiclass_sgd_step(m, dense2(1, 0), 2, t, 1.0);
  REQUIRE(m.weight_count(2) == 1);
  CHECK(m.effective_weight(2, 0)[0] == doctest::Approx(1.0 / t));
}

TEST_CASE("train_multiclass separates a linearly separable toy set") {
  Rng rng(41);
  const RankedDataset data = separable_toy(400, rng);
  TrainConfig cfg;
  cfg.lambda = 1e-2;
  cfg.epochs = 5;
  cfg.seed = 3;
  const AmmModel model = train_multiclass(data, cfg);
  int correct = 0;
  for (const auto& inst : data.instances) {
    if (model.predict_ranking(inst.features).labels.front() ==
        inst.truth.labels.front()) {
      ++correct;
    }
  }
  CHECK(correct == static_cast<int>(data.size()));
}

TEST_CASE("train_multiclass rejects bad inputs") {
  Rng rng(42);
  const RankedDataset data = separable_toy(10, rng);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train_multiclass(data, cfg), std::invalid_argument);
  cfg.epochs = 1;
  const RankedDataset empty{2, 2, {}};
  CHECK_THROWS_AS(train_multiclass(empty, cfg), std::invalid_argument);
}

TEST_CASE("same seed trains bit-identical multiclass models") {
  Rng rng(43);
  const RankedDataset data = separable_toy(200, rng);
  TrainConfig cfg;
  cfg.seed = 9;
  CHECK(serialized(train_multiclass(data, cfg)) ==
        serialized(train_multiclass(data, cfg)));
  TrainConfig other = cfg;
  other.seed = 10;
  CHECK(serialized(train_multiclass(data, cfg)) !=
        serialized(train_multiclass(data, other)));
}

TEST_CASE("multiclass subgradient matches finite differences") {
  Rng rng(701);
  const double worst =
      gradcheck::run_trials(rng, 30, [](Rng& r) { return gradcheck::multiclass_fd_trial(r); });
  CHECK(worst <= 1e-5);
}

TEST_CASE("a small step never increases the frozen objective") {
  Rng rng(702);
  int checked = 0;
  while (checked < 40) {
    const int L = 2 + static_cast<int>(rng.below(3));
    const int d = 2 + static_cast<int>(rng.below(4));
    AmmModel model = gradcheck::random_amm(rng, L, d);
    const SparseVector x = gradcheck::random_sparse(rng, d);
    const int y = 1 + static_cast<int>(rng.below(L));
    if (!gradcheck::selections_stable(model, x)) continue;

    const double lambda = 0.3;
    std::vector<double> score(L);
    model.scores(x, score);
    int comp = 0;
    double best_other = 0.0;
    for (int i = 1; i <= L; ++i) {
      if (i == y) continue;
      if (comp == 0 || score[i - 1] > best_other) {
        best_other = score[i - 1];
        comp = i;
      }
    }
    const double slack = 1.0 + best_other - score[y - 1];
    if (std::abs(slack) < gradcheck::kKinkMargin) continue;
    const bool active = slack > 0.0;

    const auto base = gradcheck::materialize(model, x);
    auto objective = [&](const gradcheck::ExplicitWeights& ew) {
      double obj = 0.5 * lambda * gradcheck::frobenius_sq(ew);
      if (active) {
        obj += 1.0 + gradcheck::ew_dot(ew, comp, ew.z[comp - 1], x) -
               gradcheck::ew_dot(ew, y, ew.z[y - 1], x);
      }
      return obj;
    };
    const double before = objective(base);

    AmmModel stepped = model;
    const long long t = 100000;  // small eta
    multiclass_sgd_step(stepped, x, y, t, lambda);
    const double after = objective(gradcheck::materialize(stepped, x));
    CHECK(after <= before + 1e-9);
    ++checked;
  }
}
