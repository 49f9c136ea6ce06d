#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mseol/errors.hpp"
#include "mseol/losses.hpp"
#include "mseol/rng.hpp"
#include "oracles.hpp"

using namespace mseol;
using doctest::Approx;

namespace {

std::vector<double> random_logits(Rng& rng, std::size_t k, double scale = 2.0) {
  std::vector<double> a(k);
  for (double& v : a) v = scale * rng.normal();
  return a;
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("softmax") {
  const std::vector<double> zeros{0, 0, 0};
  for (const double y : softmax(zeros)) CHECK(y == Approx(1.0 / 3.0));

  for (const double c : {-50.0, 0.0, 3.0, 700.0}) {
    const std::vector<double> a{c, c + std::log(2.0)};
    const auto y = softmax(a);
    CHECK(y[0] == Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(y[1] == Approx(2.0 / 3.0).epsilon(1e-12));
  }

  const std::vector<double> big{1000.0, 0.0};
  const auto y = softmax(big);
  CHECK(y[0] == Approx(1.0));
  CHECK(y[1] >= 0.0);
  CHECK(std::isfinite(y[1]));

  const std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS_AS(softmax(bad), InvalidArgument);
}

TEST_CASE("softmax shift invariance") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto a = random_logits(rng, 1 + rng.below(10));
    const auto y = softmax(a);
    const double c = 10.0 * rng.normal();
    for (double& v : a) v += c;
    const auto z = softmax(a);
    double sum = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      CHECK(std::abs(y[j] - z[j]) < 1e-12);
      sum += y[j];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("cross entropy") {
  const std::vector<double> a{0, 0, 0};
  const auto lg = ce_loss(a, 0);
  CHECK(lg.value == Approx(1.0986122886681098).epsilon(1e-14));
  CHECK(lg.grad[0] == Approx(1.0 / 3.0 - 1.0));
  CHECK(lg.grad[1] == Approx(1.0 / 3.0));
  CHECK(lg.grad[2] == Approx(1.0 / 3.0));

  const std::vector<double> confident{60.0, 0.0, 0.0};
  const auto sure = ce_loss(confident, 0);
  CHECK(sure.value < 1e-20);
  for (const double g : sure.grad) CHECK(std::abs(g) < 1e-20);

  Rng rng(5);
  const std::vector<double> ones{1.0, 1.0, 1.0};
  for (int i = 0; i < 20; ++i) {
    const auto l = random_logits(rng, 3);
    const auto plain = ce_loss(l, 1);
    const auto weighted = ce_loss(l, 1, ones);
    CHECK(plain.value == weighted.value);
    CHECK(plain.grad == weighted.grad);
    CHECK(plain.value >= 0.0);
  }
  CHECK_THROWS_AS(ce_loss(a, 3), InvalidArgument);
  CHECK_THROWS_AS(ce_loss(a, -1), InvalidArgument);
}

TEST_CASE("median frequency weights") {
  const std::vector<std::size_t> even{10, 10, 10};
  CHECK(median_frequency_weights(even) == std::vector<double>{1, 1, 1});
  const std::vector<std::size_t> two{100, 10};
  const auto w2 = median_frequency_weights(two);
  CHECK(w2[0] == Approx(0.55));
  CHECK(w2[1] == Approx(5.5));
  const std::vector<std::size_t> three{4, 2, 1};
  CHECK(median_frequency_weights(three) == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS_AS(median_frequency_weights({}), InvalidArgument);
}

TEST_CASE("focal loss") {
  const std::vector<double> a{0, 0};
  CHECK(focal_loss(a, 0, 2.0).value == Approx(0.17328679513998632).epsilon(1e-14));

  const std::vector<double> sure{80.0, 0.0};
  CHECK(focal_loss(sure, 0, 2.0).value == 0.0);

  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto k = 2 + rng.below(9);
    const auto l = random_logits(rng, k);
    const int t = static_cast<int>(rng.below(k));
    const auto f = focal_loss(l, t, 0.0);
    const auto c = ce_loss(l, t);
    CHECK(std::abs(f.value - c.value) <= 1e-12);
    for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(f.grad[j] - c.grad[j]) <= 1e-12);
  }
  CHECK_THROWS_AS(focal_loss(a, 0, -1.0), InvalidArgument);
}

TEST_CASE("mse on raw logits") {
  const std::vector<double> a{0.5, 0.2};
  const std::vector<double> t{1.0, 0.0};
  const auto lg = mse_loss(a, t);
  CHECK(lg.value == Approx(0.145).epsilon(1e-14));
  CHECK(lg.grad[0] == Approx(-0.5));
  CHECK(lg.grad[1] == Approx(0.2));

  const auto same = mse_loss(t, t);
  CHECK(same.value == 0.0);
  CHECK(same.grad == std::vector<double>{0.0, 0.0});

  const std::vector<double> zeros{0, 0, 0};
  const std::vector<double> outlying_row{0, 6, 0};
  const auto o = mse_loss(zeros, outlying_row);
  CHECK(o.value == 18.0);
  CHECK(o.grad == std::vector<double>{0, -6, 0});

  const std::vector<double> short_t{1.0};
  CHECK_THROWS_AS(mse_loss(a, short_t), InvalidArgument);
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(42);
  for (const std::size_t k : {2u, 3u, 10u}) {
    std::vector<std::size_t> counts(k);
    for (auto& c : counts) c = 1 + rng.below(500);
    const auto weights = median_frequency_weights(counts);
    const auto ol = outlying_labels(counts, 5.0);
    for (int draw = 0; draw < 20; ++draw) {
      const auto a = random_logits(rng, k);
      const int t = static_cast<int>(rng.below(k));
      const auto target = ol.target_for(t);
      const std::vector<double> target_v(target.begin(), target.end());

      auto check = [&](auto&& loss_of) {
        const auto numeric = testing::central_differences(
            [&](const std::vector<double>& x) { return loss_of(x).value; }, a);
        CHECK(testing::max_relative_error(loss_of(a).grad, numeric) < 1e-4);
      };
      check([&](const std::vector<double>& x) { return ce_loss(x, t); });
      check([&](const std::vector<double>& x) { return ce_loss(x, t, weights); });
      check([&](const std::vector<double>& x) { return focal_loss(x, t, 2.0); });
      check([&](const std::vector<double>& x) { return focal_loss(x, t, 0.5, weights); });
      check([&](const std::vector<double>& x) { return mse_loss(x, target_v); });
    }
  }
}

TEST_CASE("mse gradient is dense when every coordinate is off target") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto k = 2 + rng.below(9);
    const auto a = random_logits(rng, k);
    std::vector<double> t(k, 0.0);
    t[rng.below(k)] = 1.0 + rng.below(5);
    const auto lg = mse_loss(a, t);
    for (const double g : lg.grad) CHECK(g != 0.0);
  }
}

TEST_CASE("loss dispatch and batch reduction") {
  const std::vector<std::size_t> counts{50, 10, 5};
  CHECK(parse_loss_kind("mse-ol") == LossKind::MseOutlying);
  CHECK(parse_loss_kind("wce") == LossKind::WeightedCrossEntropy);
  CHECK_FALSE(parse_loss_kind("ldam").has_value());
  for (const auto kind : {LossKind::CrossEntropy, LossKind::WeightedCrossEntropy,
                          LossKind::Focal, LossKind::Mse, LossKind::MseOutlying}) {
    CHECK(parse_loss_kind(to_string(kind)) == kind);
  }

  const auto loss = Loss::from_counts(LossKind::MseOutlying, counts, 2.0);
  REQUIRE(loss.table().has_value());
  CHECK(loss.table()->magnitude(2) == 6.0);

  const std::vector<double> one{0.1, 0.2, 0.3};
  const std::vector<int> c1{1};
  const auto single = batch_loss(loss, one, c1);
  CHECK(single.mean == loss.evaluate(one, 1).value);

  const std::vector<double> twice{0.1, 0.2, 0.3, 0.1, 0.2, 0.3};
  const std::vector<int> c2{1, 1};
  CHECK(batch_loss(loss, twice, c2).mean == Approx(single.mean));

  const auto mse = Loss::from_counts(LossKind::Mse, counts);
  CHECK_THROWS_AS(batch_loss(mse, {}, {}), InvalidArgument);
}

TEST_CASE("batch mean of known values") {
  const std::vector<std::size_t> counts{5, 5};
  const auto mse = Loss::from_counts(LossKind::Mse, counts);
  // Per-sample values 0.5*2 = 1 and 0.5*6 = 3.
  const std::vector<double> logits{1.0 + std::sqrt(2.0), 0.0, 1.0 + std::sqrt(6.0), 0.0};
  const std::vector<int> classes{0, 0};
  const auto b = batch_loss(mse, logits, classes);
  CHECK(b.per_sample[0].value == Approx(1.0));
  CHECK(b.per_sample[1].value == Approx(3.0));
  CHECK(b.mean == Approx(2.0));
}

}  // TEST_SUITE
