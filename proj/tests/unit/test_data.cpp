#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "mseol/data.hpp"
#include "mseol/errors.hpp"
#include "mseol/rng.hpp"

using namespace mseol;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mseol_test_" + name);
}

LabeledDataset balanced(int k, std::size_t per_class, std::uint64_t seed = 3) {
  GaussianMixtureSpec spec{k, 2, circle_means(k, 2, 1.0), 0.5, seed};
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), per_class);
  return sample_gaussian_mixture(spec, counts);
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("dataset invariants are checked on construction") {
  CHECK_THROWS_AS(LabeledDataset(2, 2, {1.0, 2.0, 3.0}, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(LabeledDataset(1, 2, {1.0, 2.0}, {0, 2}), InvalidArgument);
  const LabeledDataset d(1, 3, {1.0, 2.0, 3.0, 4.0}, {0, 2, 2, 0});
  CHECK(d.class_counts() == std::vector<std::size_t>{2, 0, 2});
}

TEST_CASE("long-tailed counts") {
  ImbalanceSpec spec{ImbalanceKind::LongTailed, 10.0, 5000};
  const auto c10 = long_tailed_counts(10, spec);
  // floor(5000 * 10^(-k/9)), evaluated at 30 digits.
  CHECK(c10 == std::vector<std::size_t>{5000, 3871, 2997, 2320, 1796, 1391, 1077, 834, 645, 500});

  CHECK(long_tailed_counts(2, {ImbalanceKind::LongTailed, 1.0, 100}) ==
        std::vector<std::size_t>{100, 100});
  CHECK(long_tailed_counts(3, {ImbalanceKind::LongTailed, 9.0, 90}) ==
        std::vector<std::size_t>{90, 30, 10});
}

TEST_CASE("long-tailed errors") {
  CHECK_THROWS_AS(long_tailed_counts(1, {ImbalanceKind::LongTailed, 2.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(long_tailed_counts(3, {ImbalanceKind::LongTailed, 20.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(long_tailed_counts(3, {ImbalanceKind::LongTailed, 0.5, 10}), InvalidArgument);
}

TEST_CASE("step counts") {
  const auto c = step_counts(10, {ImbalanceKind::Step, 100.0, 5000});
  CHECK(std::count(c.begin(), c.end(), 5000u) == 5);
  CHECK(std::count(c.begin(), c.end(), 50u) == 5);
  CHECK(step_counts(4, {ImbalanceKind::Step, 1.0, 10}) == std::vector<std::size_t>(4, 10));
  CHECK(step_counts(3, {ImbalanceKind::Step, 10.0, 100}) == std::vector<std::size_t>{100, 100, 10});
  CHECK_THROWS_AS(step_counts(4, {ImbalanceKind::Step, 11.0, 10}), InvalidArgument);
}

TEST_CASE("generator properties over random specs") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(30));
    const double ratio = 1.0 + rng.uniform01() * 200.0;
    const std::size_t n_max = static_cast<std::size_t>(std::ceil(ratio)) + rng.below(20000);
    for (const auto kind : {ImbalanceKind::LongTailed, ImbalanceKind::Step}) {
      const auto counts = imbalanced_counts(k, {kind, ratio, n_max});
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      REQUIRE(*lo >= 1);
      const double observed = static_cast<double>(*hi) / static_cast<double>(*lo);
      CHECK(observed >= ratio * (1 - 1e-12));
      CHECK(observed < ratio * (1.0 + 1.0 / static_cast<double>(*lo)));
      if (kind == ImbalanceKind::LongTailed) {
        CHECK(std::is_sorted(counts.rbegin(), counts.rend()));
      }
    }
  }
}

TEST_CASE("subsample") {
  const auto d = balanced(3, 100);
  const std::vector<std::size_t> counts{100, 50, 10};
  const auto s = subsample(d, counts, 7);
  CHECK(s.class_counts() == counts);
  CHECK(s == subsample(d, counts, 7));
  CHECK_FALSE(s == subsample(d, counts, 8));

  const auto same = subsample(d, d.class_counts(), 1);
  CHECK(same.class_counts() == d.class_counts());

  const std::vector<std::size_t> too_many{100, 200, 10};
  try {
    subsample(d, too_many, 1);
    FAIL("expected InsufficientSamples");
  } catch (const InsufficientSamples& e) {
    CHECK(e.class_index() == 1);
  }
}

TEST_CASE("gaussian mixture") {
  GaussianMixtureSpec spec{2, 2, {{1.0, 2.0}, {-3.0, 0.5}}, 1e-12, 5};
  const std::vector<std::size_t> ones{1, 1};
  const auto d = sample_gaussian_mixture(spec, ones);
  CHECK(d.features(0)[0] == doctest::Approx(1.0));
  CHECK(d.features(0)[1] == doctest::Approx(2.0));
  CHECK(d.features(1)[0] == doctest::Approx(-3.0));
  CHECK(d.features(1)[1] == doctest::Approx(0.5));

  GaussianMixtureSpec trend{3, 2, circle_means(3, 2, 1.0), 0.6, 11};
  const std::vector<std::size_t> counts{1000, 100, 20};
  const auto a = sample_gaussian_mixture(trend, counts);
  CHECK(a.class_counts() == counts);
  CHECK(a == sample_gaussian_mixture(trend, counts));

  spec.stddev = 0.0;
  CHECK_THROWS_AS(sample_gaussian_mixture(spec, ones), InvalidArgument);
  spec.stddev = 1.0;
  spec.means.pop_back();
  CHECK_THROWS_AS(sample_gaussian_mixture(spec, ones), InvalidArgument);
}

TEST_CASE("circle means sit 120 degrees apart for K=3") {
  const auto m = circle_means(3, 2, 1.0);
  for (const auto& v : m) CHECK(std::hypot(v[0], v[1]) == doctest::Approx(1.0));
  const double dot = m[0][0] * m[1][0] + m[0][1] * m[1][1];
  CHECK(dot == doctest::Approx(-0.5));
}

TEST_CASE("csv round trip is exact") {
  const auto d = balanced(3, 20);
  const auto path = temp_file("roundtrip.csv");
  save_csv(d, path);
  const auto back = load_csv(path, 3);
  CHECK(back == d);
  std::filesystem::remove(path);
}

TEST_CASE("csv format and parse errors") {
  const auto path = temp_file("format.csv");
  auto write = [&](const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
  };

  write("f0,f1,label\n0.5,-1.0,2\n");
  const auto d = load_csv(path);
  REQUIRE(d.size() == 1);
  CHECK(d.label(0) == 2);
  CHECK(d.features(0)[0] == 0.5);
  CHECK(d.features(0)[1] == -1.0);

  write("");
  CHECK_THROWS_AS(load_csv(path), ParseError);

  write("f0,f1\n1,2\n");
  CHECK_THROWS_AS(load_csv(path), ParseError);

  write("f0,f1,label\n1,2,0\n1,abc,1\n");
  try {
    load_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }

  write("f0,f1,label\n1,2,0\n1,1\n");
  try {
    load_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }

  write("f0,f1,label\n1,2,5\n");
  CHECK_THROWS_AS(load_csv(path, 3), ParseError);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
