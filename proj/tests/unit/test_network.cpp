#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mseol/errors.hpp"
#include "mseol/losses.hpp"
#include "mseol/network.hpp"
#include "mseol/rng.hpp"
#include "oracles.hpp"
#include "params.hpp"

using namespace mseol;

using testing::flatten;
using testing::unflatten;

TEST_SUITE("network") {

TEST_CASE("init") {
  const auto a = init_model({2, 16, 2, 3}, 9);
  const auto b = init_model({2, 16, 2, 3}, 9);
  CHECK(a == b);
  CHECK_FALSE(a == init_model({2, 16, 2, 3}, 10));
  CHECK(a.output_width() == 3);
  CHECK(a.penultimate_width() == 2);
  for (const auto& l : a.layers()) {
    for (const double bias : l.bias) CHECK(bias == 0.0);
  }
  CHECK_THROWS_AS(init_model({2}, 1), InvalidArgument);
  CHECK_THROWS_AS(init_model({2, 0, 3}, 1), InvalidArgument);
}

TEST_CASE("forward") {
  MlpModel zero({2, 4, 3});
  const std::vector<double> x{0.3, -1.2};
  const auto zero_trace = forward(zero, x);
  for (const double a : zero_trace.logits()) CHECK(a == 0.0);

  MlpModel identity({3, 3});
  auto& w = identity.layers()[0].weights;
  w[0] = w[4] = w[8] = 1.0;
  const std::vector<double> in{1.5, -2.0, 0.25};
  const auto trace = forward(identity, in);
  CHECK(std::vector<double>(trace.logits().begin(), trace.logits().end()) == in);

  MlpModel relu({1, 1, 1});
  relu.layers()[0].weights[0] = 1.0;
  relu.layers()[1].weights[0] = 1.0;
  const std::vector<double> neg{-3.0};
  const auto t = forward(relu, neg);
  CHECK(t.pre[0][0] == -3.0);
  CHECK(t.penultimate()[0] == 0.0);
  CHECK(t.logits()[0] == 0.0);

  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(forward(zero, wrong), InvalidArgument);
}

TEST_CASE("backward basics") {
  const auto m = init_model({2, 4, 3}, 4);
  const std::vector<double> x{0.7, -0.1};
  const auto trace = forward(m, x);
  const std::vector<double> zero(3, 0.0);
  for (const double g : flatten(backward(m, trace, zero))) CHECK(g == 0.0);

  const auto other = init_model({2, 5, 3}, 4);
  const std::vector<double> up{1.0, 0.0, -1.0};
  auto grads = m.zero_gradients();
  CHECK_THROWS_AS(backward_accumulate(other, trace, up, grads), InvalidArgument);
}

TEST_CASE("parameter gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto model = init_model({2, 4, 3}, seed);
    Rng rng(seed * 31);
    const std::vector<double> x{rng.normal(), rng.normal()};
    const int cls = static_cast<int>(rng.below(3));
    const auto base = flatten(model);
    auto loss_at = [&](const std::vector<double>& params) {
      MlpModel probe = model;
      unflatten(probe, params);
      return ce_loss(forward(probe, x).logits(), cls).value;
    };
    const auto trace = forward(model, x);
    const auto analytic = flatten(backward(model, trace, ce_loss(trace.logits(), cls).grad));
    const auto numeric = testing::central_differences(loss_at, base);
    CHECK(testing::max_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("batch gradients are the sum of per-sample gradients") {
  const auto m = init_model({2, 6, 2, 3}, 12);
  const std::vector<double> x1{0.4, 1.1}, x2{-0.9, 0.3};
  const std::vector<double> up1{0.2, -0.5, 0.1}, up2{-1.0, 0.3, 0.7};
  const auto t1 = forward(m, x1);
  const auto t2 = forward(m, x2);
  auto sum = backward(m, t1, up1);
  sum.add(backward(m, t2, up2));
  auto acc = m.zero_gradients();
  backward_accumulate(m, t1, up1, acc);
  backward_accumulate(m, t2, up2, acc);
  const auto a = flatten(sum);
  const auto b = flatten(acc);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("argmax and predict") {
  const std::vector<double> a{0.1, 0.9, 0.3};
  CHECK(argmax(a) == 1);
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(argmax(flat) == 0);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(5);
    for (double& x : v) x = rng.normal();
    const int k = argmax(v);
    const double shift = 100.0 * rng.normal();
    const double scale = 0.01 + rng.uniform01() * 10.0;
    for (double& x : v) x = x * scale + shift;
    CHECK(argmax(v) == k);
  }
  const auto m = init_model({2, 8, 2, 3}, 1);
  const std::vector<double> x{0.2, 0.2};
  CHECK(predict(m, x) == argmax(forward(m, x).logits()));
}

TEST_CASE("checkpoint round trip") {
  const auto m = init_model({2, 16, 2, 3}, 77);
  const auto path = std::filesystem::temp_directory_path() / "mseol_test_model.ckpt";
  save_checkpoint(m, path);
  CHECK(load_checkpoint(path) == m);

  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "mseol-mlp 1");
  in.close();

  std::ofstream(path) << "mseol-mlp 2\n";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  std::ofstream(path) << "mseol-mlp 1\nsizes 2 1 1\nlayer 0 weights 1 1\nxyz\n";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  try {
    load_checkpoint(path);
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
  }

  const std::string tiny = "mseol-mlp 1\nsizes 2 1 1\nlayer 0 weights 1 1\n0.5\nlayer 0 bias 1\n-0\nend\n";
  std::ofstream(path) << tiny;
  const auto loaded = load_checkpoint(path);
  CHECK(loaded.layers()[0].weights[0] == 0.5);
  CHECK(std::signbit(loaded.layers()[0].bias[0]));
  std::ofstream(path) << tiny << "\n\n";
  CHECK_NOTHROW(load_checkpoint(path));
  std::ofstream(path) << tiny << "layer 1 bias 1\n";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  std::ofstream(path) << "mseol-mlp 1\nsizes 2 1 1\nlayer 0 weights 1 1\nnan\nlayer 0 bias 1\n0\nend\n";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}

}  // TEST_SUITE
