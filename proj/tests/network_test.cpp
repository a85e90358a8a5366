#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "pinn/jet_backprop.hpp"
#include "pinn/network.hpp"
#include "pinn/optim.hpp"

using namespace pinn;

namespace {

TEST(ParamCount, MatchesReferenceTable) {
  EXPECT_EQ(param_count(std::vector<int>{2, 128, 1}), 513);
  EXPECT_EQ(param_count(std::vector<int>{2, 64, 64, 1}), 4417);
  EXPECT_EQ(param_count(std::vector<int>{2, 20, 20, 20, 20, 1}), 1341);
  EXPECT_EQ(param_count(std::vector<int>{2, 32, 16, 16, 32, 1}), 1473);
  EXPECT_EQ(param_count(std::vector<int>{2, 64, 32, 16, 8, 1}), 2945);
  EXPECT_EQ(param_count(std::vector<int>{2, 8, 4, 2, 1}), 73);
  EXPECT_EQ(param_count(std::vector<int>{2, 16, 8, 4, 2, 1}), 233);
}

TEST(ParamCount, RejectsTooFewEntries) {
  EXPECT_THROW(param_count(std::vector<int>{5}), StructuralError);
}

TEST(Forward, ZeroParamsGiveZeroOutput) {
  NetworkParams p;
  p.arch = {{2, 8, 4, 1}, Activation::kTanh};
  p.theta.assign(static_cast<std::size_t>(p.param_count()), 0.0);
  const double in[2] = {0.37, -1.2};
  EXPECT_EQ(forward_scalar(p, std::span<const double>(in, 2)), 0.0);
}

TEST(Forward, SingleLinearLayer) {
  NetworkParams p;
  p.arch = {{2, 1}, Activation::kIdentity};
  p.theta = {1.0, 1.0, 0.0};  // w = [1,1], bias 0
  const double in[2] = {0.25, 0.25};
  EXPECT_DOUBLE_EQ(forward_scalar(p, std::span<const double>(in, 2)), 0.5);
}

TEST(Forward, TanhOfZeroIsZero) {
  NetworkParams p;
  p.arch = {{1, 1, 1}, Activation::kTanh};
  p.theta = {1.0, 0.0, 1.0, 0.0};  // one tanh perceptron feeding a linear unit
  const double in[1] = {0.0};
  EXPECT_EQ(forward_scalar(p, std::span<const double>(in, 1)), 0.0);
}

TEST(Forward, DimensionMismatchNamesLayer) {
  NetworkParams p = init_params({2, 4, 1}, Activation::kTanh, 3);
  const double in[3] = {1.0, 2.0, 3.0};
  try {
    forward(p, std::span<const double>(in, 3));
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
  }
}

TEST(Forward, DeterministicAndPure) {
  NetworkParams p = init_params({2, 8, 4, 2, 1}, Activation::kTanh, 11);
  const double in[2] = {0.5, 1.5};
  const double a = forward_scalar(p, std::span<const double>(in, 2));
  const double b = forward_scalar(p, std::span<const double>(in, 2));
  EXPECT_EQ(a, b);
}

TEST(InitParams, SameSeedBitIdentical) {
  NetworkParams a = init_params({2, 8, 4, 2, 1}, Activation::kTanh, 7);
  NetworkParams b = init_params({2, 8, 4, 2, 1}, Activation::kTanh, 7);
  ASSERT_EQ(a.theta.size(), b.theta.size());
  for (std::size_t i = 0; i < a.theta.size(); ++i) EXPECT_EQ(a.theta[i], b.theta[i]);
  NetworkParams c = init_params({2, 8, 4, 2, 1}, Activation::kTanh, 8);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.theta.size(); ++i) any_diff |= a.theta[i] != c.theta[i];
  EXPECT_TRUE(any_diff);
}

TEST(InitParams, BiasesZero) {
  NetworkParams p = init_params({2, 8, 4, 1}, Activation::kTanh, 5);
  for (int l = 0; l < p.arch.num_layers(); ++l)
    for (double b : p.biases(l)) EXPECT_EQ(b, 0.0);
}

TEST(InitParams, WeightsWithinGlorotBound) {
  // layer [2 -> 8]: |w| <= sqrt(6/10), checked over 1e5 draws
  const double limit = std::sqrt(6.0 / 10.0);
  long draws = 0;
  for (int seed = 0; draws < 100000; ++seed) {
    NetworkParams p = init_params({2, 8, 1}, Activation::kTanh, seed);
    for (double w : p.weights(0)) {
      ASSERT_LE(std::abs(w), limit);
      ++draws;
    }
  }
}

TEST(ParamsCsv, RoundTripBitExact) {
  NetworkParams p = init_params({2, 8, 4, 2, 1}, Activation::kTanh, 12345);
  const std::string path = std::filesystem::temp_directory_path() / "params_roundtrip.csv";
  save_params_csv(p, path);
  NetworkParams q = load_params_csv(p.arch, path);
  ASSERT_EQ(p.theta.size(), q.theta.size());
  for (std::size_t i = 0; i < p.theta.size(); ++i) EXPECT_EQ(p.theta[i], q.theta[i]);
  std::filesystem::remove(path);
}

TEST(ParamsCsv, TruncatedFileRejected) {
  NetworkParams p = init_params({2, 4, 1}, Activation::kTanh, 1);
  const std::string path = std::filesystem::temp_directory_path() / "params_truncated.csv";
  save_params_csv(p, path);
  // chop the last line off
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  std::ofstream out(path);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << "\n";
  out.close();
  EXPECT_THROW(load_params_csv(p.arch, path), ArgumentError);
  std::filesystem::remove(path);
}

// Universal-approximation smoke test: one hidden layer of 64 tanh units,
// trained by ADAM to fit sin(pi x) on [-1, 1], must reach sup-norm error
// below 0.05 on a held-out grid.
TEST(Network, UniversalApproximationSmoke) {
  const Architecture arch{{1, 64, 1}, Activation::kTanh};
  NetworkParams p = init_params(arch.sizes, arch.activation, 42);
  const int n_train = 256;
  std::vector<double> xs(n_train), ys(n_train);
  for (int i = 0; i < n_train; ++i) {
    xs[i] = -1.0 + 2.0 * i / (n_train - 1);
    ys[i] = std::sin(std::numbers::pi * xs[i]);
  }

  JetMlp<1> mlp(arch);
  AdamState adam = AdamState::make(p.theta.size(), 2e-2);
  std::vector<double> grad(p.theta.size());
  for (int step = 0; step < 4000; ++step) {
    mlp.set_theta(p.theta);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int i = 0; i < n_train; ++i) {
      const Jet<1> in[1] = {Jet<1>::seed(xs[i], 0)};
      const Jet<1> out = mlp.forward(std::span<const Jet<1>>(in, 1));
      Cotangent<1> kappa;
      kappa.v = 2.0 * (out.v - ys[i]) / n_train;
      mlp.backward(kappa, grad);
    }
    adam_step(adam, p.theta, grad);
  }

  double sup = 0.0;
  for (int i = 0; i < 401; ++i) {  // held-out grid, offset from the training grid
    const double x = -1.0 + 2.0 * i / 400.0;
    const double in[1] = {x};
    sup = std::max(sup, std::abs(forward_scalar(p, std::span<const double>(in, 1)) -
                                 std::sin(std::numbers::pi * x)));
  }
  EXPECT_LT(sup, 0.05);
}

}  // namespace
