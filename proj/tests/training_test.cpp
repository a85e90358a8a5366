#include <gtest/gtest.h>

#include <cmath>

#include "pinn/metrics.hpp"
#include "pinn/training.hpp"

using namespace pinn;

namespace {

/// Network computing exactly u(x,t) = x: single linear layer w = [1, 0].
NetworkParams linear_in_x() {
  NetworkParams p;
  p.arch = {{2, 1}, Activation::kTanh};
  p.theta = {1.0, 0.0, 0.0};
  return p;
}

TEST(PinnLoss, LambdaZeroIsPureDataLoss) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  LossSpec spec;
  spec.term_mode = TermMode::kTwoTerm;
  spec.lambda_weight = 0.0;
  spec.n_physics = 50;
  spec.data_points = {{{0.5, 1.0}, 2.0}, {{1.0, 2.0}, -1.0}};
  NetworkParams p = linear_in_x();  // predicts x
  LossParts parts = pinn_loss(p, spec, prob, 3);
  const double expect = 0.5 * ((0.5 - 2.0) * (0.5 - 2.0) + (1.0 + 1.0) * (1.0 + 1.0));
  EXPECT_NEAR(parts.data, expect, 1e-12);
  EXPECT_NEAR(parts.total, expect, 1e-12);
}

TEST(PinnLoss, LambdaOneIsPurePhysics) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  LossSpec spec;
  spec.term_mode = TermMode::kTwoTerm;
  spec.lambda_weight = 1.0;
  spec.n_physics = 64;
  NetworkParams p = init_params({2, 8, 1}, Activation::kTanh, 5);
  LossParts parts = pinn_loss(p, spec, prob, 3);
  EXPECT_NEAR(parts.total, parts.physics, 1e-15);
  EXPECT_GT(parts.physics, 0.0);
}

TEST(PinnLoss, ExactLinearSolutionGivesZeroTotal) {
  // u = x solves the wave equation; data sampled from u = x matches exactly
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  LossSpec spec;
  spec.term_mode = TermMode::kTwoTerm;
  spec.lambda_weight = 0.5;
  spec.n_physics = 100;
  SplitMix64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const double x = rng.uniform(0.0, 2.0), t = rng.uniform(0.0, 4.0);
    spec.data_points.push_back({{x, t}, x});
  }
  LossParts parts = pinn_loss(linear_in_x(), spec, prob, 17);
  EXPECT_NEAR(parts.total, 0.0, 1e-12);
}

TEST(PinnLoss, LambdaOutsideRangeRejected) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  LossSpec spec;
  spec.term_mode = TermMode::kTwoTerm;
  spec.lambda_weight = 1.5;
  spec.data_points = {{{0.5, 1.0}, 1.0}};
  EXPECT_THROW(pinn_loss(linear_in_x(), spec, prob, 1), ArgumentError);
}

TEST(PinnLoss, EmptyPhysicsBatchRejected) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  LossSpec spec;
  spec.n_physics = 0;
  EXPECT_THROW(pinn_loss(linear_in_x(), spec, prob, 1), ArgumentError);
}

TEST(PinnLoss, DecompositionIdentity) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  SplitMix64 rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    LossSpec spec;
    spec.term_mode = TermMode::kTwoTerm;
    spec.lambda_weight = rng.next_double();
    spec.n_physics = 64;
    for (int k = 0; k < 8; ++k)
      spec.data_points.push_back(
          {{rng.uniform(0.0, 2.0), rng.uniform(0.0, 4.0)}, rng.uniform(-1.0, 1.0)});
    NetworkParams p = init_params({2, 8, 1}, Activation::kTanh, 100 + rep);
    LossParts parts = pinn_loss(p, spec, prob, rep);
    EXPECT_NEAR(parts.total,
                (1.0 - spec.lambda_weight) * parts.data + spec.lambda_weight * parts.physics,
                1e-12 * std::max(1.0, parts.total));
  }
}

TEST(Train, BudgetMustBePositive) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  Architecture arch{{2, 4, 1}, Activation::kTanh};
  EXPECT_THROW(train(prob, arch, OptimizerSpec{}, LossSpec{}, 0, 1), ArgumentError);
}

TEST(Train, SameSeedBitIdenticalHistories) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  Architecture arch{{2, 6, 1}, Activation::kTanh};
  LossSpec spec;
  spec.n_ic = 32;
  spec.n_bc = 32;
  spec.n_physics = 128;
  OptimizerSpec opt;
  TrainResult a = train(prob, arch, opt, spec, 12, 77);
  TrainResult b = train(prob, arch, opt, spec, 12, 77);
  ASSERT_EQ(a.history.records.size(), b.history.records.size());
  for (std::size_t i = 0; i < a.history.records.size(); ++i) {
    EXPECT_EQ(a.history.records[i].total, b.history.records[i].total);
    EXPECT_EQ(a.history.records[i].data_loss, b.history.records[i].data_loss);
    EXPECT_EQ(a.history.records[i].physics_loss, b.history.records[i].physics_loss);
  }
  ASSERT_EQ(a.params.theta.size(), b.params.theta.size());
  for (std::size_t i = 0; i < a.params.theta.size(); ++i)
    EXPECT_EQ(a.params.theta[i], b.params.theta[i]);
}

TEST(Train, HistoryRowsEqualBudgetAndSnapshotsOnInterval) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  Architecture arch{{2, 6, 1}, Activation::kTanh};
  LossSpec spec;
  spec.n_ic = 16;
  spec.n_bc = 16;
  spec.n_physics = 64;
  TrainResult r = train(prob, arch, OptimizerSpec{}, spec, 110, 3);
  EXPECT_EQ(r.history.records.size(), 110u);
  ASSERT_EQ(r.history.snapshot_iters.size(), 2u);
  EXPECT_EQ(r.history.snapshot_iters[0], 50);
  EXPECT_EQ(r.history.snapshot_iters[1], 100);
  for (std::size_t i = 0; i < r.history.records.size(); ++i) {
    EXPECT_EQ(r.history.records[i].iter, static_cast<long>(i) + 1);
    EXPECT_NEAR(r.history.records[i].total,
                r.history.records[i].data_loss + r.history.records[i].physics_loss, 1e-12);
  }
}

TEST(Train, HardConstrainedMembraneHasZeroIcBcLoss) {
  PdeProblem prob = make_problem(PdeKind::kMembrane2d);
  Architecture arch{{3, 8, 1}, Activation::kTanh};
  LossSpec spec;
  spec.hard_constraints = true;
  spec.n_ic = 64;
  spec.n_bc = 64;
  spec.n_physics = 128;
  TrainResult r = train(prob, arch, OptimizerSpec{}, spec, 15, 21);
  for (const HistoryRecord& rec : r.history.records) EXPECT_LE(rec.data_loss, 1e-12);
}

TEST(Train, NonFiniteLossAbortsWithHistory) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  Architecture arch{{2, 8, 1}, Activation::kTanh};
  LossSpec spec;
  spec.n_ic = 16;
  spec.n_bc = 16;
  spec.n_physics = 64;
  OptimizerSpec opt;
  opt.kind = OptimizerSpec::Kind::kSgd;
  opt.gamma = 1e14;  // divergent by construction
  try {
    train(prob, arch, opt, spec, 200, 5);
    FAIL() << "expected TrainingAbort";
  } catch (const TrainingAbort& abort) {
    EXPECT_GT(abort.iteration, 1);
    EXPECT_FALSE(abort.history.records.empty());
    // every record before the abort is finite
    for (std::size_t i = 0; i + 1 < abort.history.records.size(); ++i)
      EXPECT_TRUE(std::isfinite(abort.history.records[i].total));
  }
}

TEST(TrackConvergence, PerfectSnapshotsGiveZeroError) {
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  auto truth = [&](std::span<const double> in) { return wave1d_series(in[0], in[1], 200); };
  TrainingHistory h;
  h.snapshot_iters = {50, 100};
  GridField g(40, 80, prob.axes[0], prob.axes[1]);
  for (std::size_t i = 0; i < g.n0; ++i)
    for (std::size_t j = 0; j < g.n1; ++j) {
      const double in[2] = {g.coord0(i), g.coord1(j)};
      g.at(i, j) = truth(std::span<const double>(in, 2));
    }
  h.snapshots = {g, g};
  auto conv = track_convergence(h, truth);
  EXPECT_EQ(conv.size(), 2u);
  EXPECT_NEAR(conv[0].second, 0.0, 1e-15);
  EXPECT_NEAR(conv[1].second, 0.0, 1e-15);
}

TEST(TrackConvergence, RecoversConstructedErrorLevels) {
  // snapshots u + 2.5 N^{-1/2} * unit-norm noise must come back as
  // rel-L2 ~ 2.5 N^{-1/2} / |u|
  PdeProblem prob = make_problem(PdeKind::kWave1d);
  auto truth = [&](std::span<const double> in) { return wave1d_series(in[0], in[1], 200); };
  GridField base(40, 80, prob.axes[0], prob.axes[1]);
  std::vector<double> truth_vals(base.values.size());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < base.n0; ++i)
    for (std::size_t j = 0; j < base.n1; ++j) {
      const double in[2] = {base.coord0(i), base.coord1(j)};
      truth_vals[idx++] = truth(std::span<const double>(in, 2));
    }
  const double truth_norm = norm2(truth_vals);

  TrainingHistory h;
  SplitMix64 rng(4);
  for (long n : {100L, 400L, 1600L}) {
    std::vector<double> noise(truth_vals.size());
    for (double& v : noise) v = rng.uniform(-1.0, 1.0);
    const double scale = 2.5 / std::sqrt(static_cast<double>(n)) / norm2(noise);
    GridField g = base;
    for (std::size_t k = 0; k < g.values.size(); ++k)
      g.values[k] = truth_vals[k] + scale * noise[k] * truth_norm;
    h.snapshot_iters.push_back(n);
    h.snapshots.push_back(std::move(g));
  }
  auto conv = track_convergence(h, truth);
  for (std::size_t s = 0; s < conv.size(); ++s) {
    const double want = 2.5 / std::sqrt(static_cast<double>(conv[s].first));
    EXPECT_NEAR(conv[s].second, want, 1e-9);
  }
}

TEST(TrackConvergence, NoSnapshotsRejected) {
  TrainingHistory h;
  auto truth = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(track_convergence(h, truth), ArgumentError);
}

}  // namespace
