#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "pinn/constraint.hpp"
#include "pinn/jet_backprop.hpp"
#include "pinn/network.hpp"
#include "pinn/optim.hpp"
#include "pinn/pde.hpp"
#include "pinn/sampling.hpp"

namespace pinn {

enum class TermMode { kTwoTerm, kThreeTerm };

struct DataPoint {
  std::vector<double> x;  ///< (space..., t)
  double u = 0.0;
};

struct LossSpec {
  TermMode term_mode = TermMode::kThreeTerm;
  double lambda_weight = 0.5;          ///< physics weight of the two-term loss
  std::vector<DataPoint> data_points;  ///< two-term data term
  std::size_t n_ic = 1000;
  std::size_t n_bc = 1000;
  std::size_t n_physics = 10000;
  SamplingStrategy strategy = SamplingStrategy::kUniform;
  std::optional<PartitionSchedule> schedule;  ///< progressive stages
  std::size_t gw_pilot_n = 256;               ///< gradient-weighted pilot size
  bool hard_constraints = false;
  bool include_velocity_ic = true;  ///< penalise u_t(x,0) when prescribed
  bool frozen_batch = false;        ///< draw collocation points once, not per iteration

  void validate(const PdeProblem& problem) const {
    if (!(lambda_weight >= 0.0 && lambda_weight <= 1.0))
      throw ArgumentError("lambda_weight must lie in [0,1]");
    if (n_physics == 0) throw ArgumentError("empty physics batch");
    if (term_mode == TermMode::kTwoTerm && data_points.empty() && lambda_weight < 1.0)
      throw ArgumentError("two-term loss with lambda < 1 needs data points");
    if (strategy == SamplingStrategy::kProgressive && !schedule)
      throw ArgumentError("progressive sampling needs a schedule");
    if (hard_constraints && !problem.homogeneous_dirichlet())
      throw ArgumentError("hard constraints unavailable for this problem");
  }
};

struct OptimizerSpec {
  enum class Kind { kSgd, kAdam, kLbfgs, kAdamThenLbfgs };
  Kind kind = Kind::kLbfgs;
  double gamma = 1e-3;  ///< sgd learning rate
  double alpha = 1e-3, beta1 = 0.9, beta2 = 0.999;  ///< adam
  std::size_t memory = 50;                          ///< lbfgs history m
  double c1 = 1e-4, c2 = 0.9;                       ///< line-search constants
  long adam_warmup = 1000;  ///< iterations of ADAM before L-BFGS (two-phase)
};

struct HistoryRecord {
  long iter = 0;
  double data_loss = 0.0;
  double physics_loss = 0.0;
  double total = 0.0;
};

struct TrainingHistory {
  std::vector<HistoryRecord> records;
  int snapshot_interval = 50;
  std::vector<long> snapshot_iters;
  std::vector<GridField> snapshots;  ///< approximation on the evaluation grid
};

/// Raw or hard-constrained network; the single evaluator handed to residual
/// operators, metrics and sampling.
struct PinnModel {
  NetworkParams net;
  PdeProblem problem;
  bool hard = false;
  TimeFactor time_factor = TimeFactor::kQuadratic;

  template <class V>
  V operator()(std::span<const V> in) const {
    V lam = forward_scalar(net, in);
    if (!hard) return lam;
    const std::span<const V> space = in.first(static_cast<std::size_t>(problem.num_space_axes()));
    V tau = in.back() - problem.time_axis().lo;
    V tf = time_factor == TimeFactor::kQuadratic ? tau * tau : tau;
    return boundary_factor(problem, space) * tf * lam + ic_value(problem, space);
  }
};

struct LossParts {
  double total = 0.0;
  double data = 0.0;     ///< two-term: data MSE; three-term: ic + bc
  double physics = 0.0;  ///< mean squared residual
  double ic = 0.0, bc = 0.0;
};

/// One iteration's point sets.
struct Batches {
  std::vector<DataPoint> ic;    ///< targets are u(x,0); velocity target is 0
  std::vector<DataPoint> bc;
  SampleBatch physics;
  const std::vector<DataPoint>* data = nullptr;  ///< two-term data (owned by spec)
};

namespace detail {

/// Fixed-order parallel map: points are split into a fixed number of chunks
/// (independent of thread count), threads claim chunks atomically, and the
/// caller reduces chunk results in chunk order, so results are bit-stable.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t n_chunks, int n_threads, Fn&& fn) {
  if (n == 0) return;
  n_chunks = std::min(n_chunks, n);
  const std::size_t chunk = (n + n_chunks - 1) / n_chunks;
  std::atomic<std::size_t> next{0};
  auto worker = [&](int thread_idx) {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::size_t lo = c * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) fn(c, lo, hi, thread_idx);
    }
  };
  if (n_threads <= 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads) - 1);
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (std::thread& t : pool) t.join();
}

inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

enum class TermKind { kIc, kBc, kPhysics, kData };

/// Residual(s) and output cotangent of one point. `weight` already carries
/// the 2/N (and lambda) factors; returns the sum of squared residuals.
template <int K>
double term_point(TermKind kind, const PdeProblem& problem, const LossSpec& spec,
                  const Jet<K>& u, double target, double weight, Cotangent<K>& kappa) {
  kappa = Cotangent<K>{};
  const int tdir = K - 1;  // time is always the last seeded direction
  switch (kind) {
    case TermKind::kIc: {
      const double r1 = u.v - target;
      double sq = r1 * r1;
      kappa.v = weight * r1;
      if (spec.include_velocity_ic && problem.has_initial_velocity()) {
        const double r2 = u.d[tdir];  // prescribed initial velocity is zero
        sq += r2 * r2;
        kappa.d[tdir] = weight * r2;
      }
      return sq;
    }
    case TermKind::kBc:
    case TermKind::kData: {
      const double r = u.v - target;
      kappa.v = weight * r;
      return r * r;
    }
    case TermKind::kPhysics: {
      switch (problem.kind) {
        case PdeKind::kWave1d: {
          const double r = u.h[1] - problem.c * problem.c * u.h[0];
          kappa.h[1] = weight * r;
          kappa.h[0] = -problem.c * problem.c * weight * r;
          return r * r;
        }
        case PdeKind::kBurgers: {
          const double r = u.d[1] + u.v * u.d[0] - problem.nu * u.h[0];
          kappa.v = weight * r * u.d[0];
          kappa.d[0] = weight * r * u.v;
          kappa.d[1] = weight * r;
          kappa.h[0] = -problem.nu * weight * r;
          return r * r;
        }
        case PdeKind::kHeat2d: {
          const double r = u.d[2] - problem.alpha * (u.h[0] + u.h[1]);
          kappa.d[2] = weight * r;
          kappa.h[0] = kappa.h[1] = -problem.alpha * weight * r;
          return r * r;
        }
        case PdeKind::kMembrane2d: {
          const double r = u.h[2] - 36.0 * (u.h[0] + u.h[1]);
          kappa.h[2] = weight * r;
          kappa.h[0] = kappa.h[1] = -36.0 * weight * r;
          return r * r;
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

/// Evaluates the model's output jet at a point, plus the model->network
/// pullback factor when hard constraints are active (U = P * net + ic with
/// P = boundary_factor * time_factor).
template <int K>
Jet<K> model_jet(JetMlp<K>& mlp, const PinnModel& model, std::span<const Jet<K>> in,
                 Jet<K>& pullback_factor) {
  Jet<K> lam = mlp.forward(in);
  if (!model.hard) {
    pullback_factor = Jet<K>(1.0);
    return lam;
  }
  const auto space = in.first(static_cast<std::size_t>(model.problem.num_space_axes()));
  Jet<K> tau = in.back() - model.problem.time_axis().lo;
  Jet<K> tf = model.time_factor == TimeFactor::kQuadratic ? tau * tau : tau;
  Jet<K> p = boundary_factor(model.problem, space) * tf;
  pullback_factor = p;
  return p * lam + ic_value(model.problem, space);
}

/// Mean of squared residuals of one term, and (optionally) its gradient
/// accumulated into `grad`.
template <int K>
double term_loss(const PinnModel& model, const LossSpec& spec, TermKind kind,
                 std::span<const double> flat_points, std::span<const double> targets,
                 double extra_weight, std::vector<std::unique_ptr<JetMlp<K>>>& mlps,
                 std::span<double> grad, int n_threads) {
  const std::size_t dim = static_cast<std::size_t>(model.problem.num_inputs());
  const std::size_t n = flat_points.size() / dim;
  if (n == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool want_grad = !grad.empty();

  const std::size_t n_chunks = std::min<std::size_t>(64, n);
  std::vector<double> chunk_loss(n_chunks, 0.0);
  std::vector<std::vector<double>> chunk_grad(want_grad ? n_chunks : 0);

  parallel_chunks(n, n_chunks, n_threads, [&](std::size_t c, std::size_t lo, std::size_t hi,
                                              int thread_idx) {
    JetMlp<K>& mlp = *mlps[static_cast<std::size_t>(thread_idx)];
    std::vector<double>* cg = nullptr;
    if (want_grad) {
      chunk_grad[c].assign(grad.size(), 0.0);
      cg = &chunk_grad[c];
    }
    std::vector<Jet<K>> in(dim);
    double loss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t a = 0; a < dim; ++a)
        in[a] = Jet<K>::seed(flat_points[i * dim + a], static_cast<int>(a));
      Jet<K> pb;
      const Jet<K> u = model_jet(mlp, model, std::span<const Jet<K>>(in), pb);
      Cotangent<K> kappa;
      const double target = targets.empty() ? 0.0 : targets[i];
      loss += term_point(kind, model.problem, spec, u, target,
                         2.0 * inv_n * extra_weight, kappa);
      if (want_grad) {
        if (model.hard) kappa = pullback(kappa, pb);
        mlp.backward(kappa, *cg);
      }
    }
    chunk_loss[c] = loss;
  });

  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) loss += chunk_loss[c];
  if (want_grad)
    for (std::size_t c = 0; c < n_chunks; ++c)
      if (!chunk_grad[c].empty()) axpy(1.0, chunk_grad[c], grad);
  return loss * inv_n;
}

inline std::vector<double> flatten_points(const std::vector<DataPoint>& pts) {
  std::vector<double> flat;
  if (pts.empty()) return flat;
  flat.reserve(pts.size() * pts.front().x.size());
  for (const DataPoint& p : pts) flat.insert(flat.end(), p.x.begin(), p.x.end());
  return flat;
}

inline std::vector<double> targets_of(const std::vector<DataPoint>& pts) {
  std::vector<double> t;
  t.reserve(pts.size());
  for (const DataPoint& p : pts) t.push_back(p.u);
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Batch generation.
// ---------------------------------------------------------------------------

/// Equidistant points along the initial condition (t = t0). For two spatial
/// axes an equidistant grid of ~n points is used.
inline std::vector<DataPoint> ic_points(const PdeProblem& problem, std::size_t n) {
  std::vector<DataPoint> out;
  const double t0 = problem.time_axis().lo;
  if (problem.num_space_axes() == 1) {
    const Interval& ax = problem.axes[0];
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = n > 1 ? ax.lo + ax.length() * static_cast<double>(i) / (n - 1) : ax.lo;
      const double u = ic_value(problem, std::span<const double>(&x, 1));
      out.push_back({{x, t0}, u});
    }
  } else {
    const std::size_t g = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(n)));
    out.reserve(g * g);
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        const double xy[2] = {
            problem.axes[0].lo + problem.axes[0].length() * static_cast<double>(i) / (g - 1),
            problem.axes[1].lo + problem.axes[1].length() * static_cast<double>(j) / (g - 1)};
        const double u = ic_value(problem, std::span<const double>(xy, 2));
        out.push_back({{xy[0], xy[1], t0}, u});
      }
    }
  }
  return out;
}

/// Random points on the spatial boundary (uniform face, uniform position and
/// time), with the prescribed Dirichlet value.
inline std::vector<DataPoint> bc_points(const PdeProblem& problem, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<DataPoint> out;
  out.reserve(n);
  SplitMix64 rng(derive_seed(seed, 0xb0));
  const int n_space = problem.num_space_axes();
  for (std::size_t i = 0; i < n; ++i) {
    const int face = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n_space)));
    const int axis = face / 2;
    const bool high = face % 2;
    DataPoint p;
    p.x.resize(static_cast<std::size_t>(problem.num_inputs()));
    for (int a = 0; a < n_space; ++a)
      p.x[a] = a == axis ? (high ? problem.axes[a].hi : problem.axes[a].lo)
                         : rng.uniform(problem.axes[a].lo, problem.axes[a].hi);
    p.x.back() = rng.uniform(problem.time_axis().lo, problem.time_axis().hi);
    p.u = problem.kind == PdeKind::kHeat2d ? problem.heat_bc[static_cast<std::size_t>(face)] : 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

/// Draws one iteration's collocation sets: IC and BC data are a fixed
/// discretised set (drawn once per run), the physics batch is fresh every
/// iteration. `model` is consulted only by the gradient-weighted strategy.
inline Batches make_batches(const PdeProblem& problem, const LossSpec& spec,
                            const PinnModel& model, std::uint64_t seed, long iter) {
  Batches b;
  const std::uint64_t iter_seed = derive_seed(seed, 0x17e4 + static_cast<std::uint64_t>(iter));
  if (spec.term_mode == TermMode::kThreeTerm) {
    b.ic = ic_points(problem, spec.n_ic);
    b.bc = bc_points(problem, spec.n_bc, derive_seed(seed, 0xbc));
  } else {
    b.data = &spec.data_points;
  }
  switch (spec.strategy) {
    case SamplingStrategy::kUniform:
      b.physics = uniform_sample(problem.axes, spec.n_physics, iter_seed);
      break;
    case SamplingStrategy::kProgressive: {
      const int stage = std::min<long>(iter / spec.schedule->iterations_per_stage,
                                       spec.schedule->stages - 1);
      b.physics = progressive_sample(*spec.schedule, static_cast<int>(stage), spec.n_physics,
                                     iter_seed);
      break;
    }
    case SamplingStrategy::kGradientWeighted:
      b.physics = gradient_weighted_sample(make_gradient_norm_fn(model), problem.axes,
                                           spec.n_physics, iter_seed, spec.gw_pilot_n);
      break;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Loss evaluation.
// ---------------------------------------------------------------------------

template <int K>
class LossEvaluator {
 public:
  LossEvaluator(Architecture arch, PdeProblem problem, LossSpec spec)
      : problem_(std::move(problem)), spec_(std::move(spec)), n_threads_(detail::default_threads()) {
    for (int t = 0; t < n_threads_; ++t) mlps_.push_back(std::make_unique<JetMlp<K>>(arch));
  }

  /// Loss parts and (if grad non-empty) the full parameter gradient.
  LossParts evaluate(const PinnModel& model, const Batches& batches, std::span<double> grad) {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    for (auto& m : mlps_) m->set_theta(model.net.theta);

    LossParts parts;
    const double lam = spec_.lambda_weight;
    if (spec_.term_mode == TermMode::kThreeTerm) {
      std::vector<double> ic_flat = detail::flatten_points(batches.ic);
      std::vector<double> ic_targets = detail::targets_of(batches.ic);
      std::vector<double> bc_flat = detail::flatten_points(batches.bc);
      std::vector<double> bc_targets = detail::targets_of(batches.bc);
      parts.ic = detail::term_loss<K>(model, spec_, detail::TermKind::kIc, ic_flat, ic_targets,
                                      1.0, mlps_, grad, n_threads_);
      parts.bc = detail::term_loss<K>(model, spec_, detail::TermKind::kBc, bc_flat, bc_targets,
                                      1.0, mlps_, grad, n_threads_);
      parts.physics =
          detail::term_loss<K>(model, spec_, detail::TermKind::kPhysics, batches.physics.coords,
                               {}, 1.0, mlps_, grad, n_threads_);
      parts.data = parts.ic + parts.bc;
      parts.total = parts.data + parts.physics;
    } else {
      std::vector<double> d_flat = detail::flatten_points(*batches.data);
      std::vector<double> d_targets = detail::targets_of(*batches.data);
      parts.data = detail::term_loss<K>(model, spec_, detail::TermKind::kData, d_flat, d_targets,
                                        1.0 - lam, mlps_, grad, n_threads_);
      parts.physics =
          detail::term_loss<K>(model, spec_, detail::TermKind::kPhysics, batches.physics.coords,
                               {}, lam, mlps_, grad, n_threads_);
      parts.total = (1.0 - lam) * parts.data + lam * parts.physics;
    }
    return parts;
  }

 private:
  PdeProblem problem_;
  LossSpec spec_;
  int n_threads_;
  std::vector<std::unique_ptr<JetMlp<K>>> mlps_;
};

/// Physics-informed loss at `params` with a fresh physics batch drawn from
/// `seed`. Returns (total, data part, physics part).
inline LossParts pinn_loss(const NetworkParams& params, const LossSpec& spec,
                           const PdeProblem& problem, std::uint64_t seed) {
  spec.validate(problem);
  PinnModel model{params, problem, spec.hard_constraints, TimeFactor::kQuadratic};
  if (spec.hard_constraints && !problem.has_initial_velocity())
    model.time_factor = TimeFactor::kLinear;
  Batches batches = make_batches(problem, spec, model, seed, /*iter=*/1);
  if (problem.num_inputs() == 2) {
    LossEvaluator<2> ev(params.arch, problem, spec);
    return ev.evaluate(model, batches, {});
  }
  LossEvaluator<3> ev(params.arch, problem, spec);
  return ev.evaluate(model, batches, {});
}

// ---------------------------------------------------------------------------
// Training loop.
// ---------------------------------------------------------------------------

struct TrainResult {
  NetworkParams params;
  TrainingHistory history;
};

/// Thrown when the loss goes non-finite; carries the last finite state.
struct TrainingAbort : std::runtime_error {
  long iteration;
  TrainingHistory history;
  TrainingAbort(long iter, TrainingHistory h)
      : std::runtime_error("training aborted: non-finite loss at iteration " +
                           std::to_string(iter)),
        iteration(iter),
        history(std::move(h)) {}
};

/// Approximation snapshot on the nx x nt evaluation grid (2-input problems).
inline GridField snapshot_grid(const PinnModel& model, std::size_t nx = 200,
                               std::size_t nt = 400) {
  GridField g(nx, nt, model.problem.axes[0], model.problem.axes[1]);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double in[2] = {g.coord0(i), g.coord1(j)};
      g.at(i, j) = model(std::span<const double>(in, 2));
    }
  }
  return g;
}

namespace detail {

template <int K>
TrainResult train_k(const PdeProblem& problem, const Architecture& arch,
                    const OptimizerSpec& opt, const LossSpec& spec, long budget,
                    std::uint64_t seed, NetworkParams initial) {
  PinnModel model{std::move(initial), problem, spec.hard_constraints, TimeFactor::kQuadratic};
  if (spec.hard_constraints && !problem.has_initial_velocity())
    model.time_factor = TimeFactor::kLinear;

  LossEvaluator<K> evaluator(arch, problem, spec);
  const std::size_t n_params = model.net.theta.size();

  TrainingHistory history;
  const bool can_snapshot = problem.num_inputs() == 2;

  LbfgsState lbfgs;
  lbfgs.m = opt.memory;
  lbfgs.c1 = opt.c1;
  lbfgs.c2 = opt.c2;
  AdamState adam = AdamState::make(n_params, opt.alpha, opt.beta1, opt.beta2);

  Batches batches;
  std::vector<double> grad(n_params, 0.0);

  for (long iter = 1; iter <= budget; ++iter) {
    if (!spec.frozen_batch || iter == 1)
      batches = make_batches(problem, spec, model, seed, spec.frozen_batch ? 1 : iter);

    LossParts parts = evaluator.evaluate(model, batches, grad);
    history.records.push_back({iter, parts.data, parts.physics, parts.total});
    if (!std::isfinite(parts.total) || !all_finite(grad))
      throw TrainingAbort(iter, std::move(history));

    const bool use_adam = opt.kind == OptimizerSpec::Kind::kAdam ||
                          opt.kind == OptimizerSpec::Kind::kSgd ||
                          (opt.kind == OptimizerSpec::Kind::kAdamThenLbfgs &&
                           iter <= opt.adam_warmup);
    if (opt.kind == OptimizerSpec::Kind::kSgd) {
      axpy(-opt.gamma, grad, model.net.theta);
    } else if (use_adam) {
      adam_step(adam, model.net.theta, grad);
    } else {
      std::vector<double> p = lbfgs_direction(lbfgs, grad);
      if (!(dot(p, grad) < 0.0)) {
        lbfgs.clear();
        p.assign(grad.begin(), grad.end());
        for (double& x : p) x = -x;
      }
      auto loss_fn = [&](std::span<const double> theta) {
        PinnModel trial = model;
        trial.net.theta.assign(theta.begin(), theta.end());
        std::vector<double> g(n_params, 0.0);
        LossParts lp = evaluator.evaluate(trial, batches, g);
        return std::pair<double, std::vector<double>>(lp.total, std::move(g));
      };
      LineSearchResult ls =
          line_search(loss_fn, model.net.theta, p, parts.total, grad, opt.c1, opt.c2);
      if (ls.armijo_ok && std::isfinite(ls.loss)) {
        std::vector<double> s(n_params), y(n_params);
        for (std::size_t i = 0; i < n_params; ++i) {
          s[i] = ls.alpha * p[i];
          y[i] = ls.grad[i] - grad[i];
        }
        axpy(ls.alpha, p, model.net.theta);
        lbfgs.push_pair(std::move(s), std::move(y));
      } else {
        lbfgs.clear();  // failed search on this batch; retry fresh next iteration
      }
    }

    if (can_snapshot && history.snapshot_interval > 0 &&
        iter % history.snapshot_interval == 0) {
      history.snapshot_iters.push_back(iter);
      history.snapshots.push_back(snapshot_grid(model));
    }
  }
  return {std::move(model.net), std::move(history)};
}

}  // namespace detail

/// Trains a network on the problem. Deterministic for a fixed seed: the same
/// seed yields bit-identical parameters and history.
inline TrainResult train(const PdeProblem& problem, const Architecture& arch,
                         const OptimizerSpec& opt, const LossSpec& spec, long budget,
                         std::uint64_t seed) {
  problem.validate();
  spec.validate(problem);
  if (budget <= 0) throw ArgumentError("train: budget must be positive");
  if (arch.sizes.front() != problem.num_inputs())
    throw StructuralError("train: network fan-in does not match problem inputs");
  NetworkParams initial = init_params(arch.sizes, arch.activation, seed);
  if (problem.num_inputs() == 2)
    return detail::train_k<2>(problem, arch, opt, spec, budget, seed, std::move(initial));
  return detail::train_k<3>(problem, arch, opt, spec, budget, seed, std::move(initial));
}

/// Relative L2 error of every stored snapshot against an analytical
/// reference, evaluated on the snapshot grid.
template <class Ref>
std::vector<std::pair<long, double>> track_convergence(const TrainingHistory& history,
                                                       Ref&& reference) {
  if (history.snapshots.empty())
    throw ArgumentError("track_convergence: history holds no snapshots");
  std::vector<std::pair<long, double>> out;
  const GridField& first = history.snapshots.front();
  std::vector<double> truth(first.values.size());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < first.n0; ++i)
    for (std::size_t j = 0; j < first.n1; ++j) {
      const double in[2] = {first.coord0(i), first.coord1(j)};
      truth[idx++] = reference(std::span<const double>(in, 2));
    }
  const double truth_norm = norm2(truth);
  for (std::size_t s = 0; s < history.snapshots.size(); ++s) {
    const GridField& g = history.snapshots[s];
    double err2 = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      const double d = g.values[k] - truth[k];
      err2 += d * d;
    }
    out.emplace_back(history.snapshot_iters[s], std::sqrt(err2) / truth_norm);
  }
  return out;
}

}  // namespace pinn
