#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "pinn/autodiff.hpp"
#include "pinn/common.hpp"

namespace pinn {

enum class SamplingStrategy { kUniform, kProgressive, kGradientWeighted };

/// Axis-aligned box, one interval per domain axis.
using Box = std::vector<Interval>;

inline double box_volume(const Box& b) {
  double v = 1.0;
  for (const Interval& ax : b) v *= ax.length();
  return v;
}

inline bool box_contains(const Box& outer, const Box& inner) {
  for (std::size_t a = 0; a < outer.size(); ++a)
    if (inner[a].lo < outer[a].lo - 1e-15 || inner[a].hi > outer[a].hi + 1e-15) return false;
  return true;
}

inline bool box_contains_point(const Box& b, std::span<const double> x) {
  for (std::size_t a = 0; a < b.size(); ++a)
    if (!b[a].contains(x[a])) return false;
  return true;
}

/// Collocation points, stored flat as n x dim row-major coordinates.
struct SampleBatch {
  int dim = 0;
  std::vector<double> coords;
  int stage = 0;
  SamplingStrategy strategy = SamplingStrategy::kUniform;
  bool flat_field_fallback = false;  ///< gradient weighting degenerated to uniform

  std::size_t size() const { return dim > 0 ? coords.size() / dim : 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// n i.i.d. uniform points over the domain box; deterministic under seed.
inline SampleBatch uniform_sample(std::span<const Interval> domain, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) throw ArgumentError("uniform_sample: n must be positive");
  SampleBatch b;
  b.dim = static_cast<int>(domain.size());
  b.strategy = SamplingStrategy::kUniform;
  b.coords.reserve(n * domain.size());
  SplitMix64 rng(derive_seed(seed, /*tag=*/0x5a11));
  for (std::size_t i = 0; i < n; ++i)
    for (const Interval& ax : domain) b.coords.push_back(rng.uniform(ax.lo, ax.hi));
  return b;
}

// ---------------------------------------------------------------------------
// Progressive domain expansion: start sampling inside boxes seeded where
// data is dense, grow them each stage by a fixed fraction of the remaining
// distance to the domain boundary, and finish on the whole domain.
// ---------------------------------------------------------------------------

struct PartitionSchedule {
  std::vector<Interval> domain;
  std::vector<Box> seeds;
  double growth = 0.5;          ///< per-stage fraction of remaining distance
  int stages = 4;               ///< k
  int iterations_per_stage = 250;  ///< m
  std::vector<std::vector<Box>> stage_boxes;  ///< built by make_progressive_schedule

  const std::vector<Box>& boxes_at(int stage) const { return stage_boxes[stage]; }
};

namespace detail {
/// Clips grown boxes at the midpoint of the gap between their seed boxes
/// along the widest separating axis, so boxes within a stage stay disjoint.
inline void clip_disjoint(std::vector<Box>& boxes, const std::vector<Box>& seeds) {
  for (std::size_t p = 0; p < boxes.size(); ++p) {
    for (std::size_t q = p + 1; q < boxes.size(); ++q) {
      int best_axis = -1;
      double best_gap = -1.0;
      bool p_below = true;
      for (std::size_t a = 0; a < seeds[p].size(); ++a) {
        if (seeds[p][a].hi <= seeds[q][a].lo) {
          const double gap = seeds[q][a].lo - seeds[p][a].hi;
          if (gap > best_gap) {
            best_gap = gap;
            best_axis = static_cast<int>(a);
            p_below = true;
          }
        } else if (seeds[q][a].hi <= seeds[p][a].lo) {
          const double gap = seeds[p][a].lo - seeds[q][a].hi;
          if (gap > best_gap) {
            best_gap = gap;
            best_axis = static_cast<int>(a);
            p_below = false;
          }
        }
      }
      if (best_axis < 0)
        throw ArgumentError("progressive schedule: seed boxes overlap");
      const std::size_t a = static_cast<std::size_t>(best_axis);
      const double mid = p_below ? 0.5 * (seeds[p][a].hi + seeds[q][a].lo)
                                 : 0.5 * (seeds[q][a].hi + seeds[p][a].lo);
      if (p_below) {
        boxes[p][a].hi = std::min(boxes[p][a].hi, mid);
        boxes[q][a].lo = std::max(boxes[q][a].lo, mid);
      } else {
        boxes[q][a].hi = std::min(boxes[q][a].hi, mid);
        boxes[p][a].lo = std::max(boxes[p][a].lo, mid);
      }
    }
  }
}
}  // namespace detail

inline PartitionSchedule make_progressive_schedule(std::vector<Interval> domain,
                                                   std::vector<Box> seeds, double growth,
                                                   int stages, int iterations_per_stage) {
  if (stages < 2) throw ArgumentError("progressive schedule: need at least 2 stages");
  if (!(growth > 0.0 && growth < 1.0))
    throw ArgumentError("progressive schedule: growth must lie in (0,1)");
  if (seeds.empty()) throw ArgumentError("progressive schedule: no seed boxes");
  if (iterations_per_stage < 1)
    throw ArgumentError("progressive schedule: iterations_per_stage must be positive");
  for (Box& s : seeds) {
    if (s.size() != domain.size())
      throw ArgumentError("progressive schedule: seed box dimension mismatch");
    for (std::size_t a = 0; a < s.size(); ++a) {
      s[a].lo = std::max(s[a].lo, domain[a].lo);
      s[a].hi = std::min(s[a].hi, domain[a].hi);
      if (!(s[a].lo < s[a].hi))
        throw ArgumentError("progressive schedule: empty stage-region after clipping to domain");
    }
  }

  PartitionSchedule sched;
  sched.domain = std::move(domain);
  sched.seeds = seeds;
  sched.growth = growth;
  sched.stages = stages;
  sched.iterations_per_stage = iterations_per_stage;

  std::vector<Box> current = seeds;
  detail::clip_disjoint(current, seeds);
  sched.stage_boxes.push_back(current);
  for (int s = 1; s < stages - 1; ++s) {
    std::vector<Box> grown = sched.stage_boxes.back();
    for (Box& b : grown) {
      for (std::size_t a = 0; a < b.size(); ++a) {
        b[a].lo -= growth * (b[a].lo - sched.domain[a].lo);
        b[a].hi += growth * (sched.domain[a].hi - b[a].hi);
      }
    }
    detail::clip_disjoint(grown, seeds);
    // clipping is stage-independent, so nesting survives it; guard anyway
    for (std::size_t i = 0; i < grown.size(); ++i)
      if (!box_contains(grown[i], sched.stage_boxes.back()[i]))
        throw StructuralError("progressive schedule: stage nesting violated");
    sched.stage_boxes.push_back(std::move(grown));
  }
  sched.stage_boxes.push_back({sched.domain});  // X^(k) = Y
  return sched;
}

/// n uniform points over the union of the stage's boxes (box chosen with
/// probability proportional to its volume).
inline SampleBatch progressive_sample(const PartitionSchedule& sched, int stage, std::size_t n,
                                      std::uint64_t seed) {
  if (stage < 0 || stage >= sched.stages)
    throw ArgumentError("progressive_sample: stage out of range");
  if (n == 0) throw ArgumentError("progressive_sample: n must be positive");
  const std::vector<Box>& boxes = sched.boxes_at(stage);
  std::vector<double> cum;
  cum.reserve(boxes.size());
  double total = 0.0;
  for (const Box& b : boxes) {
    total += box_volume(b);
    cum.push_back(total);
  }
  if (!(total > 0.0)) throw ArgumentError("progressive_sample: empty stage-region");

  SampleBatch out;
  out.dim = static_cast<int>(sched.domain.size());
  out.stage = stage;
  out.strategy = SamplingStrategy::kProgressive;
  out.coords.reserve(n * sched.domain.size());
  SplitMix64 rng(derive_seed(seed, /*tag=*/0x5a12 + static_cast<std::uint64_t>(stage)));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_double() * total;
    std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (k >= boxes.size()) k = boxes.size() - 1;
    for (const Interval& ax : boxes[k]) out.coords.push_back(rng.uniform(ax.lo, ax.hi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient-weighted importance sampling: accept candidate x with probability
// |grad net(x)| / M, M = 1.1 x the max gradient norm over a uniform pilot.
// ---------------------------------------------------------------------------

struct AcceptanceStats {
  std::vector<double> norms;    ///< gradient norm of every candidate
  std::vector<bool> accepted;
};

/// `grad_norm_fn(point) -> |grad|_2`. Falls back to uniform sampling (with
/// the flat_field_fallback notice set) when the pilot sees no gradient.
template <class NormFn>
SampleBatch gradient_weighted_sample(NormFn&& grad_norm_fn, std::span<const Interval> domain,
                                     std::size_t n, std::uint64_t seed, std::size_t pilot_n = 256,
                                     AcceptanceStats* stats = nullptr) {
  if (pilot_n < 100) throw ArgumentError("gradient_weighted_sample: pilot_n must be >= 100");
  if (n == 0) throw ArgumentError("gradient_weighted_sample: n must be positive");

  SampleBatch pilot = uniform_sample(domain, pilot_n, derive_seed(seed, 0x6e0));
  double max_norm = 0.0;
  for (std::size_t i = 0; i < pilot.size(); ++i)
    max_norm = std::max(max_norm, grad_norm_fn(pilot.point(i)));
  if (max_norm < 1e-12) {
    SampleBatch b = uniform_sample(domain, n, derive_seed(seed, 0x6e1));
    b.strategy = SamplingStrategy::kGradientWeighted;
    b.flat_field_fallback = true;
    return b;
  }
  const double bound = 1.1 * max_norm;

  SampleBatch out;
  out.dim = static_cast<int>(domain.size());
  out.strategy = SamplingStrategy::kGradientWeighted;
  out.coords.reserve(n * domain.size());
  SplitMix64 rng(derive_seed(seed, 0x6e2));
  std::vector<double> cand(domain.size());
  std::size_t accepted = 0;
  while (accepted < n) {
    for (std::size_t a = 0; a < domain.size(); ++a)
      cand[a] = rng.uniform(domain[a].lo, domain[a].hi);
    const double norm = grad_norm_fn(std::span<const double>(cand));
    const bool take = rng.next_double() * bound < norm;
    if (stats) {
      stats->norms.push_back(norm);
      stats->accepted.push_back(take);
    }
    if (take) {
      out.coords.insert(out.coords.end(), cand.begin(), cand.end());
      ++accepted;
    }
  }
  return out;
}

/// Gradient-norm functional of a recorded evaluator (one reverse sweep per
/// probe point), for plugging a network into gradient_weighted_sample.
template <class E>
auto make_gradient_norm_fn(E net) {
  return [net](std::span<const double> x) -> double {
    std::vector<double> g = input_gradient(net, x);
    return norm2(g);
  };
}

}  // namespace pinn
