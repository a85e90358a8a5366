#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/network.hpp"
#include "pinn/pde.hpp"
#include "pinn/training.hpp"

namespace pinn {

/// Fully resolved experiment configuration: problem, network, optimiser,
/// loss, sampling, run control and reference/FD settings.
struct RunConfig {
  PdeProblem problem;
  Architecture arch{{2, 8, 4, 2, 1}, Activation::kTanh};
  OptimizerSpec optimizer;
  LossSpec loss;

  // sampling (expanded into loss.schedule for the progressive strategy)
  double growth = 0.5;
  int stages = 4;
  int iterations_per_stage = 250;
  std::vector<Box> seed_boxes;

  long budget = 2000;
  int snapshot_interval = 50;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  // evaluation / FD reference settings
  std::string reference = "analytical";  ///< "analytical" or "fd"
  int fd_nx = 2048;
  double fd_h = 0.1;
  double fd_dt = 0.1;
  int fd_steps = 200;
  int fd_snapshot_every = 100;
  double fd_t_final = 1.0;
  int fd_nt_out = 201;
  std::size_t grid_n0 = 200;
  std::size_t grid_n1 = 400;
};

namespace detail {

struct KvStore {
  std::map<std::string, std::string> kv;
  mutable std::map<std::string, bool> used;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string raw(const std::string& key) const {
    used[key] = true;
    return kv.at(key);
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return raw(key);
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + s + "'");
    }
  }

  long get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected an integer, got '" + s + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + s + "'");
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline KvStore parse_kv(std::istream& in, const std::string& origin) {
  KvStore store;
  std::string line, section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no), "empty key");
    store.kv[section.empty() ? key : section + "." + key] = value;
  }
  return store;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a comma-separated integer list, got '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

/// "lo:hi,lo:hi ; lo:hi,lo:hi" -> list of boxes.
inline std::vector<Box> parse_boxes(const std::string& key, const std::string& s) {
  std::vector<Box> boxes;
  std::stringstream boxes_ss(s);
  std::string box_str;
  while (std::getline(boxes_ss, box_str, ';')) {
    box_str = trim(box_str);
    if (box_str.empty()) continue;
    Box box;
    std::stringstream ax_ss(box_str);
    std::string ax;
    while (std::getline(ax_ss, ax, ',')) {
      ax = trim(ax);
      const auto colon = ax.find(':');
      if (colon == std::string::npos)
        throw ConfigError(key, "expected lo:hi per axis, got '" + ax + "'");
      try {
        box.push_back({std::stod(ax.substr(0, colon)), std::stod(ax.substr(colon + 1))});
      } catch (const std::exception&) {
        throw ConfigError(key, "bad interval '" + ax + "'");
      }
    }
    boxes.push_back(std::move(box));
  }
  return boxes;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline RunConfig resolve_config(detail::KvStore& store) {
  RunConfig c;

  const std::string kind = store.get_string("problem.kind", "wave1d");
  if (kind == "wave1d")
    c.problem = make_problem(PdeKind::kWave1d);
  else if (kind == "burgers")
    c.problem = make_problem(PdeKind::kBurgers);
  else if (kind == "heat2d")
    c.problem = make_problem(PdeKind::kHeat2d);
  else if (kind == "membrane2d")
    c.problem = make_problem(PdeKind::kMembrane2d);
  else
    throw ConfigError("problem.kind", "unknown problem '" + kind + "'");
  c.problem.c = store.get_double("problem.c", c.problem.c);
  c.problem.nu = store.get_double("problem.nu", c.problem.nu);
  c.problem.alpha = store.get_double("problem.alpha", c.problem.alpha);
  c.problem.axes.back().hi = store.get_double("problem.t_max", c.problem.axes.back().hi);
  c.problem.series_terms =
      static_cast<int>(store.get_long("problem.series_terms", c.problem.series_terms));
  if (c.problem.c <= 0.0) throw ConfigError("problem.c", "must be positive");
  if (c.problem.nu <= 0.0) throw ConfigError("problem.nu", "must be positive");
  if (c.problem.alpha <= 0.0) throw ConfigError("problem.alpha", "must be positive");
  if (c.problem.axes.back().hi <= c.problem.axes.back().lo)
    throw ConfigError("problem.t_max", "must exceed the time-axis origin");

  if (store.has("network.layers"))
    c.arch.sizes = detail::parse_int_list("network.layers", store.raw("network.layers"));
  if (c.arch.sizes.size() < 2) throw ConfigError("network.layers", "need at least two sizes");
  for (int s : c.arch.sizes)
    if (s <= 0) throw ConfigError("network.layers", "sizes must be positive");
  if (c.arch.sizes.front() != c.problem.num_inputs())
    throw ConfigError("network.layers", "first size must equal the problem input arity " +
                                            std::to_string(c.problem.num_inputs()));
  if (c.arch.sizes.back() != 1) throw ConfigError("network.layers", "last size must be 1");
  const std::string act = store.get_string("network.activation", "tanh");
  if (act == "tanh")
    c.arch.activation = Activation::kTanh;
  else if (act == "softplus")
    c.arch.activation = Activation::kSoftplus;
  else
    throw ConfigError("network.activation", "unknown activation '" + act + "'");

  const std::string opt = store.get_string("optimizer.kind", "lbfgs");
  if (opt == "lbfgs")
    c.optimizer.kind = OptimizerSpec::Kind::kLbfgs;
  else if (opt == "adam")
    c.optimizer.kind = OptimizerSpec::Kind::kAdam;
  else if (opt == "sgd")
    c.optimizer.kind = OptimizerSpec::Kind::kSgd;
  else if (opt == "adam_then_lbfgs")
    c.optimizer.kind = OptimizerSpec::Kind::kAdamThenLbfgs;
  else
    throw ConfigError("optimizer.kind", "unknown optimizer '" + opt + "'");
  c.optimizer.memory = static_cast<std::size_t>(store.get_long("optimizer.memory", 50));
  c.optimizer.c1 = store.get_double("optimizer.c1", 1e-4);
  c.optimizer.c2 = store.get_double("optimizer.c2", 0.9);
  c.optimizer.alpha = store.get_double("optimizer.alpha", 1e-3);
  c.optimizer.beta1 = store.get_double("optimizer.beta1", 0.9);
  c.optimizer.beta2 = store.get_double("optimizer.beta2", 0.999);
  c.optimizer.gamma = store.get_double("optimizer.gamma", 1e-3);
  c.optimizer.adam_warmup = store.get_long("optimizer.adam_warmup", 1000);
  if (!(c.optimizer.c1 > 0.0 && c.optimizer.c1 < c.optimizer.c2 && c.optimizer.c2 < 1.0))
    throw ConfigError("optimizer.c1", "require 0 < c1 < c2 < 1");
  if (c.optimizer.memory == 0) throw ConfigError("optimizer.memory", "must be positive");
  if (!(c.optimizer.beta1 >= 0.0 && c.optimizer.beta1 < 1.0))
    throw ConfigError("optimizer.beta1", "must lie in [0,1)");
  if (!(c.optimizer.beta2 >= 0.0 && c.optimizer.beta2 < 1.0))
    throw ConfigError("optimizer.beta2", "must lie in [0,1)");
  if (c.optimizer.alpha <= 0.0) throw ConfigError("optimizer.alpha", "must be positive");
  if (c.optimizer.gamma <= 0.0) throw ConfigError("optimizer.gamma", "must be positive");

  const std::string mode = store.get_string("loss.term_mode", "three_term");
  if (mode == "three_term")
    c.loss.term_mode = TermMode::kThreeTerm;
  else if (mode == "two_term")
    c.loss.term_mode = TermMode::kTwoTerm;
  else
    throw ConfigError("loss.term_mode", "unknown mode '" + mode + "'");
  c.loss.lambda_weight = store.get_double("loss.lambda_weight", 0.5);
  if (!(c.loss.lambda_weight >= 0.0 && c.loss.lambda_weight <= 1.0))
    throw ConfigError("loss.lambda_weight", "must lie in [0,1]");
  c.loss.n_ic = static_cast<std::size_t>(store.get_long("loss.n_ic", 1000));
  c.loss.n_bc = static_cast<std::size_t>(store.get_long("loss.n_bc", 1000));
  c.loss.n_physics = static_cast<std::size_t>(store.get_long("loss.n_physics", 10000));
  if (c.loss.n_physics == 0) throw ConfigError("loss.n_physics", "must be positive");
  c.loss.hard_constraints = store.get_bool("loss.hard_constraints", false);
  c.loss.include_velocity_ic = store.get_bool("loss.include_velocity_ic", true);
  c.loss.frozen_batch = store.get_bool("loss.frozen_batch", false);
  if (c.loss.hard_constraints && !c.problem.homogeneous_dirichlet())
    throw ConfigError("loss.hard_constraints", "problem has inhomogeneous boundary values");

  const std::string strat = store.get_string("sampling.strategy", "uniform");
  if (strat == "uniform")
    c.loss.strategy = SamplingStrategy::kUniform;
  else if (strat == "progressive")
    c.loss.strategy = SamplingStrategy::kProgressive;
  else if (strat == "gradient_weighted")
    c.loss.strategy = SamplingStrategy::kGradientWeighted;
  else
    throw ConfigError("sampling.strategy", "unknown strategy '" + strat + "'");
  c.loss.gw_pilot_n = static_cast<std::size_t>(store.get_long("sampling.pilot_n", 256));
  if (c.loss.gw_pilot_n < 100) throw ConfigError("sampling.pilot_n", "must be >= 100");
  c.growth = store.get_double("sampling.growth", 0.5);
  c.stages = static_cast<int>(store.get_long("sampling.stages", 4));
  c.iterations_per_stage =
      static_cast<int>(store.get_long("sampling.iterations_per_stage", 250));
  if (store.has("sampling.seed_boxes"))
    c.seed_boxes = detail::parse_boxes("sampling.seed_boxes", store.raw("sampling.seed_boxes"));
  if (c.loss.strategy == SamplingStrategy::kProgressive) {
    std::vector<Box> seeds = c.seed_boxes;
    if (seeds.empty()) {
      // default: a strip around the IC, the densest data in these problems
      Box strip = c.problem.axes;
      strip.back().hi = strip.back().lo + 0.1 * c.problem.time_axis().length();
      seeds.push_back(std::move(strip));
    }
    try {
      c.loss.schedule = make_progressive_schedule(c.problem.axes, seeds, c.growth, c.stages,
                                                  c.iterations_per_stage);
    } catch (const ArgumentError& e) {
      throw ConfigError("sampling.seed_boxes", e.what());
    }
  }

  c.budget = store.get_long("run.budget", 2000);
  if (c.budget <= 0) throw ConfigError("run.budget", "must be positive");
  c.snapshot_interval = static_cast<int>(store.get_long("run.snapshot_interval", 50));
  if (c.snapshot_interval < 0) throw ConfigError("run.snapshot_interval", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(store.get_long("run.seed", 1));
  c.output_dir = store.get_string("run.output_dir", "out");
  if (const char* env = std::getenv("PINN_OUTPUT_DIR")) c.output_dir = env;

  c.reference = store.get_string("evaluate.reference",
                                 c.problem.has_analytical() ? "analytical" : "fd");
  if (c.reference != "analytical" && c.reference != "fd")
    throw ConfigError("evaluate.reference", "expected analytical or fd");
  if (c.reference == "analytical" && !c.problem.has_analytical())
    throw ConfigError("evaluate.reference",
                      std::string("no analytical solution for ") + pde_name(c.problem.kind));
  c.grid_n0 = static_cast<std::size_t>(store.get_long("evaluate.grid_n0", 200));
  c.grid_n1 = static_cast<std::size_t>(store.get_long("evaluate.grid_n1", 400));
  if (c.grid_n0 < 2 || c.grid_n1 < 2) throw ConfigError("evaluate.grid_n0", "grid too small");

  c.fd_nx = static_cast<int>(store.get_long("fd.nx", 2048));
  c.fd_h = store.get_double("fd.h", 0.1);
  c.fd_dt = store.get_double("fd.dt", 0.1);
  c.fd_steps = static_cast<int>(store.get_long("fd.steps", 200));
  c.fd_snapshot_every = static_cast<int>(store.get_long("fd.snapshot_every", 100));
  c.fd_t_final = store.get_double("fd.t_final", 1.0);
  c.fd_nt_out = static_cast<int>(store.get_long("fd.nt_out", 201));

  for (const auto& [key, value] : store.kv)
    if (!store.used[key]) throw ConfigError(key, "unknown key");
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  detail::KvStore store = detail::parse_kv(in, path);
  return resolve_config(store);
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  detail::KvStore store = detail::parse_kv(in, "<string>");
  return resolve_config(store);
}

/// Serialises the fully resolved config; parsing the output reproduces an
/// equivalent RunConfig.
inline std::string format_config(const RunConfig& c) {
  using detail::fmt_double;
  std::ostringstream out;
  out << "[problem]\n";
  out << "kind = " << pde_name(c.problem.kind) << "\n";
  out << "c = " << fmt_double(c.problem.c) << "\n";
  out << "nu = " << fmt_double(c.problem.nu) << "\n";
  out << "alpha = " << fmt_double(c.problem.alpha) << "\n";
  out << "t_max = " << fmt_double(c.problem.time_axis().hi) << "\n";
  out << "series_terms = " << c.problem.series_terms << "\n";
  out << "\n[network]\n";
  out << "layers = ";
  for (std::size_t i = 0; i < c.arch.sizes.size(); ++i)
    out << (i ? "," : "") << c.arch.sizes[i];
  out << "\n";
  out << "activation = " << activation_name(c.arch.activation) << "\n";
  out << "\n[optimizer]\n";
  const char* opt_name = c.optimizer.kind == OptimizerSpec::Kind::kLbfgs ? "lbfgs"
                         : c.optimizer.kind == OptimizerSpec::Kind::kAdam ? "adam"
                         : c.optimizer.kind == OptimizerSpec::Kind::kSgd ? "sgd"
                                                                         : "adam_then_lbfgs";
  out << "kind = " << opt_name << "\n";
  out << "memory = " << c.optimizer.memory << "\n";
  out << "c1 = " << fmt_double(c.optimizer.c1) << "\n";
  out << "c2 = " << fmt_double(c.optimizer.c2) << "\n";
  out << "alpha = " << fmt_double(c.optimizer.alpha) << "\n";
  out << "beta1 = " << fmt_double(c.optimizer.beta1) << "\n";
  out << "beta2 = " << fmt_double(c.optimizer.beta2) << "\n";
  out << "gamma = " << fmt_double(c.optimizer.gamma) << "\n";
  out << "adam_warmup = " << c.optimizer.adam_warmup << "\n";
  out << "\n[loss]\n";
  out << "term_mode = " << (c.loss.term_mode == TermMode::kThreeTerm ? "three_term" : "two_term")
      << "\n";
  out << "lambda_weight = " << fmt_double(c.loss.lambda_weight) << "\n";
  out << "n_ic = " << c.loss.n_ic << "\n";
  out << "n_bc = " << c.loss.n_bc << "\n";
  out << "n_physics = " << c.loss.n_physics << "\n";
  out << "hard_constraints = " << (c.loss.hard_constraints ? "true" : "false") << "\n";
  out << "include_velocity_ic = " << (c.loss.include_velocity_ic ? "true" : "false") << "\n";
  out << "frozen_batch = " << (c.loss.frozen_batch ? "true" : "false") << "\n";
  out << "\n[sampling]\n";
  const char* strat_name = c.loss.strategy == SamplingStrategy::kUniform ? "uniform"
                           : c.loss.strategy == SamplingStrategy::kProgressive
                               ? "progressive"
                               : "gradient_weighted";
  out << "strategy = " << strat_name << "\n";
  out << "pilot_n = " << c.loss.gw_pilot_n << "\n";
  out << "growth = " << fmt_double(c.growth) << "\n";
  out << "stages = " << c.stages << "\n";
  out << "iterations_per_stage = " << c.iterations_per_stage << "\n";
  if (!c.seed_boxes.empty()) {
    out << "seed_boxes = ";
    for (std::size_t b = 0; b < c.seed_boxes.size(); ++b) {
      if (b) out << " ; ";
      for (std::size_t a = 0; a < c.seed_boxes[b].size(); ++a) {
        if (a) out << ",";
        out << fmt_double(c.seed_boxes[b][a].lo) << ":" << fmt_double(c.seed_boxes[b][a].hi);
      }
    }
    out << "\n";
  }
  out << "\n[run]\n";
  out << "budget = " << c.budget << "\n";
  out << "snapshot_interval = " << c.snapshot_interval << "\n";
  out << "seed = " << c.seed << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  out << "\n[evaluate]\n";
  out << "reference = " << c.reference << "\n";
  out << "grid_n0 = " << c.grid_n0 << "\n";
  out << "grid_n1 = " << c.grid_n1 << "\n";
  out << "\n[fd]\n";
  out << "nx = " << c.fd_nx << "\n";
  out << "h = " << fmt_double(c.fd_h) << "\n";
  out << "dt = " << fmt_double(c.fd_dt) << "\n";
  out << "steps = " << c.fd_steps << "\n";
  out << "snapshot_every = " << c.fd_snapshot_every << "\n";
  out << "t_final = " << fmt_double(c.fd_t_final) << "\n";
  out << "nt_out = " << c.fd_nt_out << "\n";
  return out.str();
}

}  // namespace pinn
