// Command-line front end: train / evaluate / fd / plot.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "pinn/config.hpp"
#include "pinn/io.hpp"
#include "pinn/metrics.hpp"
#include "pinn/pde.hpp"
#include "pinn/training.hpp"

namespace fs = std::filesystem;
using namespace pinn;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericAbort = 3;

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("run.output_dir", "cannot create '" + cfg.output_dir + "'");
  const std::string probe_path = cfg.output_dir + "/.write_probe";
  std::ofstream probe(probe_path);
  if (!probe) throw ConfigError("run.output_dir", "'" + cfg.output_dir + "' is not writable");
  probe.close();
  fs::remove(probe_path, ec);
}

void write_resolved_config(const RunConfig& cfg) {
  std::ofstream out(cfg.output_dir + "/config.resolved.cfg");
  if (!out) throw ConfigError("run.output_dir", "cannot write resolved config");
  out << format_config(cfg);
}

/// Error report for the configured reference. 2-input problems are compared
/// on the (x,t) grid; 3-input problems on an (x,y) slice (analytical: at
/// t = T/2; heat FD: at the final FD snapshot time).
ErrorReport build_report(const RunConfig& cfg, const PinnModel& model) {
  const PdeProblem& prob = cfg.problem;
  if (prob.num_inputs() == 2) {
    if (cfg.reference == "analytical") {
      auto truth = [&](auto in) { return analytical_solution(prob, in); };
      return error_report(truth, model, prob.axes[0], prob.axes[1], cfg.grid_n0, cfg.grid_n1);
    }
    if (prob.kind != PdeKind::kBurgers)
      throw ConfigError("evaluate.reference", "no reference available");
    GridField ref = burgers_fd_solve(prob.nu, cfg.fd_nx, 0.0, prob.time_axis().hi, cfg.fd_nt_out);
    return error_report_grid(ref, model);
  }
  if (cfg.reference == "analytical") {
    const double t_mid = 0.5 * (prob.time_axis().lo + prob.time_axis().hi);
    auto truth = [&, t_mid](auto in) {
      using V = std::remove_cvref_t<decltype(in[0])>;
      const V xyt[3] = {in[0], in[1], V(t_mid)};
      return analytical_solution(prob, std::span<const V>(xyt, 3));
    };
    auto approx = [&, t_mid](auto in) {
      using V = std::remove_cvref_t<decltype(in[0])>;
      const V xyt[3] = {in[0], in[1], V(t_mid)};
      return model(std::span<const V>(xyt, 3));
    };
    return error_report(truth, approx, prob.axes[0], prob.axes[1], cfg.grid_n0, cfg.grid_n1);
  }
  if (prob.kind != PdeKind::kHeat2d)
    throw ConfigError("evaluate.reference", "no reference available");
  auto snaps = heat2d_fd_solve(prob, cfg.fd_h, cfg.fd_dt, cfg.fd_steps);
  const HeatSnapshot& last = snaps.back();
  auto approx = [&](auto in) {
    using V = std::remove_cvref_t<decltype(in[0])>;
    const V xyt[3] = {in[0], in[1], V(last.time)};
    return model(std::span<const V>(xyt, 3));
  };
  return error_report_grid(last.field, approx);
}

void write_report_files(const RunConfig& cfg, const ErrorReport& report) {
  save_report_csv(report, cfg.output_dir + "/report.csv");
  save_grid_csv(report.abs_error, cfg.output_dir + "/abs_error.csv");
  save_grid_csv(report.rel_error, cfg.output_dir + "/rel_error.csv");
  save_grid_csv(report.gradient_norm, cfg.output_dir + "/grad_norm.csv");
}

PinnModel make_model(const RunConfig& cfg, NetworkParams params) {
  PinnModel model{std::move(params), cfg.problem, cfg.loss.hard_constraints,
                  TimeFactor::kQuadratic};
  if (cfg.loss.hard_constraints && !cfg.problem.has_initial_velocity())
    model.time_factor = TimeFactor::kLinear;
  return model;
}

int cmd_train(const std::string& config_path) {
  RunConfig cfg = parse_config(config_path);
  ensure_output_dir(cfg);
  write_resolved_config(cfg);

  TrainResult result;
  try {
    result = train(cfg.problem, cfg.arch, cfg.optimizer, cfg.loss, cfg.budget, cfg.seed);
  } catch (TrainingAbort& abort) {
    save_history_csv(abort.history, cfg.output_dir + "/history.csv");
    std::cerr << abort.what() << "\n";
    return kNumericAbort;
  }

  save_history_csv(result.history, cfg.output_dir + "/history.csv");
  save_params_csv(result.params, cfg.output_dir + "/params.csv");
  for (std::size_t s = 0; s < result.history.snapshots.size(); ++s)
    save_grid_csv(result.history.snapshots[s],
                  cfg.output_dir + "/snap_" + std::to_string(result.history.snapshot_iters[s]) +
                      ".csv");

  PinnModel model = make_model(cfg, std::move(result.params));
  write_report_files(cfg, build_report(cfg, model));
  std::cout << "trained " << pde_name(cfg.problem.kind) << " for " << cfg.budget
            << " iterations; artifacts in " << cfg.output_dir << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& params_path, const std::string& config_path) {
  RunConfig cfg = parse_config(config_path);
  ensure_output_dir(cfg);
  NetworkParams params = load_params_csv(cfg.arch, params_path);
  PinnModel model = make_model(cfg, std::move(params));
  write_report_files(cfg, build_report(cfg, model));
  std::cout << "report written to " << cfg.output_dir << "/report.csv\n";
  return kOk;
}

int cmd_fd(const std::string& config_path) {
  RunConfig cfg = parse_config(config_path);
  ensure_output_dir(cfg);
  if (cfg.problem.kind == PdeKind::kHeat2d) {
    auto snaps = heat2d_fd_solve(cfg.problem, cfg.fd_h, cfg.fd_dt, cfg.fd_steps,
                                 cfg.fd_snapshot_every);
    for (const HeatSnapshot& s : snaps) {
      char t_buf[32];
      std::snprintf(t_buf, sizeof t_buf, "%g", s.time);
      save_grid_csv(s.field, cfg.output_dir + "/heat_fd_t" + t_buf + ".csv");
    }
    std::cout << snaps.size() << " heat snapshots written to " << cfg.output_dir << "\n";
    return kOk;
  }
  if (cfg.problem.kind == PdeKind::kBurgers) {
    // dt is auto-selected from the stability bound; fd.dt applies to heat only
    GridField field =
        burgers_fd_solve(cfg.problem.nu, cfg.fd_nx, 0.0, cfg.fd_t_final, cfg.fd_nt_out);
    save_grid_csv(field, cfg.output_dir + "/burgers_fd.csv");
    std::cout << "burgers field written to " << cfg.output_dir << "/burgers_fd.csv\n";
    return kOk;
  }
  throw ConfigError("problem.kind",
                    std::string("no finite-difference solver for ") + pde_name(cfg.problem.kind));
}

int cmd_plot(const std::string& field_path, std::string out_path, const std::string& label0,
             const std::string& label1) {
  GridField g = load_grid_csv(field_path);
  if (out_path.empty()) {
    out_path = field_path;
    const auto dot = out_path.find_last_of('.');
    if (dot != std::string::npos) out_path.resize(dot);
    out_path += ".svg";
  }
  save_svg_heatmap(g, out_path, label0, label1);
  std::cout << "wrote " << out_path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed network training and analysis"};
  app.require_subcommand(1);

  std::string config_path, params_path, field_path, out_path;
  std::string label0 = "x", label1 = "t";

  CLI::App* train_cmd = app.add_subcommand("train", "train a network from a config file");
  train_cmd->add_option("-c,--config", config_path, "config file")->required();

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "error report for saved parameters");
  eval_cmd->add_option("-p,--params", params_path, "params.csv from a training run")->required();
  eval_cmd->add_option("-c,--config", config_path, "config file")->required();

  CLI::App* fd_cmd = app.add_subcommand("fd", "finite-difference reference solve");
  fd_cmd->add_option("-c,--config", config_path, "config file")->required();

  CLI::App* plot_cmd = app.add_subcommand("plot", "render a field CSV as an SVG heatmap");
  plot_cmd->add_option("field", field_path, "GridField CSV")->required();
  plot_cmd->add_option("-o,--output", out_path, "output SVG path");
  plot_cmd->add_option("--label0", label0, "axis0 label");
  plot_cmd->add_option("--label1", label1, "axis1 label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (eval_cmd->parsed()) return cmd_evaluate(params_path, config_path);
    if (fd_cmd->parsed()) return cmd_fd(config_path);
    if (plot_cmd->parsed()) return cmd_plot(field_path, out_path, label0, label1);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const RejectedConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedConstraintError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const ArgumentError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const StructuralError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << e.what() << "\n";
    return kNumericAbort;
  }
  return kConfigError;
}
