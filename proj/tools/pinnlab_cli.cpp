#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pinnlab/config.hpp"
#include "pinnlab/csv.hpp"
#include "pinnlab/errors.hpp"
#include "pinnlab/numfmt.hpp"
#include "pinnlab/run.hpp"
#include "pinnlab/stats.hpp"
#include "pinnlab/svg.hpp"

namespace fs = std::filesystem;
using namespace pinnlab;

namespace {

// Raw flag values; unset numbers keep sentinels so table defaults can fill in.
struct ExperimentFlags {
  std::string optimizer = "gd";
  double lr = std::numeric_limits<double>::quiet_NaN();
  double beta = 1.0;
  std::string arch = "S";
  int epochs = -1;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 1;
  double divergence_guard = 1e6;
  optim::AdamConfig adam;
  optim::LbfgsConfig lbfgs;
  optim::BbiConfig bbi;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->set_config("--config", "",
                  "key=value file with the same names as the flags; "
                  "flags given on the command line win");
  cmd->add_option("--optimizer", f.optimizer, "one of gd, adam, lbfgs, bbi")
      ->check(CLI::IsMember({"gd", "adam", "lbfgs", "bbi"}));
  cmd->add_option("--lr", f.lr,
                  "learning rate; defaults to the tuned table entry for "
                  "(optimizer, beta, arch)");
  cmd->add_option("--beta", f.beta, "advection speed");
  cmd->add_option("--arch", f.arch, "network size")
      ->check(CLI::IsMember({"S", "L"}));
  cmd->add_option("--epochs", f.epochs,
                  "epoch budget; defaults per optimizer and beta");
  cmd->add_option("--data-seed", f.data_seed, "collocation sampling seed");
  cmd->add_option("--init-seed", f.init_seed, "weight init / stochasticity seed");
  cmd->add_option("--guard", f.divergence_guard,
                  "training loss above this marks the run diverged");
  cmd->add_option("--adam.beta1", f.adam.beta1);
  cmd->add_option("--adam.beta2", f.adam.beta2);
  cmd->add_option("--adam.eps", f.adam.eps);
  cmd->add_option("--adam.weight_decay", f.adam.weight_decay);
  cmd->add_option("--adam.minibatch_size", f.adam.minibatch_size);
  cmd->add_option("--lbfgs.max_iter", f.lbfgs.max_iter);
  cmd->add_option("--lbfgs.tolerance_grad", f.lbfgs.tolerance_grad);
  cmd->add_option("--lbfgs.tolerance_change", f.lbfgs.tolerance_change);
  cmd->add_option("--lbfgs.history_size", f.lbfgs.history_size);
  cmd->add_flag("--lbfgs.use_line_search", f.lbfgs.use_line_search);
  cmd->add_option("--bbi.delta_v", f.bbi.delta_v);
  cmd->add_option("--bbi.delta_e", f.bbi.delta_e);
  cmd->add_option("--bbi.n_bounces", f.bbi.n_bounces);
  cmd->add_option("--bbi.t0", f.bbi.t0);
  cmd->add_option("--bbi.t1", f.bbi.t1);
  cmd->add_option("--bbi.progress_threshold", f.bbi.progress_threshold);
  cmd->add_option("--bbi.rescale_energy", f.bbi.rescale_energy);
}

runner::ExperimentConfig to_config(const ExperimentFlags& f) {
  runner::ExperimentConfig cfg;
  cfg.beta = f.beta;
  cfg.arch = runner::arch_from_string(f.arch);
  cfg.optimizer.kind = optim::optimizer_from_string(f.optimizer);
  cfg.optimizer.adam = f.adam;
  cfg.optimizer.lbfgs = f.lbfgs;
  cfg.optimizer.bbi = f.bbi;
  cfg.optimizer.learning_rate =
      std::isnan(f.lr)
          ? runner::tuned_learning_rate(cfg.optimizer.kind, cfg.beta, cfg.arch)
          : f.lr;
  cfg.epochs =
      f.epochs < 0 ? runner::default_epochs(cfg.optimizer.kind, cfg.beta)
                   : f.epochs;
  cfg.data_seed = f.data_seed;
  cfg.init_seed = f.init_seed;
  cfg.divergence_guard = f.divergence_guard;
  cfg.validate();
  return cfg;
}

void persist_run(const analysis::RunRecord& rec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::string file = rec.config.id() + ".csv";
  io::write_run_csv(rec, out_dir / file);
  io::append_manifest(out_dir / "manifest.csv", rec, file);
  std::printf("%s status=%s final_mse=%s\n", file.c_str(),
              analysis::to_string(rec.status).c_str(),
              format_double(rec.final_mse()).c_str());
}

analysis::EpochWindow window_from(int from, int to) {
  analysis::EpochWindow w;
  w.from = from;
  if (to >= 0) w.to = to;
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-informed network optimizer laboratory"};
  app.require_subcommand(1);

  ExperimentFlags train_f, batch_f, grid_f;
  std::string out_train = "runs", out_batch = "runs", out_sum = "runs";
  std::string runs_sum = "runs", runs_plot = "runs", out_plot = "runs";
  int seeds = 10, threads = 1, grid_threads = 1, grid_trials = 5,
      grid_epochs = 1000;
  std::vector<double> grid_lrs = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  int rho_from_sum = 0, rho_to_sum = -1, rho_from_plot = 0, rho_to_plot = -1;

  CLI::App* train = app.add_subcommand("train", "run one training instance");
  add_experiment_flags(train, train_f);
  train->add_option("--out", out_train, "output directory");

  CLI::App* batch = app.add_subcommand("batch", "run N seeds of one config");
  add_experiment_flags(batch, batch_f);
  batch->add_option("--seeds", seeds, "number of init seeds (base, base+1, ...)");
  batch->add_option("--threads", threads, "worker threads");
  batch->add_option("--out", out_batch, "output directory");

  CLI::App* grid = app.add_subcommand("grid", "learning-rate search");
  add_experiment_flags(grid, grid_f);
  grid->add_option("--candidates", grid_lrs, "learning rates to try");
  grid->add_option("--trials", grid_trials, "seeds per candidate");
  grid->add_option("--grid-epochs", grid_epochs, "epochs per trial");
  grid->add_option("--threads", grid_threads, "worker threads");

  CLI::App* summarize =
      app.add_subcommand("summarize", "aggregate a directory of runs");
  summarize->add_option("--runs", runs_sum, "directory with manifest.csv");
  summarize->add_option("--out", out_sum, "where summary.csv/scatter.csv go");
  summarize->add_option("--rho-from", rho_from_sum,
                        "first epoch used for per-run rank correlations");
  summarize->add_option("--rho-to", rho_to_sum,
                        "last epoch used for per-run rank correlations");

  CLI::App* plot = app.add_subcommand("plot", "emit SVG charts for a run dir");
  plot->add_option("--runs", runs_plot, "directory with manifest.csv");
  plot->add_option("--out", out_plot, "where the SVG files go");
  plot->add_option("--rho-from", rho_from_plot);
  plot->add_option("--rho-to", rho_to_plot);

  try {
    app.parse(argc, argv);

    if (train->parsed()) {
      persist_run(runner::run_single(to_config(train_f)), out_train);
    } else if (batch->parsed()) {
      const auto cfg = to_config(batch_f);
      const auto recs = runner::run_batch(cfg, seeds, threads);
      for (const analysis::RunRecord& rec : recs) persist_run(rec, out_batch);
    } else if (grid->parsed()) {
      runner::GridSearchSpec spec;
      spec.candidates = grid_lrs;
      spec.trials = grid_trials;
      spec.epochs = grid_epochs;
      const auto result =
          runner::grid_search(spec, to_config(grid_f), grid_threads);
      std::printf("%12s  %22s  %10s\n", "lr", "mean_final_test_loss",
                  "n_diverged");
      for (const runner::GridCandidate& c : result.table)
        std::printf("%12s  %22s  %10d\n", format_double(c.lr).c_str(),
                    format_double(c.mean_final_test_loss).c_str(),
                    c.n_diverged);
      if (result.best_lr)
        std::printf("best_lr=%s\n", format_double(*result.best_lr).c_str());
      else
        std::printf("best_lr=none (all candidates diverged)\n");
    } else if (summarize->parsed()) {
      const auto runs = io::load_runs(runs_sum);
      const auto window = window_from(rho_from_sum, rho_to_sum);
      fs::create_directories(out_sum);
      io::write_summary_csv(analysis::summarize(runs, window),
                            fs::path(out_sum) / "summary.csv");
      io::write_scatter_csv(analysis::final_scatter(runs, window),
                            fs::path(out_sum) / "scatter.csv");
      std::printf("summarized %zu runs into %s\n", runs.size(),
                  out_sum.c_str());
    } else if (plot->parsed()) {
      const auto runs = io::load_runs(runs_plot);
      const auto window = window_from(rho_from_plot, rho_to_plot);
      fs::create_directories(out_plot);
      viz::emit_plots(analysis::summarize(runs, window),
                      analysis::final_scatter(runs, window), runs, out_plot);
      std::printf("plotted %zu runs into %s\n", runs.size(), out_plot.c_str());
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
