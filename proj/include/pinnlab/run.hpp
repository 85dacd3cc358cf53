#ifndef PINNLAB_RUN_HPP
#define PINNLAB_RUN_HPP

#include <optional>
#include <vector>

#include "pinnlab/config.hpp"
#include "pinnlab/record.hpp"

namespace pinnlab::runner {

// Trains one network under the configured optimizer, recording losses,
// grid error, and trajectory telemetry once per epoch (row 0 is the state
// before training). Divergence ends the run with a truncated series and
// status, never an exception.
analysis::RunRecord run_single(const ExperimentConfig& config);

// Independent runs with init seeds base .. base+n-1 sharing the data seed;
// results are ordered by seed regardless of scheduling.
std::vector<analysis::RunRecord> run_batch(const ExperimentConfig& config,
                                           int n_seeds, int n_threads = 1);

struct GridSearchSpec {
  std::vector<double> candidates = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  int trials = 5;
  int epochs = 1000;
};

struct GridCandidate {
  double lr = 0.0;
  // Mean over trials of the final total test loss; a diverged trial
  // contributes +inf, taking the whole candidate out of contention.
  double mean_final_test_loss = 0.0;
  int n_diverged = 0;
};

struct GridResult {
  std::optional<double> best_lr;  // empty when every candidate diverged
  std::vector<GridCandidate> table;
};

GridResult grid_search(const GridSearchSpec& spec, const ExperimentConfig& base,
                       int n_threads = 1);

}  // namespace pinnlab::runner

#endif
