#ifndef PINNLAB_RECORD_HPP
#define PINNLAB_RECORD_HPP

#include <optional>
#include <string>
#include <vector>

#include "pinnlab/advection.hpp"
#include "pinnlab/config.hpp"
#include "pinnlab/curvature.hpp"

namespace pinnlab::analysis {

enum class RunStatus { kExhaustedEpochs, kConverged, kDiverged };

std::string to_string(RunStatus status);
RunStatus run_status_from_string(const std::string& name);

// One recorded epoch: losses at the epoch's parameters, full-grid error,
// and trajectory telemetry (absent for the first two epochs and for
// zero-length steps).
struct EpochRow {
  int epoch = 0;
  model::LossBreakdown train;
  model::LossBreakdown test;
  double mse = 0.0;
  std::optional<geom::CurvatureSample> curvature;
};

// Everything one training run produced. Row 0 is the evaluation at the
// initial parameters; a diverged run's series is truncated at the last
// healthy epoch.
struct RunRecord {
  runner::ExperimentConfig config;
  std::vector<EpochRow> rows;
  RunStatus status = RunStatus::kExhaustedEpochs;

  // Grid MSE at the last recorded epoch; +inf for a diverged run so that
  // aggregations rank it behind every finished one.
  double final_mse() const;
  // Last defined values, scanning backwards; absent when no step defined them.
  std::optional<double> final_kappa_omega() const;
  std::optional<double> final_kappa_t() const;
};

}  // namespace pinnlab::analysis

#endif
