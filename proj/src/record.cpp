#include "pinnlab/record.hpp"

#include <limits>

#include "pinnlab/errors.hpp"

namespace pinnlab::analysis {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kExhaustedEpochs: return "exhausted-epochs";
    case RunStatus::kConverged: return "converged";
    case RunStatus::kDiverged: return "diverged";
  }
  throw ConfigError("unknown run status");
}

RunStatus run_status_from_string(const std::string& name) {
  if (name == "exhausted-epochs") return RunStatus::kExhaustedEpochs;
  if (name == "converged") return RunStatus::kConverged;
  if (name == "diverged") return RunStatus::kDiverged;
  throw ConfigError("unknown run status: " + name);
}

double RunRecord::final_mse() const {
  if (status == RunStatus::kDiverged || rows.empty())
    return std::numeric_limits<double>::infinity();
  return rows.back().mse;
}

std::optional<double> RunRecord::final_kappa_omega() const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    if (it->curvature && it->curvature->kappa_omega)
      return it->curvature->kappa_omega;
  return std::nullopt;
}

std::optional<double> RunRecord::final_kappa_t() const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    if (it->curvature && it->curvature->kappa_t) return it->curvature->kappa_t;
  return std::nullopt;
}

}  // namespace pinnlab::analysis
