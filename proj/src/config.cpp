#include "pinnlab/config.hpp"

#include <cmath>

#include "pinnlab/errors.hpp"
#include "pinnlab/numfmt.hpp"

namespace pinnlab::runner {

std::string to_string(Arch arch) {
  return arch == Arch::kS ? "S" : "L";
}

Arch arch_from_string(const std::string& name) {
  if (name == "S" || name == "s") return Arch::kS;
  if (name == "L" || name == "l") return Arch::kL;
  throw ConfigError("unknown architecture name: " + name + " (expected S or L)");
}

model::MlpArchitecture arch_layers(Arch arch) {
  return arch == Arch::kS ? model::MlpArchitecture::small()
                          : model::MlpArchitecture::large();
}

void ExperimentConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("beta must be positive and finite");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(divergence_guard > 0.0))
    throw ConfigError("divergence_guard must be positive");
  optimizer.validate();
  arch_layers(arch).validate();
}

std::string ExperimentConfig::id() const {
  return optim::to_string(optimizer.kind) + "_lr" +
         format_double(optimizer.learning_rate) + "_beta" + format_double(beta) +
         "_" + to_string(arch) + "_d" + std::to_string(data_seed) + "_i" +
         std::to_string(init_seed);
}

int default_epochs(optim::OptimizerKind kind, double beta) {
  if (kind == optim::OptimizerKind::kLbfgs) return beta < 10.0 ? 1000 : 2000;
  return 5000;
}

double tuned_learning_rate(optim::OptimizerKind kind, double beta, Arch arch) {
  using optim::OptimizerKind;
  // Rows: beta 1, 5, 15, 30. Columns: BBI, LBFGS, GD, ADAM.
  static constexpr double kSmall[4][4] = {
      {0.1, 0.1, 0.01, 0.001},
      {0.01, 0.1, 0.01, 0.001},
      {0.01, 0.01, 0.0001, 0.01},
      {0.01, 0.01, 0.001, 0.01},
  };
  static constexpr double kLarge[4][4] = {
      {0.01, 0.1, 0.01, 0.0001},
      {0.01, 0.1, 0.01, 0.001},
      {0.01, 1.0, 0.01, 0.001},
      {0.01, 0.001, 0.001, 0.001},
  };
  int row = -1;
  if (beta == 1.0) row = 0;
  else if (beta == 5.0) row = 1;
  else if (beta == 15.0) row = 2;
  else if (beta == 30.0) row = 3;
  if (row < 0)
    throw ConfigError("no tuned learning rate for beta = " + format_double(beta) +
                      "; pass one explicitly");
  int col = 0;
  switch (kind) {
    case OptimizerKind::kBbi: col = 0; break;
    case OptimizerKind::kLbfgs: col = 1; break;
    case OptimizerKind::kGd: col = 2; break;
    case OptimizerKind::kAdam: col = 3; break;
  }
  return (arch == Arch::kS ? kSmall : kLarge)[row][col];
}

}  // namespace pinnlab::runner
