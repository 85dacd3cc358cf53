#ifndef PINNLAB_CONFIG_HPP
#define PINNLAB_CONFIG_HPP

#include <cstdint>
#include <string>

#include "pinnlab/advection.hpp"
#include "pinnlab/optimizers.hpp"

namespace pinnlab::runner {

// The two network sizes used throughout: S has fewer trainable parameters
// than training points, L has more.
enum class Arch { kS, kL };

std::string to_string(Arch arch);
Arch arch_from_string(const std::string& name);
model::MlpArchitecture arch_layers(Arch arch);

struct ExperimentConfig {
  double beta = 1.0;
  Arch arch = Arch::kS;
  optim::OptimizerConfig optimizer;
  int epochs = 5000;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 1;
  model::SamplingConfig sampling;
  double divergence_guard = 1e6;

  void validate() const;  // throws ConfigError
  // Compact identifier carrying optimizer, lr, beta, arch, and both seeds;
  // used for output filenames.
  std::string id() const;
};

// Epoch budget used when the caller does not set one: LBFGS converges well
// before the others, so it gets a shorter budget that grows with beta.
int default_epochs(optim::OptimizerKind kind, double beta);

// Learning rate selected by grid search for each (optimizer, wave speed,
// architecture) combination; used when no explicit rate is given.
double tuned_learning_rate(optim::OptimizerKind kind, double beta, Arch arch);

}  // namespace pinnlab::runner

#endif
