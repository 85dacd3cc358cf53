#ifndef PINNLAB_MLP_HPP
#define PINNLAB_MLP_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinnlab/dual.hpp"
#include "pinnlab/tape.hpp"

namespace pinnlab::model {

// Flat vector of all trainable parameters. Layout: per layer, weight matrix
// row-major (out x in), then that layer's biases.
using ParamVector = std::vector<double>;

// Fully-connected tanh network with 2 inputs (x, t), one output, linear
// output layer.
struct MlpArchitecture {
  std::vector<int> layer_sizes;

  static MlpArchitecture small() { return {{2, 25, 25, 1}}; }
  static MlpArchitecture large() { return {{2, 50, 50, 50, 50, 1}}; }

  int n_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  void validate() const;  // throws ConfigError on a malformed shape
};

int param_count(const MlpArchitecture& arch);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed);

void check_params(const MlpArchitecture& arch, const ParamVector& params);

double forward(const MlpArchitecture& arch, const ParamVector& params,
               double x, double t);

// Single forward pass carrying both input tangents (d/dx, d/dt).
ad::Dual2 forward_dual(const MlpArchitecture& arch, const ParamVector& params,
                       ad::Dual2 x, ad::Dual2 t);

// Records the network evaluation on a tape whose leaves for the parameters
// were created by the caller (one Var per entry of the flat layout).
ad::Tape2::Var taped_forward(ad::Tape2& tape, const MlpArchitecture& arch,
                             std::span<const ad::Tape2::Var> param_vars,
                             ad::Tape2::Var x, ad::Tape2::Var t);

// Evaluates the network on many points at once (Eigen-backed); out must have
// xs.size() entries. Used for full-grid error evaluation.
void batched_forward(const MlpArchitecture& arch, const ParamVector& params,
                     std::span<const double> xs, std::span<const double> ts,
                     std::span<double> out);

}  // namespace pinnlab::model

#endif
