#ifndef PINNLAB_ADVECTION_HPP
#define PINNLAB_ADVECTION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pinnlab/mlp.hpp"
#include "pinnlab/tape.hpp"

namespace pinnlab::model {

// 1-D linear advection u_t + beta u_x = 0 on x in [0, 2pi), t in [0, 1],
// initial condition u(x, 0) = sin x, periodic in x.
struct AdvectionProblem {
  double beta = 1.0;
};

double exact_solution(const AdvectionProblem& problem, double x, double t);

struct Point {
  double x;
  double t;
};

// One view over the three collocation categories.
struct DataSlice {
  std::span<const Point> ic;
  std::span<const Point> bulk;
  std::span<const double> bc_times;
};

// Sampled collocation points, stored train-first within each category.
struct TrainingSet {
  std::vector<Point> ic;
  std::vector<Point> bulk;
  std::vector<double> bc_times;
  std::size_t ic_train = 0;
  std::size_t bulk_train = 0;
  std::size_t bc_train = 0;

  DataSlice train() const;
  DataSlice test() const;
  DataSlice all() const;
  std::size_t train_size() const { return ic_train + bulk_train + bc_train; }
};

struct SamplingConfig {
  int grid_nx = 256;
  int grid_nt = 100;
  int n_ic = 100;
  int n_bulk = 2000;
  int n_bc = 80;
  double train_fraction = 0.8;
};

// Draws the three point sets without replacement from the regular grid
// (x_i = 2pi i / nx, t_j = j / (nt - 1)) and splits each 80/20 in sampled
// order. Fully determined by the seed.
TrainingSet sample_dataset(const AdvectionProblem& problem, std::uint64_t seed,
                           const SamplingConfig& cfg = {});

struct LossBreakdown {
  double ic = 0.0;    // mean squared initial-condition mismatch
  double bulk = 0.0;  // mean squared PDE residual
  double bc = 0.0;    // mean squared periodic-boundary mismatch
  double total = 0.0;
};

// Value-only loss over one slice.
LossBreakdown pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                        const AdvectionProblem& problem, const DataSlice& slice);

// Loss plus parameter gradient. Owns a reusable tape; one instance per
// worker thread. Point subgraphs are recorded, swept, and discarded one at
// a time so the working set stays small.
class PinnLossEvaluator {
 public:
  PinnLossEvaluator(MlpArchitecture arch, AdvectionProblem problem);

  LossBreakdown eval(const ParamVector& params, const DataSlice& slice) const;
  LossBreakdown eval_grad(const ParamVector& params, const DataSlice& slice,
                          std::vector<double>& grad_out);

  const MlpArchitecture& arch() const { return arch_; }
  const AdvectionProblem& problem() const { return problem_; }

 private:
  MlpArchitecture arch_;
  AdvectionProblem problem_;
  ad::Tape2 tape_;
  std::vector<ad::Tape2::Var> param_vars_;
};

// Same loss recorded as a single tape program (every point kept); slower
// path used to cross-check the evaluator.
ad::Tape2::Var taped_pinn_loss(ad::Tape2& tape,
                               std::span<const ad::Tape2::Var> param_vars,
                               const MlpArchitecture& arch,
                               const AdvectionProblem& problem,
                               const DataSlice& slice);

// Mean squared error of a predictor against the exact solution over the
// full regular grid.
double grid_mse_of(const std::function<double(double, double)>& predict,
                   const AdvectionProblem& problem, int nx, int nt);

double grid_mse(const MlpArchitecture& arch, const ParamVector& params,
                const AdvectionProblem& problem, int nx = 256, int nt = 100);

}  // namespace pinnlab::model

#endif
