#ifndef PINNLAB_OPTIMIZERS_HPP
#define PINNLAB_OPTIMIZERS_HPP

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "pinnlab/rng.hpp"

namespace pinnlab::optim {

using Params = std::vector<double>;

// Evaluates the objective at params and fills grad_out; returns the value.
using LossGrad = std::function<double(const Params&, Params&)>;

enum class OptimizerKind { kGd, kAdam, kLbfgs, kBbi };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  int minibatch_size = 400;
};

struct LbfgsConfig {
  int max_iter = 20;
  double tolerance_grad = 1e-7;
  double tolerance_change = 1e-9;
  int history_size = 100;
  bool use_line_search = false;  // strong Wolfe when set; fixed step otherwise
};

struct BbiConfig {
  double delta_v = 0.0;  // shift added to the objective so it stays positive
  double delta_e = 2.0;  // energy margin above the initial potential
  int n_bounces = 4;
  int t0 = 500;                      // fixed bounce period in steps
  int t1 = 100;                      // trailing window for the progress trigger
  double progress_threshold = 1e-3;  // relative decrease below this stalls
  bool rescale_energy = true;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kGd;
  double learning_rate = 1e-3;
  AdamConfig adam;
  LbfgsConfig lbfgs;
  BbiConfig bbi;

  void validate() const;  // throws ConfigError
};

Params gd_step(const Params& params, const Params& grad, double lr);

struct AdamState {
  Params m;
  Params v;
  long step = 0;
};

Params adam_step(AdamState& state, const Params& params, const Params& grad,
                 double lr, const AdamConfig& cfg);

struct LbfgsPair {
  Params s;
  Params y;
  double rho;  // 1 / <s, y>
};

struct LbfgsState {
  std::deque<LbfgsPair> history;
  Params prev_grad;
  Params prev_step;
  bool has_prev = false;
  // Cached evaluation at the current params, valid when has_eval is set;
  // avoids re-evaluating at epoch boundaries.
  double loss = 0.0;
  Params grad;
  bool has_eval = false;
};

enum class LbfgsStatus { kMaxIter, kGradConverged, kChangeConverged };

struct LbfgsResult {
  Params params;
  LbfgsStatus status = LbfgsStatus::kMaxIter;
  int iterations = 0;
};

// Two-loop recursion; empty history gives steepest descent.
Params lbfgs_direction(const std::deque<LbfgsPair>& history, const Params& grad);

// Runs up to max_iter quasi-Newton iterations with fixed step length lr
// (or a strong-Wolfe search when configured). Stops early on the gradient
// or parameter-change tolerance, both in max-norm.
LbfgsResult lbfgs_epoch(LbfgsState& state, Params params, const LossGrad& fg,
                        double lr, const LbfgsConfig& cfg);

struct BbiState {
  Params momentum;
  double energy = 0.0;  // fixed at init, never mutated afterwards
  double v0 = 0.0;
  int steps_since_bounce = 0;
  int bounces_used = 0;
  std::deque<double> recent_losses;
};

// Sets E = V0 + delta_e and the initial momentum antiparallel to the
// gradient with |momentum|^2 = E^2/V0 - V0.
BbiState bbi_init(const Params& params, const LossGrad& fg, const BbiConfig& cfg);

// One energy-conserving update: momentum first, then position using the
// new momentum; with rescale_energy the momentum is rescaled onto the
// shell V*(|momentum|^2 + V) = E^2 before the position update.
Params bbi_step(BbiState& state, const Params& params, const Params& grad,
                double loss, double lr, const BbiConfig& cfg);

enum class BounceResult { kBounced, kExhausted };

// Replaces the momentum by an isotropically random vector of equal norm;
// a no-op once the bounce budget is spent.
BounceResult bbi_bounce(BbiState& state, Rng& rng, const BbiConfig& cfg);

bool bbi_should_bounce(const BbiState& state, const BbiConfig& cfg);

// Step plus bounce bookkeeping: pushes the loss into the trailing window,
// fires a bounce when the fixed period elapses or progress stalls.
Params bbi_advance(BbiState& state, const Params& params, const Params& grad,
                   double loss, double lr, const BbiConfig& cfg, Rng& rng);

// V*(|momentum|^2 + V) - E^2 at the given potential value; zero when the
// motion sits exactly on the energy shell.
double bbi_energy_residual(const BbiState& state, double loss,
                           const BbiConfig& cfg);

}  // namespace pinnlab::optim

#endif
