#include "pinnlab/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "pinnlab/errors.hpp"

namespace pinnlab::optim {
namespace {

double dot(const Params& a, const Params& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double max_norm(const Params& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void check_finite_grad(const Params& grad) {
  for (double g : grad)
    if (!std::isfinite(g))
      throw DivergenceError("gradient contains a non-finite entry", g);
}

void check_shapes(const Params& params, const Params& grad) {
  if (params.size() != grad.size())
    throw ConfigError("parameter and gradient lengths differ");
}

// Strong-Wolfe step search along d from x0: bracketing by doubling, then
// bisection zoom. Returns the accepted step with its evaluation.
struct WolfeResult {
  double t;
  double loss;
  Params grad;
};

WolfeResult strong_wolfe(const LossGrad& fg, const Params& x0, const Params& d,
                         double f0, const Params& g0, double t_init) {
  constexpr double kC1 = 1e-4;
  constexpr double kC2 = 0.9;
  constexpr int kMaxEvals = 25;
  const double dphi0 = dot(g0, d);

  Params x(x0.size());
  Params g(x0.size());
  const auto eval = [&](double t) {
    for (std::size_t i = 0; i < x0.size(); ++i) x[i] = x0[i] + t * d[i];
    return fg(x, g);
  };

  if (!(dphi0 < 0.0)) {  // not a descent direction; keep the fixed step
    const double f = eval(t_init);
    return {t_init, f, g};
  }

  double t_lo = 0.0, f_lo = f0, dphi_lo = dphi0;
  double t = t_init;
  double t_hi = 0.0, f_hi = 0.0;
  bool bracketed = false;
  int evals = 0;
  double best_t = t_init, best_f = std::numeric_limits<double>::infinity();
  Params best_g;

  while (evals < kMaxEvals) {
    const double f = eval(t);
    ++evals;
    const double dphi = dot(g, d);
    if (f < best_f) {
      best_f = f;
      best_t = t;
      best_g = g;
    }
    if (!bracketed) {
      if (f > f0 + kC1 * t * dphi0 || (evals > 1 && f >= f_lo)) {
        t_hi = t;
        f_hi = f;
        bracketed = true;
      } else if (std::abs(dphi) <= -kC2 * dphi0) {
        return {t, f, g};
      } else if (dphi >= 0.0) {
        t_hi = t_lo;
        f_hi = f_lo;
        t_lo = t;
        f_lo = f;
        dphi_lo = dphi;
        bracketed = true;
      } else {
        t_lo = t;
        f_lo = f;
        dphi_lo = dphi;
        t *= 2.0;
        continue;
      }
    } else {
      if (f > f0 + kC1 * t * dphi0 || f >= f_lo) {
        t_hi = t;
        f_hi = f;
      } else {
        if (std::abs(dphi) <= -kC2 * dphi0) return {t, f, g};
        if (dphi * (t_hi - t_lo) >= 0.0) {
          t_hi = t_lo;
          f_hi = f_lo;
        }
        t_lo = t;
        f_lo = f;
        dphi_lo = dphi;
      }
    }
    t = 0.5 * (t_lo + t_hi);
    if (std::abs(t_hi - t_lo) < 1e-14) break;
  }
  (void)f_hi;
  (void)dphi_lo;
  if (best_g.empty()) {  // no evaluation improved on +inf; fall back
    const double f = eval(t_init);
    return {t_init, f, g};
  }
  return {best_t, best_f, std::move(best_g)};
}

}  // namespace

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kGd: return "gd";
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kLbfgs: return "lbfgs";
    case OptimizerKind::kBbi: return "bbi";
  }
  throw ConfigError("unknown optimizer kind");
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "gd") return OptimizerKind::kGd;
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "lbfgs") return OptimizerKind::kLbfgs;
  if (name == "bbi") return OptimizerKind::kBbi;
  throw ConfigError("unknown optimizer name: " + name);
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (adam.minibatch_size < 1) throw ConfigError("minibatch_size must be >= 1");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw ConfigError("adam betas must lie in [0, 1)");
  if (!(adam.eps > 0.0)) throw ConfigError("adam eps must be positive");
  if (lbfgs.max_iter < 1) throw ConfigError("lbfgs max_iter must be >= 1");
  if (lbfgs.history_size < 1) throw ConfigError("lbfgs history_size must be >= 1");
  if (!(lbfgs.tolerance_grad > 0.0) || !(lbfgs.tolerance_change > 0.0))
    throw ConfigError("lbfgs tolerances must be positive");
  if (bbi.n_bounces < 0) throw ConfigError("bbi n_bounces must be >= 0");
  if (bbi.t0 < 1 || bbi.t1 < 1) throw ConfigError("bbi bounce periods must be >= 1");
  if (!(bbi.delta_e > 0.0)) throw ConfigError("bbi delta_e must be positive");
}

Params gd_step(const Params& params, const Params& grad, double lr) {
  check_shapes(params, grad);
  check_finite_grad(grad);
  Params out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    out[i] = params[i] - lr * grad[i];
  return out;
}

Params adam_step(AdamState& state, const Params& params, const Params& grad,
                 double lr, const AdamConfig& cfg) {
  check_shapes(params, grad);
  check_finite_grad(grad);
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw ConfigError("adam state length does not match parameters");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  Params out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] + cfg.weight_decay * params[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    out[i] = params[i] - lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
  return out;
}

Params lbfgs_direction(const std::deque<LbfgsPair>& history, const Params& grad) {
  Params q = grad;
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    const LbfgsPair& p = history[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  double gamma = 1.0;
  if (!history.empty()) {
    const LbfgsPair& last = history.back();
    gamma = (1.0 / last.rho) / dot(last.y, last.y);
  }
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const LbfgsPair& p = history[k];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] += (alpha[k] - beta) * p.s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

LbfgsResult lbfgs_epoch(LbfgsState& state, Params params, const LossGrad& fg,
                        double lr, const LbfgsConfig& cfg) {
  if (!state.has_eval) {
    state.loss = fg(params, state.grad);
    state.has_eval = true;
  }
  if (max_norm(state.grad) <= cfg.tolerance_grad)
    return {std::move(params), LbfgsStatus::kGradConverged, 0};

  Params step(params.size());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (state.has_prev) {
      Params y(params.size());
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = state.grad[i] - state.prev_grad[i];
      const double sy = dot(state.prev_step, y);
      if (sy > 1e-10) {
        state.history.push_back({state.prev_step, std::move(y), 1.0 / sy});
        while (state.history.size() > static_cast<std::size_t>(cfg.history_size))
          state.history.pop_front();
      }
    }
    const Params d = lbfgs_direction(state.history, state.grad);
    state.prev_grad = state.grad;
    state.has_prev = true;
    try {
      if (cfg.use_line_search) {
        WolfeResult w = strong_wolfe(fg, params, d, state.loss, state.grad, lr);
        for (std::size_t i = 0; i < params.size(); ++i) {
          step[i] = w.t * d[i];
          params[i] += step[i];
        }
        state.loss = w.loss;
        state.grad = std::move(w.grad);
      } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
          step[i] = lr * d[i];
          params[i] += step[i];
        }
        state.loss = fg(params, state.grad);
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError(
          std::string(e.what()) + " (inner iteration " + std::to_string(it) + ")",
          e.offending_value);
    }
    state.prev_step = step;
    if (!std::isfinite(state.loss))
      throw DivergenceError("loss became non-finite (inner iteration " +
                                std::to_string(it) + ")",
                            state.loss);
    if (max_norm(state.grad) <= cfg.tolerance_grad)
      return {std::move(params), LbfgsStatus::kGradConverged, it};
    if (max_norm(step) <= cfg.tolerance_change)
      return {std::move(params), LbfgsStatus::kChangeConverged, it};
  }
  return {std::move(params), LbfgsStatus::kMaxIter, cfg.max_iter};
}

BbiState bbi_init(const Params& params, const LossGrad& fg, const BbiConfig& cfg) {
  Params grad(params.size());
  const double v0 = fg(params, grad) + cfg.delta_v;
  if (!std::isfinite(v0))
    throw DivergenceError("initial objective is non-finite", v0);
  if (!(v0 > 0.0))
    throw ConfigError("initial objective plus delta_v must be positive");
  const double gnorm = std::sqrt(dot(grad, grad));
  if (gnorm == 0.0)
    throw DomainError("zero gradient at the start point, direction undefined");
  BbiState state;
  state.energy = v0 + cfg.delta_e;
  state.v0 = v0;
  const double pnorm = std::sqrt(state.energy * state.energy / v0 - v0);
  state.momentum.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    state.momentum[i] = -grad[i] / gnorm * pnorm;
  return state;
}

Params bbi_step(BbiState& state, const Params& params, const Params& grad,
                double loss, double lr, const BbiConfig& cfg) {
  check_shapes(params, grad);
  if (state.momentum.size() != params.size())
    throw ConfigError("bbi momentum length does not match parameters");
  const double v = loss + cfg.delta_v;
  if (!std::isfinite(v))
    throw DivergenceError("objective is non-finite", v);
  if (!(v > 0.0)) throw DomainError("objective plus delta_v must stay positive");
  check_finite_grad(grad);

  const double e = state.energy;
  const double momentum_factor = 0.5 * lr * (v / e + e / v);
  for (std::size_t i = 0; i < params.size(); ++i)
    state.momentum[i] -= momentum_factor * grad[i];

  if (cfg.rescale_energy) {
    const double target_sq = e * e / v - v;
    const double norm = std::sqrt(dot(state.momentum, state.momentum));
    if (target_sq > 0.0 && norm > 0.0) {
      const double scale = std::sqrt(target_sq) / norm;
      for (double& m : state.momentum) m *= scale;
    }
  }

  const double position_factor = lr * v / e;
  Params out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i] = params[i] + position_factor * state.momentum[i];
    if (!std::isfinite(out[i]))
      throw DivergenceError("parameters became non-finite", out[i]);
  }
  return out;
}

BounceResult bbi_bounce(BbiState& state, Rng& rng, const BbiConfig& cfg) {
  if (state.momentum.empty()) throw ConfigError("bbi state is uninitialized");
  if (state.bounces_used >= cfg.n_bounces) return BounceResult::kExhausted;
  const double norm = std::sqrt(dot(state.momentum, state.momentum));
  Params fresh(state.momentum.size());
  double fresh_norm_sq = 0.0;
  for (double& z : fresh) {
    z = rng.normal();
    fresh_norm_sq += z * z;
  }
  const double fresh_norm = std::sqrt(fresh_norm_sq);
  const double scale = fresh_norm > 0.0 ? norm / fresh_norm : 0.0;
  for (std::size_t i = 0; i < fresh.size(); ++i)
    state.momentum[i] = fresh[i] * scale;
  state.bounces_used += 1;
  state.steps_since_bounce = 0;
  state.recent_losses.clear();
  return BounceResult::kBounced;
}

bool bbi_should_bounce(const BbiState& state, const BbiConfig& cfg) {
  if (state.bounces_used >= cfg.n_bounces) return false;
  if (state.steps_since_bounce >= cfg.t0) return true;
  if (state.recent_losses.size() == static_cast<std::size_t>(cfg.t1) + 1) {
    const double oldest = state.recent_losses.front();
    const double newest = state.recent_losses.back();
    if (oldest - newest < cfg.progress_threshold * std::abs(oldest)) return true;
  }
  return false;
}

Params bbi_advance(BbiState& state, const Params& params, const Params& grad,
                   double loss, double lr, const BbiConfig& cfg, Rng& rng) {
  Params out = bbi_step(state, params, grad, loss, lr, cfg);
  state.steps_since_bounce += 1;
  state.recent_losses.push_back(loss);
  while (state.recent_losses.size() > static_cast<std::size_t>(cfg.t1) + 1)
    state.recent_losses.pop_front();
  if (bbi_should_bounce(state, cfg)) bbi_bounce(state, rng, cfg);
  return out;
}

double bbi_energy_residual(const BbiState& state, double loss,
                           const BbiConfig& cfg) {
  const double v = loss + cfg.delta_v;
  return v * (dot(state.momentum, state.momentum) + v) -
         state.energy * state.energy;
}

}  // namespace pinnlab::optim
