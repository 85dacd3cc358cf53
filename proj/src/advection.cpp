#include "pinnlab/advection.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

#include "pinnlab/errors.hpp"
#include "pinnlab/rng.hpp"

namespace pinnlab::model {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Draws k distinct indices from [0, n) in sampled order.
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n,
                                                      std::uint32_t k, Rng& rng) {
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

void check_slice(const DataSlice& slice) {
  if (slice.ic.empty() || slice.bulk.empty() || slice.bc_times.empty())
    throw ConfigError("loss slice has an empty point category");
}

}  // namespace

double exact_solution(const AdvectionProblem& problem, double x, double t) {
  return std::sin(x - problem.beta * t);
}

DataSlice TrainingSet::train() const {
  return {std::span(ic).first(ic_train), std::span(bulk).first(bulk_train),
          std::span(bc_times).first(bc_train)};
}

DataSlice TrainingSet::test() const {
  return {std::span(ic).subspan(ic_train), std::span(bulk).subspan(bulk_train),
          std::span(bc_times).subspan(bc_train)};
}

DataSlice TrainingSet::all() const {
  return {std::span(ic), std::span(bulk), std::span(bc_times)};
}

TrainingSet sample_dataset(const AdvectionProblem& problem, std::uint64_t seed,
                           const SamplingConfig& cfg) {
  (void)problem;
  if (cfg.grid_nx < 1 || cfg.grid_nt < 2)
    throw ConfigError("sampling grid needs nx >= 1 and nt >= 2");
  if (cfg.n_ic < 1 || cfg.n_bulk < 1 || cfg.n_bc < 1)
    throw ConfigError("every point category needs at least one sample");
  if (cfg.n_ic > cfg.grid_nx) throw ConfigError("n_ic exceeds the x grid");
  if (cfg.n_bulk > cfg.grid_nx * cfg.grid_nt)
    throw ConfigError("n_bulk exceeds the space-time grid");
  if (cfg.n_bc > cfg.grid_nt) throw ConfigError("n_bc exceeds the t grid");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw ConfigError("train_fraction must lie strictly between 0 and 1");

  const auto nx = static_cast<std::uint32_t>(cfg.grid_nx);
  const auto nt = static_cast<std::uint32_t>(cfg.grid_nt);
  const double dt = 1.0 / (cfg.grid_nt - 1);

  Rng rng(seed, Rng::Stream::kDataSampling);
  TrainingSet set;

  for (std::uint32_t i :
       sample_without_replacement(nx, static_cast<std::uint32_t>(cfg.n_ic), rng))
    set.ic.push_back({kTwoPi * i / cfg.grid_nx, 0.0});
  for (std::uint32_t idx : sample_without_replacement(
           nx * nt, static_cast<std::uint32_t>(cfg.n_bulk), rng))
    set.bulk.push_back({kTwoPi * (idx % nx) / cfg.grid_nx, (idx / nx) * dt});
  for (std::uint32_t j :
       sample_without_replacement(nt, static_cast<std::uint32_t>(cfg.n_bc), rng))
    set.bc_times.push_back(j * dt);

  const auto split = [&](std::size_t n) {
    auto k = static_cast<std::size_t>(std::llround(cfg.train_fraction * n));
    if (k < 1) k = 1;
    if (k >= n) k = n - 1;
    return k;
  };
  set.ic_train = split(set.ic.size());
  set.bulk_train = split(set.bulk.size());
  set.bc_train = split(set.bc_times.size());
  return set;
}

LossBreakdown pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                        const AdvectionProblem& problem, const DataSlice& slice) {
  check_params(arch, params);
  check_slice(slice);
  LossBreakdown out;
  double acc = 0.0;
  for (const Point& p : slice.ic) {
    const double d = forward(arch, params, p.x, p.t) - std::sin(p.x);
    acc += d * d;
  }
  out.ic = acc / static_cast<double>(slice.ic.size());
  acc = 0.0;
  for (const Point& p : slice.bulk) {
    const ad::Dual2 u = forward_dual(arch, params, ad::Dual2::seeded(p.x, 0),
                                     ad::Dual2::seeded(p.t, 1));
    const double r = u.tangent[1] + problem.beta * u.tangent[0];
    acc += r * r;
  }
  out.bulk = acc / static_cast<double>(slice.bulk.size());
  acc = 0.0;
  for (const double t : slice.bc_times) {
    const double d =
        forward(arch, params, 0.0, t) - forward(arch, params, kTwoPi, t);
    acc += d * d;
  }
  out.bc = acc / static_cast<double>(slice.bc_times.size());
  out.total = out.ic + out.bulk + out.bc;
  if (!std::isfinite(out.total))
    throw DivergenceError("loss evaluated to a non-finite value", out.total);
  return out;
}

PinnLossEvaluator::PinnLossEvaluator(MlpArchitecture arch, AdvectionProblem problem)
    : arch_(std::move(arch)), problem_(problem) {
  arch_.validate();
  tape_.reserve(4 * static_cast<std::size_t>(param_count(arch_)) + 1024);
}

LossBreakdown PinnLossEvaluator::eval(const ParamVector& params,
                                      const DataSlice& slice) const {
  return pinn_loss(arch_, params, problem_, slice);
}

LossBreakdown PinnLossEvaluator::eval_grad(const ParamVector& params,
                                           const DataSlice& slice,
                                           std::vector<double>& grad_out) {
  check_params(arch_, params);
  check_slice(slice);
  using Tape = ad::Tape2;
  using Var = Tape::Var;

  tape_.clear();
  param_vars_.clear();
  param_vars_.reserve(params.size());
  for (double p : params) param_vars_.push_back(tape_.leaf(ad::Dual2::constant(p)));
  const Var beta = tape_.constant(problem_.beta);
  tape_.begin_accumulation();

  LossBreakdown out;
  double acc = 0.0;
  const double w_ic = 1.0 / static_cast<double>(slice.ic.size());
  for (const Point& p : slice.ic) {
    tape_.rewind();
    const Var x = tape_.constant(p.x);
    const Var t = tape_.constant(p.t);
    const Var u = taped_forward(tape_, arch_, param_vars_, x, t);
    const Var sq = tape_.square(
        tape_.sub(u, tape_.constant(std::sin(p.x))));
    acc += tape_.val(sq).value;
    tape_.backward_accumulate(sq, w_ic);
  }
  out.ic = acc * w_ic;

  acc = 0.0;
  const double w_bulk = 1.0 / static_cast<double>(slice.bulk.size());
  for (const Point& p : slice.bulk) {
    tape_.rewind();
    const Var x = tape_.leaf(ad::Dual2::seeded(p.x, 0));
    const Var t = tape_.leaf(ad::Dual2::seeded(p.t, 1));
    const Var u = taped_forward(tape_, arch_, param_vars_, x, t);
    const Var res =
        tape_.add(tape_.tangent(u, 1), tape_.mul(beta, tape_.tangent(u, 0)));
    const Var sq = tape_.square(res);
    acc += tape_.val(sq).value;
    tape_.backward_accumulate(sq, w_bulk);
  }
  out.bulk = acc * w_bulk;

  acc = 0.0;
  const double w_bc = 1.0 / static_cast<double>(slice.bc_times.size());
  for (const double tv : slice.bc_times) {
    tape_.rewind();
    const Var x0 = tape_.constant(0.0);
    const Var x1 = tape_.constant(kTwoPi);
    const Var t = tape_.constant(tv);
    const Var u0 = taped_forward(tape_, arch_, param_vars_, x0, t);
    const Var u1 = taped_forward(tape_, arch_, param_vars_, x1, t);
    const Var sq = tape_.square(tape_.sub(u0, u1));
    acc += tape_.val(sq).value;
    tape_.backward_accumulate(sq, w_bc);
  }
  out.bc = acc * w_bc;

  out.total = out.ic + out.bulk + out.bc;
  if (!std::isfinite(out.total))
    throw DivergenceError("loss evaluated to a non-finite value", out.total);

  grad_out.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    grad_out[i] = tape_.adjoint(param_vars_[i]).value;
  return out;
}

ad::Tape2::Var taped_pinn_loss(ad::Tape2& tape,
                               std::span<const ad::Tape2::Var> param_vars,
                               const MlpArchitecture& arch,
                               const AdvectionProblem& problem,
                               const DataSlice& slice) {
  check_slice(slice);
  using Var = ad::Tape2::Var;
  std::vector<Var> sq;

  for (const Point& p : slice.ic) {
    const Var x = tape.constant(p.x);
    const Var t = tape.constant(p.t);
    const Var u = taped_forward(tape, arch, param_vars, x, t);
    sq.push_back(tape.square(
        tape.sub(u, tape.constant(std::sin(p.x)))));
  }
  const Var ic = tape.mean(sq.data(), static_cast<std::uint32_t>(sq.size()));

  const Var beta = tape.constant(problem.beta);
  sq.clear();
  for (const Point& p : slice.bulk) {
    const Var x = tape.leaf(ad::Dual2::seeded(p.x, 0));
    const Var t = tape.leaf(ad::Dual2::seeded(p.t, 1));
    const Var u = taped_forward(tape, arch, param_vars, x, t);
    const Var res =
        tape.add(tape.tangent(u, 1), tape.mul(beta, tape.tangent(u, 0)));
    sq.push_back(tape.square(res));
  }
  const Var bulk = tape.mean(sq.data(), static_cast<std::uint32_t>(sq.size()));

  sq.clear();
  for (const double tv : slice.bc_times) {
    const Var x0 = tape.constant(0.0);
    const Var x1 = tape.constant(kTwoPi);
    const Var t = tape.constant(tv);
    const Var u0 = taped_forward(tape, arch, param_vars, x0, t);
    const Var u1 = taped_forward(tape, arch, param_vars, x1, t);
    sq.push_back(tape.square(tape.sub(u0, u1)));
  }
  const Var bc = tape.mean(sq.data(), static_cast<std::uint32_t>(sq.size()));

  return tape.add(tape.add(ic, bulk), bc);
}

double grid_mse_of(const std::function<double(double, double)>& predict,
                   const AdvectionProblem& problem, int nx, int nt) {
  if (nx < 1 || nt < 2) throw ConfigError("grid needs nx >= 1 and nt >= 2");
  const double dt = 1.0 / (nt - 1);
  double acc = 0.0;
  for (int j = 0; j < nt; ++j) {
    const double t = j * dt;
    for (int i = 0; i < nx; ++i) {
      const double x = kTwoPi * i / nx;
      const double d = predict(x, t) - exact_solution(problem, x, t);
      acc += d * d;
    }
  }
  const double mse = acc / (static_cast<double>(nx) * nt);
  if (!std::isfinite(mse))
    throw DivergenceError("grid error evaluated to a non-finite value", mse);
  return mse;
}

double grid_mse(const MlpArchitecture& arch, const ParamVector& params,
                const AdvectionProblem& problem, int nx, int nt) {
  check_params(arch, params);
  if (nx < 1 || nt < 2) throw ConfigError("grid needs nx >= 1 and nt >= 2");
  const double dt = 1.0 / (nt - 1);
  const std::size_t n = static_cast<std::size_t>(nx) * nt;
  std::vector<double> xs(n), ts(n), us(n);
  std::size_t k = 0;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i, ++k) {
      xs[k] = kTwoPi * i / nx;
      ts[k] = j * dt;
    }
  batched_forward(arch, params, xs, ts, us);
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double d = us[m] - exact_solution(problem, xs[m], ts[m]);
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(n);
  if (!std::isfinite(mse))
    throw DivergenceError("grid error evaluated to a non-finite value", mse);
  return mse;
}

}  // namespace pinnlab::model
