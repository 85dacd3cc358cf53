#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "pinnlab/advection.hpp"
#include "pinnlab/autodiff.hpp"
#include "pinnlab/errors.hpp"
#include "pinnlab/rng.hpp"

using namespace pinnlab;
using model::AdvectionProblem;
using model::MlpArchitecture;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool on_x_grid(double x, int nx) {
  for (int i = 0; i < nx; ++i)
    if (x == kTwoPi * i / nx) return true;
  return false;
}

bool on_t_grid(double t, int nt) {
  const double dt = 1.0 / (nt - 1);
  for (int j = 0; j < nt; ++j)
    if (t == j * dt) return true;
  return false;
}

}  // namespace

TEST_SUITE("advection") {

TEST_CASE("exact solution is the advected sine") {
  const AdvectionProblem p{3.0};
  CHECK(model::exact_solution(p, 1.0, 0.0) == doctest::Approx(std::sin(1.0)));
  CHECK(model::exact_solution(p, 1.0, 0.5) ==
        doctest::Approx(std::sin(1.0 - 1.5)));
  const AdvectionProblem q{1.0};
  CHECK(model::exact_solution(q, 0.0, 0.0) == 0.0);
}

TEST_CASE("dataset has the configured shape and split") {
  const auto data = model::sample_dataset(AdvectionProblem{1.0}, 1);
  CHECK(data.ic.size() == 100);
  CHECK(data.bulk.size() == 2000);
  CHECK(data.bc_times.size() == 80);
  CHECK(data.ic_train == 80);
  CHECK(data.bulk_train == 1600);
  CHECK(data.bc_train == 64);
  CHECK(data.train_size() == 1744);

  const auto train = data.train();
  const auto test = data.test();
  CHECK(train.ic.size() == 80);
  CHECK(test.ic.size() == 20);
  CHECK(train.bulk.size() == 1600);
  CHECK(test.bulk.size() == 400);
  CHECK(train.bc_times.size() == 64);
  CHECK(test.bc_times.size() == 16);
  CHECK(data.all().ic.size() == 100);
}

TEST_CASE("points sit on the sampling grid without duplicates") {
  const auto data = model::sample_dataset(AdvectionProblem{1.0}, 9);
  std::set<double> ic_xs;
  for (const auto& p : data.ic) {
    CHECK(p.t == 0.0);
    CHECK(on_x_grid(p.x, 256));
    ic_xs.insert(p.x);
  }
  CHECK(ic_xs.size() == data.ic.size());

  std::set<std::pair<double, double>> bulk;
  for (const auto& p : data.bulk) {
    CHECK(on_x_grid(p.x, 256));
    CHECK(on_t_grid(p.t, 100));
    bulk.insert({p.x, p.t});
  }
  CHECK(bulk.size() == data.bulk.size());

  std::set<double> times;
  for (double t : data.bc_times) {
    CHECK(on_t_grid(t, 100));
    times.insert(t);
  }
  CHECK(times.size() == data.bc_times.size());
}

TEST_CASE("sampling is seed-deterministic") {
  const auto a = model::sample_dataset(AdvectionProblem{1.0}, 4);
  const auto b = model::sample_dataset(AdvectionProblem{1.0}, 4);
  const auto c = model::sample_dataset(AdvectionProblem{1.0}, 5);
  CHECK(a.bulk.size() == b.bulk.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.bulk.size(); ++i) {
    same = same && a.bulk[i].x == b.bulk[i].x && a.bulk[i].t == b.bulk[i].t;
    differs = differs || a.bulk[i].x != c.bulk[i].x || a.bulk[i].t != c.bulk[i].t;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("oversampling requests are rejected") {
  model::SamplingConfig cfg;
  cfg.n_ic = 300;  // only 256 x-gridpoints exist
  CHECK_THROWS_AS(model::sample_dataset(AdvectionProblem{1.0}, 1, cfg),
                  ConfigError);
  cfg = {};
  cfg.n_bc = 150;  // only 100 t-gridpoints exist
  CHECK_THROWS_AS(model::sample_dataset(AdvectionProblem{1.0}, 1, cfg),
                  ConfigError);
  cfg = {};
  cfg.n_bulk = 26000;
  CHECK_THROWS_AS(model::sample_dataset(AdvectionProblem{1.0}, 1, cfg),
                  ConfigError);
  cfg = {};
  cfg.train_fraction = 1.5;
  CHECK_THROWS_AS(model::sample_dataset(AdvectionProblem{1.0}, 1, cfg),
                  ConfigError);
}

TEST_CASE("zero network isolates the initial-condition term") {
  const auto arch = MlpArchitecture{{2, 3, 1}};
  const model::ParamVector zeros(model::param_count(arch), 0.0);
  const AdvectionProblem problem{2.0};
  const auto data = model::sample_dataset(problem, 2);
  const auto slice = data.train();
  const auto lb = model::pinn_loss(arch, zeros, problem, slice);
  double expect_ic = 0.0;
  for (const auto& p : slice.ic) expect_ic += std::sin(p.x) * std::sin(p.x);
  expect_ic /= static_cast<double>(slice.ic.size());
  CHECK(lb.ic == doctest::Approx(expect_ic).epsilon(1e-14));
  CHECK(lb.bulk == 0.0);
  CHECK(lb.bc == 0.0);
  CHECK(lb.total == lb.ic);
}

TEST_CASE("loss breakdown sums to the total") {
  const auto arch = MlpArchitecture{{2, 4, 1}};
  const auto params = model::init_params(arch, 3);
  const AdvectionProblem problem{1.0};
  const auto data = model::sample_dataset(problem, 3);
  const auto lb = model::pinn_loss(arch, params, problem, data.train());
  CHECK(lb.total == doctest::Approx(lb.ic + lb.bulk + lb.bc).epsilon(1e-15));
  CHECK(lb.ic > 0.0);
  CHECK(lb.bulk > 0.0);
  CHECK(lb.bc > 0.0);
}

TEST_CASE("evaluator losses equal the free-function losses") {
  const auto arch = MlpArchitecture{{2, 5, 1}};
  const auto params = model::init_params(arch, 21);
  const AdvectionProblem problem{5.0};
  const auto data = model::sample_dataset(problem, 7);
  model::PinnLossEvaluator ev(arch, problem);
  const auto a = ev.eval(params, data.train());
  const auto b = model::pinn_loss(arch, params, problem, data.train());
  CHECK(a.ic == b.ic);
  CHECK(a.bulk == b.bulk);
  CHECK(a.bc == b.bc);
  CHECK(a.total == b.total);
}

TEST_CASE("evaluator gradient matches finite differences and the full tape") {
  const auto arch = MlpArchitecture{{2, 5, 1}};
  auto params = model::init_params(arch, 11);
  Rng jitter(99);
  for (auto& p : params) p += jitter.uniform(-0.2, 0.2);
  const AdvectionProblem problem{1.5};
  model::SamplingConfig cfg;
  cfg.n_ic = 6;
  cfg.n_bulk = 10;
  cfg.n_bc = 5;
  const auto data = model::sample_dataset(problem, 5, cfg);
  const auto slice = data.train();

  model::PinnLossEvaluator ev(arch, problem);
  std::vector<double> grad;
  const auto lb = ev.eval_grad(params, slice, grad);
  const auto value_only = ev.eval(params, slice);
  CHECK(lb.total == doctest::Approx(value_only.total).epsilon(1e-13));

  // Independent oracle 1: central differences of the value-only loss.
  const ad::PlainLoss plain = [&](const std::vector<double>& p) {
    return model::pinn_loss(arch, p, problem, slice).total;
  };
  const auto fd = ad::finite_diff_gradient(plain, params, 1e-5);
  REQUIRE(fd.size() == grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double rel = std::abs(grad[i] - fd[i]) /
                       std::max({std::abs(grad[i]), std::abs(fd[i]), 1e-4});
    CHECK(rel < 1e-5);
  }

  // Independent oracle 2: the single-graph tape of the same loss.
  const ad::TapedLoss taped = [&](ad::Tape2& tape,
                                  std::span<const ad::Tape2::Var> vars) {
    return model::taped_pinn_loss(tape, vars, arch, problem, slice);
  };
  const auto [tv, tg] = ad::value_and_grad_params(taped, params);
  CHECK(tv == doctest::Approx(lb.total).epsilon(1e-13));
  for (std::size_t i = 0; i < grad.size(); ++i)
    CHECK(grad[i] == doctest::Approx(tg[i]).epsilon(1e-12));
}

TEST_CASE("grid error vanishes for the exact solution and scales for offsets") {
  const AdvectionProblem problem{2.0};
  const auto exact = [&](double x, double t) {
    return model::exact_solution(problem, x, t);
  };
  CHECK(model::grid_mse_of(exact, problem, 64, 20) == doctest::Approx(0.0));
  const auto shifted = [&](double x, double t) {
    return model::exact_solution(problem, x, t) + 0.1;
  };
  CHECK(model::grid_mse_of(shifted, problem, 64, 20) ==
        doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("network grid error equals the generic path") {
  const auto arch = MlpArchitecture{{2, 4, 1}};
  const auto params = model::init_params(arch, 31);
  const AdvectionProblem problem{1.0};
  const auto via_network = model::grid_mse(arch, params, problem, 32, 10);
  const auto via_predictor = model::grid_mse_of(
      [&](double x, double t) { return model::forward(arch, params, x, t); },
      problem, 32, 10);
  CHECK(via_network == doctest::Approx(via_predictor).epsilon(1e-12));
}

TEST_CASE("non-finite parameters raise divergence in the loss") {
  const auto arch = MlpArchitecture{{2, 3, 1}};
  model::ParamVector params(model::param_count(arch), 0.0);
  params[0] = std::numeric_limits<double>::quiet_NaN();
  const AdvectionProblem problem{1.0};
  const auto data = model::sample_dataset(problem, 2);
  CHECK_THROWS_AS(model::pinn_loss(arch, params, problem, data.train()),
                  DivergenceError);
}

}  // TEST_SUITE
