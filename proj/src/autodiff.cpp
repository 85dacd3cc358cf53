#include "pinnlab/autodiff.hpp"

#include <cmath>

#include "pinnlab/errors.hpp"

namespace pinnlab::ad {

InputDerivs eval_with_input_derivs(const model::MlpArchitecture& arch,
                                   const model::ParamVector& params,
                                   double x, double t) {
  model::check_params(arch, params);
  if (!std::isfinite(x) || !std::isfinite(t))
    throw ConfigError("eval_with_input_derivs: inputs must be finite");
  const Dual2 u = model::forward_dual(arch, params, Dual2::seeded(x, 0),
                                      Dual2::seeded(t, 1));
  return {u.value, u.tangent[0], u.tangent[1]};
}

std::pair<double, std::vector<double>> value_and_grad_params(
    const TapedLoss& loss, const std::vector<double>& params) {
  Tape2 tape;
  tape.reserve(16 * params.size() + 64);
  std::vector<Tape2::Var> vars;
  vars.reserve(params.size());
  for (double p : params) vars.push_back(tape.leaf(Dual2::constant(p)));
  const Tape2::Var out = loss(tape, vars);
  const double value = tape.val(out).value;
  if (!std::isfinite(value))
    throw DivergenceError("taped loss evaluated to a non-finite value", value);
  tape.backward(out);
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    grad[i] = tape.adjoint(vars[i]).value;
  return {value, std::move(grad)};
}

std::vector<double> grad_params(const TapedLoss& loss,
                                const std::vector<double>& params) {
  return value_and_grad_params(loss, params).second;
}

std::vector<double> finite_diff_gradient(const PlainLoss& loss,
                                         const std::vector<double>& params,
                                         double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_gradient: step must be positive");
  std::vector<double> grad(params.size());
  std::vector<double> probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = loss(probe);
    probe[i] = saved - h;
    const double down = loss(probe);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DivergenceError("finite_diff_gradient: non-finite probe value",
                            std::isfinite(up) ? down : up);
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace pinnlab::ad
