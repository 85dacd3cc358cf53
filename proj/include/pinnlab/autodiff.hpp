#ifndef PINNLAB_AUTODIFF_HPP
#define PINNLAB_AUTODIFF_HPP

#include <functional>
#include <span>
#include <vector>

#include "pinnlab/mlp.hpp"
#include "pinnlab/tape.hpp"

namespace pinnlab::ad {

struct InputDerivs {
  double u;
  double du_dx;
  double du_dt;
};

// Network value together with both input partials at one point.
InputDerivs eval_with_input_derivs(const model::MlpArchitecture& arch,
                                   const model::ParamVector& params,
                                   double x, double t);

// A scalar-valued function recorded on a tape. The leaf vars handed in
// correspond one-to-one with the flat parameter vector.
using TapedLoss =
    std::function<Tape2::Var(Tape2&, std::span<const Tape2::Var>)>;

// Gradient of a taped scalar with respect to every parameter.
std::vector<double> grad_params(const TapedLoss& loss,
                                const std::vector<double>& params);

std::pair<double, std::vector<double>> value_and_grad_params(
    const TapedLoss& loss, const std::vector<double>& params);

using PlainLoss = std::function<double(const std::vector<double>&)>;

// Central-difference gradient, used as an independent check on the tape.
std::vector<double> finite_diff_gradient(const PlainLoss& loss,
                                         const std::vector<double>& params,
                                         double h);

}  // namespace pinnlab::ad

#endif
