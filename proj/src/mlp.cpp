#include "pinnlab/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "pinnlab/errors.hpp"
#include "pinnlab/rng.hpp"

namespace pinnlab::model {
namespace {

// Forward pass with dual operands, carrying input tangents through every op.
template <class T>
T forward_impl(const MlpArchitecture& arch, const ParamVector& params, T x, T t) {
  std::vector<T> cur = {x, t};
  std::vector<T> next;
  std::size_t off = 0;
  const int n_layers = arch.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    const int n_in = arch.layer_sizes[l];
    const int n_out = arch.layer_sizes[l + 1];
    next.assign(n_out, T{});
    for (int o = 0; o < n_out; ++o) {
      T acc = T::constant(params[off + static_cast<std::size_t>(n_out) * n_in + o]);
      for (int i = 0; i < n_in; ++i)
        acc = acc + params[off + static_cast<std::size_t>(o) * n_in + i] * cur[i];
      next[o] = (l + 1 < n_layers) ? ad::tanh(acc) : acc;
    }
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
    cur.swap(next);
  }
  return cur[0];
}

template <>
double forward_impl<double>(const MlpArchitecture& arch, const ParamVector& params,
                            double x, double t) {
  std::vector<double> cur = {x, t};
  std::vector<double> next;
  std::size_t off = 0;
  const int n_layers = arch.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    const int n_in = arch.layer_sizes[l];
    const int n_out = arch.layer_sizes[l + 1];
    next.assign(n_out, 0.0);
    for (int o = 0; o < n_out; ++o) {
      double acc = params[off + static_cast<std::size_t>(n_out) * n_in + o];
      for (int i = 0; i < n_in; ++i)
        acc += params[off + static_cast<std::size_t>(o) * n_in + i] * cur[i];
      next[o] = (l + 1 < n_layers) ? std::tanh(acc) : acc;
    }
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
    cur.swap(next);
  }
  return cur[0];
}

}  // namespace

void MlpArchitecture::validate() const {
  if (layer_sizes.size() < 3)
    throw ConfigError("network needs at least one hidden layer");
  if (layer_sizes.front() != 2)
    throw ConfigError("network input width must be 2 (x, t)");
  if (layer_sizes.back() != 1)
    throw ConfigError("network output width must be 1");
  for (int n : layer_sizes)
    if (n < 1) throw ConfigError("layer sizes must be positive");
}

int param_count(const MlpArchitecture& arch) {
  arch.validate();
  int n = 0;
  for (int l = 0; l < arch.n_layers(); ++l)
    n += arch.layer_sizes[l] * arch.layer_sizes[l + 1] + arch.layer_sizes[l + 1];
  return n;
}

ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed) {
  const int n = param_count(arch);
  ParamVector params(static_cast<std::size_t>(n), 0.0);
  Rng rng(seed, Rng::Stream::kInit);
  std::size_t off = 0;
  for (int l = 0; l < arch.n_layers(); ++l) {
    const int n_in = arch.layer_sizes[l];
    const int n_out = arch.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (n_in + n_out));
    for (int k = 0; k < n_in * n_out; ++k)
      params[off + k] = rng.uniform(-bound, bound);
    // biases stay zero
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
  }
  return params;
}

void check_params(const MlpArchitecture& arch, const ParamVector& params) {
  if (params.size() != static_cast<std::size_t>(param_count(arch)))
    throw ConfigError("parameter vector length does not match architecture");
}

double forward(const MlpArchitecture& arch, const ParamVector& params,
               double x, double t) {
  return forward_impl<double>(arch, params, x, t);
}

ad::Dual2 forward_dual(const MlpArchitecture& arch, const ParamVector& params,
                       ad::Dual2 x, ad::Dual2 t) {
  return forward_impl<ad::Dual2>(arch, params, x, t);
}

ad::Tape2::Var taped_forward(ad::Tape2& tape, const MlpArchitecture& arch,
                             std::span<const ad::Tape2::Var> param_vars,
                             ad::Tape2::Var x, ad::Tape2::Var t) {
  std::vector<ad::Tape2::Var> cur = {x, t};
  std::vector<ad::Tape2::Var> next;
  std::vector<ad::Tape2::Var> terms;
  std::size_t off = 0;
  const int n_layers = arch.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    const int n_in = arch.layer_sizes[l];
    const int n_out = arch.layer_sizes[l + 1];
    next.clear();
    for (int o = 0; o < n_out; ++o) {
      terms.clear();
      for (int i = 0; i < n_in; ++i)
        terms.push_back(
            tape.mul(param_vars[off + static_cast<std::size_t>(o) * n_in + i], cur[i]));
      terms.push_back(param_vars[off + static_cast<std::size_t>(n_out) * n_in + o]);
      ad::Tape2::Var acc = tape.sum(terms.data(), static_cast<std::uint32_t>(terms.size()));
      next.push_back((l + 1 < n_layers) ? tape.tanh(acc) : acc);
    }
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
    cur.swap(next);
  }
  return cur[0];
}

void batched_forward(const MlpArchitecture& arch, const ParamVector& params,
                     std::span<const double> xs, std::span<const double> ts,
                     std::span<double> out) {
  check_params(arch, params);
  if (xs.size() != ts.size() || out.size() != xs.size())
    throw ConfigError("batched_forward: input and output spans must agree");
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd act(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    act(i, 0) = xs[static_cast<std::size_t>(i)];
    act(i, 1) = ts[static_cast<std::size_t>(i)];
  }
  using RowMajorMap = Eigen::Map<
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  std::size_t off = 0;
  const int n_layers = arch.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    const int n_in = arch.layer_sizes[l];
    const int n_out = arch.layer_sizes[l + 1];
    RowMajorMap w(params.data() + off, n_out, n_in);
    Eigen::Map<const Eigen::VectorXd> b(
        params.data() + off + static_cast<std::size_t>(n_out) * n_in, n_out);
    Eigen::MatrixXd z = act * w.transpose();
    z.rowwise() += b.transpose();
    act = (l + 1 < n_layers) ? z.array().tanh().matrix() : std::move(z);
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
  }
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = act(i, 0);
}

}  // namespace pinnlab::model
