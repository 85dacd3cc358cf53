#include "pinnlab/curvature.hpp"

#include <cmath>
#include <cstddef>

#include "pinnlab/errors.hpp"

namespace pinnlab::geom {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void check_lengths(const StepDelta& v_prev, const StepDelta& v_curr) {
  if (v_prev.v.size() != v_curr.v.size())
    throw ConfigError("step deltas have different lengths");
}

}  // namespace

std::optional<double> kappa_t(const StepDelta& v_prev, const StepDelta& v_curr) {
  check_lengths(v_prev, v_curr);
  const double a = dot(v_curr.v, v_curr.v);
  if (a == 0.0) return std::nullopt;
  const double b = dot(v_prev.v, v_curr.v);
  const double c = dot(v_prev.v, v_prev.v);
  double disc = c - b * b / a;
  if (disc < 0.0) {
    if (disc < -1e-12 * c)
      throw DomainError("curvature discriminant negative beyond rounding noise");
    disc = 0.0;
  }
  return std::sqrt(disc) / std::sqrt(a);
}

std::optional<double> kappa_omega(const StepDelta& v_prev, const StepDelta& v_curr) {
  const std::optional<double> kt = kappa_t(v_prev, v_curr);
  if (!kt) return std::nullopt;
  const double speed = std::sqrt(dot(v_curr.v, v_curr.v));
  if (speed == 0.0) return std::nullopt;
  return *kt / speed;
}

std::optional<double> cosine_similarity(const StepDelta& v_prev,
                                        const StepDelta& v_curr) {
  check_lengths(v_prev, v_curr);
  const double np = std::sqrt(dot(v_prev.v, v_prev.v));
  const double nc = std::sqrt(dot(v_curr.v, v_curr.v));
  if (np == 0.0 || nc == 0.0) return std::nullopt;
  return dot(v_prev.v, v_curr.v) / (np * nc);
}

std::optional<CurvatureSample> CurvatureTracker::push(
    const std::vector<double>& snapshot) {
  if (n_seen_ > 0 && snapshot.size() != prev_snapshot_.size())
    throw ConfigError("snapshot length changed mid-trajectory");
  n_seen_ += 1;
  if (n_seen_ == 1) {
    prev_snapshot_ = snapshot;
    return std::nullopt;
  }
  StepDelta curr;
  curr.step_index = n_seen_ - 1;
  curr.v.resize(snapshot.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i)
    curr.v[i] = snapshot[i] - prev_snapshot_[i];
  prev_snapshot_ = snapshot;
  if (n_seen_ == 2) {
    prev_delta_ = std::move(curr);
    return std::nullopt;
  }
  CurvatureSample sample;
  sample.step_index = n_seen_ - 1;
  sample.kappa_t = kappa_t(prev_delta_, curr);
  sample.kappa_omega = kappa_omega(prev_delta_, curr);
  sample.speed = std::sqrt(dot(curr.v, curr.v));
  sample.cos_theta = cosine_similarity(prev_delta_, curr);
  prev_delta_ = std::move(curr);
  return sample;
}

void CurvatureTracker::reset() {
  prev_snapshot_.clear();
  prev_delta_ = StepDelta{};
  n_seen_ = 0;
}

}  // namespace pinnlab::geom
