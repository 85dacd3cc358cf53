#ifndef PINNLAB_CURVATURE_HPP
#define PINNLAB_CURVATURE_HPP

#include <optional>
#include <vector>

namespace pinnlab::geom {

// Discrete trajectory velocity V_k = w_{k+1} - w_k.
struct StepDelta {
  std::vector<double> v;
  int step_index = 0;
};

// Telemetry for one trajectory step. Curvatures and the angle are undefined
// exactly when a zero-length step makes them ill-posed.
struct CurvatureSample {
  int step_index = 0;
  std::optional<double> kappa_t;
  std::optional<double> kappa_omega;
  double speed = 0.0;  // length of the current delta
  std::optional<double> cos_theta;
};

// Local curvature per unit step count. With a = <V_k,V_k>, b = <V_{k-1},V_k>,
// c = <V_{k-1},V_{k-1}>: sqrt(max(c - b^2/a, 0)) / sqrt(a). Tiny negative
// discriminants (rounding noise within 1e-12 * c) clamp to zero; anything
// more negative indicates a broken invariant and throws.
std::optional<double> kappa_t(const StepDelta& v_prev, const StepDelta& v_curr);

// Geometric curvature: kappa_t divided by the current speed, making it
// independent of the trajectory's parametrization.
std::optional<double> kappa_omega(const StepDelta& v_prev, const StepDelta& v_curr);

std::optional<double> cosine_similarity(const StepDelta& v_prev,
                                        const StepDelta& v_curr);

// Consumes parameter snapshots in step order and produces one sample per
// snapshot from the third one on. Keeps only the previous snapshot and the
// previous delta, never the trajectory.
class CurvatureTracker {
 public:
  // Returns a sample once two deltas are available, otherwise nullopt.
  std::optional<CurvatureSample> push(const std::vector<double>& snapshot);

  void reset();

 private:
  std::vector<double> prev_snapshot_;
  StepDelta prev_delta_;
  int n_seen_ = 0;
};

}  // namespace pinnlab::geom

#endif
