#ifndef PINNLAB_STATS_HPP
#define PINNLAB_STATS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinnlab/record.hpp"

namespace pinnlab::analysis {

// Rank correlation with average ranks for ties. NaN entries mark undefined
// observations: any pair containing one is dropped before ranking. Fewer
// than two surviving pairs raises InsufficientDataError. All-tied input
// has no defined rank ordering and yields NaN.
double spearman(std::span<const double> xs, std::span<const double> ys,
                int* n_dropped = nullptr);

// Midpoint-of-two median. Input may contain +inf (sorted last) but not NaN.
double median(std::vector<double> values);

// Per-epoch median across runs of the extracted series. Series of unequal
// length (truncated diverged runs) contribute to the epochs they cover.
std::vector<double> median_over_seeds(
    const std::vector<RunRecord>& records,
    const std::function<std::vector<double>(const RunRecord&)>& extract);

// Epoch window over which trajectory correlations are computed.
struct EpochWindow {
  int from = 0;
  int to = std::numeric_limits<int>::max();
};

// One run reduced to its end state plus whole-trajectory correlations.
struct ScatterRow {
  std::string optimizer;
  double beta = 0.0;
  std::string arch;
  double lr = 0.0;
  std::uint64_t data_seed = 0;
  std::uint64_t init_seed = 0;
  std::optional<double> final_kappa_omega;
  std::optional<double> final_kappa_t;
  double final_mse = 0.0;
  std::optional<double> rho_kw_mse;
  std::optional<double> rho_kt_mse;
  int n_dropped_pairs = 0;
  RunStatus status = RunStatus::kExhaustedEpochs;
};

std::vector<ScatterRow> final_scatter(const std::vector<RunRecord>& records,
                                      const EpochWindow& window = {});

// Cross-seed aggregate for one (optimizer, beta, arch, lr) group. The
// spearman columns are medians of the per-run correlations.
struct SummaryRow {
  std::string optimizer;
  double beta = 0.0;
  std::string arch;
  double lr = 0.0;
  double median_final_mse = 0.0;
  std::optional<double> median_final_kappa_omega;
  std::optional<double> median_final_kappa_t;
  std::optional<double> spearman_kw_mse;
  std::optional<double> spearman_kt_mse;
  int n_diverged = 0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const EpochWindow& window = {});

}  // namespace pinnlab::analysis

#endif
