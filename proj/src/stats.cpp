#include "pinnlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "pinnlab/errors.hpp"

namespace pinnlab::analysis {
namespace {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::optional<double> run_rho(const RunRecord& record, const EpochWindow& window,
                              bool use_kappa_omega, int* n_dropped) {
  std::vector<double> ks, ms;
  for (const EpochRow& row : record.rows) {
    if (row.epoch < window.from || row.epoch > window.to) continue;
    double k = std::numeric_limits<double>::quiet_NaN();
    if (row.curvature) {
      const auto& kv =
          use_kappa_omega ? row.curvature->kappa_omega : row.curvature->kappa_t;
      if (kv) k = *kv;
    }
    ks.push_back(k);
    ms.push_back(row.mse);
  }
  try {
    const double rho = spearman(ks, ms, n_dropped);
    if (std::isnan(rho)) return std::nullopt;
    return rho;
  } catch (const InsufficientDataError&) {
    return std::nullopt;
  }
}

std::optional<double> optional_median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  return median(std::move(values));
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys,
                int* n_dropped) {
  if (xs.size() != ys.size())
    throw ConfigError("spearman: series lengths differ");
  std::vector<double> vx, vy;
  vx.reserve(xs.size());
  vy.reserve(ys.size());
  int dropped = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isnan(xs[i]) || std::isnan(ys[i])) {
      ++dropped;
      continue;
    }
    vx.push_back(xs[i]);
    vy.push_back(ys[i]);
  }
  if (n_dropped != nullptr) *n_dropped = dropped;
  if (vx.size() < 2)
    throw InsufficientDataError("spearman needs at least 2 defined pairs");
  return pearson(average_ranks(vx), average_ranks(vy));
}

double median(std::vector<double> values) {
  if (values.empty())
    throw InsufficientDataError("median of an empty set");
  for (double v : values)
    if (std::isnan(v)) throw DomainError("median input contains NaN");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> median_over_seeds(
    const std::vector<RunRecord>& records,
    const std::function<std::vector<double>(const RunRecord&)>& extract) {
  if (records.empty())
    throw InsufficientDataError("median_over_seeds needs at least one record");
  std::vector<std::vector<double>> series;
  series.reserve(records.size());
  std::size_t longest = 0;
  for (const RunRecord& r : records) {
    series.push_back(extract(r));
    longest = std::max(longest, series.back().size());
  }
  std::vector<double> out(longest);
  std::vector<double> column;
  for (std::size_t e = 0; e < longest; ++e) {
    column.clear();
    for (const auto& s : series)
      if (e < s.size()) column.push_back(s[e]);
    out[e] = median(column);
  }
  return out;
}

std::vector<ScatterRow> final_scatter(const std::vector<RunRecord>& records,
                                      const EpochWindow& window) {
  std::vector<ScatterRow> rows;
  rows.reserve(records.size());
  for (const RunRecord& r : records) {
    ScatterRow row;
    row.optimizer = optim::to_string(r.config.optimizer.kind);
    row.beta = r.config.beta;
    row.arch = runner::to_string(r.config.arch);
    row.lr = r.config.optimizer.learning_rate;
    row.data_seed = r.config.data_seed;
    row.init_seed = r.config.init_seed;
    row.final_kappa_omega = r.final_kappa_omega();
    row.final_kappa_t = r.final_kappa_t();
    row.final_mse = r.final_mse();
    row.rho_kw_mse = run_rho(r, window, true, &row.n_dropped_pairs);
    row.rho_kt_mse = run_rho(r, window, false, nullptr);
    row.status = r.status;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const EpochWindow& window) {
  using Key = std::tuple<std::string, double, std::string, double>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records)
    groups[{optim::to_string(r.config.optimizer.kind), r.config.beta,
            runner::to_string(r.config.arch), r.config.optimizer.learning_rate}]
        .push_back(&r);

  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    std::tie(row.optimizer, row.beta, row.arch, row.lr) = key;
    std::vector<double> mses, kws, kts, rho_kws, rho_kts;
    for (const RunRecord* r : group) {
      mses.push_back(r->final_mse());
      if (auto kw = r->final_kappa_omega()) kws.push_back(*kw);
      if (auto kt = r->final_kappa_t()) kts.push_back(*kt);
      if (auto rho = run_rho(*r, window, true, nullptr)) rho_kws.push_back(*rho);
      if (auto rho = run_rho(*r, window, false, nullptr)) rho_kts.push_back(*rho);
      if (r->status == RunStatus::kDiverged) row.n_diverged += 1;
    }
    row.median_final_mse = median(std::move(mses));
    row.median_final_kappa_omega = optional_median(std::move(kws));
    row.median_final_kappa_t = optional_median(std::move(kts));
    row.spearman_kw_mse = optional_median(std::move(rho_kws));
    row.spearman_kt_mse = optional_median(std::move(rho_kts));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace pinnlab::analysis
