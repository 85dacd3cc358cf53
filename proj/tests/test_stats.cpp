#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pinnlab/errors.hpp"
#include "pinnlab/record.hpp"
#include "pinnlab/rng.hpp"
#include "pinnlab/stats.hpp"

using pinnlab::ConfigError;
using pinnlab::DomainError;
using pinnlab::InsufficientDataError;
using pinnlab::Rng;
using pinnlab::analysis::EpochRow;
using pinnlab::analysis::EpochWindow;
using pinnlab::analysis::final_scatter;
using pinnlab::analysis::median;
using pinnlab::analysis::median_over_seeds;
using pinnlab::analysis::RunRecord;
using pinnlab::analysis::RunStatus;
using pinnlab::analysis::ScatterRow;
using pinnlab::analysis::spearman;
using pinnlab::analysis::summarize;
using pinnlab::analysis::SummaryRow;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent reference: average ranks by direct position averaging, then
// a textbook Pearson correlation of the rank vectors.
std::vector<double> ranks_reference(const std::vector<double>& values) {
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double below = 0.0, tied = 0.0;
    for (double v : values) {
      if (v < values[i]) below += 1.0;
      if (v == values[i]) tied += 1.0;
    }
    ranks[i] = below + 0.5 * (tied + 1.0);
  }
  return ranks;
}

double pearson_reference(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman_reference(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  return pearson_reference(ranks_reference(xs), ranks_reference(ys));
}

EpochRow make_row(int epoch, double mse, std::optional<double> kw,
                  std::optional<double> kt) {
  EpochRow row;
  row.epoch = epoch;
  row.mse = mse;
  if (kw || kt) {
    pinnlab::geom::CurvatureSample s;
    s.step_index = epoch;
    s.kappa_omega = kw;
    s.kappa_t = kt;
    row.curvature = s;
  }
  return row;
}

RunRecord make_record(const std::string& optimizer, double beta, double lr,
                      std::uint64_t init_seed,
                      const std::vector<EpochRow>& rows,
                      RunStatus status = RunStatus::kExhaustedEpochs) {
  RunRecord r;
  r.config.beta = beta;
  r.config.arch = pinnlab::runner::Arch::kS;
  r.config.optimizer.kind = pinnlab::optim::optimizer_from_string(optimizer);
  r.config.optimizer.learning_rate = lr;
  r.config.data_seed = 1;
  r.config.init_seed = init_seed;
  r.rows = rows;
  r.status = status;
  return r;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("spearman is +1 on a monotone pair and -1 when reversed") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up = {10.0, 20.0, 30.0, 40.0, 50.0};
  const std::vector<double> down = {5.0, 4.0, 3.0, 2.0, 1.0};
  CHECK(spearman(x, up) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spearman(x, down) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("spearman is invariant under monotone transforms") {
  Rng rng(5);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
  }
  const double base = spearman(x, y);
  std::vector<double> xe = x;
  for (double& v : xe) v = std::exp(v);
  std::vector<double> yc = y;
  for (double& v : yc) v = v * v * v + 2.0 * v;
  CHECK(spearman(xe, yc) == doctest::Approx(base).epsilon(1e-12));
  CHECK(spearman(y, x) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("spearman with ties matches an independent rank oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(25), y(25);
    // Coarse quantization forces many ties in both series.
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::floor(3.0 * rng.uniform());
      y[i] = std::floor(4.0 * rng.uniform());
    }
    const double expect = spearman_reference(x, y);
    if (std::isnan(expect)) {
      CHECK(std::isnan(spearman(x, y)));
    } else {
      CHECK(spearman(x, y) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("spearman drops pairs containing NaN and reports the count") {
  const std::vector<double> x = {1.0, kNan, 3.0, 4.0, 5.0};
  const std::vector<double> y = {2.0, 2.0, kNan, 8.0, 10.0};
  int dropped = -1;
  const double rho = spearman(x, y, &dropped);
  CHECK(dropped == 2);
  // Surviving pairs (1,2),(4,8),(5,10) are perfectly monotone.
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spearman needs two surviving pairs") {
  const std::vector<double> two = {1.0, 2.0};
  CHECK(spearman(two, two) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> x = {1.0, kNan, kNan};
  const std::vector<double> y = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)spearman(x, y), InsufficientDataError);
  CHECK_THROWS_AS((void)spearman({}, {}), InsufficientDataError);
}

TEST_CASE("spearman of an all-tied series is NaN") {
  const std::vector<double> x = {2.0, 2.0, 2.0, 2.0};
  const std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
  CHECK(std::isnan(spearman(x, y)));
}

TEST_CASE("spearman rejects mismatched lengths") {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> y = {1.0, 2.0};
  CHECK_THROWS_AS((void)spearman(x, y), ConfigError);
}

TEST_CASE("median midpoints an even count and tolerates infinity") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({1.0, kInf, 2.0}) == 2.0);
  CHECK(median({kInf, kInf, 1.0}) == kInf);
  CHECK_THROWS_AS((void)median({}), InsufficientDataError);
  CHECK_THROWS_AS((void)median({1.0, kNan}), DomainError);
}

TEST_CASE("median_over_seeds handles truncated series") {
  RunRecord a = make_record("gd", 1.0, 0.01, 1,
                            {make_row(0, 1.0, {}, {}), make_row(1, 2.0, {}, {}),
                             make_row(2, 3.0, {}, {})});
  RunRecord b = make_record("gd", 1.0, 0.01, 2,
                            {make_row(0, 5.0, {}, {}), make_row(1, 6.0, {}, {})});
  RunRecord c = make_record("gd", 1.0, 0.01, 3, {make_row(0, 9.0, {}, {})});
  const auto med = median_over_seeds({a, b, c}, [](const RunRecord& r) {
    std::vector<double> out;
    for (const EpochRow& row : r.rows) out.push_back(row.mse);
    return out;
  });
  REQUIRE(med.size() == 3);
  CHECK(med[0] == 5.0);            // median of {1,5,9}
  CHECK(med[1] == 4.0);            // median of {2,6}
  CHECK(med[2] == 3.0);            // only the longest series remains
  CHECK_THROWS_AS((void)median_over_seeds({}, [](const RunRecord&) {
                    return std::vector<double>{};
                  }),
                  InsufficientDataError);
}

TEST_CASE("final_scatter reduces runs to end state and trajectory rho") {
  // Monotone decreasing kappa alongside decreasing mse: rho = +1. The first
  // two epochs carry no curvature, so two pairs drop out of the correlation.
  std::vector<EpochRow> rows = {
      make_row(0, 0.9, {}, {}),
      make_row(1, 0.8, {}, {}),
      make_row(2, 0.6, 3.0, 0.3),
      make_row(3, 0.4, 2.0, 0.2),
      make_row(4, 0.2, 1.0, 0.1),
  };
  RunRecord rec = make_record("adam", 5.0, 0.001, 7, rows);
  const auto scatter = final_scatter({rec});
  REQUIRE(scatter.size() == 1);
  const ScatterRow& s = scatter[0];
  CHECK(s.optimizer == "adam");
  CHECK(s.beta == 5.0);
  CHECK(s.arch == "S");
  CHECK(s.lr == 0.001);
  CHECK(s.init_seed == 7);
  CHECK(s.final_mse == 0.2);
  CHECK(*s.final_kappa_omega == 1.0);
  CHECK(*s.final_kappa_t == 0.1);
  CHECK(s.n_dropped_pairs == 2);
  CHECK(*s.rho_kw_mse == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*s.rho_kt_mse == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.status == RunStatus::kExhaustedEpochs);
}

TEST_CASE("final_scatter windows the correlation by epoch") {
  // kappa decreases with mse on epochs 2-4 (rho +1) but the pattern flips
  // on epochs 5-6; restricting the window isolates each regime.
  std::vector<EpochRow> rows = {
      make_row(0, 0.9, {}, {}),   make_row(1, 0.8, {}, {}),
      make_row(2, 0.6, 3.0, {}), make_row(3, 0.4, 2.0, {}),
      make_row(4, 0.2, 1.0, {}), make_row(5, 0.1, 2.5, {}),
      make_row(6, 0.05, 3.5, {}),
  };
  RunRecord rec = make_record("gd", 1.0, 0.01, 1, rows);
  EpochWindow early;
  early.from = 2;
  early.to = 4;
  EpochWindow late;
  late.from = 4;
  late.to = 6;
  CHECK(*final_scatter({rec}, early)[0].rho_kw_mse ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*final_scatter({rec}, late)[0].rho_kw_mse ==
        doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("final_scatter leaves rho empty when undefined") {
  // Two defined rows only, and their kappas are tied, so ranking is
  // degenerate; a lone curvature row is insufficient outright.
  std::vector<EpochRow> one = {make_row(0, 0.9, {}, {}),
                               make_row(2, 0.6, 3.0, 0.3)};
  RunRecord rec = make_record("gd", 1.0, 0.01, 1, one,
                              RunStatus::kDiverged);
  const auto scatter = final_scatter({rec});
  REQUIRE(scatter.size() == 1);
  CHECK(!scatter[0].rho_kw_mse.has_value());
  CHECK(!scatter[0].rho_kt_mse.has_value());
  CHECK(scatter[0].final_mse == kInf);
  CHECK(scatter[0].status == RunStatus::kDiverged);
}

TEST_CASE("summarize groups by configuration and orders deterministically") {
  std::vector<EpochRow> low = {make_row(0, 1.0, {}, {}),
                               make_row(1, 0.5, {}, {}),
                               make_row(2, 0.1, 2.0, 0.2)};
  std::vector<EpochRow> high = {make_row(0, 1.0, {}, {}),
                                make_row(1, 0.8, {}, {}),
                                make_row(2, 0.3, 4.0, 0.4)};
  std::vector<RunRecord> records = {
      make_record("adam", 1.0, 0.001, 1, low),
      make_record("adam", 1.0, 0.001, 2, high),
      make_record("adam", 1.0, 0.001, 3, low, RunStatus::kDiverged),
      make_record("gd", 1.0, 0.01, 1, low),
      make_record("gd", 5.0, 0.01, 1, high),
  };
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 3);
  // Map ordering: adam before gd, then ascending beta.
  CHECK(rows[0].optimizer == "adam");
  CHECK(rows[1].optimizer == "gd");
  CHECK(rows[1].beta == 1.0);
  CHECK(rows[2].optimizer == "gd");
  CHECK(rows[2].beta == 5.0);

  const SummaryRow& adam = rows[0];
  CHECK(adam.n_diverged == 1);
  // Final mses {0.1, 0.3, inf}: median is 0.3.
  CHECK(adam.median_final_mse == 0.3);
  // The diverged run still reports its last defined curvature, so the
  // kappa medians run over {2, 4, 2} and {0.2, 0.4, 0.2}.
  CHECK(*adam.median_final_kappa_omega == 2.0);
  CHECK(*adam.median_final_kappa_t == 0.2);
  // Each run has a single defined curvature epoch, so no per-run rho exists.
  CHECK(!adam.spearman_kw_mse.has_value());

  const SummaryRow& gd1 = rows[1];
  CHECK(gd1.median_final_mse == 0.1);
  CHECK(gd1.n_diverged == 0);
}

TEST_CASE("summarize computes the median of per-run correlations") {
  std::vector<EpochRow> aligned = {
      make_row(0, 0.8, {}, {}),  make_row(1, 0.7, {}, {}),
      make_row(2, 0.6, 3.0, {}), make_row(3, 0.4, 2.0, {}),
      make_row(4, 0.2, 1.0, {}),
  };
  std::vector<EpochRow> opposed = {
      make_row(0, 0.8, {}, {}),  make_row(1, 0.7, {}, {}),
      make_row(2, 0.6, 1.0, {}), make_row(3, 0.4, 2.0, {}),
      make_row(4, 0.2, 3.0, {}),
  };
  std::vector<RunRecord> records = {
      make_record("bbi", 1.0, 0.1, 1, aligned),
      make_record("bbi", 1.0, 0.1, 2, aligned),
      make_record("bbi", 1.0, 0.1, 3, opposed),
  };
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 1);
  // Per-run rhos {+1, +1, -1}: median +1.
  CHECK(*rows[0].spearman_kw_mse == doctest::Approx(1.0).epsilon(1e-14));
}

}  // TEST_SUITE
