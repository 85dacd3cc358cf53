#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pinnlab/csv.hpp"
#include "pinnlab/errors.hpp"
#include "pinnlab/record.hpp"
#include "pinnlab/rng.hpp"
#include "pinnlab/stats.hpp"

namespace fs = std::filesystem;
using pinnlab::ConfigError;
using pinnlab::IoError;
using pinnlab::Rng;
using pinnlab::analysis::EpochRow;
using pinnlab::analysis::RunRecord;
using pinnlab::analysis::RunStatus;
using pinnlab::analysis::ScatterRow;
using pinnlab::analysis::SummaryRow;
using pinnlab::io::append_manifest;
using pinnlab::io::CsvRow;
using pinnlab::io::kRunCsvHeader;
using pinnlab::io::load_runs;
using pinnlab::io::ManifestRow;
using pinnlab::io::read_manifest;
using pinnlab::io::read_run_csv;
using pinnlab::io::write_run_csv;
using pinnlab::io::write_scatter_csv;
using pinnlab::io::write_summary_csv;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("pinnlab_csv_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

pinnlab::model::LossBreakdown breakdown(double ic, double bulk, double bc) {
  pinnlab::model::LossBreakdown b;
  b.ic = ic;
  b.bulk = bulk;
  b.bc = bc;
  b.total = ic + bulk + bc;
  return b;
}

// Three-epoch record built from exactly representable dyadic values so the
// expected serialization is known byte for byte.
RunRecord golden_record() {
  RunRecord r;
  r.status = RunStatus::kExhaustedEpochs;
  EpochRow e0;
  e0.epoch = 0;
  e0.train = breakdown(0.25, 0.125, 0.0625);
  e0.test = breakdown(0.5, 0.25, 0.125);
  e0.mse = 1.5;
  EpochRow e1;
  e1.epoch = 1;
  e1.train = breakdown(0.125, 0.0625, 0.03125);
  e1.test = breakdown(0.25, 0.125, 0.0625);
  e1.mse = 0.75;
  EpochRow e2;
  e2.epoch = 2;
  e2.train = breakdown(0.0625, 0.03125, 0.015625);
  e2.test = breakdown(0.125, 0.0625, 0.03125);
  e2.mse = 0.375;
  pinnlab::geom::CurvatureSample s;
  s.step_index = 2;
  s.kappa_t = 0.125;
  s.kappa_omega = 0.25;
  s.cos_theta = -0.5;
  s.speed = 0.5;
  e2.curvature = s;
  r.rows = {e0, e1, e2};
  return r;
}

const std::string kGoldenBytes =
    std::string(kRunCsvHeader) +
    "\n"
    "0,0.4375,0.25,0.125,0.0625,0.875,0.5,0.25,0.125,1.5,,,\n"
    "1,0.21875,0.125,0.0625,0.03125,0.4375,0.25,0.125,0.0625,0.75,,,\n"
    "2,0.109375,0.0625,0.03125,0.015625,0.21875,0.125,0.0625,0.03125,0.375,"
    "0.125,0.25,-0.5\n";

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("run file serialization is byte exact") {
  TempDir dir("golden");
  const fs::path file = dir.path / "run.csv";
  write_run_csv(golden_record(), file);
  CHECK(slurp(file) == kGoldenBytes);
}

TEST_CASE("golden bytes parse back to the source record") {
  TempDir dir("golden_read");
  const fs::path file = dir.path / "run.csv";
  spit(file, kGoldenBytes);
  const std::vector<CsvRow> rows = read_run_csv(file);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].epoch == 0);
  CHECK(rows[0].train.total == 0.4375);
  CHECK(rows[0].train.ic == 0.25);
  CHECK(rows[0].train.bulk == 0.125);
  CHECK(rows[0].train.bc == 0.0625);
  CHECK(rows[0].test.total == 0.875);
  CHECK(rows[0].mse == 1.5);
  CHECK(!rows[0].kappa_t.has_value());
  CHECK(!rows[0].kappa_omega.has_value());
  CHECK(!rows[0].cos_theta.has_value());
  CHECK(rows[2].epoch == 2);
  CHECK(*rows[2].kappa_t == 0.125);
  CHECK(*rows[2].kappa_omega == 0.25);
  CHECK(*rows[2].cos_theta == -0.5);
}

TEST_CASE("random records round-trip losslessly") {
  Rng rng(42);
  RunRecord r;
  for (int e = 0; e < 20; ++e) {
    EpochRow row;
    row.epoch = e;
    row.train = breakdown(std::exp(rng.normal()), std::exp(rng.normal()),
                          std::exp(rng.normal()));
    row.test = breakdown(std::exp(rng.normal()), std::exp(rng.normal()),
                         std::exp(rng.normal()));
    row.mse = std::exp(rng.normal());
    if (e >= 2) {
      pinnlab::geom::CurvatureSample s;
      s.step_index = e;
      // Exercise partially defined telemetry as well.
      if (e % 5 != 0) s.kappa_t = std::exp(rng.normal());
      if (e % 7 != 0) s.kappa_omega = std::exp(rng.normal());
      s.cos_theta = std::tanh(rng.normal());
      row.curvature = s;
    }
    r.rows.push_back(row);
  }
  TempDir dir("roundtrip");
  const fs::path file = dir.path / "run.csv";
  write_run_csv(r, file);
  const std::vector<CsvRow> rows = read_run_csv(file);
  REQUIRE(rows.size() == r.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EpochRow& a = r.rows[i];
    const CsvRow& b = rows[i];
    CHECK(b.epoch == a.epoch);
    CHECK(b.train.total == a.train.total);
    CHECK(b.train.ic == a.train.ic);
    CHECK(b.train.bulk == a.train.bulk);
    CHECK(b.train.bc == a.train.bc);
    CHECK(b.test.total == a.test.total);
    CHECK(b.test.ic == a.test.ic);
    CHECK(b.test.bulk == a.test.bulk);
    CHECK(b.test.bc == a.test.bc);
    CHECK(b.mse == a.mse);
    if (a.curvature) {
      CHECK(b.kappa_t == a.curvature->kappa_t);
      CHECK(b.kappa_omega == a.curvature->kappa_omega);
      CHECK(b.cos_theta == a.curvature->cos_theta);
    } else {
      CHECK(!b.kappa_t.has_value());
      CHECK(!b.kappa_omega.has_value());
      CHECK(!b.cos_theta.has_value());
    }
  }
}

TEST_CASE("run reader tolerates CRLF line endings") {
  TempDir dir("crlf");
  const fs::path file = dir.path / "run.csv";
  std::string crlf;
  for (char c : kGoldenBytes) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  spit(file, crlf);
  const std::vector<CsvRow> rows = read_run_csv(file);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].mse == 0.375);
  CHECK(*rows[2].cos_theta == -0.5);
}

TEST_CASE("run reader rejects malformed input") {
  TempDir dir("bad");
  const fs::path missing = dir.path / "absent.csv";
  CHECK_THROWS_AS((void)read_run_csv(missing), IoError);

  const fs::path empty = dir.path / "empty.csv";
  spit(empty, "");
  CHECK_THROWS_AS((void)read_run_csv(empty), IoError);

  const fs::path header = dir.path / "header.csv";
  spit(header, "epoch,something_else\n");
  CHECK_THROWS_AS((void)read_run_csv(header), IoError);

  const fs::path short_row = dir.path / "short.csv";
  spit(short_row, std::string(kRunCsvHeader) + "\n1,2\n");
  CHECK_THROWS_AS((void)read_run_csv(short_row), IoError);

  const fs::path bad_int = dir.path / "bad_int.csv";
  spit(bad_int,
       std::string(kRunCsvHeader) + "\nx,1,1,1,1,1,1,1,1,1,,,\n");
  CHECK_THROWS_AS((void)read_run_csv(bad_int), IoError);

  const fs::path bad_double = dir.path / "bad_double.csv";
  spit(bad_double,
       std::string(kRunCsvHeader) + "\n1,oops,1,1,1,1,1,1,1,1,,,\n");
  CHECK_THROWS_AS((void)read_run_csv(bad_double), ConfigError);
}

TEST_CASE("manifest appends exactly one header and round-trips") {
  TempDir dir("manifest");
  const fs::path manifest = dir.path / "manifest.csv";

  RunRecord a = golden_record();
  a.config.beta = 5.0;
  a.config.arch = pinnlab::runner::Arch::kL;
  a.config.optimizer.kind = pinnlab::optim::OptimizerKind::kLbfgs;
  a.config.optimizer.learning_rate = 0.1;
  a.config.epochs = 1000;
  a.config.data_seed = 3;
  a.config.init_seed = 11;
  a.status = RunStatus::kConverged;
  append_manifest(manifest, a, "a.csv");

  RunRecord b = golden_record();
  b.config.optimizer.kind = pinnlab::optim::OptimizerKind::kGd;
  b.config.optimizer.learning_rate = 0.01;
  b.status = RunStatus::kDiverged;
  append_manifest(manifest, b, "b.csv");

  const std::string text = slurp(manifest);
  const std::string header =
      "file,optimizer,lr,beta,arch,epochs,data_seed,init_seed,status";
  CHECK(text.find(header) == 0);
  CHECK(text.find(header, 1) == std::string::npos);
  CHECK(text ==
        header +
            "\n"
            "a.csv,lbfgs,0.1,5,L,1000,3,11,converged\n"
            "b.csv,gd,0.01,1,S,5000,1,1,diverged\n");

  const std::vector<ManifestRow> rows = read_manifest(manifest);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].file == "a.csv");
  CHECK(rows[0].config.optimizer.kind == pinnlab::optim::OptimizerKind::kLbfgs);
  CHECK(rows[0].config.optimizer.learning_rate == 0.1);
  CHECK(rows[0].config.beta == 5.0);
  CHECK(rows[0].config.arch == pinnlab::runner::Arch::kL);
  CHECK(rows[0].config.epochs == 1000);
  CHECK(rows[0].config.data_seed == 3);
  CHECK(rows[0].config.init_seed == 11);
  CHECK(rows[0].status == RunStatus::kConverged);
  CHECK(rows[1].file == "b.csv");
  CHECK(rows[1].status == RunStatus::kDiverged);
}

TEST_CASE("manifest reader rejects a foreign header") {
  TempDir dir("manifest_bad");
  const fs::path manifest = dir.path / "manifest.csv";
  spit(manifest, "file,optimizer\nx.csv,gd\n");
  CHECK_THROWS_AS((void)read_manifest(manifest), IoError);
}

TEST_CASE("load_runs rebuilds records from a run directory") {
  TempDir dir("load");
  RunRecord a = golden_record();
  a.config.beta = 5.0;
  a.config.optimizer.kind = pinnlab::optim::OptimizerKind::kAdam;
  a.config.optimizer.learning_rate = 0.001;
  a.config.init_seed = 4;
  write_run_csv(a, dir.path / "a.csv");
  append_manifest(dir.path / "manifest.csv", a, "a.csv");

  RunRecord b = golden_record();
  b.rows.resize(2);  // truncated, no curvature anywhere
  b.status = RunStatus::kDiverged;
  write_run_csv(b, dir.path / "b.csv");
  append_manifest(dir.path / "manifest.csv", b, "b.csv");

  const std::vector<RunRecord> loaded = load_runs(dir.path);
  REQUIRE(loaded.size() == 2);

  const RunRecord& la = loaded[0];
  CHECK(la.config.beta == 5.0);
  CHECK(la.config.optimizer.kind == pinnlab::optim::OptimizerKind::kAdam);
  CHECK(la.config.optimizer.learning_rate == 0.001);
  CHECK(la.config.init_seed == 4);
  CHECK(la.status == RunStatus::kExhaustedEpochs);
  REQUIRE(la.rows.size() == 3);
  CHECK(la.rows[0].epoch == 0);
  CHECK(la.rows[0].mse == 1.5);
  CHECK(!la.rows[0].curvature.has_value());
  REQUIRE(la.rows[2].curvature.has_value());
  CHECK(*la.rows[2].curvature->kappa_t == 0.125);
  CHECK(*la.rows[2].curvature->kappa_omega == 0.25);
  CHECK(*la.rows[2].curvature->cos_theta == -0.5);
  // Speed is reconstructed as kappa_t / kappa_omega.
  CHECK(la.rows[2].curvature->speed == 0.5);
  CHECK(la.final_mse() == 0.375);
  CHECK(*la.final_kappa_omega() == 0.25);

  const RunRecord& lb = loaded[1];
  CHECK(lb.status == RunStatus::kDiverged);
  REQUIRE(lb.rows.size() == 2);
  CHECK(lb.final_mse() == std::numeric_limits<double>::infinity());
  CHECK(!lb.final_kappa_omega().has_value());
}

TEST_CASE("summary rows serialize with empty fields for undefined stats") {
  SummaryRow full;
  full.optimizer = "lbfgs";
  full.beta = 5.0;
  full.arch = "S";
  full.lr = 0.1;
  full.median_final_mse = 0.0625;
  full.median_final_kappa_omega = 0.25;
  full.median_final_kappa_t = 0.125;
  full.spearman_kw_mse = -0.75;
  full.spearman_kt_mse = -0.5;
  full.n_diverged = 0;
  SummaryRow sparse;
  sparse.optimizer = "gd";
  sparse.beta = 30.0;
  sparse.arch = "L";
  sparse.lr = 0.001;
  sparse.median_final_mse = std::numeric_limits<double>::infinity();
  sparse.n_diverged = 10;
  TempDir dir("summary");
  const fs::path file = dir.path / "summary.csv";
  const std::vector<SummaryRow> rows = {full, sparse};
  write_summary_csv(rows, file);
  CHECK(slurp(file) ==
        "optimizer,beta,arch,lr,median_final_mse,median_final_kappa_omega,"
        "median_final_kappa_t,spearman_kw_mse,spearman_kt_mse,n_diverged\n"
        "lbfgs,5,S,0.1,0.0625,0.25,0.125,-0.75,-0.5,0\n"
        "gd,30,L,0.001,inf,,,,,10\n");
}

TEST_CASE("scatter rows serialize with status and drop counts") {
  ScatterRow row;
  row.optimizer = "adam";
  row.beta = 5.0;
  row.arch = "S";
  row.lr = 0.001;
  row.data_seed = 1;
  row.init_seed = 7;
  row.final_kappa_omega = 0.25;
  row.final_kappa_t = 0.125;
  row.final_mse = 0.375;
  row.rho_kw_mse = -0.5;
  row.rho_kt_mse = 0.5;
  row.n_dropped_pairs = 2;
  row.status = RunStatus::kExhaustedEpochs;
  ScatterRow bare;
  bare.optimizer = "gd";
  bare.beta = 1.0;
  bare.arch = "S";
  bare.lr = 0.01;
  bare.data_seed = 1;
  bare.init_seed = 2;
  bare.final_mse = std::numeric_limits<double>::infinity();
  bare.status = RunStatus::kDiverged;
  TempDir dir("scatter");
  const fs::path file = dir.path / "scatter.csv";
  const std::vector<ScatterRow> rows = {row, bare};
  write_scatter_csv(rows, file);
  CHECK(slurp(file) ==
        "optimizer,beta,arch,lr,data_seed,init_seed,final_kappa_omega,"
        "final_kappa_t,final_mse,rho_kw_mse,rho_kt_mse,n_dropped_pairs,"
        "status\n"
        "adam,5,S,0.001,1,7,0.25,0.125,0.375,-0.5,0.5,2,exhausted-epochs\n"
        "gd,1,S,0.01,1,2,,,inf,,,0,diverged\n");
}

}  // TEST_SUITE
