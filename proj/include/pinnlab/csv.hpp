#ifndef PINNLAB_CSV_HPP
#define PINNLAB_CSV_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinnlab/record.hpp"
#include "pinnlab/stats.hpp"

namespace pinnlab::io {

// Fixed column set of a run file. bc_loss_* is the initial-condition term,
// bcp_loss_* the periodic-boundary term, bulk_loss_* the residual term.
inline constexpr std::string_view kRunCsvHeader =
    "epoch,train_loss_total,bc_loss_train,bulk_loss_train,bcp_loss_train,"
    "test_loss_total,bc_loss_test,bulk_loss_test,bcp_loss_test,"
    "mse,kappa_t,kappa_omega,cos_theta";

// One parsed run-file row; optionals were empty fields.
struct CsvRow {
  int epoch = 0;
  model::LossBreakdown train;
  model::LossBreakdown test;
  double mse = 0.0;
  std::optional<double> kappa_t;
  std::optional<double> kappa_omega;
  std::optional<double> cos_theta;
};

// One row per recorded epoch, shortest round-trip decimals, undefined
// telemetry as empty fields, LF line endings.
void write_run_csv(const analysis::RunRecord& record,
                   const std::filesystem::path& path);

std::vector<CsvRow> read_run_csv(const std::filesystem::path& path);

void write_summary_csv(std::span<const analysis::SummaryRow> rows,
                       const std::filesystem::path& path);

void write_scatter_csv(std::span<const analysis::ScatterRow> rows,
                       const std::filesystem::path& path);

// The manifest maps run files to their identifying config fields so a
// directory of runs can be re-loaded for aggregation.
struct ManifestRow {
  std::string file;
  runner::ExperimentConfig config;
  analysis::RunStatus status = analysis::RunStatus::kExhaustedEpochs;
};

// Creates the manifest with a header on first use, then appends.
void append_manifest(const std::filesystem::path& manifest_path,
                     const analysis::RunRecord& record,
                     const std::string& csv_file);

std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path);

// Rebuilds records from a manifest and its run files. The curvature speed
// channel is not persisted; it is restored as kappa_t / kappa_omega where
// that ratio is defined and as zero otherwise.
std::vector<analysis::RunRecord> load_runs(const std::filesystem::path& dir);

}  // namespace pinnlab::io

#endif
