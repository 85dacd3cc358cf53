#include "pinnlab/csv.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pinnlab/errors.hpp"
#include "pinnlab/numfmt.hpp"

namespace pinnlab::io {
namespace {

constexpr std::string_view kManifestHeader =
    "file,optimizer,lr,beta,arch,epochs,data_seed,init_seed,status";

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_opt(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("malformed integer field: '" + s + "'");
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().pop_back();
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path,
                             std::ios::openmode extra = {}) {
  std::ofstream out(path, std::ios::binary | extra);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_run_csv(const analysis::RunRecord& record,
                   const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << kRunCsvHeader << '\n';
  for (const analysis::EpochRow& row : record.rows) {
    out << row.epoch << ',' << format_double(row.train.total) << ','
        << format_double(row.train.ic) << ',' << format_double(row.train.bulk)
        << ',' << format_double(row.train.bc) << ','
        << format_double(row.test.total) << ',' << format_double(row.test.ic)
        << ',' << format_double(row.test.bulk) << ','
        << format_double(row.test.bc) << ',' << format_double(row.mse) << ',';
    if (row.curvature) {
      out << opt_field(row.curvature->kappa_t) << ','
          << opt_field(row.curvature->kappa_omega) << ','
          << opt_field(row.curvature->cos_theta);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<CsvRow> read_run_csv(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty run file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunCsvHeader)
    throw IoError("unexpected run file header in " + path.string());
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 13)
      throw IoError("malformed run file row in " + path.string());
    CsvRow row;
    row.epoch = parse_int<int>(f[0]);
    row.train.total = parse_double(f[1]);
    row.train.ic = parse_double(f[2]);
    row.train.bulk = parse_double(f[3]);
    row.train.bc = parse_double(f[4]);
    row.test.total = parse_double(f[5]);
    row.test.ic = parse_double(f[6]);
    row.test.bulk = parse_double(f[7]);
    row.test.bc = parse_double(f[8]);
    row.mse = parse_double(f[9]);
    row.kappa_t = parse_opt(f[10]);
    row.kappa_omega = parse_opt(f[11]);
    row.cos_theta = parse_opt(f[12]);
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::span<const analysis::SummaryRow> rows,
                       const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "optimizer,beta,arch,lr,median_final_mse,median_final_kappa_omega,"
         "median_final_kappa_t,spearman_kw_mse,spearman_kt_mse,n_diverged\n";
  for (const analysis::SummaryRow& r : rows) {
    out << r.optimizer << ',' << format_double(r.beta) << ',' << r.arch << ','
        << format_double(r.lr) << ',' << format_double(r.median_final_mse) << ','
        << opt_field(r.median_final_kappa_omega) << ','
        << opt_field(r.median_final_kappa_t) << ','
        << opt_field(r.spearman_kw_mse) << ',' << opt_field(r.spearman_kt_mse)
        << ',' << r.n_diverged << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_scatter_csv(std::span<const analysis::ScatterRow> rows,
                       const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "optimizer,beta,arch,lr,data_seed,init_seed,final_kappa_omega,"
         "final_kappa_t,final_mse,rho_kw_mse,rho_kt_mse,n_dropped_pairs,"
         "status\n";
  for (const analysis::ScatterRow& r : rows) {
    out << r.optimizer << ',' << format_double(r.beta) << ',' << r.arch << ','
        << format_double(r.lr) << ',' << r.data_seed << ',' << r.init_seed
        << ',' << opt_field(r.final_kappa_omega) << ','
        << opt_field(r.final_kappa_t) << ',' << format_double(r.final_mse)
        << ',' << opt_field(r.rho_kw_mse) << ',' << opt_field(r.rho_kt_mse)
        << ',' << r.n_dropped_pairs << ',' << analysis::to_string(r.status)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void append_manifest(const std::filesystem::path& manifest_path,
                     const analysis::RunRecord& record,
                     const std::string& csv_file) {
  const bool fresh = !std::filesystem::exists(manifest_path);
  std::ofstream out = open_for_write(manifest_path, std::ios::app);
  if (fresh) out << kManifestHeader << '\n';
  const runner::ExperimentConfig& c = record.config;
  out << csv_file << ',' << optim::to_string(c.optimizer.kind) << ','
      << format_double(c.optimizer.learning_rate) << ',' << format_double(c.beta)
      << ',' << runner::to_string(c.arch) << ',' << c.epochs << ','
      << c.data_seed << ',' << c.init_seed << ','
      << analysis::to_string(record.status) << '\n';
  if (!out) throw IoError("write failed: " + manifest_path.string());
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in = open_for_read(manifest_path);
  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty manifest: " + manifest_path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader)
    throw IoError("unexpected manifest header in " + manifest_path.string());
  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 9)
      throw IoError("malformed manifest row in " + manifest_path.string());
    ManifestRow row;
    row.file = f[0];
    row.config.optimizer.kind = optim::optimizer_from_string(f[1]);
    row.config.optimizer.learning_rate = parse_double(f[2]);
    row.config.beta = parse_double(f[3]);
    row.config.arch = runner::arch_from_string(f[4]);
    row.config.epochs = parse_int<int>(f[5]);
    row.config.data_seed = parse_int<std::uint64_t>(f[6]);
    row.config.init_seed = parse_int<std::uint64_t>(f[7]);
    row.status = analysis::run_status_from_string(f[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<analysis::RunRecord> load_runs(const std::filesystem::path& dir) {
  std::vector<analysis::RunRecord> records;
  for (const ManifestRow& m : read_manifest(dir / "manifest.csv")) {
    analysis::RunRecord record;
    record.config = m.config;
    record.status = m.status;
    for (const CsvRow& c : read_run_csv(dir / m.file)) {
      analysis::EpochRow row;
      row.epoch = c.epoch;
      row.train = c.train;
      row.test = c.test;
      row.mse = c.mse;
      if (c.kappa_t || c.kappa_omega || c.cos_theta) {
        geom::CurvatureSample sample;
        sample.step_index = c.epoch;
        sample.kappa_t = c.kappa_t;
        sample.kappa_omega = c.kappa_omega;
        sample.cos_theta = c.cos_theta;
        sample.speed = (c.kappa_t && c.kappa_omega && *c.kappa_omega != 0.0)
                           ? *c.kappa_t / *c.kappa_omega
                           : 0.0;
        row.curvature = sample;
      }
      record.rows.push_back(std::move(row));
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace pinnlab::io
