#ifndef PINNLAB_SVG_HPP
#define PINNLAB_SVG_HPP

#include <filesystem>
#include <vector>

#include "pinnlab/record.hpp"
#include "pinnlab/stats.hpp"

namespace pinnlab::viz {

// Writes median_mse_vs_beta.svg from the summary table (one line per
// optimizer/architecture pair, log-scale y). No file when `summary` is empty.
void plot_summary(const std::vector<analysis::SummaryRow>& summary,
                  const std::filesystem::path& out_dir);

// Writes final_mse_vs_kappa_omega.svg, a log-log scatter of per-run endpoints.
// Rows with undefined or nonpositive coordinates are skipped; no file when
// nothing remains.
void plot_scatter(const std::vector<analysis::ScatterRow>& scatter,
                  const std::filesystem::path& out_dir);

// Writes loss_<run id>.svg per run: train (solid) and test (dashed) curves of
// the total loss and each component, log-scale y.
void plot_loss_curves(const std::vector<analysis::RunRecord>& runs,
                      const std::filesystem::path& out_dir);

// All of the above in one call.
void emit_plots(const std::vector<analysis::SummaryRow>& summary,
                const std::vector<analysis::ScatterRow>& scatter,
                const std::vector<analysis::RunRecord>& runs,
                const std::filesystem::path& out_dir);

}  // namespace pinnlab::viz

#endif
