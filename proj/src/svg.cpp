#include "pinnlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include "pinnlab/errors.hpp"
#include "pinnlab/numfmt.hpp"

namespace pinnlab::viz {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 32.0;
constexpr double kMarginBottom = 52.0;

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* color_for_optimizer(const std::string& name) {
  if (name == "gd") return "#d62728";
  if (name == "adam") return "#1f77b4";
  if (name == "lbfgs") return "#2ca02c";
  if (name == "bbi") return "#ff7f0e";
  return "#7f7f7f";
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pix_lo = 0.0, pix_hi = 1.0;  // pixel range (may be descending for y)

  double map(double v) const {
    double a = lo, b = hi, x = v;
    if (log) {
      a = std::log10(a);
      b = std::log10(b);
      x = std::log10(x);
    }
    const double t = b == a ? 0.5 : (x - a) / (b - a);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

// Expands a degenerate or empty range to something drawable.
void fix_range(double& lo, double& hi, bool log) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    lo = log ? 0.1 : 0.0;
    hi = log ? 10.0 : 1.0;
    return;
  }
  if (lo == hi) {
    if (log) {
      lo /= 10.0;
      hi *= 10.0;
    } else {
      lo -= 0.5;
      hi += 0.5;
    }
  }
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    double v = t;
    if (std::abs(v) < step * 1e-9) v = 0.0;
    ticks.push_back(v);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  const int klo = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
  const int khi = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
  int stride = 1;
  if (khi - klo > 12) stride = (khi - klo + 11) / 12;
  std::vector<double> ticks;
  for (int k = klo; k <= khi; k += stride) ticks.push_back(std::pow(10.0, k));
  if (ticks.empty()) ticks.push_back(lo);
  return ticks;
}

std::string tick_label(double v) {
  if (v != 0.0) {
    const double a = std::abs(v);
    if (a >= 1e4 || a < 1e-3) {
      const int k = static_cast<int>(std::llround(std::log10(a)));
      if (std::abs(a - std::pow(10.0, k)) < a * 1e-9) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%s1e%d", v < 0 ? "-" : "", k);
        return buf;
      }
    }
  }
  return format_double(v);
}

class Canvas {
 public:
  Canvas() {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) +
             "\" height=\"" + px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) +
             " " + px(kHeight) + "\">\n";
    body_ += "<rect width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
             "\" fill=\"white\"/>\n";
  }

  void set_scales(Scale x, Scale y) {
    x_ = x;
    y_ = y;
    x_.pix_lo = kMarginLeft;
    x_.pix_hi = kWidth - kMarginRight;
    y_.pix_lo = kHeight - kMarginBottom;
    y_.pix_hi = kMarginTop;
  }

  bool visible(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (x_.log && x <= 0.0) return false;
    if (y_.log && y <= 0.0) return false;
    return true;
  }

  void axes(const std::string& xlabel, const std::string& ylabel,
            const std::string& title) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    for (double t : (x_.log ? log_ticks(x_.lo, x_.hi)
                            : linear_ticks(x_.lo, x_.hi))) {
      const double xp = x_.map(t);
      line(xp, y0, xp, y1, "#dddddd", 1.0, false);
      line(xp, y0, xp, y0 + 4, "#000000", 1.0, false);
      text(xp, y0 + 16, tick_label(t), "middle", 11);
    }
    for (double t : (y_.log ? log_ticks(y_.lo, y_.hi)
                            : linear_ticks(y_.lo, y_.hi))) {
      const double yp = y_.map(t);
      line(x0, yp, x1, yp, "#dddddd", 1.0, false);
      line(x0 - 4, yp, x0, yp, "#000000", 1.0, false);
      text(x0 - 7, yp + 4, tick_label(t), "end", 11);
    }
    line(x0, y0, x1, y0, "#000000", 1.0, false);
    line(x0, y0, x0, y1, "#000000", 1.0, false);
    text((x0 + x1) / 2.0, kHeight - 14, xlabel, "middle", 12);
    body_ += "<text x=\"16\" y=\"" + px((y0 + y1) / 2.0) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"12\" transform=\"rotate(-90 16 " +
             px((y0 + y1) / 2.0) + ")\">" + escape_xml(ylabel) + "</text>\n";
    text((x0 + x1) / 2.0, 20, title, "middle", 13);
  }

  void polyline(const std::vector<std::pair<double, double>>& data,
                const std::string& color, bool dashed) {
    std::string pts;
    auto flush = [&] {
      if (pts.find(' ') != std::string::npos) {
        body_ += "<polyline fill=\"none\" stroke=\"" + color +
                 "\" stroke-width=\"1.5\"";
        if (dashed) body_ += " stroke-dasharray=\"6 4\"";
        body_ += " points=\"" + pts + "\"/>\n";
      }
      pts.clear();
    };
    for (const auto& [x, y] : data) {
      if (!visible(x, y)) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += px(x_.map(x)) + "," + px(y_.map(y));
    }
    flush();
  }

  void circle_marker(double x, double y, const std::string& color) {
    if (!visible(x, y)) return;
    body_ += "<circle cx=\"" + px(x_.map(x)) + "\" cy=\"" + px(y_.map(y)) +
             "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.7\"/>\n";
  }

  void cross_marker(double x, double y, const std::string& color) {
    if (!visible(x, y)) return;
    const double cx = x_.map(x), cy = y_.map(y);
    line(cx - 3, cy - 3, cx + 3, cy + 3, color, 1.5, false);
    line(cx - 3, cy + 3, cx + 3, cy - 3, color, 1.5, false);
  }

  void legend_entry(const std::string& label, const std::string& color,
                    bool dashed) {
    const double x = kWidth - kMarginRight - 150.0;
    const double y = kMarginTop + 14.0 + 16.0 * legend_rows_++;
    line(x, y - 4, x + 24, y - 4, color, 1.5, dashed);
    text(x + 30, y, label, "start", 11);
  }

  void write(const std::filesystem::path& path) {
    body_ += "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << body_;
    if (!out) throw IoError("failed writing " + path.string());
  }

 private:
  void line(double x0, double y0, double x1, double y1,
            const std::string& color, double width, bool dashed) {
    body_ += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y0) + "\" x2=\"" +
             px(x1) + "\" y2=\"" + px(y1) + "\" stroke=\"" + color +
             "\" stroke-width=\"" + px(width) + "\"";
    if (dashed) body_ += " stroke-dasharray=\"6 4\"";
    body_ += "/>\n";
  }

  void text(double x, double y, const std::string& s,
            const std::string& anchor, int size) {
    body_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" +
             anchor + "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\">" + escape_xml(s) + "</text>\n";
  }

  std::string body_;
  Scale x_, y_;
  int legend_rows_ = 0;
};

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v, bool log_scale) {
    if (!std::isfinite(v)) return;
    if (log_scale && v <= 0.0) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool ok() const { return lo <= hi; }
};

}  // namespace

void plot_summary(const std::vector<analysis::SummaryRow>& summary,
                  const std::filesystem::path& out_dir) {
  // One line per (optimizer, arch), beta on x, median final mse on y.
  std::map<std::pair<std::string, std::string>,
           std::vector<std::pair<double, double>>> series;
  Extent ex, ey;
  for (const analysis::SummaryRow& row : summary) {
    if (!std::isfinite(row.median_final_mse) || row.median_final_mse <= 0.0)
      continue;
    series[{row.optimizer, row.arch}].emplace_back(row.beta,
                                                   row.median_final_mse);
    ex.add(row.beta, false);
    ey.add(row.median_final_mse, true);
  }
  if (series.empty()) return;
  for (auto& [key, pts] : series)
    std::sort(pts.begin(), pts.end());

  Canvas canvas;
  Scale sx{ex.lo, ex.hi, false};
  Scale sy{ey.lo, ey.hi, true};
  fix_range(sx.lo, sx.hi, false);
  fix_range(sy.lo, sy.hi, true);
  canvas.set_scales(sx, sy);
  canvas.axes("advection speed", "median final mse", "accuracy vs advection speed");
  for (const auto& [key, pts] : series) {
    const bool dashed = key.second == "L";
    canvas.polyline(pts, color_for_optimizer(key.first), dashed);
    canvas.legend_entry(key.first + " (" + key.second + ")",
                        color_for_optimizer(key.first), dashed);
  }
  canvas.write(out_dir / "median_mse_vs_beta.svg");
}

void plot_scatter(const std::vector<analysis::ScatterRow>& scatter,
                  const std::filesystem::path& out_dir) {
  Extent ex, ey;
  std::size_t n_visible = 0;
  for (const analysis::ScatterRow& row : scatter) {
    if (!row.final_kappa_omega || !(*row.final_kappa_omega > 0.0)) continue;
    if (!std::isfinite(row.final_mse) || row.final_mse <= 0.0) continue;
    ex.add(*row.final_kappa_omega, true);
    ey.add(row.final_mse, true);
    ++n_visible;
  }
  if (n_visible == 0) return;

  Canvas canvas;
  Scale sx{ex.lo, ex.hi, true};
  Scale sy{ey.lo, ey.hi, true};
  fix_range(sx.lo, sx.hi, true);
  fix_range(sy.lo, sy.hi, true);
  canvas.set_scales(sx, sy);
  canvas.axes("final normalized curvature", "final mse",
              "endpoint curvature vs accuracy");
  for (const analysis::ScatterRow& row : scatter) {
    if (!row.final_kappa_omega) continue;
    const char* color = color_for_optimizer(row.optimizer);
    if (row.arch == "L")
      canvas.cross_marker(*row.final_kappa_omega, row.final_mse, color);
    else
      canvas.circle_marker(*row.final_kappa_omega, row.final_mse, color);
  }
  for (const char* name : {"gd", "adam", "lbfgs", "bbi"})
    canvas.legend_entry(name, color_for_optimizer(name), false);
  canvas.write(out_dir / "final_mse_vs_kappa_omega.svg");
}

void plot_loss_curves(const std::vector<analysis::RunRecord>& runs,
                      const std::filesystem::path& out_dir) {
  for (const analysis::RunRecord& rec : runs) {
    if (rec.rows.empty()) continue;
    struct Component {
      const char* label;
      const char* color;
      double model::LossBreakdown::* field;
    };
    static constexpr Component kComponents[] = {
        {"total", "#000000", &model::LossBreakdown::total},
        {"initial", "#1f77b4", &model::LossBreakdown::ic},
        {"interior", "#d62728", &model::LossBreakdown::bulk},
        {"periodic", "#2ca02c", &model::LossBreakdown::bc},
    };

    Extent ex, ey;
    for (const analysis::EpochRow& row : rec.rows) {
      ex.add(static_cast<double>(row.epoch), false);
      for (const Component& c : kComponents) {
        ey.add(row.train.*c.field, true);
        ey.add(row.test.*c.field, true);
      }
    }
    if (!ex.ok() || !ey.ok()) continue;

    Canvas canvas;
    Scale sx{ex.lo, ex.hi, false};
    Scale sy{ey.lo, ey.hi, true};
    fix_range(sx.lo, sx.hi, false);
    fix_range(sy.lo, sy.hi, true);
    canvas.set_scales(sx, sy);
    canvas.axes("epoch", "loss", rec.config.id());
    for (const Component& c : kComponents) {
      std::vector<std::pair<double, double>> train_pts, test_pts;
      for (const analysis::EpochRow& row : rec.rows) {
        train_pts.emplace_back(static_cast<double>(row.epoch),
                               row.train.*c.field);
        test_pts.emplace_back(static_cast<double>(row.epoch),
                              row.test.*c.field);
      }
      canvas.polyline(train_pts, c.color, false);
      canvas.polyline(test_pts, c.color, true);
      canvas.legend_entry(std::string(c.label) + " train", c.color, false);
      canvas.legend_entry(std::string(c.label) + " test", c.color, true);
    }
    canvas.write(out_dir / ("loss_" + rec.config.id() + ".svg"));
  }
}

void emit_plots(const std::vector<analysis::SummaryRow>& summary,
                const std::vector<analysis::ScatterRow>& scatter,
                const std::vector<analysis::RunRecord>& runs,
                const std::filesystem::path& out_dir) {
  plot_summary(summary, out_dir);
  plot_scatter(scatter, out_dir);
  plot_loss_curves(runs, out_dir);
}

}  // namespace pinnlab::viz
