#include "sumnorm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <vector>

#include "sumnorm/errors.hpp"

namespace sumnorm {

std::string format_fixed(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  return buf;
}

namespace {

constexpr int kPrecision = 6;

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_tidy_csv(std::ostream& out, std::span<const ReplicateResult> results) {
  out << kTidyHeader << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : results) {
    out << r.size << ',' << r.replicate << ',' << to_string(r.method);
    for (Param p : {Param::mu, Param::sigma}) {
      const ParamSummary s = r.ok ? r.param(p) : ParamSummary{nan, nan, nan, nan, nan, nan};
      for (double v : {s.post_mean, s.post_sd, s.ci_lower, s.ci_upper, s.ess, s.rhat}) {
        out << ',' << format_fixed(v, kPrecision);
      }
    }
    out << ',' << r.seed << ',' << format_fixed(r.wall_time_ms, 3) << ','
        << (r.ok ? std::string("ok") : csv_quote("failed: " + r.error)) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << r.size << ',' << to_string(r.method) << ',' << to_string(r.param) << ','
        << format_fixed(r.rmse, kPrecision) << ',' << format_fixed(r.coverage, kPrecision) << ','
        << r.n_ok << ',' << r.n_failed << '\n';
  }
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << kComparisonHeader << '\n';
  for (const auto& r : rows) {
    out << r.size << ',' << to_string(r.param) << ',' << format_fixed(r.rmse_gibbs, kPrecision)
        << ',' << format_fixed(r.rmse_metropolis, kPrecision) << ','
        << format_fixed(r.relative_difference, kPrecision) << ',' << (r.flagged ? 1 : 0)
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) { return format_fixed(v, 2); }

struct Panel {
  double left, top, width, height;
  double log_x_min, log_x_max;
  double y_min, y_max;

  double px(double x) const {
    return left + (std::log10(x) - log_x_min) / (log_x_max - log_x_min) * width;
  }
  double py(double y) const { return top + height - (y - y_min) / (y_max - y_min) * height; }
};

Panel make_panel(double left, double top, double width, double height,
                 const std::vector<std::int64_t>& sizes, double y_min, double y_max) {
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  double x_min = std::log10(static_cast<double>(*lo)) - 0.15;
  double x_max = std::log10(static_cast<double>(*hi)) + 0.15;
  if (y_max <= y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double pad = 0.08 * (y_max - y_min);
  return {left, top, width, height, x_min, x_max, y_min - pad, y_max + pad};
}

void draw_axes(std::ostringstream& svg, const Panel& p, const std::vector<std::int64_t>& sizes,
               const std::string& title, const std::string& y_label) {
  svg << "<rect x=\"" << num(p.left) << "\" y=\"" << num(p.top) << "\" width=\"" << num(p.width)
      << "\" height=\"" << num(p.height) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg << "<text x=\"" << num(p.left + p.width / 2) << "\" y=\"" << num(p.top - 8)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  svg << "<text x=\"" << num(p.left - 44) << "\" y=\"" << num(p.top + p.height / 2)
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
      << num(p.left - 44) << ' ' << num(p.top + p.height / 2) << ")\">" << y_label
      << "</text>\n";
  for (auto n : sizes) {
    const double x = p.px(static_cast<double>(n));
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(p.top + p.height) << "\" x2=\""
        << num(x) << "\" y2=\"" << num(p.top + p.height + 4) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(p.top + p.height + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << n << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = p.y_min + (p.y_max - p.y_min) * k / 4.0;
    const double y = p.py(v);
    svg << "<line x1=\"" << num(p.left - 4) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(p.left) << "\" y2=\"" << num(y) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(p.left - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_fixed(v, 2) << "</text>\n";
  }
  svg << "<text x=\"" << num(p.left + p.width / 2) << "\" y=\"" << num(p.top + p.height + 32)
      << "\" text-anchor=\"middle\" font-size=\"12\">sample size n (log scale)</text>\n";
}

std::string svg_open(double width, double height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
     << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
     << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

std::string render_estimates_svg(std::span<const ReplicateResult> results,
                                 const Scenario& scenario) {
  constexpr double kPanelW = 320, kPanelH = 220, kMarginL = 70, kMarginT = 40, kGapX = 60,
                   kGapY = 80;
  const auto& methods = scenario.methods;
  const double width = kMarginL + methods.size() * (kPanelW + kGapX);
  const double height = kMarginT + 2 * (kPanelH + kGapY);
  std::ostringstream svg;
  svg << svg_open(width, height);
  int row = 0;
  for (Param param : {Param::mu, Param::sigma}) {
    const double truth = param == Param::mu ? scenario.true_mu : scenario.true_sigma;
    for (std::size_t col = 0; col < methods.size(); ++col) {
      std::vector<const ReplicateResult*> shown;
      double y_min = truth, y_max = truth;
      for (const auto& r : results) {
        if (r.ok && r.replicate == 0 && r.method == methods[col]) {
          shown.push_back(&r);
          y_min = std::min(y_min, r.param(param).ci_lower);
          y_max = std::max(y_max, r.param(param).ci_upper);
        }
      }
      const Panel p = make_panel(kMarginL + col * (kPanelW + kGapX), kMarginT + row * (kPanelH + kGapY),
                                 kPanelW, kPanelH, scenario.sizes, y_min, y_max);
      draw_axes(svg, p, scenario.sizes,
                std::string(to_string(param)) + " (" + std::string(to_string(methods[col])) + ")",
                std::string(to_string(param)));
      svg << "<line x1=\"" << num(p.left) << "\" y1=\"" << num(p.py(truth)) << "\" x2=\""
          << num(p.left + p.width) << "\" y2=\"" << num(p.py(truth))
          << "\" stroke=\"red\" stroke-dasharray=\"3,3\"/>\n";
      for (const auto* r : shown) {
        const auto& s = r->param(param);
        const double x = p.px(static_cast<double>(r->size));
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(p.py(s.ci_lower)) << "\" x2=\""
            << num(x) << "\" y2=\"" << num(p.py(s.ci_upper)) << "\" stroke=\"black\"/>\n";
        svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(p.py(s.post_mean))
            << "\" r=\"3.5\" fill=\"black\"/>\n";
      }
    }
    ++row;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_rmse_svg(std::span<const AggregateRow> rows, const Scenario& scenario) {
  constexpr double kPanelW = 320, kPanelH = 220, kMarginL = 70, kMarginT = 40, kGapX = 60;
  const double width = kMarginL + 2 * (kPanelW + kGapX) + 90;
  const double height = kMarginT + kPanelH + 70;
  std::ostringstream svg;
  svg << svg_open(width, height);
  int col = 0;
  for (Param param : {Param::mu, Param::sigma}) {
    double y_max = 0.0;
    for (const auto& r : rows) {
      if (r.param == param && std::isfinite(r.rmse)) y_max = std::max(y_max, r.rmse);
    }
    const Panel p = make_panel(kMarginL + col * (kPanelW + kGapX), kMarginT, kPanelW, kPanelH,
                               scenario.sizes, 0.0, y_max);
    draw_axes(svg, p, scenario.sizes, "RMSE of " + std::string(to_string(param)), "RMSE");
    for (std::size_t m = 0; m < scenario.methods.size(); ++m) {
      const char* color = kPalette[m % 4];
      std::ostringstream points;
      for (const auto& r : rows) {
        if (r.param != param || r.method != scenario.methods[m] || !std::isfinite(r.rmse)) {
          continue;
        }
        const double x = p.px(static_cast<double>(r.size)), y = p.py(r.rmse);
        points << num(x) << ',' << num(y) << ' ';
        svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
      svg << "<polyline points=\"" << points.str() << "\" fill=\"none\" stroke=\"" << color
          << "\"/>\n";
      if (col == 1) {
        const double ly = kMarginT + 16 + 18 * static_cast<double>(m);
        svg << "<text x=\"" << num(p.left + p.width + 12) << "\" y=\"" << num(ly)
            << "\" font-size=\"12\" fill=\"" << color << "\">" << to_string(scenario.methods[m])
            << "</text>\n";
      }
    }
    ++col;
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

ReportFiles emit_report(std::span<const ReplicateResult> results, const Scenario& scenario,
                        const std::filesystem::path& out_dir, bool plots) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string() +
                  (ec ? ": " + ec.message() : ""));
  }
  ReportFiles files{out_dir / "replicates.csv", out_dir / "aggregate.csv", std::nullopt,
                    std::nullopt};
  std::ostringstream tidy;
  write_tidy_csv(tidy, results);
  write_text_file(files.tidy, tidy.str());

  const auto rows = aggregate(results, scenario);
  std::ostringstream agg;
  write_aggregate_csv(agg, rows);
  write_text_file(files.aggregate, agg.str());

  if (plots) {
    files.estimates_plot = out_dir / "estimates.svg";
    files.rmse_plot = out_dir / "rmse.svg";
    write_text_file(*files.estimates_plot, render_estimates_svg(results, scenario));
    write_text_file(*files.rmse_plot, render_rmse_svg(rows, scenario));
  }
  return files;
}

}  // namespace sumnorm
