#include "horolab/experiments.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace horolab {

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void write_table(std::ostream& out, const ExperimentReport& report) {
  out << "# experiment=" << report.id << " config=" << report.config_hash << " seed=" << report.seed << '\n';
  for (std::size_t i = 0; i < report.table.columns.size(); ++i) out << (i ? "\t" : "") << report.table.columns[i];
  out << '\n';
  for (const auto& row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
    out << '\n';
  }
}

namespace {

const char* model_name(RateModel m) { return m == RateModel::power ? "power" : "exponential"; }

}  // namespace

void write_summary(std::ostream& out, const ExperimentConfig& config, const std::vector<ExperimentReport>& reports) {
  const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
  out << "config = " << config.name << '\n';
  out << "config_hash = " << config_hash(config) << '\n';
  out << "seed = " << config.seed << '\n';
  out << "experiments = " << reports.size() << '\n';
  out << "verdict = " << (all ? "pass" : "fail") << '\n';
  for (const auto& r : reports) {
    out << "\n[" << r.id << "]\n";
    out << "verdict = " << (r.passed() ? "pass" : "fail") << '\n';
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    out << "seconds = " << secs << '\n';
    for (const auto& [name, fit] : r.fits) {
      out << "fit." << name << ".model = " << model_name(fit.model) << '\n';
      out << "fit." << name << ".kappa = " << format_double(fit.kappa) << '\n';
      out << "fit." << name << ".band = " << format_double(fit.band) << '\n';
      out << "fit." << name << ".prefactor = " << format_double(fit.prefactor) << '\n';
      out << "fit." << name << ".residual = " << format_double(fit.residual) << '\n';
      out << "fit." << name << ".absolute_values = " << (fit.absolute_values ? "true" : "false") << '\n';
    }
    for (const auto& [key, value] : r.records) out << key << " = " << value << '\n';
    for (const auto& v : r.verdicts) {
      out << "check." << v.name << " = " << (v.pass ? "pass" : "fail");
      if (!v.detail.empty()) out << " (" << v.detail << ')';
      out << '\n';
    }
  }
}

namespace {

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return log ? std::log10(v) : v; }

  void fit(const std::vector<double>& values) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (double v : values) {
      if (!usable(v)) continue;
      lo = std::min(lo, map(v));
      hi = std::max(hi, map(v));
    }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo); e <= hi; e += 1.0) t.push_back(e);
      if (t.size() >= 2) return t;
      t.clear();
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {2.0, 5.0, 10.0}) {
      if (step >= raw) break;
      step = m * mag;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi; v += step) t.push_back(v);
    return t;
  }
};

}  // namespace

void write_svg(std::ostream& out, const Plot& plot) {
  constexpr double width = 720, height = 440, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  Axis ax{plot.log_x}, ay{plot.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      ys.push_back(s.y[i]);
      if (i < s.error.size()) {
        ys.push_back(s.y[i] + s.error[i]);
        if (!plot.log_y) ys.push_back(s.y[i] - s.error[i]);
      }
    }
  }
  ax.fit(xs);
  ay.fit(ys);
  auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };
  auto clamp_y = [&](double y) { return std::clamp(y, top, top + ph); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = left + (t - ax.lo) / (ax.hi - ax.lo) * pw;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << top + ph << "\" x2=\"" << num(x) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << tick_label(ax.log ? std::pow(10.0, t) : t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = top + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << left << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(ay.log ? std::pow(10.0, t) : t) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = colors[k % 6];
    std::string path;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      path += (path.empty() ? "" : " ") + num(px(s.x[i])) + "," + num(clamp_y(py(s.y[i])));
    }
    if (!path.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << path << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      const double x = px(s.x[i]);
      if (i < s.error.size() && s.error[i] > 0.0) {
        const double hi = s.y[i] + s.error[i];
        const double lo = s.y[i] - s.error[i];
        const double yhi = clamp_y(py(hi));
        const double ylo = ay.usable(lo) ? clamp_y(py(lo)) : top + ph;
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(ylo) << "\" x2=\"" << num(x) << "\" y2=\"" << num(yhi)
            << "\" stroke=\"" << color << "\"/>\n";
      }
      out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(clamp_y(py(s.y[i]))) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << left + pw + 32 << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

std::vector<std::string> emit_outputs(const std::string& directory, const ExperimentConfig& config,
                                      const std::vector<ExperimentReport>& reports, const EmitOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw Error(ErrorCode::io_error, "cannot create output directory " + directory);
  }
  std::vector<std::string> paths;
  auto write = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    const std::string path = (fs::path(directory) / name).string();
    // Write to a sibling file and rename, so a re-emit never leaves a torn file.
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
      body(out);
      out.flush();
      if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot move " + tmp + " to " + path);
    paths.push_back(path);
  };
  for (const auto& r : reports) {
    write(r.id + ".tsv", [&](std::ostream& o) { write_table(o, r); });
    if (options.plots && r.plot) write(r.id + ".svg", [&](std::ostream& o) { write_svg(o, *r.plot); });
  }
  write("summary.txt", [&](std::ostream& o) { write_summary(o, config, reports); });
  return paths;
}

}  // namespace horolab
