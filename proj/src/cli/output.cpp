#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "stodom/errors.hpp"

#ifndef STODOM_VERSION
#define STODOM_VERSION "0.0.0"
#endif

namespace stodom::cli {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

void write_header(std::ostream& out, const RunConfig& cfg) {
  out << "# stodom " << STODOM_VERSION << '\n';
  out << "# config " << to_json(cfg).dump() << '\n';
}

OutputFile::OutputFile(const RunConfig& cfg, const std::string& name) {
  if (cfg.out.empty()) return;
  std::filesystem::create_directories(cfg.out);
  path_ = (std::filesystem::path(cfg.out) / name).string();
  file_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
  detail::require(static_cast<bool>(*file_), "cannot write '" + path_ + "'");
  if (std::filesystem::path(name).extension() != ".svg") write_header(*file_, cfg);
}

namespace {

std::string escape(const std::string& s) {
  std::string r;
  for (const char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_svg(std::ostream& out, const PlotSpec& spec) {
  constexpr double W = 640, H = 420, L = 70, R = 20, Tm = 40, B = 55;
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  for (const Series& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.yerr.size() ? s.yerr[i] : 0.0;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  }
  if (!(xmin < xmax)) {
    xmin = std::isfinite(xmin) ? xmin - 0.5 : 0.0;
    xmax = xmin + 1.0;
  }
  if (!(ymin < ymax)) {
    ymin = std::isfinite(ymin) ? ymin - 0.5 : 0.0;
    ymax = ymin + 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - Tm - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (spec.band_lo <= spec.band_hi) {
    const double x0 = sx(std::clamp(spec.band_lo, xmin, xmax));
    const double x1 = sx(std::clamp(spec.band_hi, xmin, xmax));
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(Tm) << "\" width=\"" << num(std::max(x1 - x0, 1.0))
        << "\" height=\"" << num(H - Tm - B) << "\" fill=\"#ffe08a\" opacity=\"0.6\"/>\n";
  }
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(H - B + 18) << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n";
    out << "<text x=\"" << num(L - 6) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(spec.xlabel)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2
      << ")\">" << escape(spec.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& s = spec.series[k];
    const char* color = kPalette[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) out << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.yerr.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << "<line x1=\"" << num(sx(s.x[i])) << "\" y1=\"" << num(sy(s.y[i] - s.yerr[i])) << "\" x2=\""
          << num(sx(s.x[i])) << "\" y2=\"" << num(sy(s.y[i] + s.yerr[i])) << "\" stroke=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << num(W - R - 150) << "\" y=\"" << num(Tm + 16 * (k + 1)) << "\" fill=\"" << color
        << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace stodom::cli
