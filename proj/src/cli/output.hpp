#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"

namespace stodom::cli {

/// Fixed-point with 9 decimals; "inf"/"nan" spelled out.
std::string fmt(double x);

/// Comment lines with the artifact version and the full run configuration.
void write_header(std::ostream& out, const RunConfig& cfg);

/// `cfg.out/name`, created with its directory and, for CSV files, the
/// header. Inactive when no output directory was requested.
class OutputFile {
 public:
  OutputFile(const RunConfig& cfg, const std::string& name);

  bool active() const { return file_ != nullptr; }
  std::ostream& stream() { return *file_; }
  const std::string& path() const { return path_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  /// Optional shaded vertical band, e.g. a bracket; ignored when lo > hi.
  double band_lo = 1.0;
  double band_hi = 0.0;
};

/// Self-contained SVG line plot with optional error bars.
void write_svg(std::ostream& out, const PlotSpec& spec);

}  // namespace stodom::cli
