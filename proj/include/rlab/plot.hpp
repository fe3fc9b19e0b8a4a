#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlab/table.hpp"

namespace rlab {

enum class PlotKind { loglog, trend };

struct Series {
  std::string y;
  std::string err;  // trend only; empty: rows sharing an x are averaged, bars show the standard error
};

struct PlotSpec {
  PlotKind kind = PlotKind::loglog;
  std::string x;
  std::vector<Series> series;  // loglog: exactly one
  std::string covariate;       // loglog: optional second regressor, one fitted line per level
  std::string title;
};

// log y = intercept + slope log x (+ covariate_slope log z), over rows with
// positive entries.
struct PlotFit {
  double slope = 0.0;
  double covariate_slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  bool has_covariate = false;
};

struct Plot {
  std::string svg;
  std::optional<PlotFit> fit;  // loglog with enough positive points
};

// Errors: EmptyTable, InvalidArgument for unknown or text columns.
Plot render_plot(const ResultTable& table, const PlotSpec& spec);
// render_plot written to `path`. Errors: as render_plot, Unwritable.
Plot emit_plot(const ResultTable& table, const PlotSpec& spec, const std::string& path);

// Text used for an annotated number.
std::string annotation_number(double v);

}  // namespace rlab
