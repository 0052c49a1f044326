#pragma once

#include "entrosteer/connection.hpp"
#include "entrosteer/steering.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace entrosteer::io {

using json = nlohmann::ordered_json;

// Density files: JSON with explicit axes and a flat row-major value array,
//   {"type": "density", "axes": [{"origin": .., "step": .., "count": ..}, ..],
//    "values": [..]}
struct DensityFile {
  GridDensity density;
  Diagnostics diagnostics;
  bool renormalized = false;
};

DensityFile read_density_json(const std::string& path, bool normalize);
void write_density_json(const std::string& path, const GridDensity& density);

// Histogram files: CSV with a header row `name[,name...],prob`, one window
// cell per line keyed by window-center coordinates. Window widths come from
// `widths`, or from a `<path>.meta.json` sidecar with {"widths": [..]}.
// Integer-valued tables are treated as counts and normalized.
struct HistogramFile {
  Histogram hist;
  std::vector<std::string> axis_names;
  bool from_counts = false;
  double total_count = 0.0;
  bool renormalized = false;
  Diagnostics diagnostics;
};

HistogramFile read_histogram_csv(const std::string& path,
                                 std::optional<std::vector<double>> widths, bool normalize);
void write_histogram_csv(const std::string& path, const Histogram& hist,
                         const std::vector<std::string>& axis_names);
void write_histogram_sidecar(const std::string& path, const Histogram& hist);

// Report fragments shared by the CLI and its golden tests.
json to_json(const EntropyValue& v);
json to_json(const Diagnostics& d);
json to_json(const ConnectionReport& r);
json to_json(const GapReport& g);
json to_json(const SteeringReport& r);
json to_json(const CmiProbe& p);

// Fixed-format float used everywhere in text tables so golden files stay
// stable.
std::string format_number(double v);

}  // namespace entrosteer::io
