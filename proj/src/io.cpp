#include "entrosteer/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace entrosteer::io {

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("'" + path + "': " + e.what());
  }
}

}  // namespace

DensityFile read_density_json(const std::string& path, bool normalize) {
  const json j = load_json(path);
  if (!j.is_object() || !j.contains("axes") || !j.contains("values"))
    throw parse_error("'" + path + "': density JSON needs 'axes' and 'values'");
  std::vector<Axis> axes;
  try {
    for (const json& ja : j.at("axes"))
      axes.push_back(Axis{ja.at("origin").get<double>(), ja.at("step").get<double>(),
                          ja.at("count").get<std::size_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("'" + path + "': malformed axis entry: " + e.what());
  }
  std::vector<double> values;
  try {
    values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("'" + path + "': malformed value array: " + e.what());
  }

  DensityFile out{GridDensity(std::vector<Axis>{Axis{0, 1, 2}}, std::vector<double>{1, 1}),
                  {}, false};
  out.diagnostics = validate_density(axes, values);
  if (normalize) {
    out.density = GridDensity::normalized(std::move(axes), std::move(values));
    out.renormalized = true;
  } else {
    out.density = GridDensity(std::move(axes), std::move(values));
  }
  return out;
}

void write_density_json(const std::string& path, const GridDensity& density) {
  json j;
  j["type"] = "density";
  j["axes"] = json::array();
  for (const Axis& ax : density.axes())
    j["axes"].push_back({{"origin", ax.origin}, {"step", ax.step}, {"count", ax.count}});
  j["values"] = std::vector<double>(density.values().begin(), density.values().end());
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  // strtod instead of std::stod: subnormal tails must parse, not throw
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || *end != '\0' || std::abs(v) == HUGE_VAL)
    throw parse_error("'" + path + "' line " + std::to_string(line_no) + ": bad number '" + s +
                      "'");
  return v;
}

std::optional<std::vector<double>> sidecar_widths(const std::string& path) {
  std::ifstream probe(path + ".meta.json");
  if (!probe) return std::nullopt;
  const json j = load_json(path + ".meta.json");
  if (!j.contains("widths")) return std::nullopt;
  return j.at("widths").get<std::vector<double>>();
}

}  // namespace

HistogramFile read_histogram_csv(const std::string& path,
                                 std::optional<std::vector<double>> widths, bool normalize) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");

  if (!widths) widths = sidecar_widths(path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw parse_error("'" + path + "': empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "prob")
    throw parse_error("'" + path + "' line 1: header must be 'name[,name...],prob'");
  const std::size_t rank = header.size() - 1;
  if (rank > k_max_rank)
    throw parse_error("'" + path + "': too many axes (max " + std::to_string(k_max_rank) + ")");
  if (!widths)
    throw parse_error("'" + path + "': window widths required (--dx/--widths flag or '" + path +
                      ".meta.json' sidecar)");
  if (widths->size() != rank)
    throw parse_error("'" + path + "': expected " + std::to_string(rank) + " window widths");

  struct Row {
    std::vector<double> centers;
    double value;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  bool all_integral = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != rank + 1)
      throw parse_error("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rank + 1) + " fields, got " +
                        std::to_string(fields.size()));
    Row row;
    row.line_no = line_no;
    for (std::size_t a = 0; a < rank; ++a)
      row.centers.push_back(parse_double(fields[a], path, line_no));
    row.value = parse_double(fields[rank], path, line_no);
    if (row.value != std::floor(row.value) || std::abs(row.value) > 1e15) all_integral = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("'" + path + "': no data rows");

  // window indices from center coordinates, per axis
  std::vector<HistAxis> dims(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    double lo = rows[0].centers[a];
    double hi = lo;
    for (const Row& r : rows) {
      lo = std::min(lo, r.centers[a]);
      hi = std::max(hi, r.centers[a]);
    }
    const double w = (*widths)[a];
    if (!(w > 0.0)) throw parse_error("'" + path + "': widths must be positive");
    const double span = (hi - lo) / w;
    const double m = std::round(span);
    if (std::abs(span - m) > 1e-6)
      throw parse_error("'" + path + "': centers of axis '" + header[a] +
                        "' are not spaced by the given width");
    dims[a] = HistAxis{w, static_cast<std::size_t>(m) + 1, lo};
  }

  Shape shape = detail::shape_of(dims);
  std::vector<double> probs(shape.size(), 0.0);
  std::vector<bool> seen(shape.size(), false);
  for (const Row& r : rows) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      const double t = (r.centers[a] - dims[a].first_center) / dims[a].width;
      const double k = std::round(t);
      if (std::abs(t - k) > 1e-6)
        throw parse_error("'" + path + "' line " + std::to_string(r.line_no) +
                          ": center off the window lattice");
      flat = flat * dims[a].count + static_cast<std::size_t>(k);
    }
    if (seen[flat])
      throw parse_error("'" + path + "' line " + std::to_string(r.line_no) +
                        ": duplicate window cell");
    seen[flat] = true;
    probs[flat] = r.value;
  }

  HistogramFile out{Histogram({HistAxis{1.0, 1, 0.0}}, {1.0}), {}, false, 0.0, false, {}};
  out.axis_names.assign(header.begin(), header.end() - 1);
  out.diagnostics = validate_histogram(dims, probs);
  if (all_integral) {
    out.from_counts = true;
    for (double p : probs) out.total_count += p;
    out.hist = Histogram::normalized(std::move(dims), std::move(probs));
    out.renormalized = true;
  } else if (normalize) {
    out.hist = Histogram::normalized(std::move(dims), std::move(probs));
    out.renormalized = true;
  } else {
    out.hist = Histogram(std::move(dims), std::move(probs));
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_histogram_csv(const std::string& path, const Histogram& hist,
                         const std::vector<std::string>& axis_names) {
  if (axis_names.size() != hist.rank())
    throw validation_error("one axis name required per histogram axis");
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write '" + path + "'");
  for (const std::string& n : axis_names) out << n << ',';
  out << "prob\n";
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = hist.shape().size();
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t a = 0; a < hist.rank(); ++a)
      out << format_number(hist.dim(a).center(idx[a])) << ',';
    out << format_number(hist.prob(f)) << '\n';
    for (std::size_t a = hist.rank(); a-- > 0;) {
      if (++idx[a] < hist.shape().extent[a]) break;
      idx[a] = 0;
    }
  }
}

void write_histogram_sidecar(const std::string& path, const Histogram& hist) {
  json j;
  j["widths"] = json::array();
  for (const HistAxis& d : hist.dims()) j["widths"].push_back(d.width);
  std::ofstream out(path + ".meta.json");
  if (!out) throw parse_error("cannot write '" + path + ".meta.json'");
  out << j.dump(2) << '\n';
}

json to_json(const EntropyValue& v) {
  return json{{"value", v.value}, {"base", log_base_name(v.base)}};
}

json to_json(const Diagnostics& d) {
  return json{{"total", d.total},
              {"normalization_defect", d.normalization_defect},
              {"clamped_jitter_cells", d.clamped_jitter},
              {"hard_negative_cells", d.hard_negatives},
              {"tail_mass_estimate", d.tail_mass_estimate},
              {"notes", d.notes}};
}

json to_json(const ConnectionReport& r) {
  json per_window = json::array();
  for (const WindowTerm& t : r.per_window)
    per_window.push_back(json{{"window", t.index}, {"prob", t.prob}, {"h_window", t.h_window}});
  return json{{"base", log_base_name(r.base)},
              {"h_continuous", r.lhs.value},
              {"sum_p_h_window", r.sum_p_h},
              {"discrete_entropy", r.discrete_entropy},
              {"residual", r.residual},
              {"per_window", std::move(per_window)}};
}

json to_json(const GapReport& g) {
  return json{{"inequality", inequality_name(g.id)},
              {"applicable", g.applicable},
              {"direction", g.greater_type ? ">=" : "<="},
              {"continuous", g.continuous},
              {"discrete", g.discrete},
              {"log_width_term", g.log_width_term},
              {"gap", g.gap},
              {"widths", g.widths},
              {"base", log_base_name(g.base)}};
}

json to_json(const SteeringReport& r) {
  json per_axis = json::array();
  for (const SteeringAxisRecord& rec : r.per_axis)
    per_axis.push_back(json{{"H_xB_given_xA", rec.H_xB_given_xA},
                            {"H_kB_given_kA", rec.H_kB_given_kA},
                            {"dx_B", rec.dx_B},
                            {"dk_B", rec.dk_B},
                            {"rhs", rec.rhs}});
  return json{{"mode", r.mode == SteeringMode::per_axis ? "per-axis" : "vector"},
              {"base", log_base_name(r.base)},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"margin", r.margin},
              {"violated", r.violated},
              {"vacuous", r.vacuous},
              {"per_axis", std::move(per_axis)}};
}

json to_json(const CmiProbe& p) {
  return json{{"exploratory", p.exploratory},
              {"base", log_base_name(p.base)},
              {"h_cmi_continuous", p.continuous},
              {"H_cmi_discrete", p.discrete},
              {"difference", p.difference},
              {"note", "no ordering between h(x:y|z) and H(X:Y|Z) is asserted"}};
}

}  // namespace entrosteer::io
