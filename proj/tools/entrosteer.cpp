#include <CLI11.hpp>

#include "entrosteer/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

using namespace entrosteer;
using io::format_number;
using io::json;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct math_guarantee_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool g_log = false;

void log_info(const std::string& msg) {
  if (g_log) std::cerr << "[entrosteer] " << msg << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

BiphotonParams parse_model(const std::string& spec) {
  // "sigma_plus,sigma_minus[,n]"
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      parts.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw usage_error("--model expects 'sigma_plus,sigma_minus[,n]', got '" + spec + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw usage_error("--model expects 'sigma_plus,sigma_minus[,n]', got '" + spec + "'");
  std::size_t n = 1;
  if (parts.size() == 3) {
    n = static_cast<std::size_t>(parts[2]);
    if (static_cast<double>(n) != parts[2] || n < 1 || 2 * n > k_max_rank)
      throw usage_error("--model axis count must be 1 or 2");
  }
  return BiphotonParams::isotropic(parts[0], parts[1], n);
}

std::vector<double> expand_widths(const std::vector<double>& widths, std::size_t rank,
                                  const char* flag) {
  if (widths.empty()) throw usage_error(std::string(flag) + " is required here");
  if (widths.size() == 1) return std::vector<double>(rank, widths[0]);
  if (widths.size() != rank)
    throw usage_error(std::string(flag) + ": expected 1 or " + std::to_string(rank) + " widths");
  return widths;
}

void emit(const json& report, bool as_json) {
  if (as_json) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  // flat "key = value" text; nested objects/arrays indented one level
  const std::function<void(const json&, const std::string&)> walk = [&](const json& node,
                                                                        const std::string& prefix) {
    for (const auto& [key, val] : node.items()) {
      if (val.is_object()) {
        std::cout << prefix << key << ":\n";
        walk(val, prefix + "  ");
      } else if (val.is_array() && !val.empty() && val[0].is_object()) {
        for (std::size_t i = 0; i < val.size(); ++i) {
          std::cout << prefix << key << "[" << i << "]:\n";
          walk(val[i], prefix + "  ");
        }
      } else if (val.is_number_float()) {
        std::cout << prefix << key << " = " << format_number(val.get<double>()) << '\n';
      } else {
        std::cout << prefix << key << " = " << val.dump() << '\n';
      }
    }
  };
  walk(report, "");
}

json quantity(const EntropyValue& v) { return json{{"value", v.value}, {"base", log_base_name(v.base)}}; }

// ---- entropy -------------------------------------------------------------

json histogram_quantities(const Histogram& h, LogBase base) {
  json q;
  q["H"] = quantity(discrete_entropy(h, base));
  if (h.rank() == 2) {
    const std::size_t kx[1] = {0}, ky[1] = {1};
    q["H_x"] = quantity(discrete_entropy(marginalize(h, std::span<const std::size_t>(kx, 1)), base));
    q["H_y"] = quantity(discrete_entropy(marginalize(h, std::span<const std::size_t>(ky, 1)), base));
    q["H_y_given_x"] = quantity(conditional_entropy_discrete(h, std::size_t{0}, base));
    q["H_x_given_y"] = quantity(conditional_entropy_discrete(h, std::size_t{1}, base));
    q["I_xy"] = quantity(mutual_information_discrete(h, base));
  }
  return q;
}

json density_quantities(const GridDensity& d, LogBase base) {
  json q;
  q["h"] = quantity(differential_entropy(d, base));
  if (d.rank() == 2) {
    q["h_x"] = quantity(differential_entropy(marginalize(d, std::size_t{0}), base));
    q["h_y"] = quantity(differential_entropy(marginalize(d, std::size_t{1}), base));
    q["h_y_given_x"] = quantity(conditional_entropy_differential(d, std::size_t{0}, base));
    q["h_x_given_y"] = quantity(conditional_entropy_differential(d, std::size_t{1}, base));
    q["i_xy"] = quantity(mutual_information_differential(d, base));
  }
  return q;
}

int cmd_entropy(const std::string& input, const std::vector<double>& dx,
                const std::vector<double>& widths, LogBase base, bool normalize, bool as_json) {
  json report;
  report["command"] = "entropy";
  report["input"] = input;
  report["base"] = log_base_name(base);
  if (ends_with(input, ".csv")) {
    std::optional<std::vector<double>> w;
    if (!dx.empty()) w = dx;
    const io::HistogramFile f = io::read_histogram_csv(input, w, normalize);
    log_info("read histogram '" + input + "', " + std::to_string(f.hist.rank()) + " axes");
    report["kind"] = "histogram";
    json ws = json::array();
    for (const HistAxis& d : f.hist.dims()) ws.push_back(d.width);
    report["widths"] = std::move(ws);
    report["axis_names"] = f.axis_names;
    report["from_counts"] = f.from_counts;
    if (f.from_counts) report["total_count"] = f.total_count;
    report["renormalized"] = f.renormalized;
    report["diagnostics"] = io::to_json(f.diagnostics);
    report["quantities"] = histogram_quantities(f.hist, base);
  } else {
    const io::DensityFile f = io::read_density_json(input, normalize);
    log_info("read density '" + input + "', " + std::to_string(f.density.rank()) + " axes");
    report["kind"] = "density";
    report["renormalized"] = f.renormalized;
    report["diagnostics"] = io::to_json(f.diagnostics);
    report["quantities"] = density_quantities(f.density, base);
    if (!widths.empty()) {
      const std::vector<double> w = expand_widths(widths, f.density.rank(), "--widths");
      const Histogram h = bin_density(f.density, BinningSpec::tile_all(f.density.axes(), w));
      report["binned"] = json{{"widths", w}, {"quantities", histogram_quantities(h, base)}};
    }
  }
  emit(report, as_json);
  return 0;
}

// ---- verify-connection -----------------------------------------------------

int cmd_verify_connection(const std::string& input, const std::string& model,
                          const std::vector<double>& widths, LogBase base, bool normalize,
                          bool as_json) {
  std::optional<GridDensity> density;
  if (!input.empty()) {
    density = io::read_density_json(input, normalize).density;
  } else if (!model.empty()) {
    const BiphotonParams p = parse_model(model);
    density = position_joint(p, position_axes(p, widths));
  } else {
    throw usage_error("verify-connection needs an input density or --model");
  }
  const std::vector<double> w = expand_widths(widths, density->rank(), "--widths");
  const BinningSpec spec = BinningSpec::tile_all(density->axes(), w);
  log_info("verifying on a " + std::to_string(density->rank()) + "-axis grid");

  const ConnectionReport conn = verify_connection(*density, spec, base);
  const std::vector<GapReport> rows = gap_suite(*density, spec, base);

  json report;
  report["command"] = "verify-connection";
  report["base"] = log_base_name(base);
  report["widths"] = w;
  json conn_json = io::to_json(conn);
  conn_json.erase("per_window");  // summary only; window count instead
  conn_json["window_count"] = conn.per_window.size();
  report["connection"] = std::move(conn_json);
  json rows_json = json::array();
  for (const GapReport& g : rows) rows_json.push_back(io::to_json(g));
  report["inequalities"] = std::move(rows_json);

  const double lf = log_base_factor(base);
  bool breached = std::abs(conn.residual * lf) > k_identity_tol;
  for (const GapReport& g : rows)
    if (g.applicable && g.gap * lf < k_inequality_floor) breached = true;
  report["all_within_tolerance"] = !breached;
  emit(report, as_json);
  if (breached)
    throw math_guarantee_error("identity or inequality breached beyond tolerance");
  return 0;
}

// ---- steering ---------------------------------------------------------------

Histogram swap_parties(const Histogram& h) {
  const std::size_t rank = h.rank();
  const std::size_t n = rank / 2;
  std::vector<HistAxis> dims;
  for (std::size_t a = 0; a < rank; ++a) dims.push_back(h.dim((a + n) % rank));
  Shape out_shape = detail::shape_of(dims);
  std::vector<double> probs(out_shape.size());
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t total = h.shape().size();
  for (std::size_t f = 0; f < total; ++f) {
    std::array<std::size_t, k_max_rank> swapped{};
    for (std::size_t a = 0; a < rank; ++a) swapped[a] = idx[(a + n) % rank];
    probs[out_shape.flatten(std::span<const std::size_t>(swapped.data(), rank))] = h.prob(f);
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < h.shape().extent[a]) break;
      idx[a] = 0;
    }
  }
  return Histogram(std::move(dims), std::move(probs));
}

json steering_report_json(const SteeringReport& r, const char* steered_party) {
  json j = io::to_json(r);
  j["verdict"] = r.violated ? "violated" : "not violated";
  j["steered_party"] = steered_party;
  return j;
}

int cmd_steering(const std::string& x_hist, const std::string& k_hist, const std::string& model,
                 const std::vector<double>& dx, const std::vector<double>& dk, LogBase base,
                 bool vector_mode, bool swap_roles, bool normalize, bool as_json) {
  const SteeringMode mode = vector_mode ? SteeringMode::vector : SteeringMode::per_axis;
  Histogram hx({HistAxis{1.0, 1, 0.0}}, {1.0}), hk = hx;
  if (!x_hist.empty() || !k_hist.empty()) {
    if (x_hist.empty() || k_hist.empty())
      throw usage_error("--x-hist and --k-hist must be given together");
    std::optional<std::vector<double>> wx, wk;
    if (!dx.empty()) wx = dx;
    if (!dk.empty()) wk = dk;
    hx = io::read_histogram_csv(x_hist, wx, normalize).hist;
    hk = io::read_histogram_csv(k_hist, wk, normalize).hist;
  } else if (!model.empty()) {
    const BiphotonParams p = parse_model(model);
    const std::size_t n = p.dims();
    const std::vector<double> wx = expand_widths(dx, n, "--dx");
    const std::vector<double> wk = expand_widths(dk, n, "--dk");
    std::vector<double> wx2 = wx, wk2 = wk;  // same widths on both parties
    wx2.insert(wx2.end(), wx.begin(), wx.end());
    wk2.insert(wk2.end(), wk.begin(), wk.end());
    const GridDensity xj = position_joint(p, position_axes(p, wx));
    const GridDensity kj = momentum_joint(p, momentum_axes(p, wk));
    log_info("model grids: " + std::to_string(xj.values().size()) + " + " +
             std::to_string(kj.values().size()) + " nodes");
    hx = bin_density(xj, BinningSpec::tile_all(xj.axes(), wx2));
    hk = bin_density(kj, BinningSpec::tile_all(kj.axes(), wk2));
  } else {
    throw usage_error("steering needs --x-hist/--k-hist or --model");
  }
  if (swap_roles) {
    hx = swap_parties(hx);
    hk = swap_parties(hk);
  }
  const SteeringReport r = discrete_steering_test(hx, hk, base, mode);
  json report;
  report["command"] = "steering";
  report["report"] = steering_report_json(r, swap_roles ? "A" : "B");
  emit(report, as_json);
  return 0;
}

int cmd_scan(const std::string& model, const std::vector<double>& dx,
             const std::vector<double>& dk, LogBase base, bool as_json) {
  if (model.empty()) throw usage_error("scan needs --model");
  if (dx.empty() || dk.empty()) throw usage_error("scan needs --dx and --dk lists");
  const BiphotonParams p = parse_model(model);
  if (p.dims() != 1) throw usage_error("scan supports single-axis models");
  std::vector<std::pair<double, double>> pairs;
  if (dx.size() == dk.size()) {
    for (std::size_t i = 0; i < dx.size(); ++i) pairs.emplace_back(dx[i], dk[i]);
  } else if (dk.size() == 1) {
    for (double x : dx) pairs.emplace_back(x, dk[0]);
  } else if (dx.size() == 1) {
    for (double k : dk) pairs.emplace_back(dx[0], k);
  } else {
    throw usage_error("--dx and --dk lists must match in length (or one be scalar)");
  }
  const std::vector<SteeringReport> reports = steering_bin_scan(p, pairs, base);
  json report;
  report["command"] = "scan";
  report["model"] = model;
  report["base"] = log_base_name(base);
  json rows = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SteeringReport& r = reports[i];
    rows.push_back(json{{"dx", pairs[i].first},
                        {"dk", pairs[i].second},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"margin", r.margin},
                        {"violated", r.violated},
                        {"vacuous", r.vacuous}});
  }
  report["rows"] = std::move(rows);
  emit(report, as_json);
  return 0;
}

int cmd_probe_cmi(const std::string& input, std::uint64_t seed, const std::vector<double>& widths,
                  LogBase base, bool normalize, bool as_json) {
  std::optional<GridDensity> density;
  if (!input.empty())
    density = io::read_density_json(input, normalize).density;
  else
    density = corpus_density(seed, 3);
  const std::vector<double> w = expand_widths(widths, density->rank(), "--widths");
  const CmiProbe probe =
      conditional_mi_probe(*density, BinningSpec::tile_all(density->axes(), w), base);
  json report;
  report["command"] = "probe-cmi";
  report["widths"] = w;
  report["report"] = io::to_json(probe);
  emit(report, as_json);
  return 0;
}

int cmd_generate(const std::string& out, const std::string& model, const std::string& kind,
                 bool corpus, std::uint64_t seed, std::size_t rank,
                 const std::vector<double>& widths, bool as_hist, bool as_json) {
  std::optional<GridDensity> density;
  if (corpus) {
    density = corpus_density(seed, rank);
  } else if (!model.empty()) {
    const BiphotonParams p = parse_model(model);
    const std::vector<double> w = widths.empty() ? std::vector<double>{0.5} : widths;
    if (kind == "position")
      density = position_joint(p, position_axes(p, w));
    else if (kind == "momentum")
      density = momentum_joint(p, momentum_axes(p, w));
    else
      throw usage_error("--kind must be 'position' or 'momentum'");
  } else {
    throw usage_error("generate needs --model or --corpus");
  }
  json report;
  report["command"] = "generate";
  report["out"] = out;
  if (as_hist) {
    const std::vector<double> w = expand_widths(widths, density->rank(), "--widths");
    const Histogram h = bin_density(*density, BinningSpec::tile_all(density->axes(), w));
    std::vector<std::string> names;
    for (std::size_t a = 0; a < h.rank(); ++a) names.push_back("x" + std::to_string(a));
    io::write_histogram_csv(out, h, names);
    io::write_histogram_sidecar(out, h);
    report["kind"] = "histogram";
    report["windows"] = h.probs().size();
  } else {
    io::write_density_json(out, *density);
    report["kind"] = "density";
    report["nodes"] = density->values().size();
  }
  emit(report, as_json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const char* log_env = std::getenv("ENTROSTEER_LOG");
  g_log = log_env != nullptr && *log_env != '\0' && std::string(log_env) != "0";

  CLI::App app{"Discrete/continuous entropy reports and entropic steering tests"};
  app.require_subcommand(1);

  std::string base_name = "2";
  app.add_option("--base", base_name, "Logarithm base: 2, e or 10")->capture_default_str();
  bool as_json = false;
  app.add_flag("--json", as_json, "Emit the report as JSON");

  // entropy
  auto* sc_entropy = app.add_subcommand("entropy", "Entropies of a histogram CSV or density JSON");
  std::string ent_input;
  sc_entropy->add_option("input", ent_input, "Histogram .csv or density .json")->required();
  std::vector<double> ent_dx, ent_widths;
  sc_entropy->add_option("--dx", ent_dx, "Histogram window widths (comma-separated)")
      ->delimiter(',');
  sc_entropy->add_option("--widths", ent_widths, "Also bin a density at these widths")
      ->delimiter(',');
  bool ent_normalize = false;
  sc_entropy->add_flag("--normalize", ent_normalize, "Renormalize off-unit input");

  // verify-connection
  auto* sc_verify = app.add_subcommand(
      "verify-connection", "Check h = sum P h_window + H and the inequality table");
  std::string ver_input, ver_model;
  sc_verify->add_option("input", ver_input, "Density .json");
  sc_verify->add_option("--model", ver_model, "Double-Gaussian model 'sp,sm[,n]'");
  std::vector<double> ver_widths;
  sc_verify->add_option("--widths", ver_widths, "Window widths")->delimiter(',')->required();
  bool ver_normalize = false;
  sc_verify->add_flag("--normalize", ver_normalize, "Renormalize off-unit input");

  // steering
  auto* sc_steer = app.add_subcommand("steering", "Entropic steering witness");
  std::string st_x, st_k, st_model;
  sc_steer->add_option("--x-hist", st_x, "Position histogram CSV (axes A then B)");
  sc_steer->add_option("--k-hist", st_k, "Wavenumber histogram CSV (axes A then B)");
  sc_steer->add_option("--model", st_model, "Double-Gaussian model 'sp,sm[,n]'");
  std::vector<double> st_dx, st_dk;
  sc_steer->add_option("--dx", st_dx, "Position window widths")->delimiter(',');
  sc_steer->add_option("--dk", st_dk, "Wavenumber window widths")->delimiter(',');
  bool st_vector = false, st_swap = false, st_normalize = false;
  sc_steer->add_flag("--vector", st_vector, "Vector-conditional mode");
  sc_steer->add_flag("--swap-roles", st_swap, "Condition party A on party B");
  sc_steer->add_flag("--normalize", st_normalize, "Renormalize off-unit input");

  // scan
  auto* sc_scan = app.add_subcommand("scan", "Margin across a list of (dx, dk) width pairs");
  std::string scan_model;
  sc_scan->add_option("--model", scan_model, "Double-Gaussian model 'sp,sm'")->required();
  std::vector<double> scan_dx, scan_dk;
  sc_scan->add_option("--dx", scan_dx, "Position widths")->delimiter(',')->required();
  sc_scan->add_option("--dk", scan_dk, "Wavenumber widths")->delimiter(',')->required();

  // probe-cmi
  auto* sc_probe = app.add_subcommand(
      "probe-cmi", "Compare conditional mutual informations h(x:y|z) and H(X:Y|Z)");
  std::string pr_input;
  sc_probe->add_option("input", pr_input, "3-axis density .json");
  std::uint64_t pr_seed = 0;
  sc_probe->add_option("--seed", pr_seed, "Corpus seed when no input is given");
  std::vector<double> pr_widths;
  sc_probe->add_option("--widths", pr_widths, "Window widths")->delimiter(',')->required();
  bool pr_normalize = false;
  sc_probe->add_flag("--normalize", pr_normalize, "Renormalize off-unit input");

  // generate
  auto* sc_gen = app.add_subcommand("generate", "Write model or corpus data to a file");
  std::string gen_out, gen_model, gen_kind = "position";
  sc_gen->add_option("--out", gen_out, "Output path")->required();
  sc_gen->add_option("--model", gen_model, "Double-Gaussian model 'sp,sm[,n]'");
  sc_gen->add_option("--kind", gen_kind, "position or momentum")->capture_default_str();
  bool gen_corpus = false, gen_hist = false;
  sc_gen->add_flag("--corpus", gen_corpus, "Seeded Gaussian-mixture corpus member");
  std::uint64_t gen_seed = 0;
  sc_gen->add_option("--seed", gen_seed, "Corpus seed");
  std::size_t gen_rank = 1;
  sc_gen->add_option("--rank", gen_rank, "Corpus axis count");
  std::vector<double> gen_widths;
  sc_gen->add_option("--widths", gen_widths, "Window widths")->delimiter(',');
  sc_gen->add_flag("--hist", gen_hist, "Write a binned histogram CSV instead of a density");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 5;
  }

  try {
    LogBase base = LogBase::two;
    try {
      base = parse_log_base(base_name);
    } catch (const parse_error& e) {
      throw usage_error(e.what());
    }
    if (sc_entropy->parsed())
      return cmd_entropy(ent_input, ent_dx, ent_widths, base, ent_normalize, as_json);
    if (sc_verify->parsed())
      return cmd_verify_connection(ver_input, ver_model, ver_widths, base, ver_normalize, as_json);
    if (sc_steer->parsed())
      return cmd_steering(st_x, st_k, st_model, st_dx, st_dk, base, st_vector, st_swap,
                          st_normalize, as_json);
    if (sc_scan->parsed()) return cmd_scan(scan_model, scan_dx, scan_dk, base, as_json);
    if (sc_probe->parsed())
      return cmd_probe_cmi(pr_input, pr_seed, pr_widths, base, pr_normalize, as_json);
    if (sc_gen->parsed())
      return cmd_generate(gen_out, gen_model, gen_kind, gen_corpus, gen_seed, gen_rank, gen_widths,
                          gen_hist, as_json);
    return 5;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 5;
  } catch (const math_guarantee_error& e) {
    std::cerr << "math guarantee breached: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
