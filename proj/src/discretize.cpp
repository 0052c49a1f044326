#include "entrosteer/discretize.hpp"

#include <array>
#include <cmath>

namespace entrosteer {

namespace {

std::size_t nodes_per_window(const Axis& axis, const BinAxisSpec& spec) {
  const double ratio = spec.width / axis.step;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
    throw commensurability_error("window width is not an integer multiple of the grid step");
  return static_cast<std::size_t>(k);
}

}  // namespace

std::vector<std::size_t> window_edge_nodes(const Axis& axis, const BinAxisSpec& spec) {
  const std::size_t k = nodes_per_window(axis, spec);
  const double first_edge = spec.first_center - 0.5 * spec.width;
  const double t = (first_edge - axis.origin) / axis.step;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9 * std::max(1.0, std::abs(t)))
    throw commensurability_error("window edges do not land on grid nodes");
  if (r < -0.5) throw out_of_domain_error("windows start before the grid");
  const std::size_t i0 = static_cast<std::size_t>(r);
  std::vector<std::size_t> edges(spec.count + 1);
  for (std::size_t l = 0; l <= spec.count; ++l) {
    edges[l] = i0 + l * k;
    if (edges[l] >= axis.count) throw out_of_domain_error("windows exceed the grid");
  }
  return edges;
}

WindowNodes window_nodes(const Axis& axis, const BinAxisSpec& spec, std::size_t window) {
  if (window >= spec.count) throw out_of_domain_error("window index out of range");
  const std::vector<std::size_t> edges = window_edge_nodes(axis, spec);
  return WindowNodes{edges[window], edges[window + 1]};
}

Histogram bin_density(const GridDensity& density, const BinningSpec& spec) {
  if (spec.axes.size() != density.rank())
    throw arity_error("binning spec rank does not match the density");
  const std::size_t rank = density.rank();

  // Contract one axis at a time: nodes -> window cells, trapezoid weights
  // with halves at the window edges.
  std::vector<double> data(density.values().begin(), density.values().end());
  std::array<std::size_t, k_max_rank> extent{};
  for (std::size_t a = 0; a < rank; ++a) extent[a] = density.axis(a).count;

  for (std::size_t a = 0; a < rank; ++a) {
    const Axis& ax = density.axis(a);
    const std::vector<std::size_t> edges = window_edge_nodes(ax, spec.axes[a]);
    const std::size_t cells = spec.axes[a].count;

    std::size_t outer = 1, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= extent[b];
    for (std::size_t b = a + 1; b < rank; ++b) inner *= extent[b];
    const std::size_t n_a = extent[a];

    std::vector<double> next(outer * cells * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t lo = edges[c], hi = edges[c + 1];
        for (std::size_t i = lo; i <= hi; ++i) {
          const double w = (i == lo || i == hi) ? 0.5 * ax.step : ax.step;
          const double* src = data.data() + (o * n_a + i) * inner;
          double* dst = next.data() + (o * cells + c) * inner;
          for (std::size_t in = 0; in < inner; ++in) dst[in] += w * src[in];
        }
      }
    }
    data = std::move(next);
    extent[a] = cells;
  }

  double binned_mass = 0.0;
  for (double& v : data) {
    if (v < 0.0 && v >= -k_jitter_tol) v = 0.0;
    binned_mass += v;
  }
  const double total_mass = integrate(density);
  if (binned_mass < total_mass - k_tail_tol)
    throw out_of_domain_error("binned region misses more than the allowed tail mass");

  std::vector<HistAxis> dims;
  for (const BinAxisSpec& s : spec.axes) dims.push_back({s.width, s.count, s.first_center});
  return Histogram(std::move(dims), std::move(data));
}

double window_mass(const GridDensity& density, std::span<const std::size_t> window,
                   const BinningSpec& spec) {
  if (window.size() != density.rank() || spec.axes.size() != density.rank())
    throw arity_error("window index rank does not match the density");
  std::vector<std::size_t> lo(density.rank()), hi(density.rank());
  for (std::size_t a = 0; a < density.rank(); ++a) {
    const WindowNodes wn = window_nodes(density.axis(a), spec.axes[a], window[a]);
    lo[a] = wn.lo;
    hi[a] = wn.hi;
  }
  return integrate_box(density, lo, hi);
}

GridDensity window_conditional(const GridDensity& density, std::span<const std::size_t> window,
                               const BinningSpec& spec) {
  if (window.size() != density.rank() || spec.axes.size() != density.rank())
    throw arity_error("window index rank does not match the density");
  const std::size_t rank = density.rank();
  std::vector<std::size_t> lo(rank), hi(rank);
  std::vector<Axis> sub_axes(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    const WindowNodes wn = window_nodes(density.axis(a), spec.axes[a], window[a]);
    lo[a] = wn.lo;
    hi[a] = wn.hi;
    sub_axes[a] = Axis{density.axis(a).coord(wn.lo), density.axis(a).step, wn.hi - wn.lo + 1};
  }
  const double p = integrate_box(density, lo, hi);
  if (p < k_min_window_prob)
    throw zero_window_error("window has (near-)zero probability; skip it");

  Shape sub = detail::shape_of(sub_axes);
  std::vector<double> vals(sub.size());
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = sub.size();
  for (std::size_t f = 0; f < n; ++f) {
    std::array<std::size_t, k_max_rank> full{};
    for (std::size_t a = 0; a < rank; ++a) full[a] = lo[a] + idx[a];
    vals[f] =
        density.value(density.shape().flatten(std::span<const std::size_t>(full.data(), rank))) / p;
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < sub.extent[a]) break;
      idx[a] = 0;
    }
  }
  return GridDensity(std::move(sub_axes), std::move(vals));
}

}  // namespace entrosteer
