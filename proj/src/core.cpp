#include "entrosteer/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace entrosteer {

namespace detail {

Shape shape_of(const std::vector<Axis>& axes) {
  Shape s;
  s.rank = axes.size();
  for (std::size_t a = 0; a < s.rank; ++a) s.extent[a] = axes[a].count;
  return s;
}

Shape shape_of(const std::vector<HistAxis>& dims) {
  Shape s;
  s.rank = dims.size();
  for (std::size_t a = 0; a < s.rank; ++a) s.extent[a] = dims[a].count;
  return s;
}

void check_axes(const std::vector<Axis>& axes, std::size_t n_values) {
  if (axes.empty() || axes.size() > k_max_rank)
    throw arity_error("grid rank must be between 1 and " + std::to_string(k_max_rank));
  std::size_t n = 1;
  for (const Axis& ax : axes) {
    if (!(ax.step > 0.0)) throw validation_error("axis step must be positive");
    if (ax.count < 2) throw validation_error("axis needs at least 2 nodes");
    n *= ax.count;
  }
  if (n != n_values)
    throw validation_error("value array size " + std::to_string(n_values) +
                           " does not match grid size " + std::to_string(n));
}

void clamp_jitter(std::vector<double>& values, const char* what) {
  for (double& v : values) {
    if (v < 0.0) {
      if (v < -k_jitter_tol) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s has negative value %.3e", what, v);
        throw validation_error(buf);
      }
      v = 0.0;
    }
  }
}

// Visits every node: fn(flat_index, node_weight_product).
template <typename F>
void for_each_weighted_node(const Shape& shape, const std::vector<std::vector<double>>& axis_w,
                            F&& fn) {
  const std::size_t n = shape.size();
  std::array<std::size_t, k_max_rank> idx{};
  for (std::size_t flat = 0; flat < n; ++flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < shape.rank; ++a) w *= axis_w[a][idx[a]];
    fn(flat, w);
    for (std::size_t a = shape.rank; a-- > 0;) {
      if (++idx[a] < shape.extent[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace detail

std::vector<double> trapezoid_weights(const Axis& axis) {
  std::vector<double> w(axis.count, axis.step);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

GridDensity::GridDensity(std::vector<Axis> axes, std::vector<double> values) {
  detail::check_axes(axes, values.size());
  detail::clamp_jitter(values, "density");
  axes_ = std::move(axes);
  values_ = std::move(values);
  shape_ = detail::shape_of(axes_);
  const double total = integrate(*this);
  if (std::abs(total - 1.0) > k_norm_tol) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "density integrates to %.12g, not 1", total);
    throw validation_error(buf);
  }
}

GridDensity GridDensity::normalized(std::vector<Axis> axes, std::vector<double> values) {
  detail::check_axes(axes, values.size());
  detail::clamp_jitter(values, "density");
  // total via a throwaway shape; reuse the weighted traversal
  Shape shape = detail::shape_of(axes);
  std::vector<std::vector<double>> w;
  w.reserve(axes.size());
  for (const Axis& ax : axes) w.push_back(trapezoid_weights(ax));
  double total = 0.0;
  detail::for_each_weighted_node(shape, w,
                                 [&](std::size_t f, double wt) { total += wt * values[f]; });
  if (!(total > 0.0)) throw validation_error("cannot normalize a density with zero mass");
  for (double& v : values) v /= total;
  return GridDensity(std::move(axes), std::move(values));
}

Histogram::Histogram(std::vector<HistAxis> dims, std::vector<double> probs) {
  if (dims.empty() || dims.size() > k_max_rank)
    throw arity_error("histogram rank must be between 1 and " + std::to_string(k_max_rank));
  std::size_t n = 1;
  for (const HistAxis& d : dims) {
    if (!(d.width > 0.0)) throw validation_error("window width must be positive");
    if (d.count < 1) throw validation_error("window count must be at least 1");
    n *= d.count;
  }
  if (n != probs.size()) throw validation_error("probability array does not match window counts");
  detail::clamp_jitter(probs, "histogram");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > k_norm_tol) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "histogram sums to %.12g, not 1", total);
    throw validation_error(buf);
  }
  dims_ = std::move(dims);
  probs_ = std::move(probs);
  shape_ = detail::shape_of(dims_);
}

Histogram Histogram::normalized(std::vector<HistAxis> dims, std::vector<double> probs) {
  detail::clamp_jitter(probs, "histogram");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(total > 0.0)) throw validation_error("cannot normalize a histogram with zero mass");
  for (double& p : probs) p /= total;
  return Histogram(std::move(dims), std::move(probs));
}

BinAxisSpec BinningSpec::tile(const Axis& axis, double width) {
  if (!(width > 0.0)) throw validation_error("window width must be positive");
  const double ratio = width / axis.step;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
    throw commensurability_error("window width is not an integer multiple of the grid step");
  const double span = axis.length();
  const double m = std::round(span / width);
  if (m < 1.0 || std::abs(span / width - m) > 1e-9 * std::max(1.0, span / width))
    throw commensurability_error("grid extent is not an integer number of windows");
  return BinAxisSpec{width, axis.lo() + 0.5 * width, static_cast<std::size_t>(m)};
}

BinningSpec BinningSpec::tile_all(const std::vector<Axis>& axes, std::span<const double> widths) {
  if (widths.size() != axes.size())
    throw arity_error("one window width required per axis");
  BinningSpec spec;
  for (std::size_t a = 0; a < axes.size(); ++a) spec.axes.push_back(tile(axes[a], widths[a]));
  return spec;
}

BinningSpec BinningSpec::tile_all(const std::vector<Axis>& axes, double width) {
  std::vector<double> w(axes.size(), width);
  return tile_all(axes, w);
}

double integrate(const GridDensity& d) {
  std::vector<std::vector<double>> w;
  w.reserve(d.rank());
  for (const Axis& ax : d.axes()) w.push_back(trapezoid_weights(ax));
  double total = 0.0;
  detail::for_each_weighted_node(d.shape(), w,
                                 [&](std::size_t f, double wt) { total += wt * d.value(f); });
  return total;
}

double integrate_box(const GridDensity& d, std::span<const std::size_t> lo_idx,
                     std::span<const std::size_t> hi_idx) {
  if (lo_idx.size() != d.rank() || hi_idx.size() != d.rank())
    throw arity_error("index box rank does not match the grid");
  std::vector<std::vector<double>> w(d.rank());
  Shape sub;
  sub.rank = d.rank();
  for (std::size_t a = 0; a < d.rank(); ++a) {
    if (hi_idx[a] < lo_idx[a] || hi_idx[a] >= d.axis(a).count)
      throw out_of_domain_error("index box lies outside the grid");
    const std::size_t n = hi_idx[a] - lo_idx[a] + 1;
    sub.extent[a] = n;
    if (n == 1) {
      w[a] = {1.0};  // degenerate slab: treat as a point slice with unit weight
    } else {
      w[a].assign(n, d.axis(a).step);
      w[a].front() *= 0.5;
      w[a].back() *= 0.5;
    }
  }
  double total = 0.0;
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = sub.size();
  for (std::size_t c = 0; c < n; ++c) {
    double wt = 1.0;
    std::array<std::size_t, k_max_rank> full{};
    for (std::size_t a = 0; a < d.rank(); ++a) {
      wt *= w[a][idx[a]];
      full[a] = lo_idx[a] + idx[a];
    }
    total += wt * d.value(d.shape().flatten(std::span<const std::size_t>(full.data(), d.rank())));
    for (std::size_t a = d.rank(); a-- > 0;) {
      if (++idx[a] < sub.extent[a]) break;
      idx[a] = 0;
    }
  }
  return total;
}

namespace {

std::size_t coord_to_node(const Axis& ax, double x, const char* what) {
  const double t = (x - ax.origin) / ax.step;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9 * std::max(1.0, std::abs(t)))
    throw commensurability_error(std::string(what) + " does not lie on a grid node");
  if (r < -0.5 || r > static_cast<double>(ax.count - 1) + 0.5)
    throw out_of_domain_error(std::string(what) + " lies outside the grid");
  return static_cast<std::size_t>(r);
}

}  // namespace

double integrate(const GridDensity& d, const Box& region) {
  if (region.lo.size() != d.rank() || region.hi.size() != d.rank())
    throw arity_error("region rank does not match the grid");
  std::vector<std::size_t> lo(d.rank()), hi(d.rank());
  for (std::size_t a = 0; a < d.rank(); ++a) {
    if (region.hi[a] < region.lo[a]) throw out_of_domain_error("region has negative extent");
    lo[a] = coord_to_node(d.axis(a), region.lo[a], "region face");
    hi[a] = coord_to_node(d.axis(a), region.hi[a], "region face");
  }
  return integrate_box(d, lo, hi);
}

GridDensity marginalize(const GridDensity& joint, std::span<const std::size_t> keep_axes) {
  if (joint.rank() < 2) throw arity_error("marginalize needs a joint density (rank >= 2)");
  if (keep_axes.empty() || keep_axes.size() >= joint.rank())
    throw arity_error("keep_axes must be a strict non-empty subset of the axes");
  std::vector<bool> keep(joint.rank(), false);
  std::vector<Axis> out_axes;
  for (std::size_t a : keep_axes) {
    if (a >= joint.rank() || keep[a]) throw arity_error("invalid or repeated keep axis");
    keep[a] = true;
  }
  for (std::size_t a = 0; a < joint.rank(); ++a)
    if (keep[a]) out_axes.push_back(joint.axis(a));

  Shape out_shape = detail::shape_of(out_axes);
  std::vector<double> out(out_shape.size(), 0.0);

  std::vector<std::vector<double>> w(joint.rank());
  for (std::size_t a = 0; a < joint.rank(); ++a) {
    if (keep[a])
      w[a].assign(joint.axis(a).count, 1.0);
    else
      w[a] = trapezoid_weights(joint.axis(a));
  }
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = joint.shape().size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    double wt = 1.0;
    std::size_t out_flat = 0;
    for (std::size_t a = 0; a < joint.rank(); ++a) {
      wt *= w[a][idx[a]];
      if (keep[a]) out_flat = out_flat * joint.axis(a).count + idx[a];
    }
    out[out_flat] += wt * joint.value(flat);
    for (std::size_t a = joint.rank(); a-- > 0;) {
      if (++idx[a] < joint.shape().extent[a]) break;
      idx[a] = 0;
    }
  }
  return GridDensity(std::move(out_axes), std::move(out));
}

GridDensity marginalize(const GridDensity& joint, std::size_t keep_axis) {
  const std::size_t keep[1] = {keep_axis};
  return marginalize(joint, std::span<const std::size_t>(keep, 1));
}

Histogram marginalize(const Histogram& joint, std::span<const std::size_t> keep_axes) {
  if (joint.rank() < 2) throw arity_error("marginalize needs a joint histogram (rank >= 2)");
  if (keep_axes.empty() || keep_axes.size() >= joint.rank())
    throw arity_error("keep_axes must be a strict non-empty subset of the axes");
  std::vector<bool> keep(joint.rank(), false);
  for (std::size_t a : keep_axes) {
    if (a >= joint.rank() || keep[a]) throw arity_error("invalid or repeated keep axis");
    keep[a] = true;
  }
  std::vector<HistAxis> out_dims;
  for (std::size_t a = 0; a < joint.rank(); ++a)
    if (keep[a]) out_dims.push_back(joint.dim(a));
  Shape out_shape = detail::shape_of(out_dims);
  std::vector<double> out(out_shape.size(), 0.0);
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = joint.shape().size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t out_flat = 0;
    for (std::size_t a = 0; a < joint.rank(); ++a)
      if (keep[a]) out_flat = out_flat * joint.dim(a).count + idx[a];
    out[out_flat] += joint.prob(flat);
    for (std::size_t a = joint.rank(); a-- > 0;) {
      if (++idx[a] < joint.shape().extent[a]) break;
      idx[a] = 0;
    }
  }
  return Histogram(std::move(out_dims), std::move(out));
}

namespace {

void scan_values(std::span<const double> v, Diagnostics& diag) {
  diag.min_value = v.empty() ? 0.0 : v[0];
  for (double x : v) {
    diag.min_value = std::min(diag.min_value, x);
    if (x < 0.0) {
      if (x >= -k_jitter_tol)
        ++diag.clamped_jitter;
      else
        ++diag.hard_negatives;
    }
  }
  if (diag.clamped_jitter > 0)
    diag.notes.push_back("negative rounding jitter clamped to zero in " +
                         std::to_string(diag.clamped_jitter) + " cells");
  if (diag.hard_negatives > 0)
    diag.notes.push_back(std::to_string(diag.hard_negatives) + " cells are negative beyond jitter");
}

}  // namespace

Diagnostics validate_density(const std::vector<Axis>& axes, std::span<const double> values) {
  Diagnostics diag;
  scan_values(values, diag);
  Shape shape = detail::shape_of(axes);
  std::vector<std::vector<double>> w;
  for (const Axis& ax : axes) w.push_back(trapezoid_weights(ax));
  double total = 0.0;
  detail::for_each_weighted_node(
      shape, w, [&](std::size_t f, double wt) { total += wt * std::max(values[f], 0.0); });
  diag.total = total;
  diag.normalization_defect = std::abs(total - 1.0);

  // Tail estimate: pretend each boundary face extends one more step outward
  // at its edge value.
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t n = shape.size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    bool boundary = false;
    double wt = 1.0;
    double faces = 0.0;
    for (std::size_t a = 0; a < shape.rank; ++a) {
      wt *= w[a][idx[a]];
      if (idx[a] == 0 || idx[a] + 1 == shape.extent[a]) {
        boundary = true;
        faces += axes[a].step / w[a][idx[a]];
      }
    }
    if (boundary) diag.tail_mass_estimate += wt * faces * std::max(values[flat], 0.0);
    for (std::size_t a = shape.rank; a-- > 0;) {
      if (++idx[a] < shape.extent[a]) break;
      idx[a] = 0;
    }
  }
  return diag;
}

Diagnostics validate_histogram(const std::vector<HistAxis>& dims, std::span<const double> probs) {
  (void)dims;
  Diagnostics diag;
  scan_values(probs, diag);
  double total = 0.0;
  for (double p : probs) total += std::max(p, 0.0);
  diag.total = total;
  diag.normalization_defect = std::abs(total - 1.0);
  return diag;
}

Diagnostics validate(const GridDensity& d) {
  return validate_density(d.axes(), d.values());
}

Diagnostics validate(const Histogram& h) {
  return validate_histogram(h.dims(), h.probs());
}

}  // namespace entrosteer
