#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrosteer {

// Error hierarchy shared by all modules. The CLI maps these onto its
// exit-code contract.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct out_of_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct arity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct commensurability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct zero_window_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct tail_mass_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerances fixed by contract.
inline constexpr double k_norm_tol = 1e-6;     // accepted normalization defect
inline constexpr double k_jitter_tol = 1e-12;  // negative rounding jitter clamped to 0
inline constexpr double k_tail_tol = 1e-9;     // required mass coverage of grids/binnings
inline constexpr double k_min_window_prob = 1e-15;  // windows below this are empty

inline constexpr std::size_t k_max_rank = 4;

// A uniform 1-D coordinate grid. Node i sits at origin + i*step.
struct Axis {
  double origin = 0.0;
  double step = 1.0;
  std::size_t count = 2;

  double coord(std::size_t i) const { return origin + static_cast<double>(i) * step; }
  double lo() const { return origin; }
  double hi() const { return coord(count - 1); }
  double length() const { return step * static_cast<double>(count - 1); }
};

// Row-major multi-index helpers for tensors of rank 1..k_max_rank.
struct Shape {
  std::array<std::size_t, k_max_rank> extent{};
  std::size_t rank = 0;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t a = 0; a < rank; ++a) n *= extent[a];
    return n;
  }
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t a = axis + 1; a < rank; ++a) s *= extent[a];
    return s;
  }
  std::size_t flatten(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < rank; ++a) f = f * extent[a] + idx[a];
    return f;
  }
};

struct Diagnostics {
  double normalization_defect = 0.0;  // |total - 1|
  double total = 0.0;
  std::size_t clamped_jitter = 0;   // values in [-jitter_tol, 0) treated as 0
  std::size_t hard_negatives = 0;   // values below -jitter_tol
  double min_value = 0.0;
  double tail_mass_estimate = 0.0;  // densities only; edge-value extrapolation
  std::vector<std::string> notes;

  bool ok() const { return hard_negatives == 0 && normalization_defect <= k_norm_tol; }
};

// A probability density sampled on a uniform rectangular grid (1-4 axes).
// Values are non-negative and the trapezoid integral over the grid is 1
// within k_norm_tol. Immutable after construction.
class GridDensity {
 public:
  GridDensity(std::vector<Axis> axes, std::vector<double> values);

  // Rescales values so the grid integral is exactly 1, then constructs.
  static GridDensity normalized(std::vector<Axis> axes, std::vector<double> values);

  std::size_t rank() const { return axes_.size(); }
  const Axis& axis(std::size_t a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::span<const double> values() const { return values_; }
  const Shape& shape() const { return shape_; }
  double value(std::size_t flat) const { return values_[flat]; }

 private:
  GridDensity() = default;
  std::vector<Axis> axes_;
  std::vector<double> values_;
  Shape shape_;
};

// One axis of a discrete probability table: `count` contiguous windows of
// equal width, window l centered at first_center + l*width.
struct HistAxis {
  double width = 1.0;
  std::size_t count = 1;
  double first_center = 0.0;

  double center(std::size_t l) const { return first_center + static_cast<double>(l) * width; }
  double lo_edge(std::size_t l) const { return center(l) - 0.5 * width; }
  double hi_edge(std::size_t l) const { return center(l) + 0.5 * width; }
};

// A discrete probability table over equal-width windows (1-4 axes).
class Histogram {
 public:
  Histogram(std::vector<HistAxis> dims, std::vector<double> probs);

  static Histogram normalized(std::vector<HistAxis> dims, std::vector<double> probs);

  std::size_t rank() const { return dims_.size(); }
  const HistAxis& dim(std::size_t a) const { return dims_[a]; }
  const std::vector<HistAxis>& dims() const { return dims_; }
  std::span<const double> probs() const { return probs_; }
  const Shape& shape() const { return shape_; }
  double prob(std::size_t flat) const { return probs_[flat]; }

 private:
  std::vector<HistAxis> dims_;
  std::vector<double> probs_;
  Shape shape_;
};

// Binning of one axis into windows of width `width`; window l covers
// [center_l - width/2, center_l + width/2) with center_l = first_center + l*width.
struct BinAxisSpec {
  double width = 1.0;
  double first_center = 0.0;  // alignment origin (a window-center coordinate)
  std::size_t count = 1;
};

struct BinningSpec {
  std::vector<BinAxisSpec> axes;

  // Windows tiling the full extent of `axis`. Throws commensurability_error
  // if `width` is not an integer multiple of the grid step.
  static BinAxisSpec tile(const Axis& axis, double width);
  static BinningSpec tile_all(const std::vector<Axis>& axes, std::span<const double> widths);
  static BinningSpec tile_all(const std::vector<Axis>& axes, double width);
};

// Trapezoid node weights for one axis: step everywhere, halved at the ends.
std::vector<double> trapezoid_weights(const Axis& axis);

// Composite trapezoid integral of the density over the whole grid.
double integrate(const GridDensity& d);

// Integral over an axis-aligned box given in coordinates. Box faces must lie
// on grid nodes (within 1e-9 of a step); the box must lie inside the grid.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};
double integrate(const GridDensity& d, const Box& region);

// Integral over a node-index box, inclusive on both ends.
double integrate_box(const GridDensity& d, std::span<const std::size_t> lo_idx,
                     std::span<const std::size_t> hi_idx);

// Marginal density over the kept axes (ascending order), integrating the
// remaining axes out with the same trapezoid rule.
GridDensity marginalize(const GridDensity& joint, std::span<const std::size_t> keep_axes);
GridDensity marginalize(const GridDensity& joint, std::size_t keep_axis);

// Marginal histogram over the kept axes (plain sums).
Histogram marginalize(const Histogram& joint, std::span<const std::size_t> keep_axes);

// Diagnostics over raw data, before construction. Never throws.
Diagnostics validate_density(const std::vector<Axis>& axes, std::span<const double> values);
Diagnostics validate_histogram(const std::vector<HistAxis>& dims, std::span<const double> probs);

Diagnostics validate(const GridDensity& d);
Diagnostics validate(const Histogram& h);

namespace detail {
void check_axes(const std::vector<Axis>& axes, std::size_t n_values);
Shape shape_of(const std::vector<Axis>& axes);
Shape shape_of(const std::vector<HistAxis>& dims);
// Clamps negative jitter in place; throws validation_error on hard negatives.
void clamp_jitter(std::vector<double>& values, const char* what);
}  // namespace detail

}  // namespace entrosteer
