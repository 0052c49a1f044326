#pragma once

#include "entrosteer/core.hpp"

#include <cmath>
#include <vector>

namespace entrosteer::testing {

// Uniform plateau on [lo, lo+width]; the edge nodes carry the inside value,
// so the trapezoid integral and log-width entropies are exact.
inline GridDensity make_uniform(double lo, double width, std::size_t count) {
  Axis ax{lo, width / static_cast<double>(count - 1), count};
  std::vector<double> v(count, 1.0 / width);
  return GridDensity(std::vector<Axis>{ax}, std::move(v));
}

inline GridDensity make_gaussian_1d(double sigma, double half, double step) {
  const std::size_t count = 2 * static_cast<std::size_t>(std::llround(half / step)) + 1;
  Axis ax{-half, step, count};
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ax.coord(i);
    v[i] = std::exp(-0.5 * x * x / (sigma * sigma));
  }
  return GridDensity::normalized(std::vector<Axis>{ax}, std::move(v));
}

inline GridDensity make_product(const GridDensity& a, const GridDensity& b) {
  std::vector<Axis> axes;
  for (const Axis& ax : a.axes()) axes.push_back(ax);
  for (const Axis& ax : b.axes()) axes.push_back(ax);
  const std::size_t na = a.values().size(), nb = b.values().size();
  std::vector<double> v(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) v[i * nb + j] = a.value(i) * b.value(j);
  return GridDensity(std::move(axes), std::move(v));
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace entrosteer::testing
