#pragma once

#include "entrosteer/core.hpp"

namespace entrosteer {

// Node-index bounds of one window along one axis, both ends inclusive.
// Adjacent windows share their edge node; the trapezoid rule splits the
// shared node's weight in half, so window integrals add up to the full
// grid integral exactly.
struct WindowNodes {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Edge nodes for every window of `spec` on `axis`. Throws
// commensurability_error if the window width is not an integer multiple of
// the grid step or the window edges miss the nodes, and out_of_domain_error
// if the windows exceed the grid.
std::vector<std::size_t> window_edge_nodes(const Axis& axis, const BinAxisSpec& spec);

WindowNodes window_nodes(const Axis& axis, const BinAxisSpec& spec, std::size_t window);

// P(X_l), P(X_l, Y_m), ...: per-window quadrature masses of the density.
// The binned region must cover all but k_tail_tol of the density's mass.
Histogram bin_density(const GridDensity& density, const BinningSpec& spec);

// In-window conditional density rho_l = rho / P(X_l) restricted to the
// window's subgrid (nodes on the window edges carry the inside value).
// Throws zero_window_error when P(window) < k_min_window_prob.
GridDensity window_conditional(const GridDensity& density, std::span<const std::size_t> window,
                               const BinningSpec& spec);

// Quadrature mass of a single window.
double window_mass(const GridDensity& density, std::span<const std::size_t> window,
                   const BinningSpec& spec);

}  // namespace entrosteer
