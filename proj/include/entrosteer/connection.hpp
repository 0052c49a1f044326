#pragma once

#include "entrosteer/discretize.hpp"
#include "entrosteer/entropy.hpp"

namespace entrosteer {

// Tolerances for the identity / inequality split: identities share one
// quadrature on both sides and must cancel to near machine precision;
// inequalities get a small floor for rounding.
inline constexpr double k_identity_tol = 1e-10;
inline constexpr double k_inequality_floor = -1e-10;

struct WindowTerm {
  std::vector<std::size_t> index;
  double prob = 0.0;      // P(window)
  double h_window = 0.0;  // entropy of the in-window conditional, in `base`
};

// h = sum_l P_l h_l + H, term by term.
struct ConnectionReport {
  EntropyValue lhs;            // h of the density
  double sum_p_h = 0.0;        // sum_l P_l h_l
  double discrete_entropy = 0.0;  // H of the binned table
  double residual = 0.0;       // lhs - sum_p_h - discrete_entropy
  std::vector<WindowTerm> per_window;
  LogBase base = LogBase::two;
};

ConnectionReport verify_connection(const GridDensity& rho, const BinningSpec& spec, LogBase base);

enum class InequalityId {
  marginal_x,              // h(x)   <= H(X)   + log dx
  joint_xy,                // h(x,y) <= H(X,Y) + log dx dy
  conditional_x_given_y,   // h(x|y) <= H(X|Y) + log dx
  mutual_xy,               // h(x:y) >= H(X:Y)
  joint_xyz,               // h(x,y,z)  <= H(X,Y,Z)  + log dx dy dz
  joint_xy_given_z,        // h(x,y|z)  <= H(X,Y|Z)  + log dx dy
  conditional_x_given_yz,  // h(x|y,z)  <= H(X|Y,Z)  + log dx
  mutual_x_yz,             // h(x:y,z)  >= H(X:Y,Z)
  vector_conditional,      // h(xvec|yvec) <= H(Xvec|Yvec) + log prod dx_i
};

const char* inequality_name(InequalityId id);

struct GapReport {
  InequalityId id = InequalityId::marginal_x;
  bool applicable = false;
  bool greater_type = false;   // true for the >=-type mutual-information rows
  double continuous = 0.0;     // continuous-side entropy
  double discrete = 0.0;       // discrete-side entropy
  double log_width_term = 0.0; // 0 for >=-type rows
  double gap = 0.0;            // >= 0 (up to rounding) when the bound holds
  std::vector<double> widths;  // window widths entering the bound
  LogBase base = LogBase::two;
};

// Evaluates every row of the inequality table that matches the joint's
// arity; rows needing more axes are returned with applicable = false.
std::vector<GapReport> gap_suite(const GridDensity& joint, const BinningSpec& spec, LogBase base);

// h(targets | conditions) <= H(targets | conditions) + sum_i log dx_i for an
// arbitrary partition of the axes.
GapReport vector_gap(const GridDensity& joint, std::span<const std::size_t> condition_axes,
                     std::span<const std::size_t> target_axes, const BinningSpec& spec,
                     LogBase base);

// Gap of one inequality at widths d, d/2, d/4, ... Returned as (width of
// axis 0, gap) pairs. Requires every halved width to stay commensurate.
std::vector<std::pair<double, double>> refine_convergence(const GridDensity& joint,
                                                          const BinningSpec& spec,
                                                          std::size_t halvings, InequalityId id,
                                                          LogBase base);

// Exploratory probe of h(x:y|z) vs H(X:Y|Z). No ordering is asserted.
struct CmiProbe {
  double continuous = 0.0;  // h(x:y|z)
  double discrete = 0.0;    // H(X:Y|Z)
  double difference = 0.0;  // continuous - discrete, either sign
  LogBase base = LogBase::two;
  bool exploratory = true;
};

CmiProbe conditional_mi_probe(const GridDensity& joint3, const BinningSpec& spec, LogBase base);

}  // namespace entrosteer
