#include "entrosteer/connection.hpp"

#include <array>
#include <cmath>

namespace entrosteer {

ConnectionReport verify_connection(const GridDensity& rho, const BinningSpec& spec, LogBase base) {
  const Histogram hist = bin_density(rho, spec);
  const double lf = log_base_factor(base);

  ConnectionReport report;
  report.base = base;
  report.lhs = differential_entropy(rho, base);
  report.discrete_entropy = discrete_entropy(hist, base).value;

  const std::size_t rank = rho.rank();
  std::array<std::size_t, k_max_rank> idx{};
  const std::size_t cells = hist.shape().size();
  double sum_ph_nats = 0.0;
  for (std::size_t f = 0; f < cells; ++f) {
    const double p = hist.prob(f);
    if (p >= k_min_window_prob) {
      std::vector<std::size_t> window(idx.begin(), idx.begin() + rank);
      const GridDensity cond = window_conditional(rho, window, spec);
      const double h_l = differential_entropy(cond, LogBase::e).value;
      sum_ph_nats += p * h_l;
      report.per_window.push_back(WindowTerm{std::move(window), p, h_l / lf});
    }
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < hist.shape().extent[a]) break;
      idx[a] = 0;
    }
  }
  report.sum_p_h = sum_ph_nats / lf;
  report.residual = report.lhs.value - report.sum_p_h - report.discrete_entropy;
  return report;
}

const char* inequality_name(InequalityId id) {
  switch (id) {
    case InequalityId::marginal_x:
      return "h(x) <= H(X) + log(dx)";
    case InequalityId::joint_xy:
      return "h(x,y) <= H(X,Y) + log(dx dy)";
    case InequalityId::conditional_x_given_y:
      return "h(x|y) <= H(X|Y) + log(dx)";
    case InequalityId::mutual_xy:
      return "h(x:y) >= H(X:Y)";
    case InequalityId::joint_xyz:
      return "h(x,y,z) <= H(X,Y,Z) + log(dx dy dz)";
    case InequalityId::joint_xy_given_z:
      return "h(x,y|z) <= H(X,Y|Z) + log(dx dy)";
    case InequalityId::conditional_x_given_yz:
      return "h(x|y,z) <= H(X|Y,Z) + log(dx)";
    case InequalityId::mutual_x_yz:
      return "h(x:y,z) >= H(X:Y,Z)";
    case InequalityId::vector_conditional:
      return "h(xvec|yvec) <= H(Xvec|Yvec) + log(prod dx_i)";
  }
  return "?";
}

namespace {

struct SidePair {
  double continuous = 0.0;  // in requested base
  double discrete = 0.0;
};

// Entropy of the marginal over `axes` on both sides; `axes` spanning the
// whole joint means no marginalization.
SidePair marginal_pair(const GridDensity& joint, const Histogram& hist,
                       std::span<const std::size_t> axes, LogBase base) {
  SidePair s;
  if (axes.size() == joint.rank()) {
    s.continuous = differential_entropy(joint, base).value;
    s.discrete = discrete_entropy(hist, base).value;
  } else {
    s.continuous = differential_entropy(marginalize(joint, axes), base).value;
    s.discrete = discrete_entropy(marginalize(hist, axes), base).value;
  }
  return s;
}

std::vector<std::size_t> all_axes(std::size_t rank) {
  std::vector<std::size_t> v(rank);
  for (std::size_t a = 0; a < rank; ++a) v[a] = a;
  return v;
}

GapReport evaluate_vector_gap(const GridDensity& joint, const Histogram& hist,
                              std::span<const std::size_t> condition_axes,
                              std::span<const std::size_t> target_axes, const BinningSpec& spec,
                              LogBase base, InequalityId id) {
  std::vector<bool> seen(joint.rank(), false);
  for (std::span<const std::size_t> grp : {condition_axes, target_axes})
    for (std::size_t a : grp) {
      if (a >= joint.rank() || seen[a]) throw arity_error("axes must partition the joint");
      seen[a] = true;
    }
  for (bool s : seen)
    if (!s) throw arity_error("axes must partition the joint");
  if (target_axes.empty()) throw arity_error("at least one target axis required");

  const double lf = log_base_factor(base);
  GapReport g;
  g.id = id;
  g.applicable = true;
  g.base = base;
  const SidePair whole = marginal_pair(joint, hist, all_axes(joint.rank()), base);
  if (condition_axes.empty()) {
    g.continuous = whole.continuous;
    g.discrete = whole.discrete;
  } else {
    const SidePair cond = marginal_pair(joint, hist, condition_axes, base);
    g.continuous = whole.continuous - cond.continuous;
    g.discrete = whole.discrete - cond.discrete;
  }
  for (std::size_t a : target_axes) {
    g.widths.push_back(spec.axes[a].width);
    g.log_width_term += std::log(spec.axes[a].width) / lf;
  }
  g.gap = g.discrete + g.log_width_term - g.continuous;
  return g;
}

}  // namespace

GapReport vector_gap(const GridDensity& joint, std::span<const std::size_t> condition_axes,
                     std::span<const std::size_t> target_axes, const BinningSpec& spec,
                     LogBase base) {
  if (spec.axes.size() != joint.rank())
    throw arity_error("binning spec rank does not match the density");
  const Histogram hist = bin_density(joint, spec);
  return evaluate_vector_gap(joint, hist, condition_axes, target_axes, spec, base,
                             InequalityId::vector_conditional);
}

namespace {

GapReport mutual_row(const GridDensity& joint, const Histogram& hist,
                     std::span<const std::size_t> axes_a, std::span<const std::size_t> axes_b,
                     LogBase base, InequalityId id) {
  GapReport g;
  g.id = id;
  g.base = base;
  g.applicable = true;
  g.greater_type = true;
  g.continuous = mutual_information_differential(joint, axes_a, axes_b, base).value;
  g.discrete = mutual_information_discrete(hist, axes_a, axes_b, base).value;
  g.log_width_term = 0.0;
  g.gap = g.continuous - g.discrete;
  return g;
}

// Marginal restriction of a joint + spec to a subset of axes, so table rows
// over fewer variables reuse the vector machinery.
struct Restricted {
  GridDensity density;
  Histogram hist;
  BinningSpec spec;
};

Restricted restrict_axes(const GridDensity& joint, const Histogram& hist, const BinningSpec& spec,
                         std::span<const std::size_t> axes) {
  BinningSpec sub_spec;
  for (std::size_t a : axes) sub_spec.axes.push_back(spec.axes[a]);
  if (axes.size() == joint.rank())
    return Restricted{joint, hist, std::move(sub_spec)};
  return Restricted{marginalize(joint, axes), marginalize(hist, axes), std::move(sub_spec)};
}

}  // namespace

std::vector<GapReport> gap_suite(const GridDensity& joint, const BinningSpec& spec, LogBase base) {
  if (spec.axes.size() != joint.rank())
    throw arity_error("binning spec rank does not match the density");
  if (joint.rank() > 3)
    throw arity_error("the inequality table covers joints of up to 3 axes");
  const Histogram hist = bin_density(joint, spec);
  const std::size_t rank = joint.rank();
  using Ax = std::vector<std::size_t>;

  std::vector<GapReport> rows;
  auto na_row = [&](InequalityId id) {
    GapReport g;
    g.id = id;
    g.base = base;
    return g;
  };

  // h(x) <= H(X) + log dx
  {
    const Restricted r = restrict_axes(joint, hist, spec, Ax{0});
    rows.push_back(
        evaluate_vector_gap(r.density, r.hist, Ax{}, Ax{0}, r.spec, base, InequalityId::marginal_x));
  }
  if (rank >= 2) {
    const Restricted r = restrict_axes(joint, hist, spec, Ax{0, 1});
    rows.push_back(
        evaluate_vector_gap(r.density, r.hist, Ax{}, Ax{0, 1}, r.spec, base, InequalityId::joint_xy));
    rows.push_back(evaluate_vector_gap(r.density, r.hist, Ax{1}, Ax{0}, r.spec, base,
                                       InequalityId::conditional_x_given_y));
    rows.push_back(mutual_row(r.density, r.hist, Ax{0}, Ax{1}, base, InequalityId::mutual_xy));
  } else {
    rows.push_back(na_row(InequalityId::joint_xy));
    rows.push_back(na_row(InequalityId::conditional_x_given_y));
    rows.push_back(na_row(InequalityId::mutual_xy));
  }
  if (rank == 3) {
    rows.push_back(
        evaluate_vector_gap(joint, hist, Ax{}, Ax{0, 1, 2}, spec, base, InequalityId::joint_xyz));
    rows.push_back(evaluate_vector_gap(joint, hist, Ax{2}, Ax{0, 1}, spec, base,
                                       InequalityId::joint_xy_given_z));
    rows.push_back(evaluate_vector_gap(joint, hist, Ax{1, 2}, Ax{0}, spec, base,
                                       InequalityId::conditional_x_given_yz));
    rows.push_back(mutual_row(joint, hist, Ax{0}, Ax{1, 2}, base, InequalityId::mutual_x_yz));
  } else {
    rows.push_back(na_row(InequalityId::joint_xyz));
    rows.push_back(na_row(InequalityId::joint_xy_given_z));
    rows.push_back(na_row(InequalityId::conditional_x_given_yz));
    rows.push_back(na_row(InequalityId::mutual_x_yz));
  }
  return rows;
}

namespace {

GapReport single_row(const GridDensity& joint, const BinningSpec& spec, InequalityId id,
                     LogBase base) {
  for (const GapReport& g : gap_suite(joint, spec, base))
    if (g.id == id) return g;
  throw arity_error("inequality row not available for this joint");
}

}  // namespace

std::vector<std::pair<double, double>> refine_convergence(const GridDensity& joint,
                                                          const BinningSpec& spec,
                                                          std::size_t halvings, InequalityId id,
                                                          LogBase base) {
  if (halvings < 1) throw validation_error("at least one halving required");
  std::vector<std::pair<double, double>> out;
  BinningSpec level = spec;
  for (std::size_t j = 0; j <= halvings; ++j) {
    const GapReport g = single_row(joint, level, id, base);
    if (!g.applicable) throw arity_error("inequality row not applicable to this joint");
    out.emplace_back(level.axes[0].width, g.gap);
    for (BinAxisSpec& s : level.axes) {
      const double lo_edge = s.first_center - 0.5 * s.width;
      s.width *= 0.5;
      s.first_center = lo_edge + 0.5 * s.width;
      s.count *= 2;
    }
  }
  return out;
}

CmiProbe conditional_mi_probe(const GridDensity& joint3, const BinningSpec& spec, LogBase base) {
  if (joint3.rank() != 3) throw arity_error("conditional mutual information probe needs 3 axes");
  const Histogram hist = bin_density(joint3, spec);
  using Ax = std::vector<std::size_t>;
  auto h = [&](const Ax& axes) {
    return axes.size() == 3 ? differential_entropy(joint3, base).value
                            : differential_entropy(marginalize(joint3, axes), base).value;
  };
  auto H = [&](const Ax& axes) {
    return axes.size() == 3 ? discrete_entropy(hist, base).value
                            : discrete_entropy(marginalize(hist, axes), base).value;
  };
  CmiProbe probe;
  probe.base = base;
  probe.continuous = h(Ax{0, 2}) + h(Ax{1, 2}) - h(Ax{2}) - h(Ax{0, 1, 2});
  probe.discrete = H(Ax{0, 2}) + H(Ax{1, 2}) - H(Ax{2}) - H(Ax{0, 1, 2});
  probe.difference = probe.continuous - probe.discrete;
  return probe;
}

}  // namespace entrosteer
