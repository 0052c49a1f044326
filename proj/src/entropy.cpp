#include "entrosteer/entropy.hpp"

#include <array>
#include <cmath>

namespace entrosteer {

double log_base_factor(LogBase base) {
  switch (base) {
    case LogBase::two:
      return M_LN2;
    case LogBase::e:
      return 1.0;
    case LogBase::ten:
      return M_LN10;
  }
  return 1.0;
}

const char* log_base_name(LogBase base) {
  switch (base) {
    case LogBase::two:
      return "2";
    case LogBase::e:
      return "e";
    case LogBase::ten:
      return "10";
  }
  return "?";
}

LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::two;
  if (s == "e") return LogBase::e;
  if (s == "10") return LogBase::ten;
  throw parse_error("unknown logarithm base '" + s + "' (expected 2, e or 10)");
}

EntropyValue discrete_entropy(const Histogram& h, LogBase base) {
  double nats = 0.0;
  for (double p : h.probs()) {
    if (p > 0.0) nats -= p * std::log(p);
  }
  return EntropyValue{nats / log_base_factor(base), base};
}

EntropyValue differential_entropy(const GridDensity& rho, LogBase base) {
  std::vector<std::vector<double>> w;
  w.reserve(rho.rank());
  for (const Axis& ax : rho.axes()) w.push_back(trapezoid_weights(ax));
  double nats = 0.0;
  std::array<std::size_t, k_max_rank> idx{};
  const Shape& shape = rho.shape();
  const std::size_t n = shape.size();
  for (std::size_t f = 0; f < n; ++f) {
    const double v = rho.value(f);
    if (v > 0.0) {
      double wt = 1.0;
      for (std::size_t a = 0; a < shape.rank; ++a) wt *= w[a][idx[a]];
      nats -= wt * v * std::log(v);
    }
    for (std::size_t a = shape.rank; a-- > 0;) {
      if (++idx[a] < shape.extent[a]) break;
      idx[a] = 0;
    }
  }
  return EntropyValue{nats / log_base_factor(base), base};
}

namespace {

void check_partition(std::size_t rank, std::span<const std::size_t> a,
                     std::span<const std::size_t> b) {
  std::vector<bool> seen(rank, false);
  for (std::span<const std::size_t> grp : {a, b})
    for (std::size_t x : grp) {
      if (x >= rank || seen[x]) throw arity_error("axis groups must partition the joint");
      seen[x] = true;
    }
  for (bool s : seen)
    if (!s) throw arity_error("axis groups must partition the joint");
}

}  // namespace

EntropyValue conditional_entropy_discrete(const Histogram& joint,
                                          std::span<const std::size_t> condition_axes,
                                          LogBase base) {
  if (joint.rank() < 2) throw arity_error("conditional entropy needs a joint histogram");
  if (condition_axes.empty() || condition_axes.size() >= joint.rank())
    throw arity_error("condition axes must be a strict non-empty subset");
  const Histogram cond = marginalize(joint, condition_axes);
  const double nats = discrete_entropy(joint, LogBase::e).value - discrete_entropy(cond, LogBase::e).value;
  return EntropyValue{nats / log_base_factor(base), base};
}

EntropyValue conditional_entropy_discrete(const Histogram& joint, std::size_t condition_axis,
                                          LogBase base) {
  const std::size_t c[1] = {condition_axis};
  return conditional_entropy_discrete(joint, std::span<const std::size_t>(c, 1), base);
}

EntropyValue conditional_entropy_differential(const GridDensity& joint,
                                              std::span<const std::size_t> condition_axes,
                                              LogBase base) {
  if (joint.rank() < 2) throw arity_error("conditional entropy needs a joint density");
  if (condition_axes.empty() || condition_axes.size() >= joint.rank())
    throw arity_error("condition axes must be a strict non-empty subset");
  const GridDensity cond = marginalize(joint, condition_axes);
  const double nats =
      differential_entropy(joint, LogBase::e).value - differential_entropy(cond, LogBase::e).value;
  return EntropyValue{nats / log_base_factor(base), base};
}

EntropyValue conditional_entropy_differential(const GridDensity& joint,
                                              std::size_t condition_axis, LogBase base) {
  const std::size_t c[1] = {condition_axis};
  return conditional_entropy_differential(joint, std::span<const std::size_t>(c, 1), base);
}

EntropyValue mutual_information_discrete(const Histogram& joint,
                                         std::span<const std::size_t> axes_a,
                                         std::span<const std::size_t> axes_b, LogBase base) {
  if (joint.rank() < 2) throw arity_error("mutual information needs a joint histogram");
  check_partition(joint.rank(), axes_a, axes_b);
  const double nats = discrete_entropy(marginalize(joint, axes_a), LogBase::e).value +
                      discrete_entropy(marginalize(joint, axes_b), LogBase::e).value -
                      discrete_entropy(joint, LogBase::e).value;
  return EntropyValue{nats / log_base_factor(base), base};
}

EntropyValue mutual_information_discrete(const Histogram& joint, LogBase base) {
  if (joint.rank() != 2) throw arity_error("default mutual information grouping needs 2 axes");
  const std::size_t a[1] = {0}, b[1] = {1};
  return mutual_information_discrete(joint, std::span<const std::size_t>(a, 1),
                                     std::span<const std::size_t>(b, 1), base);
}

EntropyValue mutual_information_differential(const GridDensity& joint,
                                             std::span<const std::size_t> axes_a,
                                             std::span<const std::size_t> axes_b, LogBase base) {
  if (joint.rank() < 2) throw arity_error("mutual information needs a joint density");
  check_partition(joint.rank(), axes_a, axes_b);
  const double nats = differential_entropy(marginalize(joint, axes_a), LogBase::e).value +
                      differential_entropy(marginalize(joint, axes_b), LogBase::e).value -
                      differential_entropy(joint, LogBase::e).value;
  return EntropyValue{nats / log_base_factor(base), base};
}

EntropyValue mutual_information_differential(const GridDensity& joint, LogBase base) {
  if (joint.rank() != 2) throw arity_error("default mutual information grouping needs 2 axes");
  const std::size_t a[1] = {0}, b[1] = {1};
  return mutual_information_differential(joint, std::span<const std::size_t>(a, 1),
                                         std::span<const std::size_t>(b, 1), base);
}

}  // namespace entrosteer
