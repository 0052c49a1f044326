#pragma once

#include "entrosteer/core.hpp"

namespace entrosteer {

enum class LogBase { two, e, ten };

// ln(b): divide a value in nats by this to express it in base b.
double log_base_factor(LogBase base);
const char* log_base_name(LogBase base);
LogBase parse_log_base(const std::string& s);

struct EntropyValue {
  double value = 0.0;
  LogBase base = LogBase::two;

  double nats() const { return value * log_base_factor(base); }
  double in(LogBase b) const { return nats() / log_base_factor(b); }
  EntropyValue to(LogBase b) const { return EntropyValue{in(b), b}; }
};

// H(X) = -sum P log P, with 0 log 0 := 0.
EntropyValue discrete_entropy(const Histogram& h, LogBase base);

// h(x) = -integral rho log rho under the trapezoid rule; zero-density nodes
// contribute nothing. May be negative.
EntropyValue differential_entropy(const GridDensity& rho, LogBase base);

// H(rest | condition axes) = H(all) - H(condition marginal).
EntropyValue conditional_entropy_discrete(const Histogram& joint,
                                          std::span<const std::size_t> condition_axes,
                                          LogBase base);
EntropyValue conditional_entropy_discrete(const Histogram& joint, std::size_t condition_axis,
                                          LogBase base);

// h(rest | condition axes) = h(all) - h(condition marginal), both sides with
// the same quadrature.
EntropyValue conditional_entropy_differential(const GridDensity& joint,
                                              std::span<const std::size_t> condition_axes,
                                              LogBase base);
EntropyValue conditional_entropy_differential(const GridDensity& joint,
                                              std::size_t condition_axis, LogBase base);

// Mutual information between two groups of axes partitioning the joint:
// I = S(group_a) + S(group_b) - S(all).
EntropyValue mutual_information_discrete(const Histogram& joint, LogBase base);
EntropyValue mutual_information_discrete(const Histogram& joint,
                                         std::span<const std::size_t> axes_a,
                                         std::span<const std::size_t> axes_b, LogBase base);
EntropyValue mutual_information_differential(const GridDensity& joint, LogBase base);
EntropyValue mutual_information_differential(const GridDensity& joint,
                                             std::span<const std::size_t> axes_a,
                                             std::span<const std::size_t> axes_b, LogBase base);

}  // namespace entrosteer
