#include "entrosteer/steering.hpp"

#include <cmath>

namespace entrosteer {

namespace {

std::size_t steering_dims(std::size_t x_rank, std::size_t k_rank) {
  if (x_rank != k_rank)
    throw arity_error("position and momentum joints must have the same dimensionality");
  if (x_rank % 2 != 0 || x_rank == 0)
    throw arity_error("steering joints need 2n axes ordered A-side then B-side");
  return x_rank / 2;
}

std::vector<std::size_t> a_side(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

EntropyValue continuous_steering_lhs(const GridDensity& x_joint, const GridDensity& k_joint,
                                     LogBase base) {
  const std::size_t n = steering_dims(x_joint.rank(), k_joint.rank());
  const std::vector<std::size_t> cond = a_side(n);
  const double nats = conditional_entropy_differential(x_joint, cond, LogBase::e).value +
                      conditional_entropy_differential(k_joint, cond, LogBase::e).value;
  return EntropyValue{nats / log_base_factor(base), base};
}

SteeringReport discrete_steering_test(const Histogram& x_hist, const Histogram& k_hist,
                                      LogBase base, SteeringMode mode) {
  const std::size_t n = steering_dims(x_hist.rank(), k_hist.rank());
  const double lf = log_base_factor(base);

  SteeringReport report;
  report.base = base;
  report.mode = mode;

  double rhs_nats = 0.0;
  double lhs_nats = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SteeringAxisRecord rec;
    rec.dx_B = x_hist.dim(n + i).width;
    rec.dk_B = k_hist.dim(n + i).width;
    const double rhs_i = std::log(M_PI * M_E / (rec.dx_B * rec.dk_B));
    rec.rhs = rhs_i / lf;
    rhs_nats += rhs_i;
    if (mode == SteeringMode::per_axis) {
      const std::vector<std::size_t> pair{i, n + i};
      const Histogram xp = n == 1 ? x_hist : marginalize(x_hist, pair);
      const Histogram kp = n == 1 ? k_hist : marginalize(k_hist, pair);
      rec.H_xB_given_xA = conditional_entropy_discrete(xp, std::size_t{0}, LogBase::e).value;
      rec.H_kB_given_kA = conditional_entropy_discrete(kp, std::size_t{0}, LogBase::e).value;
      lhs_nats += rec.H_xB_given_xA + rec.H_kB_given_kA;
      rec.H_xB_given_xA /= lf;
      rec.H_kB_given_kA /= lf;
      report.per_axis.push_back(rec);
    }
  }
  if (mode == SteeringMode::vector) {
    const std::vector<std::size_t> cond = a_side(n);
    lhs_nats = conditional_entropy_discrete(x_hist, cond, LogBase::e).value +
               conditional_entropy_discrete(k_hist, cond, LogBase::e).value;
  }

  report.lhs = lhs_nats / lf;
  report.rhs = rhs_nats / lf;
  report.margin = report.rhs - report.lhs;
  report.vacuous = report.rhs <= 0.0;
  report.violated = !report.vacuous && report.margin > 0.0;
  return report;
}

std::vector<SteeringReport> steering_bin_scan(const BiphotonParams& params,
                                              std::span<const std::pair<double, double>> widths,
                                              LogBase base) {
  if (widths.empty()) throw validation_error("at least one width pair required");
  params.check();
  std::vector<double> dxs, dks;
  for (const auto& [dx, dk] : widths) {
    dxs.push_back(dx);
    dks.push_back(dk);
  }
  // one grid per side, commensurate with every width in the scan
  const GridDensity x_joint = position_joint(params, position_axes(params, dxs));
  const GridDensity k_joint = momentum_joint(params, momentum_axes(params, dks));

  std::vector<SteeringReport> reports;
  for (const auto& [dx, dk] : widths) {
    const Histogram xh = bin_density(x_joint, BinningSpec::tile_all(x_joint.axes(), dx));
    const Histogram kh = bin_density(k_joint, BinningSpec::tile_all(k_joint.axes(), dk));
    reports.push_back(discrete_steering_test(xh, kh, base));
  }
  return reports;
}

SteeringReport steering_model_test(const BiphotonParams& params, double dx, double dk,
                                   LogBase base) {
  const std::pair<double, double> w[1] = {{dx, dk}};
  return steering_bin_scan(params, std::span<const std::pair<double, double>>(w, 1), base)[0];
}

PathComparison per_axis_vs_vector(const GridDensity& x_joint, const GridDensity& k_joint,
                                  const BinningSpec& x_spec, const BinningSpec& k_spec,
                                  LogBase base) {
  const std::size_t n = steering_dims(x_joint.rank(), k_joint.rank());
  if (n < 2) throw arity_error("path comparison needs at least 2 spatial axes");
  const Histogram xh = bin_density(x_joint, x_spec);
  const Histogram kh = bin_density(k_joint, k_spec);
  PathComparison cmp;
  cmp.per_axis = discrete_steering_test(xh, kh, base, SteeringMode::per_axis);
  cmp.vector_path = discrete_steering_test(xh, kh, base, SteeringMode::vector);
  cmp.lhs_difference = cmp.per_axis.lhs - cmp.vector_path.lhs;
  return cmp;
}

}  // namespace entrosteer
