#include "entrosteer/gaussian_model.hpp"

#include <cmath>

namespace entrosteer {

void BiphotonParams::check() const {
  if (sigma_plus.empty() || sigma_plus.size() != sigma_minus.size())
    throw validation_error("biphoton parameters need matching sigma pairs for every axis");
  for (std::size_t i = 0; i < sigma_plus.size(); ++i) {
    const double sp = sigma_plus[i], sm = sigma_minus[i];
    if (!(sp > 0.0) || !(sm > 0.0)) throw validation_error("mode widths must be positive");
    const double ratio = std::max(sp, sm) / std::min(sp, sm);
    if (ratio > 1e3)
      throw validation_error("mode width ratio beyond 1e3: grid cannot cover both scales");
  }
}

Eigen::Matrix2d position_covariance(double sigma_plus, double sigma_minus) {
  const double a = 0.5 * (sigma_plus * sigma_plus + sigma_minus * sigma_minus);
  const double c = 0.5 * (sigma_plus * sigma_plus - sigma_minus * sigma_minus);
  Eigen::Matrix2d m;
  m << a, c, c, a;
  return m;
}

Eigen::Matrix2d momentum_covariance(double sigma_plus, double sigma_minus) {
  // conjugate mode widths under sigma_x * sigma_k = 1/2
  return position_covariance(0.5 / sigma_plus, 0.5 / sigma_minus);
}

GridDensity gaussian_joint(const Eigen::MatrixXd& covariance, std::vector<Axis> axes) {
  const std::size_t rank = axes.size();
  if (covariance.rows() != static_cast<Eigen::Index>(rank) ||
      covariance.cols() != static_cast<Eigen::Index>(rank))
    throw arity_error("covariance size does not match the number of axes");

  // tail check: union bound over the per-variable marginal tails
  double tail = 0.0;
  for (std::size_t a = 0; a < rank; ++a) {
    const double sd = std::sqrt(covariance(a, a));
    tail += 0.5 * std::erfc(-axes[a].lo() / (std::sqrt(2.0) * sd));
    tail += 0.5 * std::erfc(axes[a].hi() / (std::sqrt(2.0) * sd));
  }
  if (tail > k_tail_tol)
    throw tail_mass_error("grid covers less than the required 1 - 1e-9 of the mass");

  const Eigen::MatrixXd precision = covariance.inverse();
  std::array<std::array<double, k_max_rank>, k_max_rank> prec{};
  for (std::size_t a = 0; a < rank; ++a)
    for (std::size_t b = 0; b < rank; ++b) prec[a][b] = precision(a, b);

  Shape shape;
  shape.rank = rank;
  for (std::size_t a = 0; a < rank; ++a) shape.extent[a] = axes[a].count;
  std::vector<double> values(shape.size());

  std::array<std::size_t, k_max_rank> idx{};
  std::array<double, k_max_rank> x{};
  for (std::size_t a = 0; a < rank; ++a) x[a] = axes[a].coord(0);
  const std::size_t n = shape.size();
  for (std::size_t f = 0; f < n; ++f) {
    double q = 0.0;
    for (std::size_t a = 0; a < rank; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < rank; ++b) row += prec[a][b] * x[b];
      q += x[a] * row;
    }
    values[f] = std::exp(-0.5 * q);
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < shape.extent[a]) {
        x[a] = axes[a].coord(idx[a]);
        break;
      }
      idx[a] = 0;
      x[a] = axes[a].coord(0);
    }
  }
  return GridDensity::normalized(std::move(axes), std::move(values));
}

namespace {

GridDensity biphoton_joint(const BiphotonParams& params, std::vector<Axis> axes,
                           Eigen::Matrix2d (*cov_of)(double, double)) {
  params.check();
  const std::size_t n = params.dims();
  if (axes.size() != 2 * n)
    throw arity_error("biphoton joint needs 2n axes ordered A-side then B-side");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Matrix2d pair = cov_of(params.sigma_plus[i], params.sigma_minus[i]);
    cov(i, i) = pair(0, 0);
    cov(n + i, n + i) = pair(1, 1);
    cov(i, n + i) = cov(n + i, i) = pair(0, 1);
  }
  return gaussian_joint(cov, std::move(axes));
}

}  // namespace

GridDensity position_joint(const BiphotonParams& params, std::vector<Axis> axes) {
  return biphoton_joint(params, std::move(axes), &position_covariance);
}

GridDensity momentum_joint(const BiphotonParams& params, std::vector<Axis> axes) {
  return biphoton_joint(params, std::move(axes), &momentum_covariance);
}

AnalyticEntropies analytic_entropies(const BiphotonParams& params, LogBase base) {
  params.check();
  const double lf = log_base_factor(base);
  AnalyticEntropies out;
  out.base = base;
  double lhs_nats = 0.0;
  for (std::size_t i = 0; i < params.dims(); ++i) {
    const Eigen::Matrix2d cx = position_covariance(params.sigma_plus[i], params.sigma_minus[i]);
    const Eigen::Matrix2d ck = momentum_covariance(params.sigma_plus[i], params.sigma_minus[i]);
    AxisEntropies ax;
    ax.var_xB_given_xA = cx(1, 1) - cx(0, 1) * cx(0, 1) / cx(0, 0);  // Schur complement
    ax.var_kB_given_kA = ck(1, 1) - ck(0, 1) * ck(0, 1) / ck(0, 0);
    const auto h_gauss = [](double var) { return 0.5 * std::log(2.0 * M_PI * M_E * var); };
    ax.h_xB = h_gauss(cx(1, 1)) / lf;
    ax.h_kB = h_gauss(ck(1, 1)) / lf;
    ax.h_xB_given_xA = h_gauss(ax.var_xB_given_xA) / lf;
    ax.h_kB_given_kA = h_gauss(ax.var_kB_given_kA) / lf;
    lhs_nats += h_gauss(ax.var_xB_given_xA) + h_gauss(ax.var_kB_given_kA);
    out.per_axis.push_back(ax);
  }
  out.continuous_lhs = lhs_nats / lf;
  return out;
}

namespace {

std::uint64_t width_lcm_steps(std::span<const double> widths, double finest) {
  auto gcd = [](std::uint64_t a, std::uint64_t b) {
    while (b) {
      const std::uint64_t t = a % b;
      a = b;
      b = t;
    }
    return a;
  };
  std::uint64_t l = 1;
  for (double w : widths) {
    const double r = w / finest;
    const std::uint64_t k = static_cast<std::uint64_t>(std::llround(r));
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r))
      throw commensurability_error("widths must be integer multiples of the finest width");
    l = l / gcd(l, k) * k;
  }
  return l;
}

}  // namespace

Axis model_axis(double marginal_sigma, double smoothness_scale, std::span<const double> widths,
                double step_divisor) {
  if (widths.empty()) throw validation_error("at least one window width required");
  double finest = widths[0];
  for (double w : widths) finest = std::min(finest, w);

  // step: power-of-two fraction of the finest width, at least two cells per
  // window and <= smoothness_scale / step_divisor
  std::size_t m = 2;
  while (finest / static_cast<double>(m) > smoothness_scale / step_divisor) m *= 2;
  const double step = finest / static_cast<double>(m);

  // half extent: multiple of every width, at least 8 marginal sigmas
  const double unit = finest * static_cast<double>(width_lcm_steps(widths, finest));
  const double half = std::ceil(8.0 * marginal_sigma / unit - 1e-12) * unit;
  const std::size_t count = 2 * static_cast<std::size_t>(std::llround(half / step)) + 1;
  if (count > 100000) throw validation_error("model grid would be unreasonably large");
  return Axis{-half, step, count};
}

std::vector<Axis> position_axes(const BiphotonParams& params, std::span<const double> widths) {
  params.check();
  const double divisor = params.dims() == 1 ? 8.0 : 2.0;
  std::vector<Axis> axes;
  for (std::size_t side = 0; side < 2; ++side)
    for (std::size_t i = 0; i < params.dims(); ++i) {
      const double sp = params.sigma_plus[i], sm = params.sigma_minus[i];
      const double sigma = std::sqrt(0.5 * (sp * sp + sm * sm));
      axes.push_back(model_axis(sigma, std::min(sp, sm), widths, divisor));
    }
  return axes;
}

std::vector<Axis> momentum_axes(const BiphotonParams& params, std::span<const double> widths) {
  params.check();
  const double divisor = params.dims() == 1 ? 8.0 : 2.0;
  std::vector<Axis> axes;
  for (std::size_t side = 0; side < 2; ++side)
    for (std::size_t i = 0; i < params.dims(); ++i) {
      const double kp = 0.5 / params.sigma_plus[i], km = 0.5 / params.sigma_minus[i];
      const double sigma = std::sqrt(0.5 * (kp * kp + km * km));
      axes.push_back(model_axis(sigma, std::min(kp, km), widths, divisor));
    }
  return axes;
}

GridDensity corpus_density(std::uint64_t seed, std::size_t rank, double grid_step) {
  if (rank < 1 || rank > 3) throw arity_error("corpus densities have 1 to 3 axes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_comp_dist(1, 4);
  std::uniform_real_distribution<double> mean_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> sigma_dist(0.3, 2.0);
  std::uniform_real_distribution<double> corr_dist(-0.7, 0.7);
  std::uniform_real_distribution<double> weight_dist(0.2, 1.0);

  const int n_comp = n_comp_dist(rng);
  struct Component {
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;
    double weight;
  };
  std::vector<Component> comps;
  for (int c = 0; c < n_comp; ++c) {
    Component comp;
    comp.mean = Eigen::VectorXd(rank);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(rank, rank);
    for (std::size_t a = 0; a < rank; ++a) {
      comp.mean[a] = mean_dist(rng);
      const double s = sigma_dist(rng);
      cov(a, a) = s * s;
    }
    if (rank >= 2) {
      for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b = a + 1; b < rank; ++b) {
          const double r = corr_dist(rng) / static_cast<double>(rank - 1);
          cov(a, b) = cov(b, a) = r * std::sqrt(cov(a, a) * cov(b, b));
        }
    }
    comp.precision = cov.inverse();
    comp.weight = weight_dist(rng);
    comps.push_back(std::move(comp));
  }
  double wsum = 0.0;
  for (const Component& c : comps) wsum += c.weight;

  const double half = 12.0;
  const std::size_t count = 2 * static_cast<std::size_t>(std::llround(half / grid_step)) + 1;
  std::vector<Axis> axes(rank, Axis{-half, grid_step, count});

  Shape shape;
  shape.rank = rank;
  for (std::size_t a = 0; a < rank; ++a) shape.extent[a] = count;
  std::vector<double> values(shape.size(), 0.0);
  std::array<std::size_t, k_max_rank> idx{};
  Eigen::VectorXd x(rank);
  const std::size_t n = shape.size();
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t a = 0; a < rank; ++a) x[a] = axes[a].coord(idx[a]);
    double v = 0.0;
    for (const Component& c : comps) {
      const Eigen::VectorXd d = x - c.mean;
      v += (c.weight / wsum) * std::exp(-0.5 * d.dot(c.precision * d));
    }
    values[f] = v;
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < shape.extent[a]) break;
      idx[a] = 0;
    }
  }
  return GridDensity::normalized(std::move(axes), std::move(values));
}

}  // namespace entrosteer
