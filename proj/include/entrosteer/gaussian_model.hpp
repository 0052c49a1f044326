#pragma once

#include "entrosteer/entropy.hpp"

#include <Eigen/Dense>
#include <random>

namespace entrosteer {

// Double-Gaussian biphoton model. Per spatial axis i the two-particle
// position amplitude factorizes into normal modes
//   x_plus = (x_A + x_B)/sqrt(2),  x_minus = (x_A - x_B)/sqrt(2),
// with |psi|^2 giving Var(x_plus) = sigma_plus^2, Var(x_minus) = sigma_minus^2.
// Wavenumber convention: sigma_x * sigma_k = 1/2 per mode, so the conjugate
// modes have Var(k_plus) = 1/(4 sigma_plus^2), Var(k_minus) = 1/(4 sigma_minus^2).
// The state is entangled iff sigma_plus != sigma_minus.
struct BiphotonParams {
  std::vector<double> sigma_plus;   // one per spatial axis
  std::vector<double> sigma_minus;

  std::size_t dims() const { return sigma_plus.size(); }

  static BiphotonParams isotropic(double sp, double sm, std::size_t n = 1) {
    return BiphotonParams{std::vector<double>(n, sp), std::vector<double>(n, sm)};
  }

  void check() const;
};

// 2x2 covariance of (x_A, x_B) for one axis: [[a, c], [c, a]] with
// a = (sp^2 + sm^2)/2 and c = (sp^2 - sm^2)/2.
Eigen::Matrix2d position_covariance(double sigma_plus, double sigma_minus);
Eigen::Matrix2d momentum_covariance(double sigma_plus, double sigma_minus);

// Zero-mean multivariate Gaussian sampled and renormalized on the grid.
// Rejects grids whose tail mass exceeds k_tail_tol (union bound over the
// per-variable marginal tails).
GridDensity gaussian_joint(const Eigen::MatrixXd& covariance, std::vector<Axis> axes);

// rho(x_A1..x_An, x_B1..x_Bn): axes ordered A-side first, then B-side.
GridDensity position_joint(const BiphotonParams& params, std::vector<Axis> axes);
GridDensity momentum_joint(const BiphotonParams& params, std::vector<Axis> axes);

// Closed-form Gaussian entropies from the covariance matrices; the
// conditional variances come from 2x2 Schur complements.
struct AxisEntropies {
  double h_xB = 0.0;
  double h_xB_given_xA = 0.0;
  double h_kB = 0.0;
  double h_kB_given_kA = 0.0;
  double var_xB_given_xA = 0.0;
  double var_kB_given_kA = 0.0;
};

struct AnalyticEntropies {
  std::vector<AxisEntropies> per_axis;
  double continuous_lhs = 0.0;  // sum_i h(xB|xA) + h(kB|kA), in `base`
  LogBase base = LogBase::two;
};

AnalyticEntropies analytic_entropies(const BiphotonParams& params, LogBase base);

// Axes suitable for the model: extent an integer multiple of every window
// width, step a power-of-two fraction of the finest width fine enough to
// resolve the narrowest mode (step <= smoothness_scale / step_divisor). The
// paired builders relax the divisor for two-pair joints, where four axes make
// oversampling unaffordable and the Gaussian quadrature error is negligible
// well before step reaches the mode width.
Axis model_axis(double marginal_sigma, double smoothness_scale, std::span<const double> widths,
                double step_divisor = 8.0);
std::vector<Axis> position_axes(const BiphotonParams& params, std::span<const double> widths);
std::vector<Axis> momentum_axes(const BiphotonParams& params, std::span<const double> widths);

// Seeded Gaussian-mixture corpus member: 1-4 axis-aligned (optionally
// correlated, for rank 2) components with means in [-3, 3] and sigmas in
// [0.3, 2], renormalized on a [-12, 12] grid.
GridDensity corpus_density(std::uint64_t seed, std::size_t rank, double grid_step = 1.0 / 16.0);

}  // namespace entrosteer
