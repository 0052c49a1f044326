#include <doctest.h>

#include "entrosteer/connection.hpp"
#include "entrosteer/gaussian_model.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace entrosteer;
using namespace entrosteer::testing;

TEST_CASE("verify_connection: uniform density, exact cancellation") {
  const GridDensity d = make_uniform(0.0, 1.0, 33);
  const ConnectionReport r =
      verify_connection(d, BinningSpec::tile_all(d.axes(), 0.25), LogBase::two);
  CHECK(r.lhs.value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.discrete_entropy == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.sum_p_h == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(r.residual) < 1e-14);
  CHECK(r.per_window.size() == 4);
}

TEST_CASE("verify_connection: standard normal") {
  const GridDensity d = make_gaussian_1d(1.0, 8.0, 1.0 / 32.0);
  const ConnectionReport r =
      verify_connection(d, BinningSpec::tile_all(d.axes(), 0.5), LogBase::e);
  CHECK(std::abs(r.residual) < 1e-10);
}

TEST_CASE("verify_connection: double-Gaussian joint") {
  const BiphotonParams p = BiphotonParams::isotropic(1.0, 0.5);
  const GridDensity joint = position_joint(p, position_axes(p, std::vector<double>{0.5}));
  const ConnectionReport r =
      verify_connection(joint, BinningSpec::tile_all(joint.axes(), 0.5), LogBase::e);
  CHECK(std::abs(r.residual) < 1e-10);
  // the report fields add up exactly as reported
  CHECK(r.residual == r.lhs.value - r.sum_p_h - r.discrete_entropy);
}

TEST_CASE("gap_suite: uniform joint tiled exactly saturates every bound") {
  const GridDensity joint = make_product(make_uniform(0.0, 1.0, 17), make_uniform(0.0, 2.0, 17));
  const std::vector<double> widths{0.25, 0.5};
  const auto rows = gap_suite(joint, BinningSpec::tile_all(joint.axes(), widths), LogBase::two);
  for (const GapReport& g : rows) {
    if (!g.applicable) continue;
    CHECK(std::abs(g.gap) < 1e-10);
  }
}

TEST_CASE("gap_suite: standard normal, unit windows; brute-force oracle value") {
  const GridDensity d = make_gaussian_1d(1.0, 8.0, 1.0 / 512.0);
  const auto rows = gap_suite(d, BinningSpec::tile_all(d.axes(), 1.0), LogBase::e);
  REQUIRE(rows[0].id == InequalityId::marginal_x);
  REQUIRE(rows[0].applicable);
  // oracle: H from error-function window masses plus closed-form h
  CHECK(std::abs(rows[0].gap - 0.0400202866) < 1e-6);
  for (const GapReport& g : rows)
    if (g.id != InequalityId::marginal_x) CHECK_FALSE(g.applicable);
}

TEST_CASE("gap_suite: product joint has zero mutual information on both sides") {
  const GridDensity g1 = make_gaussian_1d(1.0, 8.0, 0.0625);
  const GridDensity joint = make_product(g1, g1);
  const auto rows = gap_suite(joint, BinningSpec::tile_all(joint.axes(), 0.5), LogBase::e);
  for (const GapReport& g : rows) {
    if (g.id != InequalityId::mutual_xy) continue;
    REQUIRE(g.applicable);
    CHECK(std::abs(g.continuous) < 1e-9);
    CHECK(std::abs(g.discrete) < 1e-9);
    CHECK(std::abs(g.gap) < 1e-9);
  }
}

TEST_CASE("gap_suite: every inequality holds on a seeded mixture corpus (spot check)") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t rank = 1 + seed % 2;
    const GridDensity d = corpus_density(seed, rank);
    for (double w : {0.25, 0.5, 1.0}) {
      const auto rows = gap_suite(d, BinningSpec::tile_all(d.axes(), w), LogBase::e);
      for (const GapReport& g : rows) {
        if (!g.applicable) continue;
        CHECK(g.gap >= k_inequality_floor);
      }
    }
  }
}

TEST_CASE("gap_suite: three-variable rows on a Gaussian triple") {
  Eigen::Matrix3d cov;
  cov << 1.0, 0.4, 0.2, 0.4, 1.0, 0.3, 0.2, 0.3, 1.0;
  const std::vector<Axis> axes(3, Axis{-8.0, 0.125, 129});
  const GridDensity joint = gaussian_joint(cov, axes);
  const auto rows = gap_suite(joint, BinningSpec::tile_all(joint.axes(), 0.5), LogBase::e);
  std::size_t applicable = 0;
  for (const GapReport& g : rows) {
    REQUIRE(g.applicable);
    CHECK(g.gap >= k_inequality_floor);
    ++applicable;
  }
  CHECK(applicable == 8);
}

TEST_CASE("vector_gap: exact tiling of product uniforms saturates") {
  const GridDensity joint = make_product(make_uniform(0.0, 1.0, 17), make_uniform(0.0, 1.0, 17));
  const std::vector<std::size_t> cond{}, targets{0, 1};
  // unconditional vector form: h(x,y) <= H(X,Y) + log dx dy
  const GapReport g =
      vector_gap(joint, cond, targets, BinningSpec::tile_all(joint.axes(), 0.25), LogBase::two);
  CHECK(std::abs(g.gap) < 1e-10);
}

TEST_CASE("vector_gap: 3-axis Gaussian, one condition axis, shrinking under halving") {
  Eigen::Matrix3d cov;
  cov << 1.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 1.0;
  const std::vector<Axis> axes(3, Axis{-8.0, 0.0625, 257});
  const GridDensity joint = gaussian_joint(cov, axes);
  const std::vector<std::size_t> cond{2}, targets{0, 1};
  double prev = 1e300;
  for (double w : {1.0, 0.5, 0.25}) {
    const GapReport g =
        vector_gap(joint, cond, targets, BinningSpec::tile_all(joint.axes(), w), LogBase::e);
    CHECK(g.gap >= k_inequality_floor);
    CHECK(g.gap <= prev + 1e-10);
    prev = g.gap;
  }
}

TEST_CASE("vector_gap: single target axis reduces to the scalar row bit-for-bit") {
  const GridDensity joint = corpus_density(5, 2);
  const BinningSpec spec = BinningSpec::tile_all(joint.axes(), 0.5);
  const std::vector<std::size_t> cond{1}, targets{0};
  const GapReport v = vector_gap(joint, cond, targets, spec, LogBase::e);
  const auto rows = gap_suite(joint, spec, LogBase::e);
  for (const GapReport& g : rows)
    if (g.id == InequalityId::conditional_x_given_y) {
      CHECK(v.gap == g.gap);
      CHECK(v.continuous == g.continuous);
      CHECK(v.discrete == g.discrete);
    }
}

TEST_CASE("vector_gap rejects non-partitions") {
  const GridDensity joint = corpus_density(6, 2);
  const BinningSpec spec = BinningSpec::tile_all(joint.axes(), 0.5);
  const std::vector<std::size_t> cond{0}, targets{0};
  CHECK_THROWS_AS(vector_gap(joint, cond, targets, spec, LogBase::e), arity_error);
}

TEST_CASE("refine_convergence: standard normal gap strictly decreases") {
  const GridDensity d = make_gaussian_1d(1.0, 8.0, 1.0 / 32.0);
  const auto seq = refine_convergence(d, BinningSpec::tile_all(d.axes(), 1.0), 3,
                                      InequalityId::marginal_x, LogBase::e);
  REQUIRE(seq.size() == 4);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    CHECK(seq[i].first == doctest::Approx(seq[i - 1].first / 2));
    CHECK(seq[i].second < seq[i - 1].second);
  }
}

TEST_CASE("refine_convergence: exactly tiled uniform stays at zero") {
  const GridDensity d = make_uniform(0.0, 1.0, 65);
  const auto seq = refine_convergence(d, BinningSpec::tile_all(d.axes(), 0.25), 2,
                                      InequalityId::marginal_x, LogBase::e);
  for (const auto& [w, gap] : seq) CHECK(std::abs(gap) < 1e-10);
}

TEST_CASE("refine_convergence: conditional row on a correlated double-Gaussian") {
  const BiphotonParams p = BiphotonParams::isotropic(1.0, 0.5);
  const GridDensity joint =
      position_joint(p, position_axes(p, std::vector<double>{0.5, 0.125}));
  const auto seq = refine_convergence(joint, BinningSpec::tile_all(joint.axes(), 0.5), 2,
                                      InequalityId::conditional_x_given_y, LogBase::e);
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i].second <= seq[i - 1].second + 1e-10);
}

TEST_CASE("refine_convergence rejects incommensurate finest level") {
  const GridDensity d = make_uniform(0.0, 1.0, 5);  // step 1/4
  CHECK_THROWS_AS(refine_convergence(d, BinningSpec::tile_all(d.axes(), 0.5), 3,
                                     InequalityId::marginal_x, LogBase::e),
                  commensurability_error);
}

TEST_CASE("conditional_mi_probe: independent triple sits at zero") {
  const GridDensity g = make_gaussian_1d(1.0, 8.0, 0.25);
  const GridDensity joint = make_product(make_product(g, g), g);
  const CmiProbe p = conditional_mi_probe(joint, BinningSpec::tile_all(joint.axes(), 0.5),
                                          LogBase::e);
  CHECK(std::abs(p.continuous) < 1e-9);
  CHECK(std::abs(p.discrete) < 1e-9);
  CHECK(std::abs(p.difference) < 1e-9);
  CHECK(p.exploratory);
}

TEST_CASE("conditional_mi_probe: generic Gaussian triple records a finite value") {
  Eigen::Matrix3d cov;
  cov << 1.0, 0.7, 0.3, 0.7, 1.0, 0.2, 0.3, 0.2, 1.0;
  const std::vector<Axis> axes(3, Axis{-8.0, 0.125, 129});
  const GridDensity joint = gaussian_joint(cov, axes);
  const CmiProbe p =
      conditional_mi_probe(joint, BinningSpec::tile_all(joint.axes(), 0.5), LogBase::e);
  CHECK(std::isfinite(p.difference));  // either sign permitted; recorded, not asserted
  CHECK(p.difference == p.continuous - p.discrete);
  CHECK_THROWS_AS(
      conditional_mi_probe(corpus_density(1, 2), BinningSpec::tile_all(corpus_density(1, 2).axes(), 0.5),
                           LogBase::e),
      arity_error);
}

TEST_CASE("Jensen step: per-window conditioning reduces entropy") {
  for (std::uint64_t seed : {2u, 9u}) {
    const GridDensity joint = corpus_density(seed, 2);
    const BinningSpec spec = BinningSpec::tile_all(joint.axes(), 1.0);
    const Histogram h = bin_density(joint, spec);
    const GridDensity marg_x = marginalize(joint, std::size_t{0});
    const BinningSpec spec_x{{spec.axes[0]}};
    const std::size_t my = h.dim(1).count;
    for (std::size_t l = 0; l < h.dim(0).count; ++l) {
      double p_l = 0.0;
      for (std::size_t m = 0; m < my; ++m) p_l += h.prob(l * my + m);
      if (p_l < 1e-12) continue;
      const std::vector<std::size_t> lw{l};
      const double h_l = differential_entropy(window_conditional(marg_x, lw, spec_x),
                                              LogBase::e)
                             .value;
      double avg = 0.0;
      for (std::size_t m = 0; m < my; ++m) {
        const double p_lm = h.prob(l * my + m);
        if (p_lm < k_min_window_prob) continue;
        const std::vector<std::size_t> wlm{l, m};
        const GridDensity rho_lm_x =
            marginalize(window_conditional(joint, wlm, spec), std::size_t{0});
        avg += (p_lm / p_l) * differential_entropy(rho_lm_x, LogBase::e).value;
      }
      CHECK(h_l >= avg + k_inequality_floor);
    }
  }
}
