#include "qdiv/divergences.hpp"
#include "qdiv/states.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace qdiv;
using namespace qdiv::testing;

namespace {

const std::vector<Alpha> kOrders{Alpha(0.0), Alpha(0.25), Alpha(0.5), Alpha(0.75),
                                 Alpha(1.0), Alpha(2.0),  Alpha(5.0), Alpha::infinity()};

}  // namespace

TEST_CASE("normalization on |0><0| against I/2") {
  auto k0 = DensityOperator::basis_state(2, 0);
  auto half = DensityOperator::maximally_mixed(2);
  for (Alpha a : {Alpha(0.0), Alpha(0.5), Alpha(1.0), Alpha(2.0), Alpha::infinity()})
    CHECK(std::abs(d_alpha(k0, half, a).value - 1.0) <= 1e-10);
  for (int m = 2; m <= 8; ++m)
    CHECK(std::abs(d_min(DensityOperator::basis_state(m, 0), DensityOperator::maximally_mixed(m)).value -
                   std::log2(m)) <= 1e-12);
}

TEST_CASE("q_alpha examples") {
  Rng rng(1);
  auto rho = random_density(3, 3, rng);
  CHECK(q_alpha(rho, rho, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(q_alpha(diag_state({0.5, 0.5}), diag_state({0.25, 0.75}), 2.0) == doctest::Approx(4.0 / 3.0));

  for (int i = 0; i < 10; ++i) {
    auto a = random_density(2, 2, rng);
    auto b = random_density(2, 2, rng);
    auto c = random_density(2, 1 + i % 2, rng);
    auto d = random_density(2, 2, rng);
    for (double alpha : {0.5, 0.8, 2.0, 3.0}) {
      const double joint = q_alpha(tensor(a, c), tensor(b, d), alpha);
      CHECK(joint == doctest::Approx(q_alpha(a, b, alpha) * q_alpha(c, d, alpha)).epsilon(1e-9));
    }
  }
}

TEST_CASE("d_alpha examples and support cases") {
  Rng rng(2);
  auto rho = random_density(3, 3, rng);
  CHECK(std::abs(d_alpha(rho, rho, 2.0).value) < 1e-10);
  CHECK(d_alpha(ket_plus(), DensityOperator::maximally_mixed(2), 2.0).value == doctest::Approx(1.0));

  auto k0 = DensityOperator::basis_state(2, 0);
  auto k1 = DensityOperator::basis_state(2, 1);
  CHECK(d_alpha(k0, k1, 2.0).support_case == SupportCase::kNotContained);
  CHECK(d_alpha(k0, k1, 0.7).support_case == SupportCase::kOrthogonal);
  CHECK(d_alpha(k0, k1, 0.3).support_case == SupportCase::kOrthogonal);
  CHECK(d_alpha(k0, k1, 0.7).is_infinite());
  auto mixed = diag_state({0.5, 0.5});
  auto d07 = d_alpha(mixed, k0, 0.7);
  CHECK(d07.support_case == SupportCase::kRegular);
  CHECK(d07.value == doctest::Approx(7.0 / 3.0));  // Q = (1/2)^0.7
  CHECK(d_alpha(mixed, k0, 0.3).support_case == SupportCase::kDualBranch);
  CHECK(d_alpha(mixed, k0, 1.5).is_infinite());
}

TEST_CASE("classical closed forms") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    auto p = random_probability(4, rng);
    auto q = random_probability(4, rng);
    std::vector<double> pv(p.data(), p.data() + 4);
    std::vector<double> qv(q.data(), q.data() + 4);
    auto rho = diag_state(pv);
    auto sigma = diag_state(qv);
    for (double a : {0.3, 0.5, 0.8, 2.0, 3.5}) {
      const double expect = std::log2(oracle::classical_q(pv, qv, a)) / (a - 1.0);
      CHECK(d_alpha(rho, sigma, a).value == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(d_umegaki(rho, sigma).value == doctest::Approx(oracle::classical_kl(pv, qv)).epsilon(1e-10));
    double ratio = 0.0;
    for (int x = 0; x < 4; ++x) ratio = std::max(ratio, pv[x] / qv[x]);
    CHECK(d_max(rho, sigma).value == doctest::Approx(std::log2(ratio)).epsilon(1e-10));
  }
}

TEST_CASE("d_min, d_max, d_umegaki examples") {
  CHECK(d_min(DensityOperator::basis_state(4, 0), DensityOperator::maximally_mixed(4)).value ==
        doctest::Approx(2.0));
  Rng rng(4);
  auto rho = random_density(3, 2, rng);
  CHECK(std::abs(d_max(rho, rho).value) < 1e-9);
  auto sigma = diag_state({0.2, 0.5, 0.3});
  CHECK(d_umegaki(DensityOperator::basis_state(3, 1), sigma).value == doctest::Approx(-std::log2(0.5)));
  CHECK(d_umegaki(DensityOperator::basis_state(3, 2), sigma).value == doctest::Approx(-std::log2(0.3)));
}

TEST_CASE("d_hypothesis") {
  Rng rng(5);
  auto rho = random_density(3, 3, rng);
  for (double eps : {0.0, 0.1, 0.5, 0.9}) {
    auto h = d_hypothesis(rho, rho, eps);
    CHECK(h.value.value == doctest::Approx(-std::log2(1.0 - eps)).epsilon(1e-9));
  }

  auto h = d_hypothesis(diag_state({1.0, 0.0}), DensityOperator::maximally_mixed(2), 0.25);
  CHECK(h.value.value == doctest::Approx(-std::log2(3.0 / 8.0)));
  CHECK(h.test.effect.matrix()(0, 0).real() == doctest::Approx(0.75));
  CHECK(std::abs(h.test.effect.matrix()(1, 1)) < 1e-9);

  auto zero = d_hypothesis(DensityOperator::basis_state(2, 0), DensityOperator::maximally_mixed(2), 0.0);
  CHECK(zero.value.value == doctest::Approx(1.0));

  CHECK_THROWS_AS(d_hypothesis(rho, rho, 1.0), ValidationError);
  CHECK_THROWS_AS(d_hypothesis(rho, rho, -0.1), ValidationError);
}

TEST_CASE("d_hypothesis matches classical Neyman–Pearson") {
  Rng rng(6);
  for (int i = 0; i < 30; ++i) {
    auto p = random_probability(4, rng);
    auto q = random_probability(4, rng);
    std::vector<double> pv(p.data(), p.data() + 4);
    std::vector<double> qv(q.data(), q.data() + 4);
    const double eps = 0.05 + 0.9 * rng.uniform();
    auto h = d_hypothesis(diag_state(pv), diag_state(qv), eps);
    CHECK(h.value.value == doctest::Approx(-std::log2(oracle::classical_beta(pv, qv, eps))).epsilon(1e-8));
    CHECK(h.test.alpha_err >= 1.0 - eps - 1e-9);
  }
}

TEST_CASE("d_hypothesis matches brute-force qubit effects") {
  Rng rng(7);
  for (int i = 0; i < 8; ++i) {
    auto rho = random_density(2, 1 + i % 2, rng);
    auto sigma = random_density(2, 2, rng);
    auto h = d_hypothesis(rho, sigma, 0.1);
    const double grid_value = -std::log2(oracle::qubit_beta_grid(rho.matrix(), sigma.matrix(), 0.1, 60));
    CHECK(std::abs(h.value.value - grid_value) <= 1e-3);
    CHECK(grid_value <= h.value.value + 1e-9);
    CHECK(h.test.dual_beta == doctest::Approx(h.test.beta).epsilon(1e-7));
    const RealVector ev = h.test.effect.spectrum().eigenvalues;
    CHECK(ev.minCoeff() >= -tol::kPsd);
    CHECK(ev.maxCoeff() <= 1.0 + tol::kPsd);
  }
}

TEST_CASE("d_tilde_max") {
  CHECK(std::abs(d_tilde_max(diag_state({1.0, 0.0}), DensityOperator::maximally_mixed(2), 0.5).value) < 1e-9);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    auto rho = random_density(3, 1 + i % 3, rng);
    const double eps = 0.05 + 0.9 * rng.uniform();
    const double v = d_tilde_max(rho, rho, eps).value;
    CHECK(v <= 1e-9);
    CHECK(v >= std::log2(1.0 - eps) - 1e-9);
    auto sigma = random_density(3, 3, rng);
    CHECK(d_tilde_max(rho, sigma, 0.2).value >= d_tilde_max(rho, sigma, 0.4).value - 1e-9);
  }
  Matrix zero = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(d_tilde_max(DensityOperator::maximally_mixed(2), PositiveOperator(zero), 0.3), ValidationError);
}

TEST_CASE("pinched lower bound") {
  Rng rng(9);
  auto sigma = diag_state({0.1, 0.2, 0.7});
  auto rho_c = diag_state({0.3, 0.3, 0.4});
  auto pb = pinched_measured_lower_bound(rho_c, sigma, 2.0);
  CHECK(pb.value.value == doctest::Approx(d_alpha(rho_c, sigma, 2.0).value));
  CHECK(pb.spectrum_size == 3);

  auto rho = random_density(3, 3, rng);
  auto u = pinched_measured_lower_bound(rho, DensityOperator::maximally_mixed(3), 0.5);
  CHECK(u.spectrum_size == 1);
  CHECK(u.value.value == doctest::Approx(d_alpha(rho, DensityOperator::maximally_mixed(3), 0.5).value));

  for (int i = 0; i < 20; ++i) {
    auto r = random_density(2, 2, rng);
    auto s = random_density(2, 2, rng);
    CHECK(pinched_measured_lower_bound(r, s, 1.0).value.value <= d_umegaki(r, s).value + 1e-12);
  }
}

TEST_CASE("direct sum property") {
  Rng rng(10);
  auto r1 = random_density(2, 2, rng);
  auto s1 = random_density(2, 2, rng);
  auto k1 = check_direct_sum({1.0}, {r1}, {s1}, 2.0);
  CHECK(k1.gap <= 1e-12);
  CHECK(k1.lhs == doctest::Approx(q_alpha(r1, s1, 2.0)));
  for (double a : {2.0, 0.5}) {
    auto r2 = random_density(2, 2, rng);
    auto s2 = random_density(2, 1, rng);
    auto rep = check_direct_sum({0.3, 0.7}, {r1, r2}, {s1, random_density(2, 2, rng)}, a);
    CHECK(rep.pass);
    (void)s2;
  }
}

TEST_CASE("monotone in alpha") {
  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    auto rho = random_density(3, 1 + i % 3, rng);
    auto sigma = random_density(3, 3, rng);
    double prev = -kInf;
    for (const Alpha& a : kOrders) {
      const double v = d_alpha(rho, sigma, a).value;
      CHECK(v >= prev - 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("data processing under random channels") {
  Rng rng(12);
  for (int i = 0; i < 15; ++i) {
    auto rho = random_density(3, 1 + i % 3, rng);
    auto sigma = random_density(3, 3, rng);
    auto ch = IsometricChannel::random(3, 2, 3, rng);
    auto er = ch.apply(rho);
    auto es = ch.apply(sigma);
    for (const Alpha& a : kOrders) {
      if (!a.is_infinite() && a.value() < 0.5 && !a.is_zero()) continue;
      CHECK(d_alpha(er, es, a).value <= d_alpha(rho, sigma, a).value + 1e-8);
    }
    CHECK(d_hypothesis(er, es, 0.2).value.value <= d_hypothesis(rho, sigma, 0.2).value.value + 1e-8);
    CHECK(d_tilde_max(er, es, 0.2).value <= d_tilde_max(rho, sigma, 0.2).value + 1e-8);
  }
}

TEST_CASE("scaling and Löwner monotonicity") {
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    auto rho = random_density(3, 1 + i % 3, rng);
    auto sigma = random_positive(3, 3, 2.0, rng);
    const double t = 4.0 * (1.0 - rng.uniform());
    auto ts = sigma.scaled(t);
    CHECK(d_min(rho, ts).value == doctest::Approx(d_min(rho, sigma).value - std::log2(t)).epsilon(1e-9));
    CHECK(d_max(rho, ts).value == doctest::Approx(d_max(rho, sigma).value - std::log2(t)).epsilon(1e-9));
    CHECK(d_umegaki(rho, ts).value == doctest::Approx(d_umegaki(rho, sigma).value - std::log2(t)).epsilon(1e-9));
    for (double a : {0.5, 0.75, 2.0, 3.0})
      CHECK(d_alpha(rho, ts, a).value == doctest::Approx(d_alpha(rho, sigma, a).value - std::log2(t)).epsilon(1e-9));

    auto bigger = sigma + random_positive(3, 1 + i % 3, 1.0, rng);
    for (const Alpha& a : kOrders) {
      if (!a.is_zero() && !a.is_infinite() && a.value() < 0.5) continue;
      CHECK(d_alpha(rho, sigma, a).value >= d_alpha(rho, bigger, a).value - 1e-9);
    }
  }
}

TEST_CASE("positive part bound and the meet inequality") {
  Rng rng(14);
  for (int i = 0; i < 30; ++i) {
    auto rho = random_positive(3, 1 + i % 3, 2.0, rng);
    auto sigma = random_positive(3, 1 + (i / 3) % 3, 2.0, rng);
    auto lam = rho + sigma;
    const double pos = positive_part_trace(rho - sigma);
    for (double a : {0.5, 0.999, 1.5, 2.0}) CHECK(q_alpha(rho, lam, a) >= pos - 1e-9);
    const double q0 = trace_product(lam.matrix(), support_projector(rho).projector.matrix());
    CHECK(q0 >= pos - 1e-9);
    const Matrix li = power(lam, -0.5).matrix();
    const double rhs = trace_product(rho.matrix(), li * sigma.matrix() * li);
    CHECK(op_meet(rho, sigma).trace() >= rhs - 1e-9);
  }
}

TEST_CASE("collision entropy dominates the purified-distance bound") {
  Rng rng(15);
  for (int i = 0; i < 30; ++i) {
    auto rho = random_density(3, 1 + i % 3, rng);
    auto sigma = random_density(3, 3, rng);
    const double p = fidelity_and_purified(rho, sigma).purified_distance;
    CHECK(d_alpha(rho, sigma, 2.0).value >= -std::log2(1.0 - p * p) - 1e-9);
  }
}

// Optimum of f over u in [0, 1]: 50-point grid, then three zooms around the best point.
template <class F, class Better>
double zoomed_grid(F f, Better better) {
  double lo = 0.0, hi = 1.0, best_u = 0.0;
  double best = f(0.0);
  for (int z = 0; z < 4; ++z) {
    for (int j = 0; j <= 49; ++j) {
      const double u = lo + (hi - lo) * j / 49.0;
      const double v = f(u);
      if (better(v, best)) {
        best = v;
        best_u = u;
      }
    }
    const double w = 2.0 * (hi - lo) / 49.0;
    lo = std::max(0.0, best_u - w);
    hi = std::min(1.0, best_u + w);
  }
  return best;
}

TEST_CASE("information spectrum and hypothesis testing relations on delta grids") {
  Rng rng(16);
  for (int i = 0; i < 4; ++i) {
    auto rho = random_density(2, 2, rng);
    auto sigma = random_density(2, 2, rng);
    const double eps = 0.3;
    // geometric spacing of delta - eps resolves the log singularity at delta = eps
    const double sup = zoomed_grid(
        [&](double u) {
          const double delta = eps + (1.0 - eps) * std::pow(1e-3, u);
          const double dh = delta >= 1.0 ? d_min(rho, sigma).value : d_hypothesis(rho, sigma, 1.0 - delta).value.value;
          return dh + std::log2(delta - eps);
        },
        std::greater<>());
    CHECK(std::abs(sup - d_tilde_max(rho, sigma, eps).value) <= 1e-2);

    const double inf = zoomed_grid(
        [&](double u) {
          const double delta = u == 0.0 ? 0.0 : eps - eps * std::pow(1e-3, u);
          const double dt = delta == 0.0 ? d_max(rho, sigma).value : d_tilde_max(rho, sigma, delta).value;
          return dt - std::log2(eps - delta);
        },
        std::less<>());
    CHECK(std::abs(inf - d_hypothesis(rho, sigma, 1.0 - eps).value.value) <= 1e-2);
  }
}
