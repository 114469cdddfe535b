#include "qdiv/linalg.hpp"
#include "qdiv/states.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace qdiv;
using namespace qdiv::testing;

TEST_CASE("eig_hermitian returns ascending eigenvalues") {
  auto id = eig_hermitian(HermitianOperator::identity(2));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  auto sd = eig_hermitian(HermitianOperator(d));
  CHECK(sd.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(sd.eigenvalues(1) == doctest::Approx(3.0));

  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  auto sx = eig_hermitian(HermitianOperator(x));
  CHECK(sx.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(sx.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(max_abs_diff(sx.reconstruct(), x) < tol::kRecon);
}

TEST_CASE("non-Hermitian input is rejected") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
}

TEST_CASE("positivity clamps round-off and rejects real negatives") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-12;
  PositiveOperator p(m);
  CHECK(p.spectrum().eigenvalues.minCoeff() >= 0.0);
  m(1, 1) = -1e-3;
  CHECK_THROWS_AS(PositiveOperator{m}, ValidationError);
  Matrix half = Matrix::Identity(2, 2) * 0.45;
  CHECK_THROWS_AS(DensityOperator{half}, ValidationError);
}

TEST_CASE("mat_fn examples") {
  auto r = mat_fn(PositiveOperator::identity(2), [](double v) { return std::sqrt(v); }, false);
  CHECK(max_abs_diff(r.matrix(), Matrix::Identity(2, 2)) < 1e-14);

  auto pinv = mat_fn(diag_positive({4.0, 0.0}), [](double v) { return 1.0 / std::sqrt(v); }, true);
  CHECK(pinv.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(std::abs(pinv.matrix()(1, 1)) < 1e-15);

  auto q = mat_fn(DensityOperator::maximally_mixed(2), [](double v) { return std::pow(v, -0.25); }, false);
  CHECK(q.matrix()(0, 0).real() == doctest::Approx(std::pow(2.0, 0.25)));
  CHECK(q.matrix()(1, 1).real() == doctest::Approx(std::pow(2.0, 0.25)));

  CHECK_THROWS_AS(mat_fn(diag_positive({1.0, 0.0}), [](double v) { return 1.0 / v; }, false), ValidationError);
}

TEST_CASE("tensor products") {
  CHECK(max_abs_diff(tensor(PositiveOperator::identity(2), PositiveOperator::identity(2)).matrix(),
                     Matrix::Identity(4, 4)) < 1e-15);
  auto t = tensor(DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1));
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  CHECK(max_abs_diff(t.matrix(), expect) < 1e-15);
  auto u = tensor(DensityOperator::maximally_mixed(2), DensityOperator::maximally_mixed(2));
  CHECK(max_abs_diff(u.matrix(), DensityOperator::maximally_mixed(4).matrix()) < 1e-15);
}

TEST_CASE("tensor spectrum is consistent with direct diagonalization") {
  Rng rng(11);
  auto a = random_density(2, 2, rng);
  auto b = random_density(3, 2, rng);
  auto t = tensor(a, b);
  CHECK(max_abs_diff(t.spectrum().reconstruct(), t.matrix()) < tol::kRecon);
  RealVector direct = Eigen::SelfAdjointEigenSolver<Matrix>(t.matrix()).eigenvalues();
  CHECK((direct - t.spectrum().eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace") {
  Rng rng(3);
  auto rho = random_density(2, 2, rng);
  auto sigma = random_density(3, 3, rng);
  auto pt = partial_trace(tensor(rho, sigma), {2, 3}, {0});
  CHECK(max_abs_diff(pt.matrix(), rho.matrix()) < 1e-12);

  auto bell = partial_trace(bell_state(), {2, 2}, {0});
  CHECK(max_abs_diff(bell.matrix(), DensityOperator::maximally_mixed(2).matrix()) < 1e-15);

  Matrix all = partial_trace_matrix(tensor(rho, sigma).matrix(), {2, 3}, {});
  CHECK(all.rows() == 1);
  CHECK(all(0, 0).real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(partial_trace_matrix(rho.matrix(), {3}, {0}), ValidationError);
}

TEST_CASE("partial trace preserves trace and positivity on random inputs") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto rho = random_density(12, 1 + i % 12, rng);
    for (auto keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {2, 0}, {1, 2}}) {
      HermitianOperator m(partial_trace_matrix(rho.matrix(), {2, 3, 2}, keep));
      CHECK(m.trace() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m.spectrum().eigenvalues.minCoeff() >= -tol::kPsd);
    }
  }
}

TEST_CASE("permute_subsystems swaps factors") {
  Rng rng(8);
  auto a = random_density(2, 2, rng);
  auto b = random_density(3, 2, rng);
  auto swapped = permute_subsystems(tensor(a, b), {2, 3}, {1, 0});
  CHECK(max_abs_diff(swapped.matrix(), tensor(b, a).matrix()) < 1e-14);
  CHECK(max_abs_diff(swapped.spectrum().reconstruct(), swapped.matrix()) < tol::kRecon);
}

TEST_CASE("trace distance examples and triangle inequality") {
  Rng rng(21);
  auto rho = random_density(3, 3, rng);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0));
  auto k0 = DensityOperator::basis_state(2, 0);
  auto k1 = DensityOperator::basis_state(2, 1);
  CHECK(trace_distance(k0, k1) == doctest::Approx(1.0));
  CHECK(trace_distance(k0, DensityOperator::maximally_mixed(2)) == doctest::Approx(0.5));
  for (int i = 0; i < 30; ++i) {
    auto a = random_density(3, 1 + i % 3, rng);
    auto b = random_density(3, 3, rng);
    auto c = random_density(3, 2, rng);
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10);
  }
}

TEST_CASE("fidelity and purified distance") {
  Rng rng(22);
  auto rho = random_density(3, 3, rng);
  auto same = fidelity_and_purified(rho, rho);
  CHECK(same.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(same.purified_distance < 1e-4);
  auto k0 = DensityOperator::basis_state(2, 0);
  auto orth = fidelity_and_purified(k0, DensityOperator::basis_state(2, 1));
  CHECK(orth.fidelity == doctest::Approx(0.0));
  CHECK(orth.purified_distance == doctest::Approx(1.0));
  auto mixed = fidelity_and_purified(k0, DensityOperator::maximally_mixed(2));
  CHECK(mixed.fidelity == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(mixed.purified_distance == doctest::Approx(1.0 / std::sqrt(2.0)));

  for (int i = 0; i < 30; ++i) {
    auto a = random_density(2, 1 + i % 2, rng);
    auto b = random_density(2, 2, rng);
    CHECK(fidelity_and_purified(a, b).purified_distance <= std::sqrt(2.0 * trace_distance(a, b)) + 1e-10);
  }
}

TEST_CASE("positive part trace") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  CHECK(positive_part_trace(HermitianOperator(m)) == doctest::Approx(1.0));
  Matrix n = Matrix::Zero(3, 3);
  n(0, 0) = 0.7;
  n(1, 1) = -0.2;
  n(2, 2) = 0.5;
  CHECK(positive_part_trace(HermitianOperator(n)) == doctest::Approx(1.2));
  Rng rng(2);
  auto p = random_positive(3, 2, 2.0, rng);
  CHECK(positive_part_trace(p) == doctest::Approx(p.trace()));
}

TEST_CASE("op_meet") {
  Rng rng(4);
  auto rho = random_density(2, 2, rng);
  CHECK(max_abs_diff(op_meet(rho, rho).matrix(), rho.matrix()) < 1e-12);
  auto m = op_meet(diag_positive({3.0, 1.0}), diag_positive({1.0, 3.0}));
  CHECK(max_abs_diff(m.matrix(), Matrix::Identity(2, 2)) < 1e-12);
  for (int i = 0; i < 30; ++i) {
    auto a = random_positive(2, 2, 2.0, rng);
    auto b = random_positive(2, 1 + i % 2, 2.0, rng);
    CHECK(op_meet(a, b).trace() <= std::min(a.trace(), b.trace()) + 1e-12);
  }
}

TEST_CASE("dimension cap guards tensor products") {
  const long saved = dimension_cap();
  set_dimension_cap(8);
  auto u = DensityOperator::maximally_mixed(4);
  CHECK_THROWS_AS(tensor(u, u), DimensionCapError);
  set_dimension_cap(saved);
  CHECK(tensor(u, u).dim() == 16);
}
