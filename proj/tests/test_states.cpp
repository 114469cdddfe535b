#include "qdiv/states.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <filesystem>

using namespace qdiv;
using namespace qdiv::testing;

TEST_CASE("random_density") {
  auto pure = random_density(2, 1, 17);
  CHECK(trace_product(pure.matrix(), pure.matrix()) == doctest::Approx(1.0).epsilon(1e-10));
  auto full = random_density(4, 4, 17);
  CHECK(full.trace() == doctest::Approx(1.0));
  CHECK(support_projector(full).rank == 4);
  CHECK(max_abs_diff(random_density(4, 3, 99).matrix(), random_density(4, 3, 99).matrix()) == 0.0);
  CHECK_THROWS_AS(random_density(2, 3, 1), ValidationError);
  CHECK_THROWS_AS(random_density(2, 0, 1), ValidationError);
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(Rng(7).split(1).next_u64() != Rng(7).split(2).next_u64());
  Rng c(1);
  double mean = 0.0;
  double var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double g = c.normal();
    mean += g;
    var += g * g;
  }
  CHECK(std::abs(mean / n) < 0.05);
  CHECK(std::abs(var / n - 1.0) < 0.05);
}

TEST_CASE("random unitaries and channels") {
  Rng rng(12);
  Matrix u = random_unitary(4, rng);
  CHECK(max_abs_diff(u.adjoint() * u, Matrix::Identity(4, 4)) < 1e-12);
  auto ch = IsometricChannel::random(3, 2, 3, rng);
  auto out = ch.apply(random_density(3, 3, rng));
  CHECK(out.dim() == 2);
  CHECK(out.trace() == doctest::Approx(1.0));
}

TEST_CASE("cq_state") {
  auto single = cq_state(RealVector::Ones(1), {DensityOperator::maximally_mixed(2)});
  CHECK(max_abs_diff(single.joint().matrix(), DensityOperator::maximally_mixed(2).matrix()) < 1e-15);

  RealVector half(2);
  half << 0.5, 0.5;
  auto cq = cq_state(half, {DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1)});
  CHECK(max_abs_diff(cq.joint().matrix(), diag_state({0.5, 0.0, 0.0, 0.5}).matrix()) < 1e-15);

  Rng rng(9);
  RealVector p = random_probability(3, rng);
  std::vector<DensityOperator> outs{random_density(2, 2, rng), random_density(2, 1, rng), random_density(2, 2, rng)};
  auto c3 = cq_state(p, outs);
  Matrix expect = p(0) * outs[0].matrix() + p(1) * outs[1].matrix() + p(2) * outs[2].matrix();
  CHECK(max_abs_diff(partial_trace_matrix(c3.joint().matrix(), {3, 2}, {1}), expect) < 1e-14);
  CHECK(max_abs_diff(partial_trace_matrix(c3.joint().matrix(), {3, 2}, {0}), c3.marginal_x().matrix()) < 1e-14);

  RealVector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(cq_state(bad, {outs[0], outs[1]}), ValidationError);
  CHECK_THROWS_AS(cq_state(half, {outs[0]}), ValidationError);
}

TEST_CASE("purify") {
  auto p0 = purify(DensityOperator::basis_state(2, 0));
  CHECK(p0.dims == Dims{1, 2});
  CHECK(max_abs_diff(p0.state.matrix(), DensityOperator::basis_state(2, 0).matrix()) < 1e-15);

  auto pu = purify(DensityOperator::maximally_mixed(2));
  CHECK(pu.dims == Dims{2, 2});
  CHECK(max_abs_diff(partial_trace(pu.state, pu.dims, {1}).matrix(), DensityOperator::maximally_mixed(2).matrix()) <
        1e-15);
  CHECK(max_abs_diff(partial_trace(pu.state, pu.dims, {0}).matrix(), DensityOperator::maximally_mixed(2).matrix()) <
        1e-15);

  auto d = diag_state({0.75, 0.25});
  auto pd = purify(d);
  CHECK(max_abs_diff(partial_trace(pd.state, pd.dims, {1}).matrix(), d.matrix()) < tol::kRecon);

  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    auto rho = random_density(4, 1 + i % 4, rng);
    auto pr = purify(rho);
    CHECK(pr.dims[0] == 1 + i % 4);
    CHECK(support_projector(pr.state).rank == 1);
    CHECK(max_abs_diff(partial_trace(pr.state, pr.dims, {1}).matrix(), rho.matrix()) < tol::kRecon);
  }
}

TEST_CASE("pairwise tensor family") {
  Rng rng(41);
  auto rho_ra = random_density(4, 3, rng);
  auto sigma = random_density(2, 2, rng);

  auto one = pairwise_tensor_family(rho_ra, 2, 2, sigma, 1);
  CHECK(one.members.size() == 1);
  CHECK(max_abs_diff(one.members[0].matrix(), rho_ra.matrix()) < 1e-15);

  auto rho_r = random_density(2, 2, rng);
  auto prod = pairwise_tensor_family(tensor(rho_r, sigma), 2, 2, sigma, 2);
  CHECK(max_abs_diff(prod.members[0].matrix(), prod.members[1].matrix()) < 1e-14);

  auto three = pairwise_tensor_family(rho_ra, 2, 2, sigma, 3);
  auto m12 = partial_trace_matrix(three.members[0].matrix(), three.dims(), {0, 2});
  auto rho_r2 = DensityOperator(partial_trace_matrix(rho_ra.matrix(), {2, 2}, {0}));
  CHECK(max_abs_diff(m12, tensor(rho_r2, sigma).matrix()) < 1e-14);

  for (int n = 1; n <= 6; ++n) {
    auto r = random_density(4, 4, rng);
    auto s = random_density(2, 1 + n % 2, rng);
    CHECK(pairwise_tensor_family(r, 2, 2, s, n).marginal_defect() < tol::kRecon);
  }
}

TEST_CASE("correlated pairwise family keeps the marginal pattern") {
  Rng rng(43);
  for (int n = 2; n <= 5; ++n) {
    auto r = random_density(4, 4, rng);
    auto s = random_density(2, 2, rng);
    auto fam = pairwise_correlated_family(r, 2, 2, s, n, 0.6);
    CHECK(fam.marginal_defect() < tol::kRecon);
  }
}

TEST_CASE("state files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "qdiv_state_tests";
  std::filesystem::create_directories(dir);
  auto u = DensityOperator::maximally_mixed(2);
  save_state(u, {2}, dir / "u2.json", "u2");
  auto back = load_state(dir / "u2.json");
  CHECK(back.label == "u2");
  CHECK(max_abs_diff(back.state.matrix(), u.matrix()) == 0.0);

  Rng rng(5);
  auto rho = random_density(4, 4, rng);
  save_state(rho, {2, 2}, dir / "r.json");
  auto r2 = load_state(dir / "r.json");
  CHECK(r2.dims == Dims{2, 2});
  CHECK(max_abs_diff(r2.state.matrix(), rho.matrix()) <= 1e-15);

  CHECK_THROWS_AS(state_from_json(R"({"dims":[2],"re":[[0.45,0],[0,0.45]],"im":[[0,0],[0,0]]})"),
                  ValidationError);
  CHECK_THROWS_AS(state_from_json(R"({"dims":[3],"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]})"), ValidationError);
  CHECK_THROWS_AS(state_from_json(R"({"dims":[2],"re":[[1,0],[0,-1]],"im":[[0,0],[0,0]]})"), ValidationError);
  CHECK_THROWS_AS(state_from_json("{not json"), ValidationError);

  Channel ch({DensityOperator::basis_state(2, 0), DensityOperator::maximally_mixed(2)});
  save_channel(ch, dir / "ch.json");
  auto ch2 = load_channel(dir / "ch.json");
  CHECK(ch2.input_size() == 2);
  CHECK(max_abs_diff(ch2.outputs()[1].matrix(), ch.outputs()[1].matrix()) == 0.0);
  auto cl = ClassicalChannel::from_channel(ch2);
  CHECK(cl.w()(1, 0) == doctest::Approx(0.5));
  std::filesystem::remove_all(dir);
}
