#include "qdiv/info.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdiv {

namespace {

const double kLn2 = std::log(2.0);

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b); }

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Columns span supp(m).
Matrix support_isometry(const PositiveOperator& m) {
  const SpectralDecomposition& s = m.spectrum();
  const double cut = s.support_cutoff();
  std::vector<int> cols;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i) > cut) cols.push_back(i);
  Matrix v(m.dim(), static_cast<long>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) v.col(static_cast<long>(j)) = s.eigenvectors.col(cols[j]);
  return v;
}

// ρ^{AB} restricted to supp(ρ^A) ⊗ supp(ρ^B). Both optimizations below have
// their minimizer inside these supports, and the reduced marginals are invertible.
struct Reduced {
  DensityOperator state;
  Dims dims;
  Matrix va;
  Matrix vb;
  DensityOperator marginal_a;
  DensityOperator marginal_b;
};

Reduced reduce_to_supports(const DensityOperator& rho, const Dims& dims) {
  if (dims.size() != 2 || product_of(dims) != rho.dim()) throw ValidationError("invalid bipartition");
  const auto ra = partial_trace(rho, dims, {0});
  const auto rb = partial_trace(rho, dims, {1});
  Matrix va = support_isometry(ra);
  Matrix vb = support_isometry(rb);
  const Matrix v = kron(va, vb);
  DensityOperator state(hermitize(v.adjoint() * rho.matrix() * v));
  const Dims rd{static_cast<int>(va.cols()), static_cast<int>(vb.cols())};
  auto ma = partial_trace(state, rd, {0});
  auto mb = partial_trace(state, rd, {1});
  return {std::move(state), rd, std::move(va), std::move(vb), std::move(ma), std::move(mb)};
}

DensityOperator lift(const DensityOperator& sigma, const Matrix& v) {
  return DensityOperator(hermitize(v * sigma.matrix() * v.adjoint()));
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

// Tr_A[(ρ^A ⊗ I) G]
Matrix weighted_trace_a(const Matrix& g, const Reduced& r) {
  return hermitize(partial_trace_matrix(kron(r.marginal_a.matrix(), identity(r.dims[1])) * g, r.dims, {1}));
}

// Tr_B[(I ⊗ ρ^B) G]
Matrix weighted_trace_b(const Matrix& g, const Reduced& r) {
  return hermitize(partial_trace_matrix(kron(identity(r.dims[0]), r.marginal_b.matrix()) * g, r.dims, {0}));
}

double log_or_floor(double x) { return std::log(std::max(x, 1e-300)); }

// Euclidean projection onto the probability simplex.
RealVector project_simplex(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  RealVector out = (v.array() - theta).max(0.0);
  return out / out.sum();
}

}  // namespace

DensityMinimum minimize_over_states(const StateObjective& f, const StateGradient& grad, const DensityOperator& start,
                                    const EgOptions& options) {
  DensityMinimum out;
  out.sigma = start;
  out.value = f(start);
  double step = options.step;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const HermitianOperator g(hermitize(grad(out.sigma)));
    out.residual = trace_product(out.sigma.matrix(), g.matrix()) - g.spectrum().eigenvalues(0);
    if (out.residual <= options.residual_tol) break;
    const Matrix log_sigma = hermitian_fn(out.sigma, log_or_floor).matrix();
    bool moved = false;
    while (step > 1e-12) {
      const HermitianOperator h(HermitianOperator::Trusted{}, Matrix(log_sigma - step * g.matrix()));
      const double top = h.spectrum().eigenvalues(h.dim() - 1);
      Matrix e = hermitian_fn(h, [top](double x) { return std::exp(x - top); }).matrix();
      e /= e.trace().real();
      DensityOperator candidate(hermitize(e));
      const double fc = f(candidate);
      if (fc < out.value) {
        out.sigma = std::move(candidate);
        out.value = fc;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return out;
}

Matrix q2_gradient(const DensityOperator& rho, const PositiveOperator& x) {
  const SpectralDecomposition& s = x.spectrum();
  const double cut = s.support_cutoff();
  const int d = x.dim();
  const RealVector& ev = s.eigenvalues;
  RealVector g(d);
  for (int i = 0; i < d; ++i) g(i) = ev(i) > cut ? 1.0 / std::sqrt(ev(i)) : 0.0;
  const Matrix& u = s.eigenvectors;
  const Matrix gx = u * g.cast<Complex>().asDiagonal() * u.adjoint();
  const Matrix m = u.adjoint() * (rho.matrix() * gx * rho.matrix()) * u;
  // Daleckii–Krein: first divided differences of x^{-1/2} on the spectrum.
  Matrix w(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double dd = 0.0;
      if (ev(i) > cut && ev(j) > cut) {
        if (std::abs(ev(i) - ev(j)) <= 1e-12 * std::max(ev(i), ev(j))) {
          const double mid = 0.5 * (ev(i) + ev(j));
          dd = -0.5 / (mid * std::sqrt(mid));
        } else {
          dd = (g(i) - g(j)) / (ev(i) - ev(j));
        }
      }
      w(i, j) = 2.0 * dd * m(i, j);
    }
  return hermitize(u * w * u.adjoint());
}

double mutual_info_objective(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma_b,
                             const Alpha& alpha) {
  const auto ra = partial_trace(rho, dims, {0});
  return d_alpha(rho, tensor(ra, sigma_b), alpha).value;
}

MutualInfoResult mutual_info(const DensityOperator& rho, const Dims& dims, const Alpha& alpha,
                             const EgOptions& options) {
  if (dims.size() != 2 || product_of(dims) != rho.dim()) throw ValidationError("invalid bipartition");
  MutualInfoResult out;
  if (alpha.is_one()) {
    out.optimal_sigma = partial_trace(rho, dims, {1});
    out.value = mutual_info_objective(rho, dims, out.optimal_sigma, alpha);
    return out;
  }
  if (!(alpha.is_infinite() || alpha.value() == 2.0))
    throw ValidationError("mutual_info is implemented for alpha in {1, 2, inf}");

  const Reduced r = reduce_to_supports(rho, dims);
  StateObjective f;
  StateGradient grad;
  if (alpha.is_infinite()) {
    f = [&r](const DensityOperator& s) { return d_max(r.state, tensor(r.marginal_a, s)).value; };
    // subgradient of log c(τ), c = λ_max(τ^{-1/2} ρ τ^{-1/2}): -w w^† / ln 2 with w = τ^{-1/2} v
    grad = [&r](const DensityOperator& s) {
      const PositiveOperator tau = tensor(r.marginal_a, s);
      const Matrix ti = power(tau, -0.5).matrix();
      const HermitianOperator k(hermitize(ti * r.state.matrix() * ti));
      const Eigen::VectorXcd w = ti * k.spectrum().eigenvectors.col(k.dim() - 1);
      return weighted_trace_a(Matrix(-(w * w.adjoint()) / kLn2), r);
    };
  } else {
    f = [&r](const DensityOperator& s) { return std::log2(q_alpha(r.state, tensor(r.marginal_a, s), 2.0)); };
    grad = [&r](const DensityOperator& s) {
      const PositiveOperator tau = tensor(r.marginal_a, s);
      const double q = q_alpha(r.state, tau, 2.0);
      return weighted_trace_a(Matrix(q2_gradient(r.state, tau) / (q * kLn2)), r);
    };
  }
  const DensityMinimum m = minimize_over_states(f, grad, r.marginal_b, options);
  out.optimal_sigma = lift(m.sigma, r.vb);
  out.value = m.value;
  out.iterations = m.iterations;
  out.gradient_residual = m.residual;
  return out;
}

double induced_mutual_info_objective(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma_a,
                                     double eps) {
  const auto rb = partial_trace(rho, dims, {1});
  return induced_renyi(rho, tensor(sigma_a, rb), 2.0, eps).raw;
}

MutualInfoResult induced_mutual_info_2(const DensityOperator& rho, const Dims& dims, double eps,
                                       const EgOptions& options) {
  const Reduced r = reduce_to_supports(rho, dims);
  auto f = [&](const DensityOperator& s) { return induced_renyi(r.state, tensor(s, r.marginal_b), 2.0, eps).raw; };
  // λ* solves Q_2(ρ || ρ + 2^λ τ) = 1-ε with τ = σ ⊗ ρ^B, so
  // ∇_σ λ* = -Tr_B[(I ⊗ ρ^B) G] / (ln 2 · Tr[G τ]) with G = ∇_X Q_2 at X = ρ + 2^λ τ.
  auto grad = [&](const DensityOperator& s) {
    const DensityOperator tau = tensor(s, r.marginal_b);
    const InducedResult ir = induced_renyi(r.state, tau, 2.0, eps);
    const PositiveOperator x(Matrix(r.state.matrix() + ir.t_star * tau.matrix()));
    const Matrix g = q2_gradient(r.state, x);
    const double dl = trace_product(g, tau.matrix()) * kLn2;
    return Matrix(-weighted_trace_b(g, r) / dl);
  };
  const DensityMinimum m = minimize_over_states(f, grad, r.marginal_a, options);
  MutualInfoResult out;
  out.optimal_sigma = lift(m.sigma, r.va);
  out.value = m.value;
  out.iterations = m.iterations;
  out.gradient_residual = m.residual;
  return out;
}

SmoothedResult smoothed_mutual_info_2(const DensityOperator& rho, const Dims& dims, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("smoothing radius must lie in [0, 1)");
  std::vector<SmoothingCandidate> cands;
  auto add = [&](std::string name, const DensityOperator& s) {
    cands.push_back({std::move(name), s, trace_distance(s, rho), 0.0});
  };
  auto toward = [&](const DensityOperator& target) {
    const double td = trace_distance(rho, target);
    const double s = td > 0.0 ? std::min(1.0, eps / td) : 0.0;
    return DensityOperator(Matrix((1.0 - s) * rho.matrix() + s * target.matrix()));
  };
  add("identity", rho);
  add("depolarized", toward(DensityOperator::maximally_mixed(rho.dim())));

  const SpectralDecomposition& s = rho.spectrum();
  double removed = 0.0;
  int cut = 0;
  while (cut < rho.dim() - 1 && removed + s.eigenvalues(cut) <= eps) removed += std::max(0.0, s.eigenvalues(cut++));
  RealVector kept = s.eigenvalues.cwiseMax(0.0);
  kept.head(cut).setZero();
  kept /= kept.sum();
  add("truncated", DensityOperator(hermitize(s.eigenvectors * kept.cast<Complex>().asDiagonal() *
                                             s.eigenvectors.adjoint())));

  add("toward-product", toward(tensor(partial_trace(rho, dims, {0}), partial_trace(rho, dims, {1}))));

  SmoothedResult out;
  size_t best = 0;
  for (size_t i = 0; i < cands.size(); ++i) {
    cands[i].value = mutual_info(cands[i].state, dims, 2.0).value;
    if (cands[i].value < cands[best].value) best = i;
  }
  out.value = cands[best].value;
  out.smoothing_state = cands[best].state;
  out.distance_used = cands[best].distance;
  out.candidate = cands[best].name;
  out.candidates = std::move(cands);
  return out;
}

double channel_objective(const Channel& channel, const RealVector& p, const Alpha& alpha, std::optional<double> eps) {
  const CqState cq = channel.cq(p);
  if (eps) return induced_renyi(cq.joint(), cq.product_of_marginals(), 2.0, *eps).raw;
  return mutual_info(cq.joint(), cq.dims(), alpha).value;
}

ChannelMutualInfo channel_mutual_info(const Channel& channel, const Alpha& alpha, std::optional<double> eps,
                                      const ChannelMiOptions& options) {
  const int k = channel.input_size();
  if (k > kMaxChannelInputs) throw ValidationError("channel mutual information supports at most 8 inputs");
  ChannelMutualInfo out;
  auto F = [&](const RealVector& p) {
    ++out.evaluations;
    return channel_objective(channel, p, alpha, eps);
  };

  Rng rng(options.seed);
  std::vector<RealVector> starts{RealVector::Constant(k, 1.0 / k)};
  for (int i = 0; i < options.restarts; ++i) starts.push_back(random_probability(k, rng));

  out.value = -kInf;
  const double h = 1e-6;
  for (const RealVector& start : starts) {
    RealVector p = start;
    double fp = F(p);
    double step = 1.0;
    RealVector g(k);
    bool fresh = false;
    for (int it = 0; it < options.max_iterations && k > 1; ++it) {
      if (!fresh) {
        // directional derivatives along e_i - p, which keep p in the simplex
        for (int i = 0; i < k; ++i) {
          RealVector q = (1.0 - h) * p;
          q(i) += h;
          g(i) = (F(q) - fp) / h;
        }
        fresh = true;
      }
      const RealVector q = project_simplex(p + step * g);
      if ((q - p).norm() < 1e-12) break;
      const double fq = F(q);
      if (fq > fp) {
        p = q;
        fp = fq;
        step *= 2.0;
        fresh = false;
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    if (fp > out.value) {
      out.value = fp;
      out.best_p = p;
    }
  }
  return out;
}

CondMutualInfo cond_mutual_info(const DensityOperator& rho_rab, const Dims& dims, double delta0, double delta1) {
  if (dims.size() != 3 || product_of(dims) != rho_rab.dim()) throw ValidationError("invalid tripartition");
  if (!(delta0 > 0.0 && delta0 < 1.0 && delta1 > 0.0 && delta1 < 1.0))
    throw ValidationError("smoothing parameters must lie in (0, 1)");
  CondMutualInfo out;
  out.delta0 = delta0;
  out.delta1 = delta1;
  const DensityOperator rba = permute_subsystems(rho_rab, dims, {0, 2, 1});
  out.smoothed_term = smoothed_mutual_info_2(rba, {dims[0] * dims[2], dims[1]}, delta0);
  const auto rho_ab = partial_trace(rho_rab, dims, {1, 2});
  out.induced_detail = induced_mutual_info_2(rho_ab, {dims[1], dims[2]}, delta1);
  out.induced_term = out.induced_detail.value;
  out.value = out.smoothed_term.value - out.induced_term;
  return out;
}

}  // namespace qdiv
