#include "qdiv/divergences.hpp"

#include "qdiv/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdiv {

namespace {

constexpr double kSnapTol = 1e-9;

double log2_safe(double x) { return x > 0.0 ? std::log2(x) : -kInf; }

// Tr[rho Π_sigma]
double weight_on_support(const PositiveOperator& rho, const PositiveOperator& sigma) {
  const SpectralDecomposition& s = sigma.spectrum();
  const double cut = s.support_cutoff();
  double w = 0.0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) <= cut) continue;
    const auto v = s.eigenvectors.col(i);
    w += (v.adjoint() * rho.matrix() * v)(0, 0).real();
  }
  return w;
}

// Projector onto the strictly positive eigenspace of m.
Matrix positive_projector(const HermitianOperator& m) {
  const SpectralDecomposition& s = m.spectrum();
  Matrix p = Matrix::Zero(m.dim(), m.dim());
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i) > 0.0) p.noalias() += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
  return p;
}

}  // namespace

bool not_contained(const PositiveOperator& rho, const PositiveOperator& sigma) {
  return rho.trace() - weight_on_support(rho, sigma) > kSupportLeakTol * std::max(1.0, rho.trace());
}

bool orthogonal(const PositiveOperator& rho, const PositiveOperator& sigma) {
  return weight_on_support(rho, sigma) <= kSupportLeakTol * std::max(1.0, rho.trace());
}

Alpha::Alpha(double v) {
  if (std::isnan(v) || v < -kSnapTol) throw ValidationError("Rényi order must be non-negative");
  if (std::abs(v) <= kSnapTol)
    v = 0.0;
  else if (std::abs(v - 1.0) <= kSnapTol)
    v = 1.0;
  value_ = v;
}

std::string Alpha::str() const {
  if (is_infinite()) return "inf";
  std::ostringstream s;
  s.precision(17);
  s << value_;
  return s.str();
}

std::string to_string(SupportCase c) {
  switch (c) {
    case SupportCase::kRegular: return "regular";
    case SupportCase::kDualBranch: return "dual-branch";
    case SupportCase::kOrthogonal: return "orthogonal";
    case SupportCase::kNotContained: return "support-not-contained";
    case SupportCase::kMinClosedForm: return "min-closed-form";
    case SupportCase::kUmegakiClosedForm: return "umegaki-closed-form";
    case SupportCase::kMaxClosedForm: return "max-closed-form";
    case SupportCase::kZeroBeta: return "zero-type-II-error";
    case SupportCase::kSpectrumBisection: return "spectrum-bisection";
  }
  return "unknown";
}

double support_leak(const DensityOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "support_leak");
  return std::max(0.0, rho.trace() - weight_on_support(rho, sigma));
}

double overlap_on_support(const DensityOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "overlap_on_support");
  return std::max(0.0, weight_on_support(sigma, rho));
}

double q_alpha(const PositiveOperator& rho, const PositiveOperator& sigma, double alpha) {
  require_same_dim(rho, sigma, "q_alpha");
  if (!(alpha > 0.0) || std::isinf(alpha) || alpha == 1.0)
    throw ValidationError("q_alpha needs a finite order alpha > 0, alpha != 1");
  if (alpha > 1.0 && not_contained(rho, sigma)) return kInf;
  const double e = (1.0 - alpha) / (2.0 * alpha);
  // The nonzero spectrum of σ^e ρ σ^e is that of B^†B with B = σ^e V √D, where
  // ρ = V D V^† on its support. Singular values of B avoid the round-off
  // eigenvalues a rank-deficient ρ would leave behind.
  const SpectralDecomposition rd = eig_hermitian(rho);
  const double rcut = support_cutoff(rd.eigenvalues);
  std::vector<int> keep;
  for (int i = 0; i < rd.eigenvalues.size(); ++i)
    if (rd.eigenvalues(i) > rcut) keep.push_back(i);
  if (keep.empty()) return 0.0;
  Matrix vd(rho.dim(), static_cast<long>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j)
    vd.col(static_cast<long>(j)) = rd.eigenvectors.col(keep[j]) * std::sqrt(rd.eigenvalues(keep[j]));
  const Matrix b = power(sigma, e).matrix() * vd;
  const RealVector sv = Eigen::JacobiSVD<Matrix>(b).singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  double q = 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 8.0 * std::numeric_limits<double>::epsilon() * top) q += std::pow(sv(i) * sv(i), alpha);
  return q;
}

double q_branch(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha) {
  if (alpha.is_one() || alpha.is_infinite()) throw ValidationError("q_branch is undefined at alpha = 1 and inf");
  if (alpha.is_zero()) return overlap_on_support(rho, sigma);
  if (alpha.value() < 0.5) return q_alpha(sigma, rho, 1.0 - alpha.value());
  return q_alpha(rho, sigma, alpha.value());
}

DivergenceValue d_min(const DensityOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "d_min");
  if (orthogonal(rho, sigma)) return {kInf, SupportCase::kOrthogonal};
  return {-std::log2(overlap_on_support(rho, sigma)), SupportCase::kMinClosedForm};
}

DivergenceValue d_max(const DensityOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "d_max");
  if (not_contained(rho, sigma)) return {kInf, SupportCase::kNotContained};
  const Matrix s = power(sigma, -0.5).matrix();
  Matrix x = s * rho.matrix() * s;
  x = 0.5 * (x + x.adjoint()).eval();
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(x, Eigen::EigenvaluesOnly).eigenvalues();
  return {log2_safe(ev.maxCoeff()), SupportCase::kMaxClosedForm};
}

DivergenceValue d_umegaki(const DensityOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "d_umegaki");
  if (not_contained(rho, sigma)) return {kInf, SupportCase::kNotContained};
  const SpectralDecomposition& r = rho.spectrum();
  double entropy_term = 0.0;
  for (int i = 0; i < r.eigenvalues.size(); ++i) {
    const double p = r.eigenvalues(i);
    if (p > 0.0) entropy_term += p * std::log2(p);
  }
  const SpectralDecomposition& s = sigma.spectrum();
  const double cut = s.support_cutoff();
  double cross = 0.0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) <= cut) continue;
    const auto v = s.eigenvectors.col(i);
    cross += (v.adjoint() * rho.matrix() * v)(0, 0).real() * std::log2(s.eigenvalues(i));
  }
  return {entropy_term - cross, SupportCase::kUmegakiClosedForm};
}

DivergenceValue d_alpha(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha) {
  require_same_dim(rho, sigma, "d_alpha");
  if (alpha.is_zero()) return d_min(rho, sigma);
  if (alpha.is_one()) return d_umegaki(rho, sigma);
  if (alpha.is_infinite()) return d_max(rho, sigma);
  const double a = alpha.value();
  if (a < 1.0) {
    if (orthogonal(rho, sigma)) return {kInf, SupportCase::kOrthogonal};
    const double q = q_branch(rho, sigma, alpha);
    return {log2_safe(q) / (a - 1.0), a < 0.5 ? SupportCase::kDualBranch : SupportCase::kRegular};
  }
  if (not_contained(rho, sigma)) return {kInf, SupportCase::kNotContained};
  return {log2_safe(q_alpha(rho, sigma, a)) / (a - 1.0), SupportCase::kRegular};
}

HypothesisResult d_hypothesis(const DensityOperator& rho, const PositiveOperator& sigma, double eps) {
  require_same_dim(rho, sigma, "d_hypothesis");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("d_hypothesis needs eps in [0, 1)");
  const int d = rho.dim();
  const double target = 1.0 - eps;

  if (eps == 0.0) {
    const SupportProjector pr = support_projector(rho);
    const double beta = trace_product(sigma.matrix(), pr.projector.matrix());
    NeymanPearsonTest t{kInf, pr.projector, trace_product(rho.matrix(), pr.projector.matrix()), beta, beta};
    if (beta <= 0.0) return {{kInf, SupportCase::kZeroBeta}, t};
    return {{-std::log2(beta), SupportCase::kMinClosedForm}, t};
  }

  const double leak = support_leak(rho, sigma);
  if (leak >= target) {
    const Matrix outside = Matrix::Identity(d, d) - support_projector(sigma).projector.matrix();
    PositiveOperator effect(HermitianOperator(Matrix(outside * (target / leak))));
    NeymanPearsonTest t{0.0, effect, trace_product(rho.matrix(), effect.matrix()), 0.0, 0.0};
    return {{kInf, SupportCase::kZeroBeta}, t};
  }

  auto f = [&](double log_mu) {
    const HermitianOperator m(HermitianOperator::Trusted{}, Matrix(std::exp2(log_mu) * rho.matrix() - sigma.matrix()));
    return trace_product(rho.matrix(), positive_projector(m));
  };
  const Bracket b = bisect_largest_true([&](double l) { return f(l) < target; }, 0.0, -300.0, 300.0);
  const double mu_lo = std::exp2(b.lo);
  const double mu_hi = std::exp2(b.hi);
  const Matrix p_lo = positive_projector(
      HermitianOperator(HermitianOperator::Trusted{}, Matrix(mu_lo * rho.matrix() - sigma.matrix())));
  const Matrix p_hi = positive_projector(
      HermitianOperator(HermitianOperator::Trusted{}, Matrix(mu_hi * rho.matrix() - sigma.matrix())));
  const double f_lo = trace_product(rho.matrix(), p_lo);
  const double f_hi = trace_product(rho.matrix(), p_hi);
  double theta = 1.0;
  if (f_hi > f_lo) theta = std::clamp((target - f_lo) / (f_hi - f_lo), 0.0, 1.0);
  Matrix lambda = (1.0 - theta) * p_lo + theta * p_hi;
  lambda = 0.5 * (lambda + lambda.adjoint()).eval();

  NeymanPearsonTest t{mu_hi, PositiveOperator(std::move(lambda)), 0.0, 0.0, 0.0};
  t.alpha_err = trace_product(rho.matrix(), t.effect.matrix());
  t.beta = trace_product(sigma.matrix(), t.effect.matrix());
  const HermitianOperator dual_op(HermitianOperator::Trusted{}, Matrix(mu_hi * rho.matrix() - sigma.matrix()));
  t.dual_beta = mu_hi * target - positive_part_trace(dual_op);
  if (t.beta <= 0.0) return {{kInf, SupportCase::kZeroBeta}, t};
  return {{-std::log2(t.beta), SupportCase::kRegular}, t};
}

DivergenceValue d_tilde_max(const DensityOperator& rho, const PositiveOperator& sigma, double eps) {
  require_same_dim(rho, sigma, "d_tilde_max");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("d_tilde_max needs eps in (0, 1)");
  if (sigma.spectrum().max_abs_eigenvalue() <= 0.0) throw ValidationError("d_tilde_max: sigma = 0 has no finite value");
  auto h = [&](double lambda) {
    return positive_part_trace(
        HermitianOperator(HermitianOperator::Trusted{}, Matrix(rho.matrix() - std::exp2(lambda) * sigma.matrix())));
  };
  const Bracket b = bisect_largest_true([&](double l) { return h(l) > eps; }, 0.0, -1e3, 200.0);
  if (b.status == BracketStatus::kTrueAtUpperLimit) return {kInf, SupportCase::kNotContained};
  return {b.hi, SupportCase::kSpectrumBisection};
}

DensityOperator pinch(const DensityOperator& rho, const PositiveOperator& sigma, int* spectrum_size) {
  require_same_dim(rho, sigma, "pinch");
  const SpectralDecomposition& s = sigma.spectrum();
  const int d = rho.dim();
  const double tol = tol::kPsd * std::max(1.0, s.max_abs_eigenvalue());
  std::vector<int> group(static_cast<size_t>(d), 0);
  int groups = 1;
  for (int i = 1; i < d; ++i) {
    if (s.eigenvalues(i) - s.eigenvalues(i - 1) > tol) ++groups;
    group[static_cast<size_t>(i)] = groups - 1;
  }
  if (spectrum_size) *spectrum_size = groups;
  Matrix w = s.eigenvectors.adjoint() * rho.matrix() * s.eigenvectors;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (group[static_cast<size_t>(r)] != group[static_cast<size_t>(c)]) w(r, c) = 0.0;
  Matrix out = s.eigenvectors * w * s.eigenvectors.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out));
}

PinchedBound pinched_measured_lower_bound(const DensityOperator& rho, const PositiveOperator& sigma,
                                          const Alpha& alpha) {
  if (alpha.is_infinite() || alpha.value() > 2.0) throw ValidationError("pinched bound is stated for alpha in [0, 2]");
  PinchedBound out;
  out.pinched = pinch(rho, sigma, &out.spectrum_size);
  out.value = d_alpha(out.pinched, sigma, alpha);
  return out;
}

DirectSumReport check_direct_sum(const std::vector<double>& p, const std::vector<DensityOperator>& rhos,
                                 const std::vector<PositiveOperator>& sigmas, double alpha) {
  if (p.size() != rhos.size() || p.size() != sigmas.size() || p.empty())
    throw ValidationError("check_direct_sum: mismatched lengths");
  const int d = rhos.front().dim();
  const int k = static_cast<int>(p.size());
  Matrix big_rho = Matrix::Zero(k * d, k * d);
  Matrix big_sigma = Matrix::Zero(k * d, k * d);
  double rhs = 0.0;
  for (int x = 0; x < k; ++x) {
    require_same_dim(rhos[x], sigmas[x], "check_direct_sum");
    if (rhos[x].dim() != d) throw ValidationError("check_direct_sum: blocks differ in dimension");
    big_rho.block(x * d, x * d, d, d) = p[x] * rhos[x].matrix();
    big_sigma.block(x * d, x * d, d, d) = p[x] * sigmas[x].matrix();
    rhs += p[x] * q_alpha(rhos[x], sigmas[x], alpha);
  }
  DirectSumReport r;
  r.lhs = q_alpha(PositiveOperator(big_rho), PositiveOperator(big_sigma), alpha);
  r.rhs = rhs;
  r.gap = std::abs(r.lhs - r.rhs);
  r.pass = r.gap <= 1e-9;
  return r;
}

}  // namespace qdiv
