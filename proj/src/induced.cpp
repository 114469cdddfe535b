#include "qdiv/induced.hpp"

#include "qdiv/roots.hpp"

#include <cmath>
#include <optional>

namespace qdiv {

namespace {

constexpr double kLambdaLower = -200.0;
constexpr double kLambdaUpper = 60.0;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("induced divergence needs eps in (0, 1)");
}

// The defining condition in the form the parent is best evaluated in: either
// Q(t) >= target, Q(t) <= target, or D(t) >= log(1-ε).
struct Condition {
  std::function<double(const PositiveOperator&)> value;
  double target = 0.0;
  bool at_least = true;

  bool holds(double v) const { return at_least ? v >= target : v <= target; }
};

Condition condition_for(const ParentDivergence& parent, const DensityOperator& rho, double eps) {
  const Alpha& a = parent.alpha();
  const bool q_form = parent.kind() == ParentKind::kMin ||
                      (parent.kind() == ParentKind::kRenyi && !a.is_one() && !a.is_infinite());
  if (q_form) {
    const double alpha = parent.kind() == ParentKind::kMin ? 0.0 : a.value();
    const Alpha branch(alpha);
    return {[&rho, branch](const PositiveOperator& s) { return q_branch(rho, s, branch); },
            std::pow(1.0 - eps, alpha - 1.0), alpha > 1.0};
  }
  return {[&rho, parent](const PositiveOperator& s) { return parent.evaluate(rho, s); }, std::log2(1.0 - eps), true};
}

// Reason the condition survives t -> ∞, if it does. ρ + tσ always contains ρ,
// so the parent stays finite; what matters is its limit. Below order one (and
// for Umegaki) D(ρ||ρ+tσ) -> -∞ unless ρ ⊥ σ. Above order one
// Q_α(ρ||ρ+tσ) decreases to Tr[ρ(I-Π_σ)], and D_max(ρ||ρ+tσ) rises to 0 as
// soon as any of ρ leaves supp(σ).
std::optional<std::string> survives_limit(const ParentDivergence& p, const DensityOperator& rho,
                                          const PositiveOperator& sigma, double eps) {
  const bool above_one = p.kind() == ParentKind::kRenyi && p.alpha().value() > 1.0;
  if (p.kind() == ParentKind::kMax || (above_one && p.alpha().is_infinite())) {
    if (not_contained(rho, sigma)) return "supp(rho) is not contained in supp(sigma) and D_max(rho||rho+t sigma) -> 0";
    return std::nullopt;
  }
  if (above_one) {
    const double leak = support_leak(rho, sigma);
    const double target = std::pow(1.0 - eps, p.alpha().value() - 1.0);
    if (not_contained(rho, sigma) && leak >= target) return "weight of rho outside supp(sigma) reaches (1-eps)^(alpha-1)";
    return std::nullopt;
  }
  if (p.kind() != ParentKind::kCustom && orthogonal(rho, sigma)) return "rho is orthogonal to sigma";
  return std::nullopt;
}

InducedResult infinite_result(double eps, std::string why) {
  InducedResult r;
  r.lambda_star = r.t_star = r.raw = r.normalized = kInf;
  r.epsilon = eps;
  r.diagnostic = std::move(why);
  return r;
}

PositiveOperator shifted(const DensityOperator& rho, const PositiveOperator& sigma, double lambda) {
  return PositiveOperator(Matrix(rho.matrix() + std::exp2(lambda) * sigma.matrix()));
}

InducedResult from_lambda(const Condition& c, const DensityOperator& rho, const PositiveOperator& sigma,
                          double lambda, double eps) {
  InducedResult r;
  r.lambda_star = lambda;
  r.t_star = std::exp2(lambda);
  r.raw = lambda;
  r.normalized = lambda + std::log2((1.0 - eps) / eps);
  r.epsilon = eps;
  r.residual = std::abs(c.value(shifted(rho, sigma, lambda)) - c.target);
  return r;
}

InducedResult closed_form(const ParentDivergence& parent, const DivergenceValue& d, const DensityOperator& rho,
                          const PositiveOperator& sigma, double eps) {
  if (d.is_infinite()) return infinite_result(eps, "parent divergence is infinite");
  return from_lambda(condition_for(parent, rho, eps), rho, sigma, d.value + induced_offset(eps), eps);
}

}  // namespace

ParentDivergence ParentDivergence::renyi(const Alpha& alpha) { return {ParentKind::kRenyi, alpha}; }
ParentDivergence ParentDivergence::umegaki() { return {ParentKind::kUmegaki, Alpha(1.0)}; }
ParentDivergence ParentDivergence::min() { return {ParentKind::kMin, Alpha(0.0)}; }
ParentDivergence ParentDivergence::max() { return {ParentKind::kMax, Alpha::infinity()}; }

ParentDivergence ParentDivergence::custom(std::string name, DivergenceFn fn) {
  ParentDivergence p(ParentKind::kCustom, Alpha(1.0));
  p.custom_name_ = std::move(name);
  p.fn_ = std::move(fn);
  return p;
}

std::string ParentDivergence::name() const {
  switch (kind_) {
    case ParentKind::kRenyi:
      return "renyi(" + alpha_.str() + ")";
    case ParentKind::kUmegaki:
      return "umegaki";
    case ParentKind::kMin:
      return "min";
    case ParentKind::kMax:
      return "max";
    case ParentKind::kCustom:
      return custom_name_;
  }
  return "";
}

double ParentDivergence::evaluate(const DensityOperator& rho, const PositiveOperator& sigma) const {
  switch (kind_) {
    case ParentKind::kRenyi:
      return d_alpha(rho, sigma, alpha_).value;
    case ParentKind::kUmegaki:
      return d_umegaki(rho, sigma).value;
    case ParentKind::kMin:
      return d_min(rho, sigma).value;
    case ParentKind::kMax:
      return d_max(rho, sigma).value;
    case ParentKind::kCustom:
      return fn_(rho, sigma);
  }
  return 0.0;
}

double induced_offset(double eps) { return std::log2(eps / (1.0 - eps)); }

InducedResult induced(const ParentDivergence& parent, const DensityOperator& rho, const PositiveOperator& sigma,
                      double eps) {
  require_same_dim(rho, sigma, "induced");
  check_eps(eps);
  if (auto why = survives_limit(parent, rho, sigma, eps)) return infinite_result(eps, *why);

  const Condition c = condition_for(parent, rho, eps);
  const DivergenceValue dmin = d_min(rho, sigma);
  const double guess = dmin.is_infinite() ? 0.0 : dmin.value + induced_offset(eps);
  const Bracket b = bisect_largest_true([&](double l) { return c.holds(c.value(shifted(rho, sigma, l))); }, guess,
                                        kLambdaLower, kLambdaUpper);
  if (b.status == BracketStatus::kTrueAtUpperLimit)
    return infinite_result(eps, "condition still holds at t = 2^60");
  if (b.status == BracketStatus::kFalseAtLowerLimit) throw ValidationError("induced: condition fails at t = 2^-200");
  InducedResult r = from_lambda(c, rho, sigma, b.lo, eps);
  r.iterations = b.iterations;
  return r;
}

InducedResult induced_renyi(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha,
                            double eps) {
  return induced(ParentDivergence::renyi(alpha), rho, sigma, eps);
}

InducedResult induced_min_closed(const DensityOperator& rho, const PositiveOperator& sigma, double eps) {
  require_same_dim(rho, sigma, "induced_min_closed");
  check_eps(eps);
  return closed_form(ParentDivergence::min(), d_min(rho, sigma), rho, sigma, eps);
}

InducedResult induced_max_closed(const DensityOperator& rho, const PositiveOperator& sigma, double eps) {
  require_same_dim(rho, sigma, "induced_max_closed");
  check_eps(eps);
  return closed_form(ParentDivergence::max(), d_max(rho, sigma), rho, sigma, eps);
}

BlockReport induced_block_property(const DensityOperator& rho, const PositiveOperator& sigma,
                                   const DensityOperator& omega, double t, double eps,
                                   const ParentDivergence& parent) {
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("block property needs t in (0, 1]");
  const int db = omega.dim();
  const DensityOperator big_rho(direct_sum(rho, PositiveOperator(Matrix(Matrix::Zero(db, db)))));
  const PositiveOperator big_sigma = direct_sum(sigma.scaled(t), omega.scaled(1.0 - t));
  BlockReport r;
  r.lhs = induced(parent, big_rho, big_sigma, eps).raw;
  r.rhs = induced(parent, rho, sigma, eps).raw - std::log2(t);
  r.gap = std::abs(r.lhs - r.rhs);
  if (std::isinf(r.lhs) && r.lhs == r.rhs) r.gap = 0.0;
  return r;
}

}  // namespace qdiv
