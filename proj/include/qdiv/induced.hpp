#pragma once

// Induced divergence D̊^ε(ρ||σ) = sup{λ : D(ρ || ρ + 2^λ σ) >= log(1-ε)} for a
// parent relative entropy D, together with its normalized version.

#include "qdiv/divergences.hpp"

#include <functional>
#include <string>

namespace qdiv {

enum class ParentKind { kRenyi, kUmegaki, kMin, kMax, kCustom };

using DivergenceFn = std::function<double(const DensityOperator&, const PositiveOperator&)>;

class ParentDivergence {
 public:
  static ParentDivergence renyi(const Alpha& alpha);
  static ParentDivergence umegaki();
  static ParentDivergence min();
  static ParentDivergence max();
  /// Any D that is continuous and nonincreasing under t -> D(ρ || tσ).
  static ParentDivergence custom(std::string name, DivergenceFn fn);

  ParentKind kind() const { return kind_; }
  const Alpha& alpha() const { return alpha_; }
  std::string name() const;

  double evaluate(const DensityOperator& rho, const PositiveOperator& sigma) const;

 private:
  ParentDivergence(ParentKind kind, Alpha alpha) : kind_(kind), alpha_(alpha) {}

  ParentKind kind_;
  Alpha alpha_;
  std::string custom_name_;
  DivergenceFn fn_;
};

struct InducedResult {
  double lambda_star = 0.0;
  double t_star = 0.0;
  double raw = 0.0;
  double normalized = 0.0;
  double epsilon = 0.0;
  double residual = 0.0;  // |condition value - target| at lambda_star
  int iterations = 0;
  std::string diagnostic;

  bool is_infinite() const { return std::isinf(raw); }
};

InducedResult induced(const ParentDivergence& parent, const DensityOperator& rho, const PositiveOperator& sigma,
                      double eps);
InducedResult induced_renyi(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha, double eps);

/// log t* = D_min(ρ||σ) + log(ε/(1-ε)), no root finding.
InducedResult induced_min_closed(const DensityOperator& rho, const PositiveOperator& sigma, double eps);
/// log t* = D_max(ρ||σ) + log(ε/(1-ε)), no root finding.
InducedResult induced_max_closed(const DensityOperator& rho, const PositiveOperator& sigma, double eps);

struct BlockReport {
  double lhs = 0.0;  // D̊(ρ ⊕ 0 || tσ ⊕ (1-t)ω)
  double rhs = 0.0;  // D̊(ρ || σ) - log t
  double gap = 0.0;
};

BlockReport induced_block_property(const DensityOperator& rho, const PositiveOperator& sigma,
                                   const DensityOperator& omega, double t, double eps,
                                   const ParentDivergence& parent);

/// log(ε/(1-ε)), the raw value at σ = ρ.
double induced_offset(double eps);

}  // namespace qdiv
