#pragma once

// Sandwiched Rényi family and the smoothed divergences built on it.
// All logarithms are base 2.

#include "qdiv/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qdiv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Order of a Rényi divergence. Values within 1e-9 of 0 or 1 snap to the
/// special point; `Alpha::infinity()` selects the max-relative entropy.
class Alpha {
 public:
  Alpha(double v);  // NOLINT(google-explicit-constructor): reads naturally as d_alpha(rho, sigma, 2.0)
  static Alpha infinity() { return Alpha(kInf); }

  double value() const { return value_; }
  bool is_zero() const { return value_ == 0.0; }
  bool is_one() const { return value_ == 1.0; }
  bool is_infinite() const { return std::isinf(value_); }
  std::string str() const;

 private:
  double value_;
};

enum class SupportCase {
  kRegular,            // 1/2 <= alpha < 1 or alpha > 1, finite branch
  kDualBranch,         // 0 < alpha < 1/2, evaluated through Q_{1-alpha}(sigma||rho)
  kOrthogonal,         // rho ⊥ sigma, value +inf
  kNotContained,       // supp(rho) not inside supp(sigma), value +inf
  kMinClosedForm,      // alpha = 0
  kUmegakiClosedForm,  // alpha = 1
  kMaxClosedForm,      // alpha = inf
  kZeroBeta,           // hypothesis test with zero type-II error
  kSpectrumBisection,  // information-spectrum bisection
};

std::string to_string(SupportCase c);

struct DivergenceValue {
  double value = 0.0;
  SupportCase support_case = SupportCase::kRegular;

  bool is_infinite() const { return std::isinf(value); }
};

/// Weight of rho outside supp(sigma); above this, rho is not contained in sigma.
inline constexpr double kSupportLeakTol = 1e-9;

double support_leak(const DensityOperator& rho, const PositiveOperator& sigma);
/// Leak of rho outside supp(sigma) above kSupportLeakTol * max(1, Tr rho).
bool not_contained(const PositiveOperator& rho, const PositiveOperator& sigma);
/// Weight of rho on supp(sigma) at or below kSupportLeakTol * max(1, Tr rho).
bool orthogonal(const PositiveOperator& rho, const PositiveOperator& sigma);
/// Tr[sigma Π_rho]
double overlap_on_support(const DensityOperator& rho, const PositiveOperator& sigma);

/// Tr(σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α on supports, for finite α > 0, α != 1.
/// For α > 1 with supp(ρ) not inside supp(σ) the result is +inf.
double q_alpha(const PositiveOperator& rho, const PositiveOperator& sigma, double alpha);

/// The quantity whose log/(α-1) is D_α in the case table: Q_α(ρ||σ) for α >= 1/2,
/// Q_{1-α}(σ||ρ) for 0 < α < 1/2 and Tr[σΠ_ρ] for α = 0.
double q_branch(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha);

DivergenceValue d_alpha(const DensityOperator& rho, const PositiveOperator& sigma, const Alpha& alpha);
DivergenceValue d_min(const DensityOperator& rho, const PositiveOperator& sigma);
DivergenceValue d_max(const DensityOperator& rho, const PositiveOperator& sigma);
DivergenceValue d_umegaki(const DensityOperator& rho, const PositiveOperator& sigma);

struct NeymanPearsonTest {
  double multiplier = 0.0;  // μ
  PositiveOperator effect = PositiveOperator::identity(1);
  double alpha_err = 0.0;   // Tr[ρΛ]
  double beta = 0.0;        // Tr[σΛ]
  double dual_beta = 0.0;   // μ(1-ε) - Tr(μρ-σ)_+ at the returned μ
};

struct HypothesisResult {
  DivergenceValue value;
  NeymanPearsonTest test;
};

/// −log min{Tr[Λσ] : Tr[Λρ] >= 1-ε, 0 <= Λ <= I}, solved exactly by Neyman–Pearson.
HypothesisResult d_hypothesis(const DensityOperator& rho, const PositiveOperator& sigma, double eps);

/// inf{λ : Tr(ρ - 2^λ σ)_+ <= ε}
DivergenceValue d_tilde_max(const DensityOperator& rho, const PositiveOperator& sigma, double eps);

struct PinchedBound {
  DivergenceValue value;  // D_α(P_σ(ρ) || σ)
  int spectrum_size = 0;  // |spec(σ)|
  DensityOperator pinched = DensityOperator::maximally_mixed(1);
};

/// Projects ρ onto the eigenspaces of σ and evaluates D_α there.
DensityOperator pinch(const DensityOperator& rho, const PositiveOperator& sigma, int* spectrum_size = nullptr);
PinchedBound pinched_measured_lower_bound(const DensityOperator& rho, const PositiveOperator& sigma,
                                          const Alpha& alpha);

struct DirectSumReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  bool pass = false;
};

/// Q_α(Σ p_x |x><x| ⊗ ρ_x || Σ p_x |x><x| ⊗ σ_x) against Σ p_x Q_α(ρ_x || σ_x).
DirectSumReport check_direct_sum(const std::vector<double>& p, const std::vector<DensityOperator>& rhos,
                                 const std::vector<PositiveOperator>& sigmas, double alpha);

}  // namespace qdiv
