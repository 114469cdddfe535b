#pragma once

// Position-based decoding, one-shot classical communication and the
// state-redistribution cost bound.

#include "qdiv/info.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qdiv {

struct Povm {
  std::vector<PositiveOperator> effects;

  /// max |Σ Λ_x - I|
  double completeness_defect() const;
};

/// Pretty good measurement Λ_x = η^{-1/2} τ_x η^{-1/2}, η = Σ τ_x, with η^{-1/2}
/// taken on the eigenvectors of η above 1e-10 of its largest eigenvalue. The
/// remainder I - Π is added to effect 0.
Povm pgm(const std::vector<DensityOperator>& states);

/// ⌈x⌉ with values within 1e-9 relative of an integer rounded to it, and at least 1.
long tolerant_ceil(double x);

enum class FamilyKind { kTensor, kCorrelated };

struct FamilySpec {
  FamilyKind kind = FamilyKind::kTensor;
  double weight = 0.0;  // correlation weight for kCorrelated
};

/// Families on R A^n up to this dimension are built densely; larger ones with
/// |A| = 2 go through the permutation-symmetric block reduction.
inline constexpr long kDenseDecodingDim = 256;
inline constexpr long kSymmetricMaxCopies = 20;

struct DecodingReport {
  long n = 0;      // ⌈2^{D̊_2^ε}⌉
  long old_n = 0;  // ⌈ε 2^{D_H^ε}⌉
  bool constructed = false;
  std::string method;  // "dense" or "symmetric-blocks"
  std::string diagnostic;
  std::vector<double> success_probs;
  double min_success = 0.0;
  double mean_success = 0.0;
  double marginal_defect = 0.0;
  double completeness_defect = 0.0;
  InducedResult divergence_used;
  double hypothesis_value = 0.0;
};

/// Builds the family τ_x on R A^n with ρ^{RA} on copy x and σ^A elsewhere,
/// decodes it with the PGM, and reports Tr[Λ_x τ_x]. `dims` = {|R|, |A|}.
DecodingReport pbd_simulate(const DensityOperator& rho_ra, const Dims& dims, const DensityOperator& sigma_a,
                            double eps, const FamilySpec& family = {});

/// PGM success of every member of the n-copy family, computed block by block
/// through the permutation symmetry. Needs |A| = 2.
double symmetric_pgm_success(const DensityOperator& rho_ra, const Dims& dims, const DensityOperator& sigma_a, int n,
                             const FamilySpec& family = {});

/// 1 - Q_2(σ_p^{XB} || σ_p^{XB} + (m-1) σ_p^X ⊗ σ_p^B)
double tc_upper(const Channel& channel, long m, const RealVector& p);

struct CommBound {
  double epsilon = 0.0;
  RealVector best_p;
  double induced_value = 0.0;      // max_p D̊_2^ε(σ_p^{XB} || σ_p^X ⊗ σ_p^B), raw
  double t_star = 0.0;             // 2^{induced_value}
  double floor_bits = 0.0;         // log(1 + ⌊(ε/(1-ε)) 2^{D̊}⌋)
  double direct_floor_bits = 0.0;  // log(1 + ⌊2^{D̊}⌋), the largest m with Q_2 >= 1-ε
  double bound_bits = 0.0;         // D̊ + log(ε/(1-ε))
  double main_text_bits = 0.0;     // D̊ alone
  std::vector<std::pair<long, double>> tc_upper_curve;
};

CommBound distill_lower_bound(const Channel& channel, double eps, const ChannelMiOptions& options = {});

struct BruteForceTc {
  double tc = 0.0;  // minimum average error
  std::vector<int> codebook;
  std::vector<double> success;  // per-message success of the MAP decoder on `codebook`
};

inline constexpr long kMaxCodebooks = 100000;

/// Exact T_c over all codebooks in [k]^m with the MAP decoder.
BruteForceTc brute_force_tc(const ClassicalChannel& channel, long m);

struct ExpurgationReport {
  long m = 0;
  double average_error = 0.0;  // T_c(N -> Δ_m)
  double max_error_half = 0.0;  // worst error over the best ⌊m/2⌋ messages
  bool holds = false;           // max_error_half <= 2 average_error
};

ExpurgationReport expurgate_check(const ClassicalChannel& channel, long m);

struct ConvexSplitReport {
  int n = 0;
  double mu = 0.0;
  double epsilon_n = 0.0;
  double actual_p = 0.0;
  double q2_mixture = 0.0;  // Q_2(τ̃ || ρ^{RB} ⊗ σ^{⊗n}), equal to 1 + μ/n
};

/// `rho` on (RB) ⊗ B' with `dims` = {|RB|, |B'|}; σ on B'.
ConvexSplitReport convex_split_check(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma,
                                     int n);

struct EqsrBound {
  double epsilon = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta_prime = 0.0;
  int dim_r = 0;
  CondMutualInfo cond_mi;
  double q_bound = 0.0;
};

/// ε - √(2(δ0+δ1)) - √(2δ0)
double delta_prime(double eps, double delta0, double delta1);

/// ρ on A ⊗ A' ⊗ B with `dims` = {|A|, |A'|, |B|}. Throws InfeasibleError when δ' <= 0.
EqsrBound eqsr_cost_bound(const DensityOperator& rho, const Dims& dims, double eps, double delta0, double delta1);

}  // namespace qdiv
