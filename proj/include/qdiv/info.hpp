#pragma once

// Rényi mutual information and the variants built from it: smoothed, induced,
// channel and conditional.

#include "qdiv/induced.hpp"
#include "qdiv/states.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qdiv {

/// Settings for the exponentiated-gradient minimizer over density operators.
struct EgOptions {
  double step = 0.5;
  int max_iterations = 500;
  double residual_tol = 1e-7;
};

struct DensityMinimum {
  DensityOperator sigma = DensityOperator::maximally_mixed(1);
  double value = 0.0;
  int iterations = 0;
  /// Tr[σ∇f] - λ_min(∇f) at the returned point; zero at a stationary point.
  double residual = 0.0;
};

using StateObjective = std::function<double(const DensityOperator&)>;
using StateGradient = std::function<Matrix(const DensityOperator&)>;

/// Minimizes f over full-rank density operators by the update
/// σ <- exp(log σ - η ∇f(σ)) / Tr[...], halving η until f decreases.
DensityMinimum minimize_over_states(const StateObjective& f, const StateGradient& grad, const DensityOperator& start,
                                    const EgOptions& options = {});

/// ∇_X Q_2(ρ||X) = ∇_X Tr[ρ X^{-1/2} ρ X^{-1/2}], taken on supp(X).
Matrix q2_gradient(const DensityOperator& rho, const PositiveOperator& x);

struct MutualInfoResult {
  double value = 0.0;
  DensityOperator optimal_sigma = DensityOperator::maximally_mixed(1);
  int iterations = 0;
  double gradient_residual = 0.0;
};

/// D_α(ρ^{AB} || ρ^A ⊗ σ^B)
double mutual_info_objective(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma_b,
                             const Alpha& alpha);

/// I_α(A:B) = min_σ D_α(ρ^{AB} || ρ^A ⊗ σ^B) for α in {1, 2, inf}. `dims` = {|A|, |B|}.
MutualInfoResult mutual_info(const DensityOperator& rho, const Dims& dims, const Alpha& alpha,
                             const EgOptions& options = {});

/// D̊_2^ε(ρ^{AB} || σ^A ⊗ ρ^B), raw.
double induced_mutual_info_objective(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma_a,
                                     double eps);

/// min_{σ on A} D̊_2^ε(ρ^{AB} || σ^A ⊗ ρ^B), raw. The minimizing σ is found by the
/// same exponentiated-gradient iteration, with the gradient of λ* taken implicitly.
MutualInfoResult induced_mutual_info_2(const DensityOperator& rho, const Dims& dims, double eps,
                                       const EgOptions& options = {});

struct SmoothingCandidate {
  std::string name;
  DensityOperator state = DensityOperator::maximally_mixed(1);
  double distance = 0.0;  // trace distance to ρ
  double value = 0.0;     // I_2 of the candidate
};

/// Upper bound on min over the trace-distance ball of I_2(A:B), taken over a fixed
/// candidate family: ρ itself, depolarized ρ, eigenvalue-truncated ρ, and ρ mixed
/// toward ρ^A ⊗ ρ^B.
struct SmoothedResult {
  double value = 0.0;
  DensityOperator smoothing_state = DensityOperator::maximally_mixed(1);
  double distance_used = 0.0;
  bool is_upper_bound = true;
  std::string candidate;
  std::vector<SmoothingCandidate> candidates;
};

SmoothedResult smoothed_mutual_info_2(const DensityOperator& rho, const Dims& dims, double eps);

struct ChannelMiOptions {
  int restarts = 20;
  int max_iterations = 100;
  std::uint64_t seed = 1;
};

struct ChannelMutualInfo {
  double value = 0.0;  // attained at best_p, so a lower bound on the supremum
  RealVector best_p;
  int evaluations = 0;
};

inline constexpr int kMaxChannelInputs = 8;

/// sup_p I_α(X:B) of σ_p^{XB}, or with `eps` set, sup_p D̊_2^ε(σ_p^{XB} || σ_p^X ⊗ σ_p^B).
/// Projected gradient ascent from the uniform point and `restarts` random points.
ChannelMutualInfo channel_mutual_info(const Channel& channel, const Alpha& alpha, std::optional<double> eps = {},
                                      const ChannelMiOptions& options = {});

/// Objective of channel_mutual_info at a fixed input distribution.
double channel_objective(const Channel& channel, const RealVector& p, const Alpha& alpha, std::optional<double> eps);

struct CondMutualInfo {
  double delta0 = 0.0;
  double delta1 = 0.0;
  SmoothedResult smoothed_term;   // I_2^{δ0}(RB:A)
  MutualInfoResult induced_detail;
  double induced_term = 0.0;      // min_σ D̊_2^{δ1}(ρ^{AB} || σ^A ⊗ ρ^B)
  double value = 0.0;
};

/// I_2^{δ0}(RB:A) - I̊_2^{δ1}(B:A) for ρ on R ⊗ A ⊗ B, `dims` = {|R|, |A|, |B|}.
CondMutualInfo cond_mutual_info(const DensityOperator& rho_rab, const Dims& dims, double delta0, double delta1);

}  // namespace qdiv
