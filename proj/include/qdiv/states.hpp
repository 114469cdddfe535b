#pragma once

// States, channels and seeded generators.

#include "qdiv/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qdiv {

/// Counter-based SplitMix64 stream. Gaussians come from Box–Muller so the
/// sequence is identical on every platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Independent stream derived from this seed and a stream id.
  Rng split(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_origin_; }

 private:
  Rng(std::uint64_t state, std::uint64_t origin) : state_(state), seed_origin_(origin) {}
  std::uint64_t state_;
  std::uint64_t seed_origin_ = state_;
  std::optional<double> spare_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

DensityOperator random_density(int dim, int rank, std::uint64_t seed);
DensityOperator random_density(int dim, int rank, Rng& rng);
Matrix random_unitary(int dim, Rng& rng);
/// Uniform (Dirichlet(1)) point of the probability simplex.
RealVector random_probability(int k, Rng& rng);
/// Random positive operator with trace in (0, max_trace].
PositiveOperator random_positive(int dim, int rank, double max_trace, Rng& rng);

/// Stinespring channel X -> Tr_env[V X V^†] with V a random isometry.
class IsometricChannel {
 public:
  IsometricChannel(Matrix isometry, int out_dim, int env_dim);
  static IsometricChannel random(int in_dim, int out_dim, int env_dim, Rng& rng);

  int in_dim() const { return static_cast<int>(isometry_.cols()); }
  int out_dim() const { return out_dim_; }

  PositiveOperator apply(const PositiveOperator& x) const;
  DensityOperator apply(const DensityOperator& x) const;

 private:
  Matrix isometry_;
  int out_dim_;
  int env_dim_;
};

/// Block-diagonal classical-quantum state sum_x p_x |x><x| ⊗ sigma_x on X ⊗ B.
class CqState {
 public:
  CqState(RealVector probs, std::vector<DensityOperator> outputs);

  int k() const { return static_cast<int>(probs_.size()); }
  int output_dim() const { return outputs_.front().dim(); }
  const RealVector& probs() const { return probs_; }
  const std::vector<DensityOperator>& outputs() const { return outputs_; }

  DensityOperator joint() const;
  DensityOperator marginal_x() const;
  DensityOperator marginal_b() const;
  /// sigma_p^X ⊗ sigma_p^B
  DensityOperator product_of_marginals() const;
  Dims dims() const { return {k(), output_dim()}; }

 private:
  RealVector probs_;
  std::vector<DensityOperator> outputs_;
};

CqState cq_state(const RealVector& p, const std::vector<DensityOperator>& outputs);

/// Classical-quantum channel given by its output states sigma_x = N(|x><x|).
class Channel {
 public:
  explicit Channel(std::vector<DensityOperator> outputs);

  int input_size() const { return static_cast<int>(outputs_.size()); }
  int output_dim() const { return outputs_.front().dim(); }
  const std::vector<DensityOperator>& outputs() const { return outputs_; }
  CqState cq(const RealVector& p) const { return CqState(p, outputs_); }
  /// Relabels inputs: new input x is old input perm[x].
  Channel permuted(const std::vector<int>& perm) const;
  Channel post_processed(const IsometricChannel& e) const;

 private:
  std::vector<DensityOperator> outputs_;
};

/// Classical channel W(y|x), rows indexed by x.
class ClassicalChannel {
 public:
  explicit ClassicalChannel(Eigen::MatrixXd w);
  static ClassicalChannel from_channel(const Channel& ch);

  int input_size() const { return static_cast<int>(w_.rows()); }
  int output_size() const { return static_cast<int>(w_.cols()); }
  const Eigen::MatrixXd& w() const { return w_; }
  Channel to_channel() const;

 private:
  Eigen::MatrixXd w_;
};

struct Purification {
  DensityOperator state;  // pure, on R ⊗ A
  Dims dims;              // {|R|, |A|}
};

/// |R| = rank(rho); R is the first subsystem.
Purification purify(const DensityOperator& rho);

/// Family {tau_x} on R A_1 ... A_n with pairwise index-symmetric marginals.
struct PairwiseFamily {
  DensityOperator rho;    // on R A
  DensityOperator sigma;  // on R A, the off-index marginal
  int dim_r = 1;
  int dim_a = 1;
  int n = 1;
  std::vector<DensityOperator> members;

  Dims dims() const;
  /// Largest entrywise deviation of tau_x^{R A_y} from rho (x == y) or sigma (x != y).
  double marginal_defect() const;
};

/// tau_x = rho^{R A_x} ⊗ sigma^{⊗(n-1)} on the remaining copies.
PairwiseFamily pairwise_tensor_family(const DensityOperator& rho_ra, int dim_r, int dim_a,
                                      const DensityOperator& sigma_a, int n);

/// tau_x = rho^{R A_x} ⊗ omega with omega = (1-w) sigma^{⊗(n-1)} + w sum_j q_j |v_j><v_j|^{⊗(n-1)}
/// built from the eigen-decomposition sigma = sum_j q_j |v_j><v_j|. omega is permutation
/// symmetric and has single-copy marginals equal to sigma.
PairwiseFamily pairwise_correlated_family(const DensityOperator& rho_ra, int dim_r, int dim_a,
                                          const DensityOperator& sigma_a, int n, double weight);

// --- files -------------------------------------------------------------------

struct StateFile {
  Dims dims;
  DensityOperator state;
  std::string label;
};

/// Serializes with 17 significant digits so doubles round-trip exactly.
std::string state_to_json(const DensityOperator& rho, const Dims& dims, const std::string& label = "");
std::string channel_to_json(const Channel& ch, const std::string& label = "");
StateFile state_from_json(const std::string& text);
Channel channel_from_json(const std::string& text);

void save_state(const DensityOperator& rho, const Dims& dims, const std::filesystem::path& path,
                const std::string& label = "");
StateFile load_state(const std::filesystem::path& path);
void save_channel(const Channel& ch, const std::filesystem::path& path, const std::string& label = "");
Channel load_channel(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace qdiv
