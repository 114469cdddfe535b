#pragma once

// Dense Hermitian / positive operator algebra.
//
// Every operator type is immutable after construction. Construction validates
// the defining invariant (Hermiticity, positivity, unit trace) and caches the
// spectral decomposition so that downstream matrix functions reuse it.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdiv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

namespace tol {
inline constexpr double kHerm = 1e-10;
inline constexpr double kPsd = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kRecon = 1e-8;
}  // namespace tol

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a requested composite system exceeds the dimension cap.
class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a parameter combination admits no valid construction.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Composite-dimension cap shared by every constructor of tensor-power
/// objects. Defaults to 2^13; `QDIV_DIM_CAP` overrides it.
long dimension_cap();
void set_dimension_cap(long cap);
void check_dimension_cap(long dim, const std::string& what);

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns

  Matrix reconstruct() const;
  double max_abs_eigenvalue() const;
  /// Eigenvalues at or below this value are treated as zero.
  double support_cutoff() const;
};

double support_cutoff(const RealVector& eigenvalues);

class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);

  int dim() const { return static_cast<int>(data_->matrix.rows()); }
  const Matrix& matrix() const { return data_->matrix; }
  const SpectralDecomposition& spectrum() const;
  double trace() const { return data_->matrix.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator scaled(double s) const;

  /// Tag for constructors that skip validation; the caller guarantees the invariant.
  struct Trusted {};
  HermitianOperator(Trusted, Matrix m);
  HermitianOperator(Trusted, Matrix m, SpectralDecomposition s);

 protected:
  struct Shared {
    Matrix matrix;
    mutable std::once_flag once;
    mutable SpectralDecomposition spectrum;
  };

  std::shared_ptr<const Shared> data_;
};

class PositiveOperator : public HermitianOperator {
 public:
  /// Eigenvalues in [-psd_tol * max(1, |lambda|_max), 0) are clamped to zero.
  explicit PositiveOperator(Matrix m);
  explicit PositiveOperator(const HermitianOperator& h);

  static PositiveOperator identity(int dim);
  /// Builds from a known eigendecomposition without re-diagonalizing.
  static PositiveOperator from_spectrum(SpectralDecomposition s);

  PositiveOperator operator+(const PositiveOperator& other) const;
  PositiveOperator scaled(double s) const;

 protected:
  PositiveOperator(Trusted t, Matrix m, SpectralDecomposition s)
      : HermitianOperator(t, std::move(m), std::move(s)) {}
};

class DensityOperator : public PositiveOperator {
 public:
  explicit DensityOperator(Matrix m);
  explicit DensityOperator(const PositiveOperator& p);

  static DensityOperator maximally_mixed(int dim);
  static DensityOperator basis_state(int dim, int index);
  static DensityOperator pure(const Eigen::VectorXcd& psi);
  static DensityOperator diagonal(std::span<const double> probs);
};

struct SupportProjector {
  PositiveOperator projector;
  int rank = 0;
  double cutoff = 0.0;
};

SpectralDecomposition eig_hermitian(const HermitianOperator& m);

/// Applies `f` to the spectrum. With `support_only`, eigenvalues at or below
/// the support cutoff map to 0 instead of f(0).
HermitianOperator mat_fn(const PositiveOperator& m, const std::function<double(double)>& f,
                         bool support_only);

/// Spectral function of an arbitrary Hermitian operator.
HermitianOperator hermitian_fn(const HermitianOperator& m, const std::function<double(double)>& f);

/// m^p on the support of m (p may be negative; p == 0 gives the support projector).
PositiveOperator power(const PositiveOperator& m, double p);

SupportProjector support_projector(const PositiveOperator& m);

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
PositiveOperator tensor(const PositiveOperator& a, const PositiveOperator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator tensor_power(const DensityOperator& a, int n);

Matrix partial_trace_matrix(const Matrix& m, const Dims& dims, const std::vector<int>& keep);
Matrix permute_matrix(const Matrix& m, const Dims& dims, const std::vector<int>& perm);

/// Keeps the subsystems listed in `keep` (in the order given) and traces out the rest.
template <class Op>
Op partial_trace(const Op& m, const Dims& dims, const std::vector<int>& keep) {
  return Op(partial_trace_matrix(m.matrix(), dims, keep));
}

/// Reorders subsystems: output subsystem i is input subsystem perm[i].
HermitianOperator permute_subsystems(const HermitianOperator& m, const Dims& dims,
                                     const std::vector<int>& perm);
PositiveOperator permute_subsystems(const PositiveOperator& m, const Dims& dims,
                                    const std::vector<int>& perm);
DensityOperator permute_subsystems(const DensityOperator& m, const Dims& dims,
                                   const std::vector<int>& perm);

/// Block-diagonal a ⊕ b.
PositiveOperator direct_sum(const PositiveOperator& a, const PositiveOperator& b);

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct FidelityPair {
  double fidelity = 0.0;
  double purified_distance = 0.0;
};
FidelityPair fidelity_and_purified(const DensityOperator& rho, const DensityOperator& sigma);

/// Tr(M)_+ : sum of positive eigenvalues.
double positive_part_trace(const HermitianOperator& m);

/// rho ∧ sigma = (rho + sigma - |rho - sigma|) / 2.
HermitianOperator op_meet(const PositiveOperator& rho, const PositiveOperator& sigma);

/// Re Tr[a b] without forming the product.
double trace_product(const Matrix& a, const Matrix& b);

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* what);

long product_of(const Dims& dims);

}  // namespace qdiv
