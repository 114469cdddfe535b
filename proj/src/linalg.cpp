#include "qdiv/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

namespace qdiv {

namespace {

long initial_dimension_cap() {
  if (const char* env = std::getenv("QDIV_DIM_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1L << 13;
}

std::atomic<long>& cap_storage() {
  static std::atomic<long> cap{initial_dimension_cap()};
  return cap;
}

double max_hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

SpectralDecomposition diagonalize(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw ValidationError("eigensolver did not converge");
  return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

SpectralDecomposition sorted(RealVector values, const Matrix& vectors) {
  std::vector<int> order(static_cast<size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values(a) < values(b); });
  SpectralDecomposition out;
  out.eigenvalues.resize(values.size());
  out.eigenvectors.resize(vectors.rows(), vectors.cols());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) {
    out.eigenvalues(i) = values(order[i]);
    out.eigenvectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

// Maps a flat input index to the flat output index after reordering subsystems.
std::vector<int> permutation_index_map(const Dims& dims, const std::vector<int>& perm) {
  const int k = static_cast<int>(dims.size());
  const long total = product_of(dims);
  Dims out_dims(k);
  for (int j = 0; j < k; ++j) out_dims[j] = dims[perm[j]];
  // stride of each input subsystem inside the output index
  std::vector<long> out_stride(k, 1);
  for (int j = k - 2; j >= 0; --j) out_stride[j] = out_stride[j + 1] * out_dims[j + 1];
  std::vector<long> stride_of_input(k, 0);
  for (int j = 0; j < k; ++j) stride_of_input[perm[j]] = out_stride[j];

  std::vector<int> map(static_cast<size_t>(total));
  std::vector<int> digits(k, 0);
  for (long flat = 0; flat < total; ++flat) {
    long out = 0;
    for (int s = 0; s < k; ++s) out += digits[s] * stride_of_input[s];
    map[static_cast<size_t>(flat)] = static_cast<int>(out);
    for (int s = k - 1; s >= 0; --s) {
      if (++digits[s] < dims[s]) break;
      digits[s] = 0;
    }
  }
  return map;
}

void validate_permutation(const Dims& dims, const std::vector<int>& perm) {
  if (perm.size() != dims.size()) throw ValidationError("permutation length does not match dims");
  std::vector<bool> seen(dims.size(), false);
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(dims.size()) || seen[p])
      throw ValidationError("invalid subsystem permutation");
    seen[p] = true;
  }
}

SpectralDecomposition permuted_spectrum(const SpectralDecomposition& s, const std::vector<int>& map) {
  SpectralDecomposition out{s.eigenvalues, Matrix(s.eigenvectors.rows(), s.eigenvectors.cols())};
  for (int r = 0; r < static_cast<int>(map.size()); ++r) out.eigenvectors.row(map[r]) = s.eigenvectors.row(r);
  return out;
}

}  // namespace

long dimension_cap() { return cap_storage().load(); }

void set_dimension_cap(long cap) {
  if (cap <= 0) throw ValidationError("dimension cap must be positive");
  cap_storage().store(cap);
}

void check_dimension_cap(long dim, const std::string& what) {
  if (dim > dimension_cap()) {
    std::ostringstream msg;
    msg << what << ": composite dimension " << dim << " exceeds cap " << dimension_cap();
    throw DimensionCapError(msg.str());
  }
}

long product_of(const Dims& dims) {
  long p = 1;
  for (int d : dims) {
    if (d <= 0) throw ValidationError("subsystem dimensions must be positive");
    p *= d;
  }
  return p;
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double SpectralDecomposition::max_abs_eigenvalue() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

double SpectralDecomposition::support_cutoff() const { return qdiv::support_cutoff(eigenvalues); }

double support_cutoff(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  const double n = std::max<double>(static_cast<double>(eigenvalues.size()), 8.0);
  return n * std::numeric_limits<double>::epsilon() * eigenvalues.cwiseAbs().maxCoeff();
}

// --- HermitianOperator -------------------------------------------------------

HermitianOperator::HermitianOperator(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("operator must be a non-empty square matrix");
  if (!m.allFinite()) throw ValidationError("operator has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (max_hermitian_defect(m) > tol::kHerm * scale) throw ValidationError("operator is not Hermitian");
  Matrix sym = 0.5 * (m + m.adjoint());
  auto shared = std::make_shared<Shared>();
  shared->matrix = std::move(sym);
  data_ = std::move(shared);
}

HermitianOperator::HermitianOperator(Trusted, Matrix m) {
  auto shared = std::make_shared<Shared>();
  shared->matrix = std::move(m);
  data_ = std::move(shared);
}

HermitianOperator::HermitianOperator(Trusted, Matrix m, SpectralDecomposition s) {
  auto shared = std::make_shared<Shared>();
  shared->matrix = std::move(m);
  shared->spectrum = std::move(s);
  std::call_once(shared->once, [] {});
  data_ = std::move(shared);
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Trusted{}, Matrix::Identity(dim, dim),
                           SpectralDecomposition{RealVector::Ones(dim), Matrix::Identity(dim, dim)});
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Trusted{}, Matrix::Zero(dim, dim),
                           SpectralDecomposition{RealVector::Zero(dim), Matrix::Identity(dim, dim)});
}

const SpectralDecomposition& HermitianOperator::spectrum() const {
  std::call_once(data_->once, [this] { data_->spectrum = diagonalize(data_->matrix); });
  return data_->spectrum;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  require_same_dim(*this, other, "operator sum");
  return HermitianOperator(Trusted{}, matrix() + other.matrix());
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  require_same_dim(*this, other, "operator difference");
  return HermitianOperator(Trusted{}, matrix() - other.matrix());
}

HermitianOperator HermitianOperator::scaled(double s) const {
  return HermitianOperator(Trusted{}, matrix() * s);
}

// --- PositiveOperator --------------------------------------------------------

PositiveOperator::PositiveOperator(Matrix m) : PositiveOperator(HermitianOperator(std::move(m))) {}

PositiveOperator::PositiveOperator(const HermitianOperator& h) : HermitianOperator(h) {
  const SpectralDecomposition& s = h.spectrum();
  const double scale = std::max(1.0, s.max_abs_eigenvalue());
  const double min_ev = s.eigenvalues.size() ? s.eigenvalues.minCoeff() : 0.0;
  if (min_ev < -tol::kPsd * scale) {
    std::ostringstream msg;
    msg << "operator is not positive semidefinite (min eigenvalue " << min_ev << ")";
    throw ValidationError(msg.str());
  }
  if (min_ev < 0.0) {
    SpectralDecomposition clamped{s.eigenvalues.cwiseMax(0.0), s.eigenvectors};
    Matrix rebuilt = clamped.reconstruct();
    rebuilt = 0.5 * (rebuilt + rebuilt.adjoint()).eval();
    *this = PositiveOperator(Trusted{}, std::move(rebuilt), std::move(clamped));
  }
}

PositiveOperator PositiveOperator::identity(int dim) {
  return PositiveOperator(Trusted{}, Matrix::Identity(dim, dim),
                          SpectralDecomposition{RealVector::Ones(dim), Matrix::Identity(dim, dim)});
}

PositiveOperator PositiveOperator::from_spectrum(SpectralDecomposition s) {
  if (s.eigenvalues.size() && s.eigenvalues.minCoeff() < 0.0) s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
  Matrix m = s.reconstruct();
  m = 0.5 * (m + m.adjoint()).eval();
  return PositiveOperator(Trusted{}, std::move(m), std::move(s));
}

PositiveOperator PositiveOperator::operator+(const PositiveOperator& other) const {
  require_same_dim(*this, other, "operator sum");
  return PositiveOperator(HermitianOperator(Trusted{}, matrix() + other.matrix()));
}

PositiveOperator PositiveOperator::scaled(double s) const {
  if (s < 0.0) throw ValidationError("positive operator scaled by a negative factor");
  const SpectralDecomposition& sp = spectrum();
  return PositiveOperator(Trusted{}, matrix() * s, SpectralDecomposition{sp.eigenvalues * s, sp.eigenvectors});
}

// --- DensityOperator ---------------------------------------------------------

DensityOperator::DensityOperator(Matrix m) : DensityOperator(PositiveOperator(std::move(m))) {}

DensityOperator::DensityOperator(const PositiveOperator& p) : PositiveOperator(p) {
  const double tr = trace();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density operator trace is " << tr << ", expected 1";
    throw ValidationError(msg.str());
  }
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(PositiveOperator::identity(dim).scaled(1.0 / dim));
}

DensityOperator DensityOperator::basis_state(int dim, int index) {
  if (index < 0 || index >= dim) throw ValidationError("basis index out of range");
  RealVector probs = RealVector::Zero(dim);
  probs(index) = 1.0;
  return diagonal(std::span<const double>(probs.data(), static_cast<size_t>(dim)));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw ValidationError("zero state vector");
  Eigen::VectorXcd v = psi / norm;
  return DensityOperator(Matrix(v * v.adjoint()));
}

DensityOperator DensityOperator::diagonal(std::span<const double> probs) {
  const int d = static_cast<int>(probs.size());
  RealVector p(d);
  for (int i = 0; i < d; ++i) p(i) = probs[static_cast<size_t>(i)];
  SpectralDecomposition s = sorted(p, Matrix::Identity(d, d));
  return DensityOperator(PositiveOperator::from_spectrum(std::move(s)));
}

// --- free functions ----------------------------------------------------------

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ValidationError(msg.str());
  }
}

SpectralDecomposition eig_hermitian(const HermitianOperator& m) { return m.spectrum(); }

HermitianOperator mat_fn(const PositiveOperator& m, const std::function<double(double)>& f, bool support_only) {
  const SpectralDecomposition& s = m.spectrum();
  const double cut = s.support_cutoff();
  RealVector fv(s.eigenvalues.size());
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const double x = std::max(0.0, s.eigenvalues(i));
    fv(i) = (support_only && x <= cut) ? 0.0 : f(x);
  }
  if (!fv.allFinite()) throw ValidationError("matrix function produced non-finite values (pole without support_only?)");
  Matrix out = s.eigenvectors * fv.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return HermitianOperator(out);
}

HermitianOperator hermitian_fn(const HermitianOperator& m, const std::function<double(double)>& f) {
  const SpectralDecomposition& s = m.spectrum();
  RealVector fv = s.eigenvalues.unaryExpr(f);
  Matrix out = s.eigenvectors * fv.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return HermitianOperator(out);
}

PositiveOperator power(const PositiveOperator& m, double p) {
  const SpectralDecomposition& s = m.spectrum();
  const double cut = s.support_cutoff();
  RealVector fv(s.eigenvalues.size());
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const double x = s.eigenvalues(i);
    fv(i) = x <= cut ? 0.0 : std::pow(x, p);
  }
  return PositiveOperator::from_spectrum(SpectralDecomposition{fv, s.eigenvectors});
}

SupportProjector support_projector(const PositiveOperator& m) {
  const SpectralDecomposition& s = m.spectrum();
  const double cut = s.support_cutoff();
  RealVector ind(s.eigenvalues.size());
  int rank = 0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const bool on = s.eigenvalues(i) > cut;
    ind(i) = on ? 1.0 : 0.0;
    rank += on ? 1 : 0;
  }
  return SupportProjector{PositiveOperator::from_spectrum(SpectralDecomposition{ind, s.eigenvectors}), rank, cut};
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(Matrix(Eigen::kroneckerProduct(a.matrix(), b.matrix())));
}

PositiveOperator tensor(const PositiveOperator& a, const PositiveOperator& b) {
  check_dimension_cap(static_cast<long>(a.dim()) * b.dim(), "tensor product");
  const SpectralDecomposition& sa = a.spectrum();
  const SpectralDecomposition& sb = b.spectrum();
  RealVector values(sa.eigenvalues.size() * sb.eigenvalues.size());
  for (int i = 0; i < sa.eigenvalues.size(); ++i)
    for (int j = 0; j < sb.eigenvalues.size(); ++j)
      values(i * sb.eigenvalues.size() + j) = sa.eigenvalues(i) * sb.eigenvalues(j);
  Matrix vectors = Eigen::kroneckerProduct(sa.eigenvectors, sb.eigenvectors);
  return PositiveOperator::from_spectrum(sorted(values, vectors));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(tensor(static_cast<const PositiveOperator&>(a), static_cast<const PositiveOperator&>(b)));
}

DensityOperator tensor_power(const DensityOperator& a, int n) {
  if (n < 1) throw ValidationError("tensor power needs n >= 1");
  DensityOperator out = a;
  for (int i = 1; i < n; ++i) out = tensor(out, a);
  return out;
}

Matrix permute_matrix(const Matrix& m, const Dims& dims, const std::vector<int>& perm) {
  validate_permutation(dims, perm);
  if (product_of(dims) != m.rows()) throw ValidationError("dims do not match operator dimension");
  const std::vector<int> map = permutation_index_map(dims, perm);
  Matrix out(m.rows(), m.cols());
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) out(map[r], map[c]) = m(r, c);
  return out;
}

Matrix partial_trace_matrix(const Matrix& m, const Dims& dims, const std::vector<int>& keep) {
  if (product_of(dims) != m.rows() || m.rows() != m.cols())
    throw ValidationError("partial trace: dims do not match operator dimension");
  const int k = static_cast<int>(dims.size());
  std::vector<bool> kept(k, false);
  for (int s : keep) {
    if (s < 0 || s >= k || kept[s]) throw ValidationError("partial trace: invalid keep set");
    kept[s] = true;
  }
  std::vector<int> perm(keep.begin(), keep.end());
  long kept_dim = 1;
  for (int s : keep) kept_dim *= dims[s];
  for (int s = 0; s < k; ++s)
    if (!kept[s]) perm.push_back(s);
  const Matrix permuted = permute_matrix(m, dims, perm);
  const long traced_dim = m.rows() / kept_dim;
  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (long c = 0; c < kept_dim; ++c)
    for (long r = 0; r < kept_dim; ++r) {
      Complex acc = 0.0;
      for (long t = 0; t < traced_dim; ++t) acc += permuted(r * traced_dim + t, c * traced_dim + t);
      out(r, c) = acc;
    }
  return out;
}

HermitianOperator permute_subsystems(const HermitianOperator& m, const Dims& dims, const std::vector<int>& perm) {
  return HermitianOperator(permute_matrix(m.matrix(), dims, perm));
}

PositiveOperator permute_subsystems(const PositiveOperator& m, const Dims& dims, const std::vector<int>& perm) {
  validate_permutation(dims, perm);
  if (product_of(dims) != m.dim()) throw ValidationError("dims do not match operator dimension");
  return PositiveOperator::from_spectrum(permuted_spectrum(m.spectrum(), permutation_index_map(dims, perm)));
}

DensityOperator permute_subsystems(const DensityOperator& m, const Dims& dims, const std::vector<int>& perm) {
  return DensityOperator(permute_subsystems(static_cast<const PositiveOperator&>(m), dims, perm));
}

PositiveOperator direct_sum(const PositiveOperator& a, const PositiveOperator& b) {
  const int da = a.dim();
  const int db = b.dim();
  Matrix m = Matrix::Zero(da + db, da + db);
  m.topLeftCorner(da, da) = a.matrix();
  m.bottomRightCorner(db, db) = b.matrix();
  return PositiveOperator(std::move(m));
}

double trace_product(const Matrix& a, const Matrix& b) {
  // Tr[ab] = sum_ij a_ij b_ji
  return (a.array() * b.transpose().array()).sum().real();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  const HermitianOperator diff = rho - sigma;
  return std::clamp(0.5 * diff.spectrum().eigenvalues.cwiseAbs().sum(), 0.0, 1.0);
}

FidelityPair fidelity_and_purified(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  const Matrix sqrt_rho = power(rho, 0.5).matrix();
  const PositiveOperator inner(HermitianOperator(Matrix(sqrt_rho * sigma.matrix() * sqrt_rho)));
  double f = 0.0;
  for (int i = 0; i < inner.spectrum().eigenvalues.size(); ++i)
    f += std::sqrt(std::max(0.0, inner.spectrum().eigenvalues(i)));
  f = std::clamp(f, 0.0, 1.0);
  return FidelityPair{f, std::sqrt(std::max(0.0, 1.0 - f * f))};
}

double positive_part_trace(const HermitianOperator& m) {
  const RealVector& ev = m.spectrum().eigenvalues;
  double acc = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) acc += ev(i);
  return acc;
}

HermitianOperator op_meet(const PositiveOperator& rho, const PositiveOperator& sigma) {
  require_same_dim(rho, sigma, "op_meet");
  const HermitianOperator abs_diff = hermitian_fn(rho - sigma, [](double x) { return std::abs(x); });
  return HermitianOperator(Matrix(0.5 * (rho.matrix() + sigma.matrix() - abs_diff.matrix())));
}

}  // namespace qdiv
