#include "qdiv/protocols.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qdiv {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

void check_eps(double eps, const char* what) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError(std::string(what) + " needs eps in (0, 1)");
}

// Calls f(codebook) for every non-decreasing codebook in [k]^m. The average
// success of the MAP decoder is invariant under reordering the codebook.
template <class F>
void for_each_sorted_codebook(int k, long m, F&& f) {
  std::vector<int> code(static_cast<size_t>(m), 0);
  for (;;) {
    f(code);
    long i = m - 1;
    while (i >= 0 && code[static_cast<size_t>(i)] == k - 1) --i;
    if (i < 0) return;
    const int v = code[static_cast<size_t>(i)] + 1;
    for (long j = i; j < m; ++j) code[static_cast<size_t>(j)] = v;
  }
}

// Per-message success of the MAP decoder, ties going to the lowest message index.
std::vector<double> map_success(const Eigen::MatrixXd& w, const std::vector<int>& code) {
  std::vector<double> s(code.size(), 0.0);
  for (int y = 0; y < w.cols(); ++y) {
    size_t best = 0;
    for (size_t z = 1; z < code.size(); ++z)
      if (w(code[z], y) > w(code[best], y)) best = z;
    s[best] += w(code[best], y);
  }
  return s;
}

// --- permutation-symmetric reduction for qubit A --------------------------------
//
// τ_x = ρ^{R A_x} ⊗ ω on the other copies, with ω diagonal in the eigenbasis
// of σ and invariant under permuting copies. Then π τ_x π^† = τ_{π(x)}, η is
// permutation invariant and every message has the success of x = 1. On copies
// 2..n the operators τ_1 and η commute with S_{n-1}, so by Schur–Weyl they act
// as X_J ⊗ I on V_J ⊗ P_J. X_J is read off by compressing onto one copy of V_J:
// Dicke states on 2J qubits followed by singlets on the remaining pairs.

using SparseVector = std::vector<std::pair<long, Complex>>;

// Eigenpairs of a PSD matrix whose scale varies strongly along the diagonal.
// With E = D Et D, D = sqrt(diag E) and Et = U L U^*, the factor G^* = L^(1/2) U^* D
// is column graded, so a pivoted-QR Jacobi SVD of it resolves small eigenvalues
// of E = G G^* to high relative accuracy.
using RealX = long double;
using ComplexX = std::complex<RealX>;
using MatrixX = Eigen::Matrix<ComplexX, Eigen::Dynamic, Eigen::Dynamic>;
using RealVectorX = Eigen::Matrix<RealX, Eigen::Dynamic, 1>;

// Directions of η below this fraction of its top eigenvalue are handed to the
// remainder effect; their eigenvectors cannot be resolved to the accuracy the
// completeness check asks for.
constexpr double kDecodingRelativeCutoff = 1e-10;

double decoding_cutoff(const RealVector& eigenvalues) {
  return std::max(support_cutoff(eigenvalues), kDecodingRelativeCutoff * eigenvalues.maxCoeff());
}

struct GradedSpectrum {
  RealVectorX values;
  MatrixX vectors;
};

// Eigenpairs of a PSD matrix whose scale varies strongly along the diagonal.
// With E = D Et D, D = sqrt(diag E) and Et = U L U^*, the factor G^* = L^(1/2) U^* D
// is column graded, so a pivoted-QR Jacobi SVD of it resolves small eigenvalues
// of E = G G^* to high relative accuracy. Carried out in extended precision.
GradedSpectrum graded_eigen(const Matrix& e_in) {
  using Real = RealX;
  using C = ComplexX;
  using M = MatrixX;
  using V = RealVectorX;
  const M e = e_in.cast<C>();
  const long n = e.rows();
  V dv(n), inv(n);
  for (long i = 0; i < n; ++i) {
    const Real d = std::max<Real>(0.0L, e(i, i).real());
    dv(i) = std::sqrt(d);
    inv(i) = d > 0.0L ? 1.0L / dv(i) : 0.0L;
  }
  const Eigen::Matrix<C, Eigen::Dynamic, 1> dc = dv.cast<C>(), ic = inv.cast<C>();
  M scaled = ic.asDiagonal() * e * ic.asDiagonal();
  scaled = (0.5L * (scaled + scaled.adjoint())).eval();
  const Eigen::SelfAdjointEigenSolver<M> es(scaled);
  V lam = es.eigenvalues().cwiseMax(0.0L);
  const Real floor = static_cast<Real>(n) * std::numeric_limits<Real>::epsilon() * lam.maxCoeff();
  for (long i = 0; i < n; ++i) lam(i) = lam(i) > floor ? std::sqrt(lam(i)) : 0.0L;
  const M gh = lam.cast<C>().asDiagonal() * es.eigenvectors().adjoint() * dc.asDiagonal();
  const Eigen::JacobiSVD<M, Eigen::ColPivHouseholderQRPreconditioner> svd(gh, Eigen::ComputeFullV);
  return {svd.singularValues().cwiseAbs2(), svd.matrixV()};
}

struct SymmetricSetup {
  int n = 0;
  int dim_r = 0;
  Matrix rho;                 // ρ^{RA} in the eigenbasis of σ
  std::vector<double> s;      // eigenvalues of σ
  FamilySpec family;
  std::vector<double> pow0, pow1;

  // ω on n-1 copies with c0 zeros and c1 ones
  double omega(int c0, int c1) const {
    double w = pow0[static_cast<size_t>(c0)] * pow1[static_cast<size_t>(c1)];
    if (family.kind == FamilyKind::kTensor) return w;
    const double corr = (c1 == 0 ? s[0] : 0.0) + (c0 == 0 ? s[1] : 0.0);
    return (1.0 - family.weight) * w + family.weight * corr;
  }
};

// u += τ_x v for copy x in 1..n.
void apply_member(const SymmetricSetup& st, int x, const SparseVector& v, std::vector<Complex>& u) {
  const int n = st.n;
  const long mask = (1L << n) - 1;
  const int shift = n - x;
  for (const auto& [idx, amp] : v) {
    const long bits = idx & mask;
    const int rp = static_cast<int>(idx >> n);
    const int bp = static_cast<int>((bits >> shift) & 1L);
    const int c1 = std::popcount(static_cast<unsigned long>(bits)) - bp;
    const double w = st.omega(n - 1 - c1, c1);
    if (w == 0.0) continue;
    const long rest = bits & ~(1L << shift);
    for (int r = 0; r < st.dim_r; ++r)
      for (int b = 0; b < 2; ++b) {
        const long target = (static_cast<long>(r) << n) | rest | (static_cast<long>(b) << shift);
        u[static_cast<size_t>(target)] += w * st.rho(2 * r + b, 2 * rp + bp) * amp;
      }
  }
}

// Orthonormal basis of R ⊗ A_1 ⊗ (one copy of V_J) with k2 = 2J.
std::vector<SparseVector> block_basis(int n, int dim_r, int k2) {
  const int m = n - 1;
  const int pairs = (m - k2) / 2;
  std::vector<std::vector<long>> dicke(static_cast<size_t>(k2 + 1));
  for (long mask = 0; mask < (1L << k2); ++mask)
    dicke[static_cast<size_t>(std::popcount(static_cast<unsigned long>(mask)))].push_back(mask);
  std::vector<SparseVector> cols;
  const double singlet_amp = std::pow(0.5, 0.5 * pairs);
  for (int r = 0; r < dim_r; ++r)
    for (int a = 0; a < 2; ++a)
      for (int k = 0; k <= k2; ++k) {
        SparseVector col;
        const double amp = singlet_amp / std::sqrt(static_cast<double>(dicke[static_cast<size_t>(k)].size()));
        for (long dm : dicke[static_cast<size_t>(k)])
          for (long sp = 0; sp < (1L << pairs); ++sp) {
            // copies 2..k2+1 carry the Dicke pattern, later pairs a singlet each
            long bits = (static_cast<long>(a) << (n - 1)) | (dm << (n - 1 - k2));
            double sign = 1.0;
            for (int p = 0; p < pairs; ++p) {
              const int first = k2 + 2 + 2 * p;  // copy index of the pair's first qubit
              const bool flipped = (sp >> p) & 1L;
              bits |= 1L << (n - (flipped ? first : first + 1));
              if (flipped) sign = -sign;
            }
            col.emplace_back((static_cast<long>(r) << n) | bits, sign * amp);
          }
        cols.push_back(std::move(col));
      }
  return cols;
}

double binomial(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (m - k + i) / i;
  return c;
}

struct SymmetricDecoding {
  double success = 0.0;
  double completeness_defect = 0.0;
  double marginal_defect = 0.0;
};

SymmetricDecoding symmetric_success(const DensityOperator& rho_ra, int dim_r, const DensityOperator& sigma_a, int n,
                                    const FamilySpec& family) {
  SymmetricSetup st;
  st.n = n;
  st.dim_r = dim_r;
  st.family = family;
  const SpectralDecomposition& sd = sigma_a.spectrum();
  st.s = {std::max(0.0, sd.eigenvalues(0)), std::max(0.0, sd.eigenvalues(1))};
  const Matrix rot = Eigen::kroneckerProduct(Matrix::Identity(dim_r, dim_r), sd.eigenvectors).eval();
  st.rho = rot.adjoint() * rho_ra.matrix() * rot;
  for (int c = 0; c < n; ++c) {
    st.pow0.push_back(std::pow(st.s[0], c));
    st.pow1.push_back(std::pow(st.s[1], c));
  }

  const int m = n - 1;
  struct Block {
    double mult;
    Matrix t, e;
  };
  std::vector<Block> blocks;
  const size_t full = static_cast<size_t>(dim_r) << n;
  std::vector<Complex> ue(full), ut(full);
  for (int k2 = m; k2 >= 0; k2 -= 2) {
    const int pairs = (m - k2) / 2;
    const std::vector<SparseVector> cols = block_basis(n, dim_r, k2);
    const long size = static_cast<long>(cols.size());
    Block b{binomial(m, pairs) - binomial(m, pairs - 1), Matrix(size, size), Matrix(size, size)};
    for (long j = 0; j < size; ++j) {
      std::fill(ue.begin(), ue.end(), Complex(0.0));
      std::fill(ut.begin(), ut.end(), Complex(0.0));
      apply_member(st, 1, cols[static_cast<size_t>(j)], ut);
      for (int x = 1; x <= n; ++x) apply_member(st, x, cols[static_cast<size_t>(j)], ue);
      for (long i = 0; i < size; ++i) {
        Complex te(0.0), tt(0.0);
        for (const auto& [idx, amp] : cols[static_cast<size_t>(i)]) {
          te += std::conj(amp) * ue[static_cast<size_t>(idx)];
          tt += std::conj(amp) * ut[static_cast<size_t>(idx)];
        }
        b.e(i, j) = te;
        b.t(i, j) = tt;
      }
    }
    b.e = hermitize(b.e);
    b.t = hermitize(b.t);
    blocks.push_back(std::move(b));
  }

  std::vector<GradedSpectrum> spectra;
  std::vector<double> all;
  for (const auto& b : blocks) {
    spectra.push_back(graded_eigen(b.e));
    for (long i = 0; i < spectra.back().values.size(); ++i)
      all.push_back(static_cast<double>(spectra.back().values(i)));
  }
  const double cut = decoding_cutoff(Eigen::Map<const RealVector>(all.data(), static_cast<long>(all.size())));
  SymmetricDecoding out;
  for (size_t k = 0; k < blocks.size(); ++k) {
    const RealVectorX& ev = spectra[k].values;
    const MatrixX& v = spectra[k].vectors;
    RealVectorX ih(ev.size()), proj(ev.size());
    for (long i = 0; i < ev.size(); ++i) {
      ih(i) = ev(i) > cut ? 1.0L / std::sqrt(ev(i)) : 0.0L;
      proj(i) = ev(i) > cut ? 1.0L : 0.0L;
    }
    // in the eigenbasis of E: Tr[(T B)^2] = sum |T_ij|^2 / sqrt(e_i e_j)
    const MatrixX tv = v.adjoint() * blocks[k].t.cast<ComplexX>() * v;
    const MatrixX ev_e = v.adjoint() * blocks[k].e.cast<ComplexX>() * v;
    RealX sum = 0.0L, defect = 0.0L;
    for (long i = 0; i < ev.size(); ++i)
      for (long j = 0; j < ev.size(); ++j) {
        sum += std::norm(tv(i, j)) * ih(i) * ih(j);
        const RealX target = i == j ? proj(i) : 0.0L;
        defect = std::max(defect, std::abs(ih(i) * ev_e(i, j) * ih(j) - target));
      }
    const double s = static_cast<double>(sum);
    out.completeness_defect = std::max(out.completeness_defect, static_cast<double>(defect));
    out.success += blocks[k].mult * s;
  }

  // single-copy marginal of ω against σ
  if (n > 1) {
    double p1 = 0.0;
    for (int c = 0; c <= n - 2; ++c) p1 += binomial(n - 2, c) * st.omega(n - 2 - c, c + 1);
    out.marginal_defect = std::abs(p1 - st.s[1]);
  }
  return out;
}

}  // namespace

double symmetric_pgm_success(const DensityOperator& rho_ra, const Dims& dims, const DensityOperator& sigma_a, int n,
                             const FamilySpec& family) {
  if (dims.size() != 2 || product_of(dims) != rho_ra.dim() || dims[1] != 2 || sigma_a.dim() != 2)
    throw ValidationError("symmetric reduction needs a qubit A");
  if (n < 1 || n > kSymmetricMaxCopies) throw ValidationError("symmetric reduction needs 1 <= n <= 20");
  return symmetric_success(rho_ra, dims[0], sigma_a, n, family).success;
}

double Povm::completeness_defect() const {
  if (effects.empty()) return kInf;
  Matrix sum = Matrix::Zero(effects.front().dim(), effects.front().dim());
  for (const auto& e : effects) sum += e.matrix();
  return (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

Povm pgm(const std::vector<DensityOperator>& states) {
  if (states.empty()) throw ValidationError("pgm needs at least one state");
  const int d = states.front().dim();
  Matrix eta = Matrix::Zero(d, d);
  for (const auto& s : states) {
    require_same_dim(states.front(), s, "pgm");
    eta += s.matrix();
  }
  const GradedSpectrum sp = graded_eigen(hermitize(eta));
  const RealVector values = sp.values.cast<double>();
  const Matrix vectors = sp.vectors.cast<Complex>();
  const double cut = decoding_cutoff(values);
  RealVector ihv(d), ker(d);
  for (int i = 0; i < d; ++i) {
    ihv(i) = values(i) > cut ? 1.0 / std::sqrt(values(i)) : 0.0;
    ker(i) = values(i) > cut ? 0.0 : 1.0;
  }
  const Matrix ih = vectors * ihv.cast<Complex>().asDiagonal() * vectors.adjoint();
  const Matrix kernel = vectors * ker.cast<Complex>().asDiagonal() * vectors.adjoint();
  Povm out;
  for (size_t x = 0; x < states.size(); ++x) {
    Matrix e = ih * states[x].matrix() * ih;
    if (x == 0) e += kernel;
    out.effects.emplace_back(hermitize(e));
  }
  return out;
}

long tolerant_ceil(double x) {
  if (!(x < 9e18)) throw ValidationError("value too large to round to an integer count");
  const double r = std::round(x);
  const long v = std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? static_cast<long>(r)
                                                                       : static_cast<long>(std::ceil(x));
  return std::max(1L, v);
}

DecodingReport pbd_simulate(const DensityOperator& rho_ra, const Dims& dims, const DensityOperator& sigma_a,
                            double eps, const FamilySpec& family) {
  check_eps(eps, "pbd_simulate");
  if (dims.size() != 2 || product_of(dims) != rho_ra.dim()) throw ValidationError("invalid R A bipartition");
  if (sigma_a.dim() != dims[1]) throw ValidationError("sigma must act on A");
  DecodingReport rep;
  const DensityOperator rho_r(partial_trace_matrix(rho_ra.matrix(), dims, {0}));
  const DensityOperator sigma_ra = tensor(rho_r, sigma_a);
  rep.divergence_used = induced_renyi(rho_ra, sigma_ra, 2.0, eps);
  rep.hypothesis_value = d_hypothesis(rho_ra, sigma_ra, eps).value.value;
  const long huge = std::numeric_limits<long>::max();
  rep.old_n = std::isinf(rep.hypothesis_value) ? huge : tolerant_ceil(eps * std::exp2(rep.hypothesis_value));
  if (rep.divergence_used.is_infinite()) {
    rep.n = huge;
    rep.diagnostic = "induced divergence is infinite: " + rep.divergence_used.diagnostic;
    return rep;
  }
  rep.n = tolerant_ceil(rep.divergence_used.t_star);
  if (rep.n > 64) {
    rep.diagnostic = "n exceeds the dimension cap";
    return rep;
  }
  const long dense_dim = rho_ra.dim() * static_cast<long>(std::pow(static_cast<double>(dims[1]), static_cast<double>(rep.n - 1)));
  if (dims[1] == 2 && rep.n > 1 && dense_dim > kDenseDecodingDim) {
    if (rep.n > kSymmetricMaxCopies) {
      rep.diagnostic = "n exceeds the copy limit of the symmetric reduction";
      return rep;
    }
    const SymmetricDecoding sym = symmetric_success(rho_ra, dims[0], sigma_a, static_cast<int>(rep.n), family);
    rep.method = "symmetric-blocks";
    rep.success_probs.assign(static_cast<size_t>(rep.n), sym.success);
    rep.min_success = rep.mean_success = sym.success;
    rep.completeness_defect = sym.completeness_defect;
    rep.marginal_defect = sym.marginal_defect;
    rep.constructed = true;
    return rep;
  }
  // The PGM is covariant under a common unitary, so the family is built in the
  // eigenbasis of σ where its scale is carried by the diagonal.
  const Matrix& v = sigma_a.spectrum().eigenvectors;
  const Matrix rot = Eigen::kroneckerProduct(Matrix::Identity(dims[0], dims[0]), v).eval();
  const DensityOperator rho_rot(hermitize(rot.adjoint() * rho_ra.matrix() * rot));
  const DensityOperator sigma_rot(hermitize(v.adjoint() * sigma_a.matrix() * v));
  std::optional<PairwiseFamily> fam;
  try {
    const int n = static_cast<int>(rep.n);
    fam = family.kind == FamilyKind::kTensor
              ? pairwise_tensor_family(rho_rot, dims[0], dims[1], sigma_rot, n)
              : pairwise_correlated_family(rho_rot, dims[0], dims[1], sigma_rot, n, family.weight);
  } catch (const DimensionCapError& e) {
    rep.diagnostic = e.what();
    return rep;
  }
  const Povm povm = pgm(fam->members);
  rep.method = "dense";
  rep.completeness_defect = povm.completeness_defect();
  rep.marginal_defect = fam->marginal_defect();
  for (size_t x = 0; x < fam->members.size(); ++x)
    rep.success_probs.push_back(trace_product(povm.effects[x].matrix(), fam->members[x].matrix()));
  rep.min_success = *std::min_element(rep.success_probs.begin(), rep.success_probs.end());
  rep.mean_success = std::accumulate(rep.success_probs.begin(), rep.success_probs.end(), 0.0) /
                     static_cast<double>(rep.success_probs.size());
  rep.constructed = true;
  return rep;
}

double tc_upper(const Channel& channel, long m, const RealVector& p) {
  if (m < 1) throw ValidationError("tc_upper needs m >= 1");
  const CqState cq = channel.cq(p);
  const DensityOperator joint = cq.joint();
  const PositiveOperator x(
      Matrix(joint.matrix() + static_cast<double>(m - 1) * cq.product_of_marginals().matrix()));
  return 1.0 - q_alpha(joint, x, 2.0);
}

CommBound distill_lower_bound(const Channel& channel, double eps, const ChannelMiOptions& options) {
  check_eps(eps, "distill_lower_bound");
  const ChannelMutualInfo mi = channel_mutual_info(channel, 2.0, eps, options);
  CommBound b;
  b.epsilon = eps;
  b.best_p = mi.best_p;
  b.induced_value = mi.value;
  b.t_star = std::exp2(mi.value);
  const double ratio = eps / (1.0 - eps);
  b.floor_bits = std::log2(1.0 + std::floor(ratio * b.t_star));
  b.direct_floor_bits = std::log2(1.0 + std::floor(b.t_star));
  b.bound_bits = b.induced_value + std::log2(ratio);
  b.main_text_bits = b.induced_value;
  const long top = std::min<long>(64, std::max<long>(4, static_cast<long>(std::floor(b.t_star)) + 3));
  for (long m = 1; m <= top; ++m) b.tc_upper_curve.emplace_back(m, tc_upper(channel, m, b.best_p));
  return b;
}

BruteForceTc brute_force_tc(const ClassicalChannel& channel, long m) {
  if (m < 1) throw ValidationError("brute_force_tc needs m >= 1");
  const int k = channel.input_size();
  if (std::pow(static_cast<double>(k), static_cast<double>(m)) > static_cast<double>(kMaxCodebooks))
    throw ValidationError("codebook enumeration too large: k^m exceeds 1e5");
  const Eigen::MatrixXd& w = channel.w();
  BruteForceTc out;
  double best = -1.0;
  for_each_sorted_codebook(k, m, [&](const std::vector<int>& code) {
    double s = 0.0;
    for (int y = 0; y < w.cols(); ++y) {
      double top = 0.0;
      for (int x : code) top = std::max(top, w(x, y));
      s += top;
    }
    if (s > best + 1e-15) {
      best = s;
      out.codebook = code;
    }
  });
  out.success = map_success(w, out.codebook);
  out.tc = 1.0 - best / static_cast<double>(m);
  return out;
}

ExpurgationReport expurgate_check(const ClassicalChannel& channel, long m) {
  if (m < 2) throw ValidationError("expurgation needs m >= 2");
  const BruteForceTc bf = brute_force_tc(channel, m);
  std::vector<double> s = bf.success;
  std::sort(s.begin(), s.end(), std::greater<>());
  ExpurgationReport r;
  r.m = m;
  r.average_error = bf.tc;
  r.max_error_half = 1.0 - s[static_cast<size_t>(m / 2 - 1)];
  r.holds = r.max_error_half <= 2.0 * r.average_error + 1e-12;
  return r;
}

ConvexSplitReport convex_split_check(const DensityOperator& rho, const Dims& dims, const DensityOperator& sigma,
                                     int n) {
  if (dims.size() != 2 || product_of(dims) != rho.dim()) throw ValidationError("invalid (RB) B' bipartition");
  const PairwiseFamily fam = pairwise_tensor_family(rho, dims[0], dims[1], sigma, n);
  Matrix mix = Matrix::Zero(fam.members.front().dim(), fam.members.front().dim());
  for (const auto& m : fam.members) mix += m.matrix();
  const DensityOperator tau(hermitize(mix / static_cast<double>(n)));
  const DensityOperator rho_rb(partial_trace_matrix(rho.matrix(), dims, {0}));
  const DensityOperator omega = tensor(rho_rb, tensor_power(sigma, n));
  ConvexSplitReport r;
  r.n = n;
  r.mu = q_alpha(rho, tensor(rho_rb, sigma), 2.0) - 1.0;
  r.epsilon_n = std::isinf(r.mu) ? 1.0 : std::sqrt(std::max(0.0, r.mu) / (std::max(0.0, r.mu) + n));
  r.actual_p = fidelity_and_purified(tau, omega).purified_distance;
  r.q2_mixture = q_alpha(tau, omega, 2.0);
  return r;
}

double delta_prime(double eps, double delta0, double delta1) {
  return eps - std::sqrt(2.0 * (delta0 + delta1)) - std::sqrt(2.0 * delta0);
}

EqsrBound eqsr_cost_bound(const DensityOperator& rho, const Dims& dims, double eps, double delta0, double delta1) {
  check_eps(eps, "eqsr_cost_bound");
  if (dims.size() != 3 || product_of(dims) != rho.dim()) throw ValidationError("invalid A A' B partition");
  if (!(delta0 > 0.0 && delta0 < 1.0 && delta1 > 0.0 && delta1 < 1.0))
    throw ValidationError("delta0 and delta1 must lie in (0, 1)");
  EqsrBound b;
  b.epsilon = eps;
  b.delta0 = delta0;
  b.delta1 = delta1;
  b.delta_prime = delta_prime(eps, delta0, delta1);
  if (!(b.delta_prime > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "infeasible parameters: delta' = eps - sqrt(2(delta0+delta1)) - sqrt(2 delta0) = " << b.delta_prime
        << " must be > 0";
    throw InfeasibleError(msg.str());
  }
  const Purification pur = purify(rho);
  b.dim_r = pur.dims[0];
  const Dims full{pur.dims[0], dims[0], dims[1], dims[2]};
  check_dimension_cap(product_of(full), "eqsr purification");
  const DensityOperator rho_rab(partial_trace_matrix(pur.state.matrix(), full, {0, 2, 3}));
  b.cond_mi = cond_mutual_info(rho_rab, {pur.dims[0], dims[1], dims[2]}, delta0, delta1);
  b.q_bound = 0.5 * b.cond_mi.value + std::log2(1.0 / b.delta_prime);
  return b;
}

}  // namespace qdiv
