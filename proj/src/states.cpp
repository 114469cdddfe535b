#include "qdiv/states.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qdiv {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix ginibre(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re, im);
    }
  return g;
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return splitmix_finalize(state_);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

Rng Rng::split(std::uint64_t stream) const {
  const std::uint64_t s = mix_seed(seed_origin_, stream);
  return Rng(s, s);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix_finalize(seed ^ splitmix_finalize(stream + 0x632be59bd9b4e019ULL));
}

DensityOperator random_density(int dim, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rank, rng);
}

DensityOperator random_density(int dim, int rank, Rng& rng) {
  if (dim < 1) throw ValidationError("random_density: dim must be positive");
  if (rank < 1 || rank > dim) throw ValidationError("random_density: rank must lie in [1, dim]");
  const Matrix g = ginibre(dim, rank, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator(std::move(m));
}

Matrix random_unitary(int dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

RealVector random_probability(int k, Rng& rng) {
  if (k < 1) throw ValidationError("random_probability: k must be positive");
  RealVector p(k);
  for (int i = 0; i < k; ++i) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    p(i) = -std::log(u);
  }
  return p / p.sum();
}

PositiveOperator random_positive(int dim, int rank, double max_trace, Rng& rng) {
  const DensityOperator rho = random_density(dim, rank, rng);
  const double t = max_trace * (0.05 + 0.95 * rng.uniform());
  return rho.scaled(t);
}

// --- channels ----------------------------------------------------------------

IsometricChannel::IsometricChannel(Matrix isometry, int out_dim, int env_dim)
    : isometry_(std::move(isometry)), out_dim_(out_dim), env_dim_(env_dim) {
  if (isometry_.rows() != static_cast<long>(out_dim) * env_dim)
    throw ValidationError("isometry rows must equal out_dim * env_dim");
  const Matrix gram = isometry_.adjoint() * isometry_;
  if ((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > tol::kRecon)
    throw ValidationError("matrix is not an isometry");
}

IsometricChannel IsometricChannel::random(int in_dim, int out_dim, int env_dim, Rng& rng) {
  const int big = out_dim * env_dim;
  if (big < in_dim) throw ValidationError("isometry needs out_dim * env_dim >= in_dim");
  const Matrix u = random_unitary(big, rng);
  return IsometricChannel(u.leftCols(in_dim), out_dim, env_dim);
}

PositiveOperator IsometricChannel::apply(const PositiveOperator& x) const {
  if (x.dim() != in_dim()) throw ValidationError("channel input dimension mismatch");
  const Matrix big = isometry_ * x.matrix() * isometry_.adjoint();
  Matrix out = partial_trace_matrix(big, {out_dim_, env_dim_}, {0});
  out = 0.5 * (out + out.adjoint()).eval();
  return PositiveOperator(std::move(out));
}

DensityOperator IsometricChannel::apply(const DensityOperator& x) const {
  return DensityOperator(apply(static_cast<const PositiveOperator&>(x)));
}

CqState::CqState(RealVector probs, std::vector<DensityOperator> outputs)
    : probs_(std::move(probs)), outputs_(std::move(outputs)) {
  if (probs_.size() == 0 || probs_.size() != static_cast<long>(outputs_.size()))
    throw ValidationError("cq_state: probability vector and output list lengths differ");
  if (probs_.minCoeff() < -tol::kTrace) throw ValidationError("cq_state: negative probability");
  if (std::abs(probs_.sum() - 1.0) > tol::kTrace) throw ValidationError("cq_state: probabilities do not sum to 1");
  probs_ = probs_.cwiseMax(0.0);
  for (const auto& o : outputs_)
    if (o.dim() != outputs_.front().dim()) throw ValidationError("cq_state: outputs have different dimensions");
}

DensityOperator CqState::joint() const {
  const int d = output_dim();
  Matrix m = Matrix::Zero(k() * d, k() * d);
  for (int x = 0; x < k(); ++x) m.block(x * d, x * d, d, d) = probs_(x) * outputs_[x].matrix();
  return DensityOperator(std::move(m));
}

DensityOperator CqState::marginal_x() const {
  return DensityOperator::diagonal(std::span<const double>(probs_.data(), static_cast<size_t>(k())));
}

DensityOperator CqState::marginal_b() const {
  Matrix m = Matrix::Zero(output_dim(), output_dim());
  for (int x = 0; x < k(); ++x) m += probs_(x) * outputs_[x].matrix();
  return DensityOperator(std::move(m));
}

DensityOperator CqState::product_of_marginals() const { return tensor(marginal_x(), marginal_b()); }

CqState cq_state(const RealVector& p, const std::vector<DensityOperator>& outputs) { return CqState(p, outputs); }

Channel::Channel(std::vector<DensityOperator> outputs) : outputs_(std::move(outputs)) {
  if (outputs_.empty()) throw ValidationError("channel needs at least one input symbol");
  for (const auto& o : outputs_)
    if (o.dim() != outputs_.front().dim()) throw ValidationError("channel outputs have different dimensions");
}

Channel Channel::permuted(const std::vector<int>& perm) const {
  if (perm.size() != outputs_.size()) throw ValidationError("permutation length mismatch");
  std::vector<DensityOperator> out;
  out.reserve(perm.size());
  for (int p : perm) out.push_back(outputs_.at(static_cast<size_t>(p)));
  return Channel(std::move(out));
}

Channel Channel::post_processed(const IsometricChannel& e) const {
  std::vector<DensityOperator> out;
  out.reserve(outputs_.size());
  for (const auto& o : outputs_) out.push_back(e.apply(o));
  return Channel(std::move(out));
}

ClassicalChannel::ClassicalChannel(Eigen::MatrixXd w) : w_(std::move(w)) {
  if (w_.rows() == 0 || w_.cols() == 0) throw ValidationError("classical channel is empty");
  if (w_.minCoeff() < 0.0) throw ValidationError("classical channel has negative entries");
  for (int x = 0; x < w_.rows(); ++x)
    if (std::abs(w_.row(x).sum() - 1.0) > tol::kTrace) throw ValidationError("classical channel rows must sum to 1");
}

ClassicalChannel ClassicalChannel::from_channel(const Channel& ch) {
  Eigen::MatrixXd w(ch.input_size(), ch.output_dim());
  for (int x = 0; x < ch.input_size(); ++x) {
    const Matrix& m = ch.outputs()[x].matrix();
    const Matrix off = m - Matrix(m.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() > tol::kHerm) throw ValidationError("channel outputs are not diagonal");
    w.row(x) = m.diagonal().real().transpose();
  }
  return ClassicalChannel(w.cwiseMax(0.0));
}

Channel ClassicalChannel::to_channel() const {
  std::vector<DensityOperator> out;
  for (int x = 0; x < input_size(); ++x) {
    const RealVector row = w_.row(x).transpose();
    out.push_back(DensityOperator::diagonal(std::span<const double>(row.data(), static_cast<size_t>(row.size()))));
  }
  return Channel(std::move(out));
}

Purification purify(const DensityOperator& rho) {
  const SpectralDecomposition& s = rho.spectrum();
  const double cut = s.support_cutoff();
  std::vector<int> support;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i) > cut) support.push_back(i);
  const int r = static_cast<int>(support.size());
  const int d = rho.dim();
  // |psi> = sum_i sqrt(lambda_i) |i>_R ⊗ |v_i>_A
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<long>(r) * d);
  for (int j = 0; j < r; ++j) {
    const int i = support[static_cast<size_t>(j)];
    psi.segment(static_cast<long>(j) * d, d) = std::sqrt(s.eigenvalues(i)) * s.eigenvectors.col(i);
  }
  return Purification{DensityOperator::pure(psi), {r, d}};
}

// --- pairwise index-symmetric families ---------------------------------------

Dims PairwiseFamily::dims() const {
  Dims d{dim_r};
  for (int i = 0; i < n; ++i) d.push_back(dim_a);
  return d;
}

double PairwiseFamily::marginal_defect() const {
  const Dims d = dims();
  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const Matrix marginal = partial_trace_matrix(members[x].matrix(), d, {0, y + 1});
      const Matrix& target = (x == y) ? rho.matrix() : sigma.matrix();
      worst = std::max(worst, (marginal - target).cwiseAbs().maxCoeff());
    }
  return worst;
}

namespace {

void validate_family_inputs(const DensityOperator& rho_ra, int dim_r, int dim_a, const DensityOperator& sigma_a,
                            int n) {
  if (n < 1) throw ValidationError("pairwise family needs n >= 1");
  if (static_cast<long>(dim_r) * dim_a != rho_ra.dim()) throw ValidationError("rho dims do not match |R||A|");
  if (sigma_a.dim() != dim_a) throw ValidationError("sigma must act on A");
  long total = dim_r;
  for (int i = 0; i < n; ++i) {
    total *= dim_a;
    check_dimension_cap(total, "pairwise family");
  }
}

// Places rho^{R A} ⊗ omega^{A^{n-1}} so that the first A copy lands on position x.
PairwiseFamily assemble_family(const DensityOperator& rho_ra, int dim_r, int dim_a, const DensityOperator& sigma_a,
                               int n, const std::optional<DensityOperator>& omega) {
  PairwiseFamily fam{rho_ra, tensor(DensityOperator(partial_trace_matrix(rho_ra.matrix(), {dim_r, dim_a}, {0})), sigma_a),
                     dim_r, dim_a, n, {}};
  const DensityOperator base = omega ? tensor(rho_ra, *omega) : rho_ra;
  const Dims d = fam.dims();
  for (int x = 0; x < n; ++x) {
    // base order is [R, A_x, A_others...]; output position j takes input perm[j]
    std::vector<int> perm(static_cast<size_t>(n + 1));
    perm[0] = 0;
    int next = 2;
    for (int j = 0; j < n; ++j) perm[static_cast<size_t>(j + 1)] = (j == x) ? 1 : next++;
    fam.members.push_back(permute_subsystems(base, d, perm));
  }
  return fam;
}

}  // namespace

PairwiseFamily pairwise_tensor_family(const DensityOperator& rho_ra, int dim_r, int dim_a,
                                      const DensityOperator& sigma_a, int n) {
  validate_family_inputs(rho_ra, dim_r, dim_a, sigma_a, n);
  std::optional<DensityOperator> omega;
  if (n > 1) omega = tensor_power(sigma_a, n - 1);
  return assemble_family(rho_ra, dim_r, dim_a, sigma_a, n, omega);
}

PairwiseFamily pairwise_correlated_family(const DensityOperator& rho_ra, int dim_r, int dim_a,
                                          const DensityOperator& sigma_a, int n, double weight) {
  validate_family_inputs(rho_ra, dim_r, dim_a, sigma_a, n);
  if (weight < 0.0 || weight > 1.0) throw ValidationError("correlation weight must lie in [0, 1]");
  std::optional<DensityOperator> omega;
  if (n > 1) {
    const SpectralDecomposition& s = sigma_a.spectrum();
    Matrix corr = Matrix::Zero(1, 1);
    long dim = 1;
    for (int i = 0; i < n - 1; ++i) dim *= dim_a;
    corr = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim_a; ++j) {
      const double q = std::max(0.0, s.eigenvalues(j));
      if (q == 0.0) continue;
      Eigen::VectorXcd v = s.eigenvectors.col(j);
      Eigen::VectorXcd prod = v;
      for (int i = 1; i < n - 1; ++i) {
        Eigen::VectorXcd next(prod.size() * dim_a);
        for (long a = 0; a < prod.size(); ++a) next.segment(a * dim_a, dim_a) = prod(a) * v;
        prod = std::move(next);
      }
      corr += q * prod * prod.adjoint();
    }
    const Matrix prod_state = tensor_power(sigma_a, n - 1).matrix();
    omega = DensityOperator(Matrix((1.0 - weight) * prod_state + weight * corr));
  }
  return assemble_family(rho_ra, dim_r, dim_a, sigma_a, n, omega);
}

// --- files -------------------------------------------------------------------

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_state(std::string& out, const Matrix& m, const Dims& dims, const std::string& label) {
  out += "{\"dims\": [";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(dims[i]);
  }
  for (int part = 0; part < 2; ++part) {
    out += part == 0 ? "], \"re\": [" : "], \"im\": [";
    for (int r = 0; r < m.rows(); ++r) {
      if (r) out += ", ";
      out += "[";
      for (int c = 0; c < m.cols(); ++c) {
        if (c) out += ", ";
        append_number(out, part == 0 ? m(r, c).real() : m(r, c).imag());
      }
      out += "]";
    }
  }
  out += "], \"label\": ";
  out += nlohmann::json(label).dump();
  out += "}";
}

StateFile state_from_node(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("state file must be a JSON object");
  for (const char* key : {"dims", "re", "im"})
    if (!j.contains(key)) throw ValidationError(std::string("state file is missing \"") + key + "\"");
  StateFile out{Dims{}, DensityOperator::maximally_mixed(1), j.value("label", std::string())};
  try {
    out.dims = j.at("dims").get<Dims>();
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("im").get<std::vector<std::vector<double>>>();
    const long d = product_of(out.dims);
    if (static_cast<long>(re.size()) != d || static_cast<long>(im.size()) != d)
      throw ValidationError("state file matrix shape does not match dims");
    Matrix m(d, d);
    for (long r = 0; r < d; ++r) {
      if (static_cast<long>(re[r].size()) != d || static_cast<long>(im[r].size()) != d)
        throw ValidationError("state file matrix is not square");
      for (long c = 0; c < d; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
    }
    out.state = DensityOperator(std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed state file: ") + e.what());
  }
  return out;
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string() + " for writing");
  f << text;
}

}  // namespace

std::string state_to_json(const DensityOperator& rho, const Dims& dims, const std::string& label) {
  if (product_of(dims) != rho.dim()) throw ValidationError("dims do not match operator dimension");
  std::string out;
  append_state(out, rho.matrix(), dims, label);
  out += "\n";
  return out;
}

std::string channel_to_json(const Channel& ch, const std::string& label) {
  std::string out = "{\"k\": " + std::to_string(ch.input_size()) + ", \"label\": " + nlohmann::json(label).dump() +
                    ", \"outputs\": [\n";
  for (int x = 0; x < ch.input_size(); ++x) {
    out += "  ";
    append_state(out, ch.outputs()[x].matrix(), {ch.output_dim()}, "");
    out += x + 1 < ch.input_size() ? ",\n" : "\n";
  }
  out += "]}\n";
  return out;
}

StateFile state_from_json(const std::string& text) { return state_from_node(parse_json(text)); }

Channel channel_from_json(const std::string& text) {
  const nlohmann::json j = parse_json(text);
  if (!j.is_object() || !j.contains("k") || !j.contains("outputs") || !j.at("outputs").is_array())
    throw ValidationError("channel file needs \"k\" and an \"outputs\" array");
  const int k = j.at("k").get<int>();
  if (k < 1 || static_cast<int>(j.at("outputs").size()) != k)
    throw ValidationError("channel file: \"k\" does not match the number of outputs");
  std::vector<DensityOperator> outs;
  for (const auto& node : j.at("outputs")) outs.push_back(state_from_node(node).state);
  return Channel(std::move(outs));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void save_state(const DensityOperator& rho, const Dims& dims, const std::filesystem::path& path,
                const std::string& label) {
  write_text_file(path, state_to_json(rho, dims, label));
}

StateFile load_state(const std::filesystem::path& path) { return state_from_json(read_text_file(path)); }

void save_channel(const Channel& ch, const std::filesystem::path& path, const std::string& label) {
  write_text_file(path, channel_to_json(ch, label));
}

Channel load_channel(const std::filesystem::path& path) { return channel_from_json(read_text_file(path)); }

}  // namespace qdiv
