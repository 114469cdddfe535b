#include "qdiv/verify.hpp"

#include "qdiv/protocols.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace qdiv {

namespace {

class Recorder {
 public:
  Recorder(std::string suite, int instance, std::uint64_t seed) {
    repro_.suite = std::move(suite);
    repro_.instance = instance;
    repro_.seed = seed;
  }

  // lhs <= rhs + tol
  void at_most(const std::string& name, double lhs, double rhs, double tol) {
    double margin = rhs + tol - lhs;
    if (std::isnan(margin) && lhs == rhs) margin = tol;
    push(name, lhs, rhs, margin);
  }

  // |lhs - rhs| <= tol
  void close(const std::string& name, double lhs, double rhs, double tol) {
    double margin = tol - std::abs(lhs - rhs);
    if (std::isnan(margin) && lhs == rhs) margin = tol;
    push(name, lhs, rhs, margin);
  }

  void holds(const std::string& name, bool ok) { push(name, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0); }

  void input(const std::string& name, std::string json) { repro_.inputs.emplace_back(name, std::move(json)); }

  std::vector<AssertionRecord>& records() { return records_; }
  InstanceRepro& repro() { return repro_; }

 private:
  void push(const std::string& name, double lhs, double rhs, double margin) {
    AssertionRecord r;
    r.suite = repro_.suite;
    r.assertion = name;
    r.instance = repro_.instance;
    r.seed = repro_.seed;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = margin;
    r.pass = margin >= 0.0;
    if (!r.pass) repro_.failed.push_back(name);
    records_.push_back(std::move(r));
  }

  std::vector<AssertionRecord> records_;
  InstanceRepro repro_;
};

int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1)); }

std::string alpha_tag(double a) {
  std::ostringstream s;
  s << "alpha=" << a;
  return s.str();
}

std::string state_json(const PositiveOperator& x) {
  const Matrix m = x.matrix() / x.trace();
  return state_to_json(DensityOperator(m), {x.dim()});
}

// --- suites -------------------------------------------------------------------

void lemma1(Recorder& rec, Rng& rng) {
  const int d = pick(rng, 2, 3);
  const DensityOperator rho = random_density(d, pick(rng, 1, d), rng);
  const PositiveOperator sigma = random_positive(d, d, 2.0, rng);
  const double t = 4.0 * (1.0 - rng.uniform());
  const PositiveOperator bigger = sigma + random_positive(d, pick(rng, 1, d), 1.0, rng);
  rec.input("rho", state_to_json(rho, {d}));
  rec.input("sigma_normalized", state_json(sigma));

  const PositiveOperator ts = sigma.scaled(t);
  auto scaling = [&](const std::string& name, auto&& f) {
    const double base = f(sigma);
    rec.close("scaling:" + name, f(ts), base - std::log2(t), 1e-8 * std::max(1.0, std::abs(base)));
  };
  scaling("min", [&](const PositiveOperator& s) { return d_min(rho, s).value; });
  scaling("max", [&](const PositiveOperator& s) { return d_max(rho, s).value; });
  scaling("umegaki", [&](const PositiveOperator& s) { return d_umegaki(rho, s).value; });
  for (double a : {0.5, 0.75, 2.0, 3.0})
    scaling(alpha_tag(a), [&](const PositiveOperator& s) { return d_alpha(rho, s, a).value; });

  for (const Alpha& a : {Alpha(0.0), Alpha(0.5), Alpha(1.0), Alpha(2.0), Alpha::infinity()})
    rec.at_most("lowner:alpha=" + a.str(), d_alpha(rho, bigger, a).value, d_alpha(rho, sigma, a).value, 1e-9);
}

void lemma2(Recorder& rec, Rng& rng) {
  const int d = pick(rng, 2, 3);
  const PositiveOperator rho = random_positive(d, pick(rng, 1, d), 2.0, rng);
  const PositiveOperator sigma = random_positive(d, pick(rng, 1, d), 2.0, rng);
  rec.input("rho_normalized", state_json(rho));
  rec.input("sigma_normalized", state_json(sigma));
  const PositiveOperator lam = rho + sigma;
  const double pos = positive_part_trace(rho - sigma);
  rec.at_most("positive-part:alpha=0", pos, trace_product(lam.matrix(), support_projector(rho).projector.matrix()),
              1e-6);
  for (double a : {0.5, 0.999, 1.5, 2.0}) rec.at_most("positive-part:" + alpha_tag(a), pos, q_alpha(rho, lam, a), 1e-6);
}

void cheng(Recorder& rec, Rng& rng) {
  const int d = pick(rng, 2, 3);
  const PositiveOperator rho = random_positive(d, pick(rng, 1, d), 2.0, rng);
  const PositiveOperator sigma = random_positive(d, pick(rng, 1, d), 2.0, rng);
  rec.input("rho_normalized", state_json(rho));
  rec.input("sigma_normalized", state_json(sigma));
  const Matrix li = power(rho + sigma, -0.5).matrix();
  rec.at_most("meet", trace_product(rho.matrix(), li * sigma.matrix() * li), op_meet(rho, sigma).trace(), 1e-6);

  const DensityOperator r = random_density(d, pick(rng, 1, d), rng);
  const DensityOperator s = random_density(d, d, rng);
  rec.input("rho_density", state_to_json(r, {d}));
  rec.input("sigma_density", state_to_json(s, {d}));
  const double p = fidelity_and_purified(r, s).purified_distance;
  rec.at_most("collision-purified", -std::log2(1.0 - p * p), d_alpha(r, s, 2.0).value, 1e-6);
}

void induced_web(Recorder& rec, Rng& rng) {
  const int d = pick(rng, 2, 3);
  const DensityOperator rho = random_density(d, pick(rng, 1, d), rng);
  const DensityOperator sigma = random_density(d, d, rng);
  const double eps = 0.05 + 0.9 * rng.uniform();
  rec.input("rho", state_to_json(rho, {d}));
  rec.input("sigma", state_to_json(sigma, {d}));

  const double dmin = d_min(rho, sigma).value;
  const double dmax = d_max(rho, sigma).value;
  const double dh = d_hypothesis(rho, sigma, eps).value.value;

  std::vector<double> ordered;
  for (double a : {0.0, 0.5, 1.0, 2.0}) {
    const InducedResult r = induced_renyi(rho, sigma, a, eps);
    ordered.push_back(r.raw);
    rec.at_most("induced-below-hypothesis:" + alpha_tag(a), r.raw, dh + std::log2(eps), 1e-6);
  }
  for (size_t k = 0; k + 1 < ordered.size(); ++k) rec.at_most("parent-order", ordered[k], ordered[k + 1], 1e-9);

  for (double a : {1.5, 2.0}) {
    const double raw = induced_renyi(rho, sigma, a, eps).raw;
    const double mu = 1.0 - std::pow(1.0 - eps, a - 1.0);
    rec.at_most("induced-above-spectrum:" + alpha_tag(a), d_tilde_max(rho, sigma, 1.0 - mu).value, raw, 1e-6);
    const double delta = mu * rng.uniform();
    const double h = delta == 0.0 ? dmin : d_hypothesis(rho, sigma, delta).value.value;
    rec.at_most("induced-above-shifted-hypothesis:" + alpha_tag(a), h + std::log2(mu - delta), raw, 1e-6);
  }

  for (const ParentDivergence& p : {ParentDivergence::renyi(0.5), ParentDivergence::umegaki(),
                                    ParentDivergence::renyi(2.0), ParentDivergence::max()}) {
    const InducedResult r = induced(p, rho, sigma, eps);
    rec.at_most("min-sandwich:" + p.name(), dmin, r.normalized, 1e-8);
    rec.at_most("max-sandwich:" + p.name(), r.normalized, dmax, 1e-8);
    rec.at_most("parent-plus-log-inv-eps:" + p.name(), r.normalized, p.evaluate(rho, sigma) + std::log2(1.0 / eps), 1e-6);
  }

  rec.close("self-induced:min", induced(ParentDivergence::min(), rho, sigma, eps).normalized, dmin, 1e-8);
  rec.close("self-induced:max", induced(ParentDivergence::max(), rho, sigma, eps).normalized, dmax, 1e-8);

  const double a12 = 0.05 + 0.9 * rng.uniform();
  const double beta = 1.0 - a12;
  const double c = std::log2(std::log(1.0 / std::pow(1.0 - eps, beta))) / beta;
  rec.at_most("pinched-lower-bound", pinched_measured_lower_bound(rho, sigma, a12).value.value + c,
              induced(ParentDivergence::umegaki(), rho, sigma, eps).raw, 1e-6);

  const IsometricChannel ch = IsometricChannel::random(d, 2, 2, rng);
  rec.at_most("dpi:renyi2", induced_renyi(ch.apply(rho), ch.apply(sigma), 2.0, eps).raw,
              induced_renyi(rho, sigma, 2.0, eps).raw, 1e-8);

  rec.close("limit:eps=0.999", induced_renyi(rho, sigma, 2.0, 0.999).normalized, d_alpha(rho, sigma, 2.0).value,
            2e-2);
}

void pbd(Recorder& rec, Rng& rng) {
  const DensityOperator rho = random_density(4, pick(rng, 1, 4), rng);
  const DensityOperator sigma = random_density(2, pick(rng, 1, 2), rng);
  const double eps = rec.repro().instance % 2 == 0 ? 0.3 : 0.5;
  rec.input("rho_ra", state_to_json(rho, {2, 2}));
  rec.input("sigma_a", state_to_json(sigma, {2}));
  const DecodingReport r = pbd_simulate(rho, {2, 2}, sigma, eps);
  rec.at_most("n-improvement", static_cast<double>(r.n), static_cast<double>(r.old_n), 0.0);
  if (!r.constructed) return;
  rec.at_most("pgm-success", 1.0 - eps, r.min_success, 1e-8);
  rec.close("povm-completeness", r.completeness_defect, 0.0, 1e-8);
  rec.close("family-marginals", r.marginal_defect, 0.0, 1e-10);
  rec.at_most("min-below-mean", r.min_success, r.mean_success, 1e-12);
}

void comm(Recorder& rec, Rng& rng) {
  const int k = pick(rng, 2, 3);
  const int out = pick(rng, 2, 3);
  Eigen::MatrixXd w(k, out);
  for (int x = 0; x < k; ++x) w.row(x) = random_probability(out, rng).transpose();
  const double eps = rec.repro().instance % 2 == 0 ? 0.2 : 0.4;
  const ClassicalChannel cc(w);
  const Channel ch = cc.to_channel();
  rec.input("channel", channel_to_json(ch));

  const CommBound b = distill_lower_bound(ch, eps);
  rec.close("bound-bits", b.bound_bits, b.induced_value + std::log2(eps / (1.0 - eps)), 1e-9);
  auto codable = [&](long m) { return std::pow(static_cast<double>(k), static_cast<double>(m)) <= kMaxCodebooks; };
  for (long m = 1; std::log2(static_cast<double>(m)) <= b.floor_bits + 1e-12 && codable(m); ++m)
    rec.at_most("floor-form:m=" + std::to_string(m), brute_force_tc(cc, m).tc, eps, 1e-9);
  for (long m = 1; std::log2(static_cast<double>(m)) <= b.direct_floor_bits + 1e-12 && codable(m); ++m)
    rec.at_most("direct-floor:m=" + std::to_string(m), brute_force_tc(cc, m).tc, eps, 1e-9);
  for (const auto& [m, tc] : b.tc_upper_curve)
    if (m <= 8 && codable(m)) rec.at_most("tc-upper:m=" + std::to_string(m), brute_force_tc(cc, m).tc, tc, 1e-9);
  const ExpurgationReport ex = expurgate_check(cc, 4);
  rec.at_most("expurgation", ex.max_error_half, 2.0 * ex.average_error, 1e-12);
}

void qsr(Recorder& rec, Rng& rng) {
  const DensityOperator rho = random_density(8, pick(rng, 1, 8), rng);
  rec.input("rho_aab", state_to_json(rho, {2, 2, 2}));
  const double eps = 0.5, d0 = 0.005, d1 = 0.005;
  const EqsrBound b = eqsr_cost_bound(rho, {2, 2, 2}, eps, d0, d1);
  rec.holds("finite-bound", std::isfinite(b.q_bound));
  rec.close("assembly", b.q_bound,
            0.5 * (b.cond_mi.smoothed_term.value - b.cond_mi.induced_term) + std::log2(1.0 / delta_prime(eps, d0, d1)),
            1e-12);
  rec.at_most("smoothing-distance", b.cond_mi.smoothed_term.distance_used, d0, 1e-10);

  bool refused = false;
  try {
    eqsr_cost_bound(rho, {2, 2, 2}, 0.3, 0.05, 0.05);
  } catch (const InfeasibleError&) {
    refused = true;
  }
  rec.holds("infeasible-refused", refused);

  const DensityOperator ext = random_density(4, pick(rng, 1, 4), rng);
  const DensityOperator s = random_density(2, 2, rng);
  rec.input("extension", state_to_json(ext, {2, 2}));
  rec.input("sigma", state_to_json(s, {2}));
  for (int n = 1; n <= 5; ++n) {
    const ConvexSplitReport r = convex_split_check(ext, {2, 2}, s, n);
    rec.at_most("convex-split:n=" + std::to_string(n), r.actual_p, r.epsilon_n, 1e-8);
  }
}

using SuiteFn = void (*)(Recorder&, Rng&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"lemma1", lemma1}, {"lemma2", lemma2}, {"cheng", cheng}, {"induced-web", induced_web},
      {"pbd", pbd},       {"comm", comm},     {"qsr", qsr}};
  return r;
}

struct InstanceOutcome {
  std::vector<AssertionRecord> records;
  InstanceRepro repro;
};

InstanceOutcome run_instance(const std::string& suite, SuiteFn fn, std::uint64_t seed, int instance) {
  const std::uint64_t s = instance_seed(suite, seed, instance);
  Recorder rec(suite, instance, s);
  Rng rng(s);
  try {
    fn(rec, rng);
  } catch (const std::exception& e) {
    rec.holds(std::string("no-exception: ") + e.what(), false);
  }
  return {std::move(rec.records()), std::move(rec.repro())};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

bool is_suite_name(const std::string& name) {
  const auto& n = suite_names();
  return name == "all" || std::find(n.begin(), n.end(), name) != n.end();
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t instance_seed(const std::string& suite, std::uint64_t seed, int instance) {
  return mix_seed(mix_seed(seed, fnv1a(suite)), static_cast<std::uint64_t>(instance));
}

VerifyResult run_verify(const std::string& suite, const VerifyOptions& options) {
  if (!is_suite_name(suite)) throw ValidationError("unknown suite: " + suite);
  if (options.instances < 1) throw ValidationError("--instances must be positive");
  const int jobs = std::max(1, options.jobs);

  VerifyResult out;
  for (const auto& [name, fn] : registry()) {
    if (suite != "all" && suite != name) continue;
    std::vector<InstanceOutcome> slots(static_cast<size_t>(options.instances));
    std::atomic<int> next{0};
    auto worker = [&, fn = fn, name = name] {
      for (int i = next++; i < options.instances; i = next++)
        slots[static_cast<size_t>(i)] = run_instance(name, fn, options.seed, i);
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < std::min(jobs, options.instances); ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SuiteSummary summary{name, 0, 0};
    for (auto& slot : slots) {
      for (auto& r : slot.records) {
        ++summary.assertions;
        if (!r.pass) ++summary.failures;
        out.records.push_back(std::move(r));
      }
      if (!slot.repro.failed.empty()) out.failures.push_back(std::move(slot.repro));
    }
    out.summaries.push_back(summary);
  }
  return out;
}

std::string repro_to_json(const InstanceRepro& repro) {
  nlohmann::ordered_json j;
  j["suite"] = repro.suite;
  j["instance"] = repro.instance;
  j["seed"] = repro.seed;
  j["failed"] = repro.failed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, text] : repro.inputs) inputs[name] = nlohmann::ordered_json::parse(text);
  j["inputs"] = inputs;
  return j.dump(2) + "\n";
}

}  // namespace qdiv
