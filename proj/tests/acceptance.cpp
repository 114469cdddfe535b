// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the qdiv binary.

#include "qdiv/protocols.hpp"
#include "qdiv/verify.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace qdiv;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

int pick(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct Pair {
  DensityOperator rho;
  DensityOperator sigma;
};

// Qubit or qutrit pair; rho of random rank, sigma of full rank.
Pair random_pair(Rng& rng) {
  const int d = pick(rng, 2, 3);
  DensityOperator rho = random_density(d, pick(rng, 1, d), rng);
  DensityOperator sigma = random_density(d, d, rng);
  return {std::move(rho), std::move(sigma)};
}

struct Captured {
  int exit_code = -1;
  std::string out;
};

Captured run(const std::string& cmd) {
  Captured c;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return c;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, n);
  const int status = pclose(p);
  c.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

Outcome normalization() {
  Outcome o;
  const DensityOperator k0 = DensityOperator::basis_state(2, 0);
  const DensityOperator half = DensityOperator::maximally_mixed(2);
  double worst = 0.0;
  for (const Alpha& a : {Alpha(0.0), Alpha(0.5), Alpha(1.0), Alpha(2.0), Alpha::infinity()})
    worst = std::max(worst, std::abs(d_alpha(k0, half, a).value - 1.0));
  for (int m = 2; m <= 8; ++m)
    worst = std::max(worst, std::abs(d_min(DensityOperator::basis_state(m, 0), DensityOperator::maximally_mixed(m)).value -
                                     std::log2(static_cast<double>(m))));
  o.pass = worst <= 1e-10;
  o.detail = "max deviation " + fmt(worst);
  return o;
}

Outcome self_induced() {
  Rng rng(mix_seed(kSeed, 2));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Pair p = random_pair(rng);
    const double dmin = d_min(p.rho, p.sigma).value;
    const double dmax = d_max(p.rho, p.sigma).value;
    for (double eps : {0.1, 0.5, 0.9}) {
      worst = std::max(worst, std::abs(induced(ParentDivergence::min(), p.rho, p.sigma, eps).normalized - dmin));
      worst = std::max(worst, std::abs(induced(ParentDivergence::max(), p.rho, p.sigma, eps).normalized - dmax));
    }
  }
  return {worst <= 1e-8, "200 pairs x 3 eps, max deviation " + fmt(worst)};
}

Outcome inequality_web() {
  Outcome o;
  std::ostringstream d;
  for (const char* suite : {"induced-web", "lemma2", "cheng"}) {
    const VerifyResult r = run_verify(suite, {500, kSeed, 1});
    const SuiteSummary& s = r.summaries.front();
    d << suite << " " << s.assertions - s.failures << "/" << s.assertions << "  ";
    if (!r.all_pass()) o.pass = false;
  }
  o.detail = d.str() + "(500 instances each)";
  return o;
}

Outcome limit_proxies() {
  Rng rng(mix_seed(kSeed, 4));
  int bad_near_one = 0, bad_small = 0;
  double worst_near_one = 0.0, worst_small = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Pair p = random_pair(rng);
    const double g1 = std::abs(induced_renyi(p.rho, p.sigma, 2.0, 0.999).normalized - d_alpha(p.rho, p.sigma, 2.0).value);
    worst_near_one = std::max(worst_near_one, g1);
    if (!(g1 <= 2e-2)) ++bad_near_one;
    const double dmin = d_min(p.rho, p.sigma).value;
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
      const double g = std::abs(induced_renyi(p.rho, p.sigma, a, 1e-4).normalized - dmin);
      worst_small = std::max(worst_small, g);
      if (!(g <= 5e-2)) ++bad_small;
    }
  }
  return {bad_near_one == 0 && bad_small == 0,
          "eps=0.999: " + std::to_string(bad_near_one) + "/100 over 2e-2 (max " + fmt(worst_near_one) +
              "); eps=1e-4: " + std::to_string(bad_small) + "/400 over 5e-2 (max " + fmt(worst_small) + ")"};
}

Outcome equipartition() {
  Rng rng(mix_seed(kSeed, 5));
  int monotone = 0;
  bool end_below_start = true;
  for (int i = 0; i < 20; ++i) {
    const double p = 0.1 + 0.8 * rng.uniform();
    const double q = 0.1 + 0.8 * rng.uniform();
    const DensityOperator rho = DensityOperator::diagonal(std::vector<double>{p, 1 - p});
    const DensityOperator sigma = DensityOperator::diagonal(std::vector<double>{q, 1 - q});
    const double d = d_umegaki(rho, sigma).value;
    std::vector<double> gaps;
    for (int n = 1; n <= 6; ++n)
      gaps.push_back(std::abs(induced_renyi(tensor_power(rho, n), tensor_power(sigma, n), 2.0, 0.3).raw / n - d));
    bool mono = true;
    for (size_t k = 0; k + 1 < gaps.size(); ++k) mono = mono && gaps[k + 1] <= gaps[k] + 1e-9;
    monotone += mono ? 1 : 0;
    end_below_start = end_below_start && gaps.back() <= gaps.front();
  }
  return {end_below_start && monotone >= 18,
          "gap(6) <= gap(1) in all: " + std::string(end_below_start ? "yes" : "no") + ", nonincreasing in " +
              std::to_string(monotone) + "/20"};
}

Outcome decoding() {
  Rng rng(mix_seed(kSeed, 6));
  int ok = 0;
  double worst = kInf;
  long largest_n = 0;
  for (int i = 0; i < 20; ++i) {
    const DensityOperator rho = random_density(4, pick(rng, 1, 4), rng);
    const DensityOperator sigma = random_density(2, 2, rng);
    const double eps = i % 2 == 0 ? 0.3 : 0.5;
    const DecodingReport r = pbd_simulate(rho, {2, 2}, sigma, eps);
    largest_n = std::max(largest_n, r.n);
    if (!r.constructed) continue;
    worst = std::min(worst, r.min_success - (1.0 - eps));
    if (r.min_success >= 1.0 - eps - 1e-8 && r.n <= r.old_n) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 instances, smallest slack " + fmt(worst) + ", largest n " +
                        std::to_string(largest_n)};
}

Outcome communication() {
  Rng rng(mix_seed(kSeed, 7));
  int checked = 0, violations = 0;
  long largest_m = 0;
  std::vector<Eigen::MatrixXd> channels;
  for (int i = 0; i < 6; ++i) {
    const int k = 2 + i % 2;
    const int out = pick(rng, 2, 3);
    Eigen::MatrixXd w(k, out);
    for (int x = 0; x < k; ++x) w.row(x) = random_probability(out, rng).transpose();
    channels.push_back(w);
  }
  // informative channels, whose floors reach m >= 2
  channels.push_back(Eigen::MatrixXd::Identity(2, 2));
  channels.push_back(Eigen::MatrixXd::Identity(3, 3));
  Eigen::MatrixXd bsc(2, 2);
  bsc << 0.97, 0.03, 0.03, 0.97;
  channels.push_back(bsc);
  Eigen::MatrixXd tern(3, 3);
  tern << 0.9, 0.05, 0.05, 0.05, 0.9, 0.05, 0.05, 0.05, 0.9;
  channels.push_back(tern);
  for (const auto& w : channels) {
    const ClassicalChannel cc(w);
    for (double eps : {0.2, 0.4}) {
      const CommBound b = distill_lower_bound(cc.to_channel(), eps);
      const double bits = std::max(b.floor_bits, b.direct_floor_bits);
      for (long m = 1; std::log2(static_cast<double>(m)) <= bits + 1e-12; ++m) {
        ++checked;
        largest_m = std::max(largest_m, m);
        if (!(brute_force_tc(cc, m).tc <= eps + 1e-9)) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(channels.size()) + " channels x 2 eps, " + std::to_string(checked) + " (channel, eps, m) checks, " +
                               std::to_string(violations) + " violations, largest m " + std::to_string(largest_m)};
}

Outcome convex_split() {
  Rng rng(mix_seed(kSeed, 8));
  int ok = 0;
  double slack = kInf;
  for (int i = 0; i < 10; ++i) {
    const int rb = i % 2 == 0 ? 2 : 4;
    const DensityOperator ext = random_density(2 * rb, pick(rng, 1, 2 * rb), rng);
    const DensityOperator sigma = random_density(2, 2, rng);
    for (int n = 1; n <= 5; ++n) {
      const ConvexSplitReport r = convex_split_check(ext, {rb, 2}, sigma, n);
      slack = std::min(slack, r.epsilon_n - r.actual_p);
      if (r.actual_p <= r.epsilon_n + 1e-8) ++ok;
    }
  }
  return {ok == 50, std::to_string(ok) + "/50 cases, smallest slack " + fmt(slack)};
}

Outcome redistribution(const std::string& cli, const std::filesystem::path& dir) {
  Rng rng(mix_seed(kSeed, 9));
  int ok = 0;
  double worst = 0.0;
  DensityOperator last = DensityOperator::maximally_mixed(8);
  for (int i = 0; i < 10; ++i) {
    last = random_density(8, pick(rng, 1, 8), rng);
    const EqsrBound b = eqsr_cost_bound(last, {2, 2, 2}, 0.5, 0.005, 0.005);
    const double again = 0.5 * (b.cond_mi.smoothed_term.value - b.cond_mi.induced_term) +
                         std::log2(1.0 / (0.5 - std::sqrt(2.0 * 0.01) - std::sqrt(2.0 * 0.005)));
    const double err = std::abs(again - b.q_bound);
    worst = std::max(worst, err);
    if (std::isfinite(b.q_bound) && err <= 1e-12) ++ok;
  }
  const std::filesystem::path state = dir / "three_qubits.json";
  save_state(last, {2, 2, 2}, state);
  const Captured c = run(cli + " qsr --state " + state.string() + " --eps 0.3 --delta0 0.05 --delta1 0.05");
  return {ok == 10 && c.exit_code == 2, std::to_string(ok) + "/10 assembled within 1e-12 (max " + fmt(worst) +
                                            "), infeasible parameters exit " + std::to_string(c.exit_code)};
}

Outcome determinism(const std::string& cli) {
  const std::string cmd = cli + " verify --suite all --instances 5 --seed 7";
  const Captured a = run(cmd);
  const Captured b = run(cmd);
  const bool same = !a.out.empty() && a.out == b.out;
  return {same, std::to_string(a.out.size()) + " bytes, identical: " + (same ? "yes" : "no") + ", exit codes " +
                    std::to_string(a.exit_code) + " " + std::to_string(b.exit_code)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path to qdiv>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("qdiv-acceptance-" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"normalization", 1, normalization},
      {"self-induced min and max", 10, self_induced},
      {"inequality web", 120, inequality_web},
      {"limit proxies", 60, limit_proxies},
      {"equipartition trend", 60, equipartition},
      {"position-based decoding", 120, decoding},
      {"one-shot communication vs brute force", 60, communication},
      {"convex split", 120, convex_split},
      {"redistribution bound plumbing", 60, [&] { return redistribution(cli, dir); }},
      {"determinism", 300, [&] { return determinism(cli); }},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= criteria[i].budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %zu %s: %s  %s  [%.2f s of %.0f s]\n", i + 1, criteria[i].name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, criteria[i].budget_s);
    std::fflush(stdout);
  }
  std::filesystem::remove_all(dir);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
