// qdiv: divergences, induced divergences, protocol bounds and the property suites
// from the command line. Exit codes: 0 ok, 1 invalid input, 2 infeasible
// parameters, 3 failed assertions.

#include "report.hpp"

#include "qdiv/protocols.hpp"
#include "qdiv/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

using namespace qdiv;
using namespace qdiv::cli;

namespace {

Alpha parse_alpha(const std::string& s) {
  if (s == "inf" || s == "infinity") return Alpha::infinity();
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return Alpha(v);
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse alpha: " + s);
  }
}

Json induced_json(const InducedResult& r) {
  return {{"lambda_star", num(r.lambda_star)}, {"t_star", num(r.t_star)},       {"raw", num(r.raw)},
          {"normalized", num(r.normalized)},   {"epsilon", num(r.epsilon)},     {"residual", num(r.residual)},
          {"iterations", r.iterations},        {"diagnostic", r.diagnostic}};
}

struct Common {
  std::string format = "json";
  std::string out;
};

struct DivergenceArgs {
  std::string rho, sigma, kind, alpha;
  std::optional<double> eps;
};

Report cmd_divergence(const DivergenceArgs& a) {
  const StateFile rho = load_state(a.rho);
  const StateFile sigma = load_state(a.sigma);
  require_same_dim(rho.state, sigma.state, "divergence");
  Report rep;
  rep.inputs_digest = digest({read_text_file(a.rho), read_text_file(a.sigma)});
  Json& res = rep.results;
  res["kind"] = a.kind;
  auto need_eps = [&] {
    if (!a.eps) throw ValidationError("--kind " + a.kind + " needs --eps");
    return *a.eps;
  };
  DivergenceValue v;
  if (a.kind == "renyi") {
    if (a.alpha.empty()) throw ValidationError("--kind renyi needs --alpha");
    const Alpha alpha = parse_alpha(a.alpha);
    res["alpha"] = alpha.str();
    v = d_alpha(rho.state, sigma.state, alpha);
  } else if (a.kind == "min") {
    v = d_min(rho.state, sigma.state);
  } else if (a.kind == "max") {
    v = d_max(rho.state, sigma.state);
  } else if (a.kind == "umegaki") {
    v = d_umegaki(rho.state, sigma.state);
  } else if (a.kind == "hypothesis") {
    const double eps = need_eps();
    res["epsilon"] = eps;
    const HypothesisResult h = d_hypothesis(rho.state, sigma.state, eps);
    v = h.value;
    res["test"] = {{"multiplier", num(h.test.multiplier)},
                   {"alpha_err", num(h.test.alpha_err)},
                   {"beta", num(h.test.beta)},
                   {"dual_beta", num(h.test.dual_beta)}};
  } else {
    const double eps = need_eps();
    res["epsilon"] = eps;
    v = d_tilde_max(rho.state, sigma.state, eps);
  }
  res["value"] = num(v.value);
  res["support_case"] = to_string(v.support_case);
  return rep;
}

struct InducedArgs {
  std::string rho, sigma, parent, alpha;
  double eps = 0.0;
  bool normalized = false;
};

Report cmd_induced(const InducedArgs& a) {
  const StateFile rho = load_state(a.rho);
  const StateFile sigma = load_state(a.sigma);
  require_same_dim(rho.state, sigma.state, "induced");
  ParentDivergence parent = ParentDivergence::umegaki();
  if (a.parent == "renyi") {
    if (a.alpha.empty()) throw ValidationError("--parent renyi needs --alpha");
    parent = ParentDivergence::renyi(parse_alpha(a.alpha));
  } else if (a.parent == "min") {
    parent = ParentDivergence::min();
  } else if (a.parent == "max") {
    parent = ParentDivergence::max();
  }
  const InducedResult r = induced(parent, rho.state, sigma.state, a.eps);
  Report rep;
  rep.inputs_digest = digest({read_text_file(a.rho), read_text_file(a.sigma)});
  rep.results["parent"] = parent.name();
  rep.results["value"] = num(a.normalized ? r.normalized : r.raw);
  rep.results["induced"] = induced_json(r);
  return rep;
}

struct VerifyArgs {
  std::string suite;
  int instances = 10;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string repro_dir = ".";
};

Report cmd_verify(const VerifyArgs& a, VerifyResult& holder) {
  VerifyOptions opts;
  opts.instances = a.instances;
  opts.seed = a.seed;
  opts.jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  holder = run_verify(a.suite, opts);
  Report rep;
  rep.inputs_digest = digest({a.suite, std::to_string(a.instances), std::to_string(a.seed)});
  rep.results["suite"] = a.suite;
  rep.results["instances"] = a.instances;
  rep.results["seed"] = a.seed;
  Json files = Json::array();
  for (const auto& f : holder.failures) {
    const std::filesystem::path p = std::filesystem::path(a.repro_dir) /
                                    ("repro-" + f.suite + "-" + std::to_string(f.instance) + ".json");
    std::ofstream(p) << repro_to_json(f);
    files.push_back(p.string());
  }
  rep.results["repro_files"] = files;
  rep.verify = &holder;
  rep.pass = holder.all_pass();
  return rep;
}

struct CommArgs {
  std::string channel;
  double eps = 0.0;
  bool brute_force = false;
  long m = 2;
};

Report cmd_comm(const CommArgs& a) {
  const Channel ch = load_channel(a.channel);
  const CommBound b = distill_lower_bound(ch, a.eps);
  Report rep;
  rep.inputs_digest = digest({read_text_file(a.channel)});
  Json& res = rep.results;
  res["epsilon"] = b.epsilon;
  res["best_p"] = vec(b.best_p);
  res["induced_value"] = num(b.induced_value);
  res["t_star"] = num(b.t_star);
  res["floor_bits"] = num(b.floor_bits);
  res["direct_floor_bits"] = num(b.direct_floor_bits);
  res["bound_bits"] = num(b.bound_bits);
  res["main_text_bits"] = num(b.main_text_bits);
  Json curve = Json::array();
  for (const auto& [m, tc] : b.tc_upper_curve) curve.push_back({{"m", m}, {"tc_upper", num(tc)}});
  res["tc_upper_curve"] = curve;
  if (a.brute_force) {
    const BruteForceTc bf = brute_force_tc(ClassicalChannel::from_channel(ch), a.m);
    res["brute_force"] = {{"m", a.m}, {"tc", num(bf.tc)}, {"codebook", bf.codebook}};
  }
  return rep;
}

struct QsrArgs {
  std::string state;
  double eps = 0.0, delta0 = 0.0, delta1 = 0.0;
};

Report cmd_qsr(const QsrArgs& a) {
  const StateFile f = load_state(a.state);
  if (f.dims.size() != 3) throw ValidationError("--state needs dims [|A|, |A'|, |B|]");
  const EqsrBound b = eqsr_cost_bound(f.state, f.dims, a.eps, a.delta0, a.delta1);
  Report rep;
  rep.inputs_digest = digest({read_text_file(a.state)});
  const CondMutualInfo& c = b.cond_mi;
  Json cands = Json::array();
  for (const auto& k : c.smoothed_term.candidates)
    cands.push_back({{"name", k.name}, {"distance", num(k.distance)}, {"value", num(k.value)}});
  rep.results = {{"epsilon", b.epsilon},
                 {"delta0", b.delta0},
                 {"delta1", b.delta1},
                 {"delta_prime", num(b.delta_prime)},
                 {"dim_r", b.dim_r},
                 {"cond_mi",
                  {{"smoothed_term",
                    {{"value", num(c.smoothed_term.value)},
                     {"candidate", c.smoothed_term.candidate},
                     {"distance_used", num(c.smoothed_term.distance_used)},
                     {"is_upper_bound", c.smoothed_term.is_upper_bound},
                     {"candidates", cands}}},
                   {"induced_term", num(c.induced_term)},
                   {"induced_detail", {{"value", num(c.induced_detail.value)}, {"iterations", c.induced_detail.iterations}}},
                   {"value", num(c.value)}}},
                 {"q_bound", num(b.q_bound)}};
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum divergences, induced divergences and one-shot protocol bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("--out", common.out, "write the report here instead of stdout");

  DivergenceArgs div;
  auto* c_div = app.add_subcommand("divergence", "evaluate a divergence between two state files");
  c_div->add_option("--rho", div.rho)->required()->check(CLI::ExistingFile);
  c_div->add_option("--sigma", div.sigma)->required()->check(CLI::ExistingFile);
  c_div->add_option("--kind", div.kind)
      ->required()
      ->check(CLI::IsMember({"renyi", "min", "max", "umegaki", "hypothesis", "ispec"}));
  c_div->add_option("--alpha", div.alpha, "order, or inf");
  c_div->add_option("--eps", div.eps);

  InducedArgs ind;
  auto* c_ind = app.add_subcommand("induced", "induced divergence of a parent");
  c_ind->add_option("--rho", ind.rho)->required()->check(CLI::ExistingFile);
  c_ind->add_option("--sigma", ind.sigma)->required()->check(CLI::ExistingFile);
  c_ind->add_option("--parent", ind.parent)->required()->check(CLI::IsMember({"renyi", "umegaki", "min", "max"}));
  c_ind->add_option("--alpha", ind.alpha);
  c_ind->add_option("--eps", ind.eps)->required();
  c_ind->add_flag("--normalized", ind.normalized, "report the normalized value");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "run a seeded property suite");
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  c_ver->add_option("--suite", ver.suite)->required()->check(CLI::IsMember(suites));
  c_ver->add_option("--instances", ver.instances)->check(CLI::PositiveNumber)->capture_default_str();
  c_ver->add_option("--seed", ver.seed)->capture_default_str();
  c_ver->add_option("--jobs", ver.jobs, "worker threads, default: all cores")->check(CLI::NonNegativeNumber);
  c_ver->add_option("--repro-dir", ver.repro_dir, "where failing instances are written")->capture_default_str();

  CommArgs com;
  auto* c_com = app.add_subcommand("comm", "one-shot classical communication bound for a channel file");
  c_com->add_option("--channel", com.channel)->required()->check(CLI::ExistingFile);
  c_com->add_option("--eps", com.eps)->required();
  c_com->add_flag("--brute-force", com.brute_force, "exact conversion distance by codebook enumeration");
  c_com->add_option("--m", com.m)->capture_default_str();

  QsrArgs qsr;
  auto* c_qsr = app.add_subcommand("qsr", "state redistribution cost bound for a state on A A' B");
  c_qsr->add_option("--state", qsr.state)->required()->check(CLI::ExistingFile);
  c_qsr->add_option("--eps", qsr.eps)->required();
  c_qsr->add_option("--delta0", qsr.delta0)->required();
  c_qsr->add_option("--delta1", qsr.delta1)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::string command = "qdiv";
  for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];
  const Format format =
      common.format == "csv" ? Format::kCsv : common.format == "text" ? Format::kText : Format::kJson;

  const auto start = std::chrono::steady_clock::now();
  Report rep;
  VerifyResult verify_holder;
  try {
    if (c_div->parsed()) rep = cmd_divergence(div);
    if (c_ind->parsed()) rep = cmd_induced(ind);
    if (c_ver->parsed()) rep = cmd_verify(ver, verify_holder);
    if (c_com->parsed()) rep = cmd_comm(com);
    if (c_qsr->parsed()) rep = cmd_qsr(qsr);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  rep.command = command;

  const std::string text = render(rep, format);
  if (common.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(common.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << common.out << "\n";
      return 1;
    }
    f << text;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "wall time: " << secs << " s\n";
  return rep.pass ? 0 : 3;
}
