#pragma once

// Seeded property suites. Each suite draws N random instances and records one
// row per checked relation.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qdiv {

struct AssertionRecord {
  std::string suite;
  std::string assertion;
  int instance = 0;
  std::uint64_t seed = 0;  // seed of the instance generator
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // slack left after the tolerance, >= 0 on pass
  bool pass = false;
};

struct InstanceRepro {
  std::string suite;
  int instance = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // name -> state/channel JSON
  std::vector<std::string> failed;
};

struct VerifyOptions {
  int instances = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct SuiteSummary {
  std::string suite;
  int assertions = 0;
  int failures = 0;
};

struct VerifyResult {
  std::vector<AssertionRecord> records;
  std::vector<SuiteSummary> summaries;
  std::vector<InstanceRepro> failures;

  bool all_pass() const { return failures.empty(); }
};

/// lemma1, lemma2, cheng, induced-web, pbd, comm, qsr
const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);

/// Runs `suite` ("all" runs every suite in order). Instances are spread over
/// `jobs` threads; results are assembled in instance order, so the output does
/// not depend on the thread count.
VerifyResult run_verify(const std::string& suite, const VerifyOptions& options);

/// Per-instance generator seed.
std::uint64_t instance_seed(const std::string& suite, std::uint64_t seed, int instance);

std::string repro_to_json(const InstanceRepro& repro);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);

}  // namespace qdiv
