#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qdiv::cli {

namespace {

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scalar(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return g17(j.get<double>());
  return j.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Leaves of the tree as (dotted.path, value) pairs; arrays index with [i].
void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar(j));
  }
}

Json summary_json(const VerifyResult& v) {
  Json s = Json::array();
  for (const auto& x : v.summaries)
    s.push_back({{"suite", x.suite}, {"assertions", x.assertions}, {"failures", x.failures}});
  return s;
}

}  // namespace

Json num(double v) {
  if (std::isfinite(v)) return v;
  return g17(v);
}

Json vec(const RealVector& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string digest(const std::vector<std::string>& blobs) {
  std::uint64_t h = fnv1a("");
  for (const auto& b : blobs) h = fnv1a(b + '\0', h);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::string render(const Report& report, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::kJson: {
      Json j;
      j["command"] = report.command;
      j["inputs_digest"] = report.inputs_digest;
      j["pass"] = report.pass;
      j["results"] = report.results;
      if (report.verify) {
        j["summary"] = summary_json(*report.verify);
        Json rows = Json::array();
        for (const auto& r : report.verify->records)
          rows.push_back({{"suite", r.suite},
                          {"assertion", r.assertion},
                          {"instance", r.instance},
                          {"seed", r.seed},
                          {"lhs", num(r.lhs)},
                          {"rhs", num(r.rhs)},
                          {"margin", num(r.margin)},
                          {"pass", r.pass}});
        j["assertions"] = rows;
      }
      out << j.dump(2) << "\n";
      break;
    }
    case Format::kCsv: {
      if (report.verify) {
        out << "suite,assertion,instance,seed,lhs,rhs,margin,pass\n";
        for (const auto& r : report.verify->records)
          out << csv_field(r.suite) << ',' << csv_field(r.assertion) << ',' << r.instance << ',' << r.seed << ','
              << g17(r.lhs) << ',' << g17(r.rhs) << ',' << g17(r.margin) << ',' << (r.pass ? "true" : "false")
              << "\n";
        break;
      }
      std::vector<std::pair<std::string, std::string>> rows;
      flatten(report.results, "", rows);
      out << "key,value\n";
      out << "command," << csv_field(report.command) << "\n";
      out << "inputs_digest," << report.inputs_digest << "\n";
      for (const auto& [k, v] : rows) out << csv_field(k) << ',' << csv_field(v) << "\n";
      out << "pass," << (report.pass ? "true" : "false") << "\n";
      break;
    }
    case Format::kText: {
      out << "command: " << report.command << "\n";
      out << "inputs digest: " << report.inputs_digest << "\n";
      std::vector<std::pair<std::string, std::string>> rows;
      flatten(report.results, "", rows);
      for (const auto& [k, v] : rows) out << k << ": " << v << "\n";
      if (report.verify) {
        for (const auto& s : report.verify->summaries)
          out << s.suite << ": " << s.assertions - s.failures << "/" << s.assertions << " assertions passed\n";
        for (const auto& r : report.verify->records)
          if (!r.pass)
            out << "FAIL " << r.suite << " " << r.assertion << " instance " << r.instance << " seed " << r.seed
                << " lhs " << g17(r.lhs) << " rhs " << g17(r.rhs) << " margin " << g17(r.margin) << "\n";
      }
      out << (report.pass ? "PASS" : "FAIL") << "\n";
      break;
    }
  }
  return out.str();
}

}  // namespace qdiv::cli
