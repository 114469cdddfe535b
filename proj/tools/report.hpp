#pragma once

#include "qdiv/linalg.hpp"
#include "qdiv/verify.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qdiv::cli {

using Json = nlohmann::ordered_json;

enum class Format { kJson, kCsv, kText };

/// Finite doubles stay numbers; ±inf and nan become strings so the JSON stays valid.
Json num(double v);
Json vec(const RealVector& v);

struct Report {
  std::string command;
  std::string inputs_digest;
  Json results = Json::object();
  const VerifyResult* verify = nullptr;  // assertion rows, verify only
  bool pass = true;
};

std::string render(const Report& report, Format format);

/// Hex FNV-1a over the given byte blobs, each followed by a separator.
std::string digest(const std::vector<std::string>& blobs);

}  // namespace qdiv::cli
