#pragma once

#include <functional>

namespace qdiv {

/// Contract shared by every 1-D root finder in the library.
struct BisectionContract {
  int max_iterations = 200;
  double abs_tol = 1e-11;
};

enum class BracketStatus {
  kFound,
  kTrueAtUpperLimit,   // predicate still holds at the upper limit
  kFalseAtLowerLimit,  // predicate fails even at the lower limit
};

/// Result of locating the switch point of a monotone predicate.
/// On kFound, pred(lo) is true, pred(hi) is false and hi - lo <= abs_tol
/// (unless the iteration cap was hit first).
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  BracketStatus status = BracketStatus::kFound;
};

/// Finds the largest x in [lower_limit, upper_limit] with pred(x) true, for a
/// predicate that is true below some threshold and false above it. The search
/// starts at `guess` and expands by doubling steps before bisecting.
Bracket bisect_largest_true(const std::function<bool(double)>& pred, double guess, double lower_limit,
                            double upper_limit, const BisectionContract& contract = {});

}  // namespace qdiv
