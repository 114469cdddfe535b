#include "qdiv/roots.hpp"

#include <algorithm>
#include <cmath>

namespace qdiv {

Bracket bisect_largest_true(const std::function<bool(double)>& pred, double guess, double lower_limit,
                            double upper_limit, const BisectionContract& contract) {
  Bracket b;
  guess = std::clamp(guess, lower_limit, upper_limit);
  double lo;
  double hi;
  double step = 1.0;
  if (pred(guess)) {
    lo = guess;
    for (;;) {
      if (lo >= upper_limit) {
        b.lo = b.hi = upper_limit;
        b.status = BracketStatus::kTrueAtUpperLimit;
        return b;
      }
      const double next = std::min(lo + step, upper_limit);
      step *= 2.0;
      if (!pred(next)) {
        hi = next;
        break;
      }
      lo = next;
    }
  } else {
    hi = guess;
    for (;;) {
      if (hi <= lower_limit) {
        b.lo = b.hi = lower_limit;
        b.status = BracketStatus::kFalseAtLowerLimit;
        return b;
      }
      const double next = std::max(hi - step, lower_limit);
      step *= 2.0;
      if (pred(next)) {
        lo = next;
        break;
      }
      hi = next;
    }
  }
  int it = 0;
  while (hi - lo > contract.abs_tol && it < contract.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
    ++it;
  }
  b.lo = lo;
  b.hi = hi;
  b.iterations = it;
  return b;
}

}  // namespace qdiv
