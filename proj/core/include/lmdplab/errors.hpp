#pragma once

#include <stdexcept>
#include <string>

namespace lmdplab {

// Malformed model or config input (bad row sums, out-of-range rewards,
// unparseable documents). CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Average-reward planner failed to contract the span within the sweep cap.
// Signals a non-communicating input (state-dependent gain).
class UnboundedSpanError : public std::runtime_error {
public:
  UnboundedSpanError(const std::string& what, long iterations, double span)
      : std::runtime_error(what), iterations(iterations), span(span) {}
  long iterations;
  double span;
};

// A resource limit was exceeded (e.g. belief-node budget in the exact
// history-policy solver). Carries the count that broke the budget.
class LimitError : public std::runtime_error {
public:
  LimitError(const std::string& what, std::size_t count)
      : std::runtime_error(what), count(count) {}
  std::size_t count;
};

}  // namespace lmdplab
