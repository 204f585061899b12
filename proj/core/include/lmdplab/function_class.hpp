#pragma once

#include <cstddef>
#include <vector>

#include "lmdplab/latent_mdp.hpp"

namespace lmdplab {

// Finite class of real-valued functions on a finite domain, stored as a
// dense (function x point) table. For a latent class the canonical domain
// is (state, action, bias-of-member) and each member induces the function
//   x = (s, a, b)  ->  E_{s' ~ P_member(s, a)}[bias_b(s')].
struct FunctionClassF {
  int num_functions = 0;
  std::size_t domain = 0;
  double value_bound = 0.0;          // uniform bound on |f(x)|
  std::vector<double> table;         // num_functions * domain, function-major

  double at(int f, std::size_t x) const {
    return table[static_cast<std::size_t>(f) * domain + x];
  }
  void validate() const;             // table size matches, bound respected
};

// The one-step bias-prediction class of a latent family (all members
// communicating). value_bound is the largest member diameter.
FunctionClassF build_function_class(const LatentMdp& lmdp);

// Greedy lower bound on the eluder dimension at scale eps: repeatedly scan
// the domain in index order and append the first point that is
// eps-independent of the points chosen so far. Deterministic; never exceeds
// the true dimension.
int eluder_dimension_greedy(const FunctionClassF& f, double eps);

// Exact eluder dimension at scale eps by exhaustive search over point sets
// (a point can never be independent of a set containing it, so sequences
// are repeat-free and order-insensitive). Only for domains of at most 12
// points; throws ValidationError beyond that.
int eluder_dimension_exhaustive(const FunctionClassF& f, double eps);

// Size of the greedy sup-norm cover at radius alpha: walk functions in
// index order, each uncovered function becomes a center and covers every
// function within sup-distance alpha.
int covering_number_greedy(const FunctionClassF& f, double alpha);

// Ordinary least squares of log(gap) on log(horizon). Requires at least two
// points, all positive; the standard error needs at least three and is zero
// otherwise.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& horizons, const std::vector<double>& gaps);

}  // namespace lmdplab
