#include "lmdplab/function_class.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/errors.hpp"

namespace lmdplab {

void FunctionClassF::validate() const {
  if (num_functions <= 0) throw ValidationError("function class: needs at least one function");
  if (domain == 0) throw ValidationError("function class: empty domain");
  if (table.size() != static_cast<std::size_t>(num_functions) * domain) {
    throw ValidationError("function class: table size does not match functions * domain");
  }
  for (double v : table) {
    if (std::abs(v) > value_bound + 1e-12) {
      throw ValidationError("function class: table entry exceeds value_bound");
    }
  }
}

FunctionClassF build_function_class(const LatentMdp& lmdp) {
  lmdp.validate();
  const int M = lmdp.num_members();
  const int S = lmdp.num_states();
  const int A = lmdp.num_actions();

  std::vector<std::vector<double>> biases;
  biases.reserve(static_cast<std::size_t>(M));
  double dmax = 0.0;
  for (int i = 0; i < M; ++i) {
    AvgSolution sol = relative_value_iteration(lmdp.mdps[static_cast<std::size_t>(i)]);
    if (is_unbounded(sol.diameter)) {
      throw ValidationError("function class: member " + std::to_string(i) +
                            " is not communicating");
    }
    dmax = std::max(dmax, sol.diameter);
    biases.push_back(std::move(sol.bias));
  }

  FunctionClassF out;
  out.num_functions = M;
  out.domain = static_cast<std::size_t>(S) * A * M;
  out.value_bound = dmax;
  out.table.resize(static_cast<std::size_t>(M) * out.domain);
  std::size_t pos = 0;
  for (int m = 0; m < M; ++m) {
    const TabularMdp& kernel = lmdp.mdps[static_cast<std::size_t>(m)];
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto row = kernel.row(s, a);
        for (int b = 0; b < M; ++b) {
          double dot = 0.0;
          for (std::size_t s2 = 0; s2 < row.size(); ++s2) {
            dot += row[s2] * biases[static_cast<std::size_t>(b)][s2];
          }
          out.table[pos++] = dot;
        }
      }
    }
  }
  return out;
}

namespace {

// True iff some function pair is close (squared norm <= eps^2) on the
// accumulated points yet differs by more than eps at x.
bool is_independent(const FunctionClassF& f, const std::vector<double>& pair_norm2,
                    std::size_t x, double eps) {
  const double eps2 = eps * eps;
  std::size_t k = 0;
  for (int i = 0; i < f.num_functions; ++i) {
    for (int j = i + 1; j < f.num_functions; ++j, ++k) {
      if (pair_norm2[k] <= eps2 && std::abs(f.at(i, x) - f.at(j, x)) > eps) return true;
    }
  }
  return false;
}

void add_point(const FunctionClassF& f, std::vector<double>& pair_norm2, std::size_t x) {
  std::size_t k = 0;
  for (int i = 0; i < f.num_functions; ++i) {
    for (int j = i + 1; j < f.num_functions; ++j, ++k) {
      const double d = f.at(i, x) - f.at(j, x);
      pair_norm2[k] += d * d;
    }
  }
}

std::size_t pair_count(const FunctionClassF& f) {
  return static_cast<std::size_t>(f.num_functions) *
         static_cast<std::size_t>(f.num_functions - 1) / 2;
}

}  // namespace

int eluder_dimension_greedy(const FunctionClassF& f, double eps) {
  f.validate();
  if (!(eps > 0.0)) throw ValidationError("eluder dimension: eps must be positive");
  std::vector<double> pair_norm2(pair_count(f), 0.0);
  int length = 0;
  for (;;) {
    std::size_t chosen = f.domain;
    for (std::size_t x = 0; x < f.domain; ++x) {
      if (is_independent(f, pair_norm2, x, eps)) {
        chosen = x;
        break;
      }
    }
    if (chosen == f.domain) break;
    add_point(f, pair_norm2, chosen);
    ++length;
  }
  return length;
}

int eluder_dimension_exhaustive(const FunctionClassF& f, double eps) {
  f.validate();
  if (!(eps > 0.0)) throw ValidationError("eluder dimension: eps must be positive");
  if (f.domain > 12) {
    throw ValidationError("exhaustive eluder dimension: domain larger than 12 points");
  }
  const int n = static_cast<int>(f.domain);
  std::unordered_map<unsigned, int> memo;

  // Longest extension of the point set `mask`; squared pair norms depend
  // only on the set, so any qualifying visit order realizes the same bound.
  auto solve = [&](auto&& self, unsigned mask) -> int {
    const auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::vector<double> pair_norm2(pair_count(f), 0.0);
    for (int x = 0; x < n; ++x) {
      if ((mask >> x) & 1u) add_point(f, pair_norm2, static_cast<std::size_t>(x));
    }
    int best = 0;
    for (int x = 0; x < n; ++x) {
      if ((mask >> x) & 1u) continue;
      if (!is_independent(f, pair_norm2, static_cast<std::size_t>(x), eps)) continue;
      best = std::max(best, 1 + self(self, mask | (1u << x)));
    }
    memo[mask] = best;
    return best;
  };
  return solve(solve, 0u);
}

int covering_number_greedy(const FunctionClassF& f, double alpha) {
  f.validate();
  if (!(alpha > 0.0)) throw ValidationError("covering number: alpha must be positive");
  std::vector<char> covered(static_cast<std::size_t>(f.num_functions), 0);
  int centers = 0;
  for (int i = 0; i < f.num_functions; ++i) {
    if (covered[static_cast<std::size_t>(i)] != 0) continue;
    ++centers;
    for (int j = i; j < f.num_functions; ++j) {
      if (covered[static_cast<std::size_t>(j)] != 0) continue;
      double sup = 0.0;
      for (std::size_t x = 0; x < f.domain; ++x) {
        sup = std::max(sup, std::abs(f.at(i, x) - f.at(j, x)));
      }
      if (sup <= alpha) covered[static_cast<std::size_t>(j)] = 1;
    }
  }
  return centers;
}

SlopeFit fit_loglog_slope(const std::vector<double>& horizons, const std::vector<double>& gaps) {
  if (horizons.size() != gaps.size()) {
    throw ValidationError("slope fit: horizons and gaps must have equal length");
  }
  const std::size_t n = horizons.size();
  if (n < 2) throw ValidationError("slope fit: needs at least two points");
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(horizons[i] > 0.0)) throw ValidationError("slope fit: nonpositive horizon");
    if (!(gaps[i] > 0.0)) throw ValidationError("slope fit: nonpositive gap");
    xs[i] = std::log(horizons[i]);
    ys[i] = std::log(gaps[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("slope fit: horizons must not all coincide");

  SlopeFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += resid * resid;
    }
    fit.stderr_slope = std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
  }
  return fit;
}

}  // namespace lmdplab
