// Copyright 2026 The truthsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace truthsched {

/// Constraints of the (r, a, rho) program whose optimum is the lower bound.
enum class Constraint
{
  SumConstraint,  ///< rho <= 1 + r + a^{-1} + ... + a^{-(n-2)}
  RInverse,       ///< rho <= 1 + 1/r
  AConstraint,    ///< rho <= 1 + a
  RandaBoundary,  ///< 1 - r >= a^{-1} - a^{-(n-2)}
};

/// Which root equation determines a.
enum class Branch
{
  An1,  ///< a = 2a^{-1} + a^{-2} + ... + a^{-(n-2)}
  An2,  ///< a = 1 + a^{-2} + ... + a^{-(n-2)} + a^{-(n-2)}
};

std::string_view to_string(Constraint c) noexcept;
std::string_view to_string(Branch b) noexcept;

struct BoundSolution
{
  std::optional<std::size_t> n;  ///< nullopt for the n -> infinity limit
  double                     a{0.0};
  double                     z{0.0};  ///< 1/a
  double                     r{0.0};
  double                     rho{0.0};
  std::vector<Constraint>    tight;
  Branch                     branch{Branch::An1};
};

/// A point of the relaxed program in (r, z = 1/a) coordinates.
struct NlpPoint
{
  double r{0.0};
  double z{0.0};
  double rho{0.0};
};

inline constexpr double kRootTolerance  = 1e-12;
inline constexpr double kTightTolerance = 1e-9;

/// Bisection on a sign-changing bracket. Stops once |f(x)| < tol or the
/// bracket can no longer be split. Throws PreconditionError if f(lo) and
/// f(hi) do not have opposite signs.
double bisect(std::function<double(double)> const &f, double lo, double hi, double tol = kRootTolerance,
              int max_iterations = 400);

/// Residual of the first root equation, a - (2/a + a^{-2} + ... + a^{-(n-2)}).
double an1_residual(std::size_t n, double a);
/// Residual of the second root equation, a - (1 + a^{-2} + ... + a^{-(n-2)} + a^{-(n-2)}).
double an2_residual(std::size_t n, double a);

/// Unique root of an1_residual in (1, 2). Requires n >= 3.
double solve_an1(std::size_t n);
/// Unique root of an2_residual in (1, 2). Requires n >= 3.
double solve_an2(std::size_t n);

/// Optimal (r, a, rho) of the program for n machines.
BoundSolution analytic_bound(std::size_t n);

/// Unique real root of (rho - 1)(rho - 2)^2 = 1.
double limit_bound();

/// Limit solution: rho = limit_bound(), a = rho - 1, r = 1 - 1/a.
BoundSolution limit_solution();

/// min{1 + r + z + ... + z^{n-2}, 1 + 1/r, 1 + 1/z} with 1/0 = +inf.
double relaxed_objective(std::size_t n, double r, double z);

/// r <= 1 - z + z^{n-2} on the closed unit square.
bool relaxed_feasible(std::size_t n, double r, double z);

/// Slack of each constraint at (r, a, rho); zero means tight.
double constraint_slack(Constraint c, std::size_t n, double r, double a, double rho);

/// Grid maximisation of relaxed_objective over the closed feasible region,
/// followed by `refinement_rounds` rounds of 10x zoom around the incumbent.
/// Ties go to the lexicographically smallest (r, z).
NlpPoint grid_oracle(std::size_t n, std::size_t coarse_resolution = 1000, std::size_t refinement_rounds = 3);

struct SequenceRow
{
  std::size_t n{0};
  double      a_n1{0.0};
  double      a_n2{0.0};
  Branch      branch{Branch::An1};
  double      r{0.0};
  double      rho{0.0};
};

struct SequenceReport
{
  std::vector<SequenceRow> rows;
  double                   rho_limit{0.0};
  bool                     crossover_holds{false};  ///< a_n1 < a_n2 exactly for n <= 5
  bool                     an1_increasing{false};
  bool                     an2_increasing{false};
  double                   a61_limit_gap{0.0};  ///< |a_{6,1} - (rho_limit - 1)|
};

/// Rows n = 3..n_max. Requires n_max >= 6.
SequenceReport sequence_report(std::size_t n_max);

}  // namespace truthsched
