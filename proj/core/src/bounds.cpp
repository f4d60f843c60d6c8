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

#include "truthsched/bounds.hpp"

#include "truthsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace truthsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_n(std::size_t n)
{
  if (n < 3)
  {
    throw PreconditionError("bounds are defined for n >= 3 machines (n = 2 is resolved separately)");
  }
}

// sum_{k=lo}^{hi} x^k, empty when lo > hi.
double power_sum(double x, int lo, int hi)
{
  if (lo > hi)
  {
    return 0.0;
  }
  double term  = std::pow(x, lo);
  double total = 0.0;
  for (int k = lo; k <= hi; ++k)
  {
    total += term;
    term *= x;
  }
  return total;
}

double root_in_unit_to_two(std::size_t n, double (*residual)(std::size_t, double))
{
  require_n(n);
  auto f = [n, residual](double a) { return residual(n, a); };
  return bisect(f, 1.0 + 1e-9, 2.0);
}

}  // namespace

std::string_view to_string(Constraint c) noexcept
{
  switch (c)
  {
  case Constraint::SumConstraint:
    return "sum-constraint";
  case Constraint::RInverse:
    return "r-inverse";
  case Constraint::AConstraint:
    return "a-constraint";
  case Constraint::RandaBoundary:
    return "randa-boundary";
  }
  return "?";
}

std::string_view to_string(Branch b) noexcept
{
  return b == Branch::An1 ? "an1" : "an2";
}

double bisect(std::function<double(double)> const &f, double lo, double hi, double tol, int max_iterations)
{
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0)
  {
    return lo;
  }
  if (f_hi == 0.0)
  {
    return hi;
  }
  if ((f_lo < 0.0) == (f_hi < 0.0))
  {
    throw PreconditionError("bisection bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] does not enclose a sign change");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < max_iterations; ++it)
  {
    mid                = 0.5 * (lo + hi);
    double const f_mid = f(mid);
    if (std::fabs(f_mid) < tol || mid <= lo || mid >= hi)
    {
      return mid;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0))
    {
      lo   = mid;
      f_lo = f_mid;
    }
    else
    {
      hi = mid;
    }
  }
  return mid;
}

double an1_residual(std::size_t n, double a)
{
  int const top = static_cast<int>(n) - 2;
  return a - 2.0 / a - power_sum(1.0 / a, 2, top);
}

double an2_residual(std::size_t n, double a)
{
  int const top = static_cast<int>(n) - 2;
  return a - 1.0 - power_sum(1.0 / a, 2, top) - std::pow(a, -top);
}

double solve_an1(std::size_t n)
{
  return root_in_unit_to_two(n, &an1_residual);
}

double solve_an2(std::size_t n)
{
  return root_in_unit_to_two(n, &an2_residual);
}

double constraint_slack(Constraint c, std::size_t n, double r, double a, double rho)
{
  int const top = static_cast<int>(n) - 2;
  switch (c)
  {
  case Constraint::SumConstraint:
    return 1.0 + r + power_sum(1.0 / a, 1, top) - rho;
  case Constraint::RInverse:
    return r > 0.0 ? 1.0 + 1.0 / r - rho : kInf;
  case Constraint::AConstraint:
    return 1.0 + a - rho;
  case Constraint::RandaBoundary:
    return (1.0 - r) - (1.0 / a - std::pow(a, -top));
  }
  return kInf;
}

BoundSolution analytic_bound(std::size_t n)
{
  require_n(n);
  double const a1 = solve_an1(n);
  double const a2 = solve_an2(n);

  BoundSolution s;
  s.n      = n;
  s.branch = a1 <= a2 ? Branch::An1 : Branch::An2;
  s.a      = std::min(a1, a2);
  s.z      = 1.0 / s.a;
  s.r      = std::min(s.z, 1.0 - s.z + std::pow(s.a, 2.0 - static_cast<double>(n)));
  s.rho    = 1.0 + s.a;
  for (auto c : {Constraint::SumConstraint, Constraint::RInverse, Constraint::AConstraint, Constraint::RandaBoundary})
  {
    if (std::fabs(constraint_slack(c, n, s.r, s.a, s.rho)) < kTightTolerance)
    {
      s.tight.push_back(c);
    }
  }
  return s;
}

double limit_bound()
{
  auto cubic = [](double rho) { return (rho - 1.0) * (rho - 2.0) * (rho - 2.0) - 1.0; };
  return bisect(cubic, 2.0, 3.0);
}

BoundSolution limit_solution()
{
  BoundSolution s;
  s.rho    = limit_bound();
  s.a      = s.rho - 1.0;
  s.z      = 1.0 / s.a;
  s.r      = 1.0 - s.z;
  s.branch = Branch::An2;
  s.tight  = {Constraint::SumConstraint, Constraint::AConstraint, Constraint::RandaBoundary};
  return s;
}

double relaxed_objective(std::size_t n, double r, double z)
{
  double const sum_bound = 1.0 + r + power_sum(z, 1, static_cast<int>(n) - 2);
  double const r_bound   = r > 0.0 ? 1.0 + 1.0 / r : kInf;
  double const z_bound   = z > 0.0 ? 1.0 + 1.0 / z : kInf;
  return std::min({sum_bound, r_bound, z_bound});
}

bool relaxed_feasible(std::size_t n, double r, double z)
{
  return r >= 0.0 && r <= 1.0 && z >= 0.0 && z <= 1.0 && r <= 1.0 - z + std::pow(z, static_cast<double>(n) - 2.0);
}

namespace {

class GridSearch
{
public:
  explicit GridSearch(std::size_t n)
    : n_(n)
  {}

  // Scans z over [z_lo, z_hi] and r over [r_lo, r_hi] with spacing `step`,
  // adding the feasibility boundary r = 1 - z + z^{n-2} as a candidate per z.
  void scan(double r_lo, double r_hi, double z_lo, double z_hi, double step)
  {
    auto const z_count = static_cast<long>(std::floor((z_hi - z_lo) / step + 1e-9));
    auto const r_count = static_cast<long>(std::floor((r_hi - r_lo) / step + 1e-9));
    for (long iz = 0; iz <= z_count; ++iz)
    {
      double const z     = std::min(1.0, z_lo + static_cast<double>(iz) * step);
      double const r_max = std::min(1.0, 1.0 - z + std::pow(z, static_cast<double>(n_) - 2.0));
      for (long ir = 0; ir <= r_count; ++ir)
      {
        double const r = std::min(1.0, r_lo + static_cast<double>(ir) * step);
        if (r > r_max)
        {
          break;
        }
        consider(r, z);
      }
      if (r_max >= r_lo && r_max <= r_hi)
      {
        consider(r_max, z);
      }
    }
  }

  NlpPoint best() const
  {
    return best_;
  }

private:
  void consider(double r, double z)
  {
    double const rho = relaxed_objective(n_, r, z);
    bool const better =
        !found_ || rho > best_.rho || (rho == best_.rho && (r < best_.r || (r == best_.r && z < best_.z)));
    if (better)
    {
      best_  = NlpPoint{r, z, rho};
      found_ = true;
    }
  }

  std::size_t n_;
  NlpPoint    best_{};
  bool        found_{false};
};

}  // namespace

NlpPoint grid_oracle(std::size_t n, std::size_t coarse_resolution, std::size_t refinement_rounds)
{
  require_n(n);
  if (coarse_resolution < 100)
  {
    throw PreconditionError("grid oracle needs at least 100 points per axis");
  }
  GridSearch search(n);
  double     step = 1.0 / static_cast<double>(coarse_resolution);
  search.scan(0.0, 1.0, 0.0, 1.0, step);

  for (std::size_t round = 0; round < refinement_rounds; ++round)
  {
    NlpPoint const centre = search.best();
    double const   half   = 10.0 * step;
    step /= 10.0;
    double const r_lo = std::max(0.0, centre.r - half);
    double const z_lo = std::max(0.0, centre.z - half);
    search.scan(r_lo, std::min(1.0, centre.r + half), z_lo, std::min(1.0, centre.z + half), step);
  }
  return search.best();
}

SequenceReport sequence_report(std::size_t n_max)
{
  if (n_max < 6)
  {
    throw PreconditionError("sequence report needs n_max >= 6 to show the crossover");
  }
  SequenceReport report;
  report.rho_limit       = limit_bound();
  report.crossover_holds = true;
  report.an1_increasing  = true;
  report.an2_increasing  = true;
  for (std::size_t n = 3; n <= n_max; ++n)
  {
    auto const  sol = analytic_bound(n);
    SequenceRow row{n, solve_an1(n), solve_an2(n), sol.branch, sol.r, sol.rho};
    bool const  first_smaller = row.a_n1 < row.a_n2;
    if (first_smaller != (n <= 5))
    {
      report.crossover_holds = false;
    }
    if (!report.rows.empty())
    {
      report.an1_increasing = report.an1_increasing && row.a_n1 > report.rows.back().a_n1;
      report.an2_increasing = report.an2_increasing && row.a_n2 > report.rows.back().a_n2;
    }
    if (n == 6)
    {
      report.a61_limit_gap = std::fabs(row.a_n1 - (report.rho_limit - 1.0));
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace truthsched
