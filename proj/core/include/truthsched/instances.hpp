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

#include "truthsched/cost.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace truthsched {

/// n machines by m tasks of extended processing times, stored row-major.
///
/// Every column holds at least one finite entry, so a finite-makespan
/// allocation always exists. Values are immutable after construction.
class CostMatrix
{
public:
  CostMatrix(std::size_t machines, std::size_t tasks, std::vector<ExtendedCost> entries);

  std::size_t machines() const noexcept
  {
    return machines_;
  }
  std::size_t tasks() const noexcept
  {
    return tasks_;
  }

  ExtendedCost at(std::size_t machine, std::size_t task) const;
  std::span<ExtendedCost const> row(std::size_t machine) const;
  std::span<ExtendedCost const> entries() const noexcept
  {
    return entries_;
  }

  bool all_finite() const noexcept;

  /// Copy with a single entry replaced.
  CostMatrix with_entry(std::size_t machine, std::size_t task, ExtendedCost value) const;

  /// Smallest strictly positive finite entry; nullopt if there is none.
  std::optional<double> min_positive_entry() const noexcept;

  /// Sum of all finite entries.
  double finite_mass() const noexcept;

  friend bool operator==(CostMatrix const &, CostMatrix const &) = default;

private:
  std::size_t               machines_;
  std::size_t               tasks_;
  std::vector<ExtendedCost> entries_;
};

/// Integral allocation: exactly one machine per task.
class Allocation
{
public:
  /// Builds from a machine-per-task vector; throws InfeasibleAllocation if an
  /// owner is out of range.
  Allocation(std::size_t machines, std::vector<std::size_t> owners);

  /// Builds from a 0/1 grid (rows are machines); throws InfeasibleAllocation
  /// unless every column sums to exactly one.
  static Allocation from_grid(std::vector<std::vector<int>> const &grid);

  std::size_t machines() const noexcept
  {
    return machines_;
  }
  std::size_t tasks() const noexcept
  {
    return owners_.size();
  }
  std::size_t owner(std::size_t task) const;
  bool        assigned(std::size_t machine, std::size_t task) const;

  /// Indicator row of one machine.
  std::vector<int>              row(std::size_t machine) const;
  std::vector<std::vector<int>> grid() const;

  std::span<std::size_t const> owners() const noexcept
  {
    return owners_;
  }

  friend bool operator==(Allocation const &, Allocation const &) = default;

private:
  std::size_t              machines_;
  std::vector<std::size_t> owners_;
};

using PaymentVector = std::vector<double>;

/// Parameters of the lower-bound construction on n machines and 2n-1 tasks.
struct ConstructionParams
{
  std::size_t n{3};
  double      r{0.5};
  double      a{1.5};
  double      epsilon{1e-7};
  double      big_m{1e6};

  /// Default perturbation: 1e-6 times the smallest positive entry any game
  /// matrix starts from, min(r, a^{-(n-2)}).
  static double default_epsilon(std::size_t n, double r, double a);

  /// Default unbounded surrogate: at least 1e6 and comfortably above
  /// (2 + a) times the finite mass of every game matrix.
  static double default_big_m(std::size_t n, double a);

  static ConstructionParams with_defaults(std::size_t n, double r, double a);

  /// Checks a > 1 > r > 0, strict 1 - r > a^{-1} - a^{-(n-2)}, and that
  /// epsilon is positive and below r and a^{-(n-2)}. Throws InvalidParams.
  void validate_construction() const;

  /// validate_construction() plus the bigM bound.
  void validate() const;

  /// Slack of 1 - r > a^{-1} - a^{-(n-2)}; positive iff strictly feasible.
  double feasibility_slack() const noexcept;

  /// Upper bound on the finite mass of every matrix the game can build.
  double finite_mass_bound() const noexcept;

  friend bool operator==(ConstructionParams const &, ConstructionParams const &) = default;
};

enum class MatrixKind
{
  A0,
  A1,
  B1,
  B2,
  C2,
  B3,
  C3,
};

std::string_view           to_string(MatrixKind kind) noexcept;
std::optional<MatrixKind>  matrix_kind_from_string(std::string_view name) noexcept;

/// Index helpers for the 2n-1 task layout: dummy task i belongs to machine i,
/// proper task of rank j (1-based, 1..n-1) sits at column n + j - 1.
constexpr std::size_t dummy_task(std::size_t machine) noexcept
{
  return machine;
}
constexpr std::size_t proper_task(std::size_t n, std::size_t rank) noexcept
{
  return n + rank - 1;
}

/// Builds one of the construction's matrices in the unrelabelled frame
/// (machine 0 is the machine whose costs are lowered).
///
/// `detour` is the rank j in [2, n-1] of the lowest proper task machine 0
/// lost on A1 (B2, C2). `detour_machine` is the machine that took it on B2,
/// either 1 or j (C2 only). Perturbations use params.epsilon.
CostMatrix build_matrix(MatrixKind kind, ConstructionParams const &params,
                        std::optional<std::size_t> detour         = std::nullopt,
                        std::optional<std::size_t> detour_machine = std::nullopt);

/// Replaces every unbounded entry by `big_m`.
CostMatrix materialize(CostMatrix const &costs, double big_m);

ExtendedCost makespan(Allocation const &alloc, CostMatrix const &costs);

struct OptimalSchedule
{
  double        makespan{0.0};
  Allocation    allocation;
  std::uint64_t nodes{0};
};

inline constexpr std::uint64_t kDefaultNodeBudget = 50'000'000;

/// Exact minimum makespan by depth-first branch and bound.
///
/// Tasks are branched in order of decreasing cheapest finite cost; unbounded
/// entries are never branched on and partial schedules whose load reaches
/// the incumbent are cut. Throws BudgetExhausted past `node_budget` nodes.
OptimalSchedule solve_optimal(CostMatrix const &costs, std::uint64_t node_budget = kDefaultNodeBudget);

double optimal_makespan(CostMatrix const &costs, std::uint64_t node_budget = kDefaultNodeBudget);

/// makespan / OPT. Unbounded when the makespan is unbounded or OPT is zero
/// under a positive makespan; 0/0 is reported as 1.
ExtendedCost approximation_ratio(Allocation const &alloc, CostMatrix const &costs,
                                 std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace truthsched
