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

#include "truthsched/instances.hpp"

#include "truthsched/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace truthsched {

// --- CostMatrix -------------------------------------------------------------

CostMatrix::CostMatrix(std::size_t machines, std::size_t tasks, std::vector<ExtendedCost> entries)
  : machines_(machines)
  , tasks_(tasks)
  , entries_(std::move(entries))
{
  if (machines_ == 0 || tasks_ == 0)
  {
    throw DimensionError("cost matrix needs at least one machine and one task");
  }
  if (entries_.size() != machines_ * tasks_)
  {
    throw DimensionError("cost matrix expects " + std::to_string(machines_ * tasks_) +
                         " entries, got " + std::to_string(entries_.size()));
  }
  for (std::size_t j = 0; j < tasks_; ++j)
  {
    bool finite = false;
    for (std::size_t i = 0; i < machines_ && !finite; ++i)
    {
      finite = entries_[i * tasks_ + j].is_finite();
    }
    if (!finite)
    {
      throw PreconditionError("task " + std::to_string(j) + " has no finite cost");
    }
  }
}

ExtendedCost CostMatrix::at(std::size_t machine, std::size_t task) const
{
  if (machine >= machines_ || task >= tasks_)
  {
    throw DimensionError("cost matrix index out of range");
  }
  return entries_[machine * tasks_ + task];
}

std::span<ExtendedCost const> CostMatrix::row(std::size_t machine) const
{
  if (machine >= machines_)
  {
    throw DimensionError("machine index out of range");
  }
  return std::span<ExtendedCost const>(entries_).subspan(machine * tasks_, tasks_);
}

bool CostMatrix::all_finite() const noexcept
{
  return std::all_of(entries_.begin(), entries_.end(), [](ExtendedCost c) { return c.is_finite(); });
}

CostMatrix CostMatrix::with_entry(std::size_t machine, std::size_t task, ExtendedCost value) const
{
  if (machine >= machines_ || task >= tasks_)
  {
    throw DimensionError("cost matrix index out of range");
  }
  auto entries                        = entries_;
  entries[machine * tasks_ + task]    = value;
  return CostMatrix(machines_, tasks_, std::move(entries));
}

std::optional<double> CostMatrix::min_positive_entry() const noexcept
{
  std::optional<double> best;
  for (auto c : entries_)
  {
    if (c.is_finite() && c.value_or(0.0) > 0.0 && (!best || c.value_or(0.0) < *best))
    {
      best = c.value_or(0.0);
    }
  }
  return best;
}

double CostMatrix::finite_mass() const noexcept
{
  double total = 0.0;
  for (auto c : entries_)
  {
    total += c.value_or(0.0);
  }
  return total;
}

// --- Allocation -------------------------------------------------------------

Allocation::Allocation(std::size_t machines, std::vector<std::size_t> owners)
  : machines_(machines)
  , owners_(std::move(owners))
{
  if (machines_ == 0)
  {
    throw InfeasibleAllocation("allocation needs at least one machine");
  }
  for (std::size_t j = 0; j < owners_.size(); ++j)
  {
    if (owners_[j] >= machines_)
    {
      throw InfeasibleAllocation("task " + std::to_string(j) + " assigned to machine " +
                                 std::to_string(owners_[j]) + " of " + std::to_string(machines_));
    }
  }
}

Allocation Allocation::from_grid(std::vector<std::vector<int>> const &grid)
{
  if (grid.empty())
  {
    throw InfeasibleAllocation("allocation grid has no rows");
  }
  std::size_t const tasks = grid.front().size();
  for (auto const &row : grid)
  {
    if (row.size() != tasks)
    {
      throw InfeasibleAllocation("allocation grid is ragged");
    }
  }
  std::vector<std::size_t> owners(tasks);
  for (std::size_t j = 0; j < tasks; ++j)
  {
    int                        column_sum = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
      int const v = grid[i][j];
      if (v != 0 && v != 1)
      {
        throw InfeasibleAllocation("allocation entries must be 0 or 1");
      }
      if (v == 1)
      {
        owners[j] = i;
      }
      column_sum += v;
    }
    if (column_sum != 1)
    {
      throw InfeasibleAllocation("task " + std::to_string(j) + " is assigned to " +
                                 std::to_string(column_sum) + " machines");
    }
  }
  return Allocation(grid.size(), std::move(owners));
}

std::size_t Allocation::owner(std::size_t task) const
{
  if (task >= owners_.size())
  {
    throw DimensionError("task index out of range");
  }
  return owners_[task];
}

bool Allocation::assigned(std::size_t machine, std::size_t task) const
{
  return owner(task) == machine;
}

std::vector<int> Allocation::row(std::size_t machine) const
{
  if (machine >= machines_)
  {
    throw DimensionError("machine index out of range");
  }
  std::vector<int> out(owners_.size(), 0);
  for (std::size_t j = 0; j < owners_.size(); ++j)
  {
    out[j] = owners_[j] == machine ? 1 : 0;
  }
  return out;
}

std::vector<std::vector<int>> Allocation::grid() const
{
  std::vector<std::vector<int>> out;
  out.reserve(machines_);
  for (std::size_t i = 0; i < machines_; ++i)
  {
    out.push_back(row(i));
  }
  return out;
}

// --- ConstructionParams ------------------------------------------------------------

double ConstructionParams::default_epsilon(std::size_t n, double r, double a)
{
  return 1e-6 * std::min(r, std::pow(a, -static_cast<double>(n) + 2.0));
}

double ConstructionParams::default_big_m(std::size_t n, double a)
{
  ConstructionParams probe;
  probe.n = n;
  probe.a = a;
  return std::max(1e6, 10.0 * (2.0 + a) * probe.finite_mass_bound());
}

ConstructionParams ConstructionParams::with_defaults(std::size_t n, double r, double a)
{
  ConstructionParams p;
  p.n       = n;
  p.r       = r;
  p.a       = a;
  p.epsilon = default_epsilon(n, r, a);
  p.big_m   = default_big_m(n, a);
  return p;
}

double ConstructionParams::feasibility_slack() const noexcept
{
  return (1.0 - r) - (1.0 / a - std::pow(a, -static_cast<double>(n) + 2.0));
}

double ConstructionParams::finite_mass_bound() const noexcept
{
  // 4n - 4 finite entries, none above 1 + epsilon.
  return 2.0 * static_cast<double>(4 * n);
}

void ConstructionParams::validate_construction() const
{
  if (n < 3)
  {
    throw InvalidParams("the construction needs n >= 3 machines (n = 2 is resolved separately)");
  }
  if (!(std::isfinite(r) && std::isfinite(a) && a > 1.0 && r > 0.0 && r < 1.0))
  {
    throw InvalidParams("parameters must satisfy a > 1 > r > 0");
  }
  if (!(feasibility_slack() > 0.0))
  {
    throw InvalidParams("parameters violate strict feasibility 1 - r > 1/a - a^{-(n-2)}");
  }
  double const smallest_power = std::pow(a, -static_cast<double>(n) + 2.0);
  if (!(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < r && epsilon < smallest_power))
  {
    throw InvalidParams("epsilon must be positive and below both r and a^{-(n-2)}");
  }
}

void ConstructionParams::validate() const
{
  validate_construction();
  if (!(std::isfinite(big_m) && big_m > (2.0 + a) * finite_mass_bound()))
  {
    throw InvalidParams("bigM must exceed (2 + a) times the finite mass of the game matrices");
  }
}

// --- Matrix construction ----------------------------------------------------

namespace {

constexpr std::array<std::pair<MatrixKind, std::string_view>, 7> kKindNames{{
    {MatrixKind::A0, "A0"},
    {MatrixKind::A1, "A1"},
    {MatrixKind::B1, "B1"},
    {MatrixKind::B2, "B2"},
    {MatrixKind::C2, "C2"},
    {MatrixKind::B3, "B3"},
    {MatrixKind::C3, "C3"},
}};

/// Mutable scratch grid used while assembling a matrix.
class Grid
{
public:
  Grid(std::size_t machines, std::size_t tasks)
    : machines_(machines)
    , tasks_(tasks)
    , entries_(machines * tasks, kUnbounded)
  {}

  ExtendedCost &operator()(std::size_t i, std::size_t j)
  {
    return entries_[i * tasks_ + j];
  }

  CostMatrix finish() &&
  {
    return CostMatrix(machines_, tasks_, std::move(entries_));
  }

private:
  std::size_t               machines_;
  std::size_t               tasks_;
  std::vector<ExtendedCost> entries_;
};

double inv_power(double a, std::size_t k)
{
  return std::pow(a, -static_cast<double>(k));
}

// a^{-j+2} for rank j >= 2; rank 1 costs 1.
double base_proper_cost(double a, std::size_t rank)
{
  return rank == 1 ? 1.0 : std::pow(a, 2.0 - static_cast<double>(rank));
}

Grid base_grid(ConstructionParams const &p)
{
  std::size_t const n = p.n;
  Grid              g(n, 2 * n - 1);
  for (std::size_t i = 0; i < n; ++i)
  {
    g(i, dummy_task(i)) = 0.0;
  }
  for (std::size_t rank = 1; rank <= n - 1; ++rank)
  {
    g(0, proper_task(n, rank)) = base_proper_cost(p.a, rank);
    g(1, proper_task(n, rank)) = base_proper_cost(p.a, rank);
  }
  // Machine k >= 2 can only run proper task of rank k, at the same cost as machines 0 and 1.
  for (std::size_t k = 2; k < n; ++k)
  {
    g(k, proper_task(n, k)) = base_proper_cost(p.a, k);
  }
  return g;
}

void lower_costs_of_machine0(Grid &g, ConstructionParams const &p)
{
  g(0, proper_task(p.n, 1)) = p.r;
  for (std::size_t rank = 2; rank <= p.n - 1; ++rank)
  {
    g(0, proper_task(p.n, rank)) = inv_power(p.a, rank - 1);
  }
}

std::size_t require_detour(ConstructionParams const &p, std::optional<std::size_t> detour)
{
  if (!detour || *detour < 2 || *detour > p.n - 1)
  {
    throw PreconditionError("detour rank j must lie in [2, n-1]");
  }
  return *detour;
}

}  // namespace

std::string_view to_string(MatrixKind kind) noexcept
{
  for (auto const &[k, name] : kKindNames)
  {
    if (k == kind)
    {
      return name;
    }
  }
  return "?";
}

std::optional<MatrixKind> matrix_kind_from_string(std::string_view name) noexcept
{
  for (auto const &[k, s] : kKindNames)
  {
    if (s == name)
    {
      return k;
    }
  }
  return std::nullopt;
}

CostMatrix build_matrix(MatrixKind kind, ConstructionParams const &params, std::optional<std::size_t> detour,
                        std::optional<std::size_t> detour_machine)
{
  params.validate_construction();
  std::size_t const n   = params.n;
  double const      eps = params.epsilon;

  Grid g = base_grid(params);
  if (kind == MatrixKind::A0)
  {
    return std::move(g).finish();
  }

  lower_costs_of_machine0(g, params);
  switch (kind)
  {
  case MatrixKind::A0:
  case MatrixKind::A1:
    break;

  case MatrixKind::B1:
    g(0, dummy_task(0)) = 1.0;
    for (std::size_t rank = 1; rank <= n - 1; ++rank)
    {
      auto &c = g(0, proper_task(n, rank));
      c       = c.value() - eps;
    }
    break;

  case MatrixKind::B2:
  case MatrixKind::C2:
  {
    std::size_t const j = require_detour(params, detour);
    for (std::size_t rank = 1; rank < j; ++rank)
    {
      g(0, proper_task(n, rank)) = 0.0;
    }
    g(0, proper_task(n, j)) = inv_power(params.a, j - 1) + eps;

    if (kind == MatrixKind::C2)
    {
      if (!detour_machine || (*detour_machine != 1 && *detour_machine != j))
      {
        throw PreconditionError("C2 detour machine must be 1 or j");
      }
      std::size_t const d     = *detour_machine;
      g(d, dummy_task(d))     = inv_power(params.a, j - 1);
      g(d, proper_task(n, j)) = base_proper_cost(params.a, j) - eps;
    }
    break;
  }

  case MatrixKind::B3:
  case MatrixKind::C3:
    g(0, proper_task(n, 2)) = 0.0;
    g(0, proper_task(n, 1)) = params.r + eps;
    if (kind == MatrixKind::C3)
    {
      g(1, dummy_task(1))     = std::max(params.r, 1.0 / params.a);
      g(1, proper_task(n, 1)) = 1.0 - eps;
    }
    break;
  }
  return std::move(g).finish();
}

CostMatrix materialize(CostMatrix const &costs, double big_m)
{
  if (!(std::isfinite(big_m) && big_m >= 0.0))
  {
    throw PreconditionError("bigM must be finite and nonnegative");
  }
  std::vector<ExtendedCost> entries;
  entries.reserve(costs.entries().size());
  for (auto c : costs.entries())
  {
    entries.emplace_back(c.value_or(big_m));
  }
  return CostMatrix(costs.machines(), costs.tasks(), std::move(entries));
}

// --- Makespan and OPT -------------------------------------------------------

ExtendedCost makespan(Allocation const &alloc, CostMatrix const &costs)
{
  if (alloc.machines() != costs.machines() || alloc.tasks() != costs.tasks())
  {
    throw DimensionError("allocation and cost matrix dimensions differ");
  }
  std::vector<ExtendedCost> loads(costs.machines(), ExtendedCost(0.0));
  for (std::size_t j = 0; j < costs.tasks(); ++j)
  {
    std::size_t const i = alloc.owner(j);
    loads[i] += costs.at(i, j);
  }
  return *std::max_element(loads.begin(), loads.end());
}

namespace {

class BranchAndBound
{
public:
  BranchAndBound(CostMatrix const &costs, std::uint64_t budget)
    : costs_(costs)
    , budget_(budget)
    , loads_(costs.machines(), 0.0)
    , owners_(costs.tasks(), 0)
  {
    std::size_t const m = costs.tasks();
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), std::size_t{0});

    cheapest_.assign(m, std::numeric_limits<double>::infinity());
    choices_.resize(m);
    for (std::size_t j = 0; j < m; ++j)
    {
      for (std::size_t i = 0; i < costs.machines(); ++i)
      {
        auto c = costs.at(i, j);
        if (c.is_finite())
        {
          choices_[j].push_back(i);
          cheapest_[j] = std::min(cheapest_[j], c.value());
        }
      }
      std::stable_sort(choices_[j].begin(), choices_[j].end(), [&](std::size_t x, std::size_t y) {
        return costs.at(x, j).value() < costs.at(y, j).value();
      });
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t x, std::size_t y) { return cheapest_[x] > cheapest_[y]; });

    // remaining_min_[d]: sum and max of cheapest costs over order_[d..].
    remaining_sum_.assign(m + 1, 0.0);
    remaining_max_.assign(m + 1, 0.0);
    for (std::size_t d = m; d-- > 0;)
    {
      remaining_sum_[d] = remaining_sum_[d + 1] + cheapest_[order_[d]];
      remaining_max_[d] = std::max(remaining_max_[d + 1], cheapest_[order_[d]]);
    }
  }

  OptimalSchedule run()
  {
    seed_incumbent();
    descend(0, 0.0, 0.0);
    return OptimalSchedule{best_, Allocation(costs_.machines(), best_owners_), nodes_};
  }

private:
  // Greedy list schedule in branching order gives a finite starting incumbent.
  void seed_incumbent()
  {
    std::vector<double>      loads(costs_.machines(), 0.0);
    std::vector<std::size_t> owners(costs_.tasks(), 0);
    for (std::size_t j : order_)
    {
      std::size_t best_i    = choices_[j].front();
      double      best_load = std::numeric_limits<double>::infinity();
      for (std::size_t i : choices_[j])
      {
        double const l = loads[i] + costs_.at(i, j).value();
        if (l < best_load)
        {
          best_load = l;
          best_i    = i;
        }
      }
      loads[best_i] = best_load;
      owners[j]     = best_i;
    }
    best_        = *std::max_element(loads.begin(), loads.end());
    best_owners_ = owners;
  }

  void descend(std::size_t depth, double current_max, double assigned_sum)
  {
    if (++nodes_ > budget_)
    {
      throw BudgetExhausted("branch and bound exceeded " + std::to_string(budget_) + " nodes");
    }
    if (depth == order_.size())
    {
      if (current_max < best_)
      {
        best_        = current_max;
        best_owners_ = owners_;
      }
      return;
    }
    double const machines = static_cast<double>(costs_.machines());
    // The averaging bound is shaded down so rounding never cuts a tie with the incumbent.
    double const average = (assigned_sum + remaining_sum_[depth]) / machines * (1.0 - 1e-12);
    double const bound   = std::max({current_max, remaining_max_[depth], average});
    if (bound >= best_)
    {
      return;
    }

    std::size_t const j = order_[depth];
    for (std::size_t i : choices_[j])
    {
      double const c    = costs_.at(i, j).value();
      double const load = loads_[i] + c;
      if (load >= best_)
      {
        continue;
      }
      double const saved = loads_[i];
      loads_[i]          = load;
      owners_[j]         = i;
      descend(depth + 1, std::max(current_max, load), assigned_sum + c);
      loads_[i] = saved;
    }
  }

  CostMatrix const        &costs_;
  std::uint64_t            budget_;
  std::uint64_t            nodes_{0};
  std::vector<std::size_t> order_;
  std::vector<double>      cheapest_;
  std::vector<std::vector<std::size_t>> choices_;
  std::vector<double>      remaining_sum_;
  std::vector<double>      remaining_max_;
  std::vector<double>      loads_;
  std::vector<std::size_t> owners_;
  double                   best_{std::numeric_limits<double>::infinity()};
  std::vector<std::size_t> best_owners_;
};

}  // namespace

OptimalSchedule solve_optimal(CostMatrix const &costs, std::uint64_t node_budget)
{
  return BranchAndBound(costs, node_budget).run();
}

double optimal_makespan(CostMatrix const &costs, std::uint64_t node_budget)
{
  return solve_optimal(costs, node_budget).makespan;
}

ExtendedCost approximation_ratio(Allocation const &alloc, CostMatrix const &costs, std::uint64_t node_budget)
{
  ExtendedCost const span = makespan(alloc, costs);
  if (span.is_unbounded())
  {
    return kUnbounded;
  }
  double const opt = optimal_makespan(costs, node_budget);
  if (opt == 0.0)
  {
    return span.value() == 0.0 ? ExtendedCost(1.0) : kUnbounded;
  }
  return ExtendedCost(span.value() / opt);
}

}  // namespace truthsched
