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

#include "truthsched/mechanisms.hpp"

#include "truthsched/errors.hpp"

#include <limits>
#include <utility>

namespace truthsched {

namespace {

void require_finite(CostMatrix const &costs, std::string const &who)
{
  if (!costs.all_finite())
  {
    throw PreconditionError(who + " only accepts finite cost matrices; materialize unbounded entries first");
  }
}

std::string_view tie_break_name(TieBreak t)
{
  switch (t)
  {
  case TieBreak::LowestIndex:
    return "lowest-index";
  case TieBreak::HighestIndex:
    return "highest-index";
  case TieBreak::PreferMachine2:
    return "prefer-machine-2";
  }
  return "?";
}

class Vcg final : public MechanismOracle
{
public:
  explicit Vcg(TieBreak tie_break)
    : tie_break_(tie_break)
  {}

  std::string name() const override
  {
    switch (tie_break_)
    {
    case TieBreak::LowestIndex:
      return "vcg-lowest";
    case TieBreak::HighestIndex:
      return "vcg-highest";
    case TieBreak::PreferMachine2:
      return "vcg-prefer-2";
    }
    return "vcg";
  }

  std::string tie_break() const override
  {
    return std::string(tie_break_name(tie_break_));
  }

  Allocation allocate(CostMatrix const &costs) const override
  {
    require_finite(costs, name());
    std::vector<std::size_t> owners(costs.tasks());
    for (std::size_t j = 0; j < costs.tasks(); ++j)
    {
      owners[j] = winner(costs, j);
    }
    return Allocation(costs.machines(), std::move(owners));
  }

  std::optional<PaymentVector> pay(CostMatrix const &costs) const override
  {
    require_finite(costs, name());
    PaymentVector payments(costs.machines(), 0.0);
    for (std::size_t j = 0; j < costs.tasks(); ++j)
    {
      std::size_t const w      = winner(costs, j);
      double            second = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < costs.machines(); ++i)
      {
        if (i != w)
        {
          second = std::min(second, costs.at(i, j).value());
        }
      }
      // A lone machine is paid its own report.
      payments[w] += costs.machines() == 1 ? costs.at(w, j).value() : second;
    }
    return payments;
  }

private:
  std::size_t winner(CostMatrix const &costs, std::size_t task) const
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.machines(); ++i)
    {
      best = std::min(best, costs.at(i, task).value());
    }
    std::optional<std::size_t> lowest;
    std::size_t                highest = 0;
    bool                       has_m2  = false;
    for (std::size_t i = 0; i < costs.machines(); ++i)
    {
      if (costs.at(i, task).value() == best)
      {
        if (!lowest)
        {
          lowest = i;
        }
        highest = i;
        has_m2  = has_m2 || i == 1;
      }
    }
    switch (tie_break_)
    {
    case TieBreak::HighestIndex:
      return highest;
    case TieBreak::PreferMachine2:
      return has_m2 ? std::size_t{1} : *lowest;
    case TieBreak::LowestIndex:
      break;
    }
    return *lowest;
  }

  TieBreak tie_break_;
};

class GreedyLoad final : public MechanismOracle
{
public:
  std::string name() const override
  {
    return "greedy-load";
  }
  std::string tie_break() const override
  {
    return "lowest-index";
  }

  Allocation allocate(CostMatrix const &costs) const override
  {
    require_finite(costs, name());
    std::vector<double>      loads(costs.machines(), 0.0);
    std::vector<std::size_t> owners(costs.tasks());
    for (std::size_t j = 0; j < costs.tasks(); ++j)
    {
      std::size_t best_i    = 0;
      double      best_load = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < costs.machines(); ++i)
      {
        double const l = loads[i] + costs.at(i, j).value();
        if (l < best_load)
        {
          best_load = l;
          best_i    = i;
        }
      }
      loads[best_i] = best_load;
      owners[j]     = best_i;
    }
    return Allocation(costs.machines(), std::move(owners));
  }
};

class Scripted final : public MechanismOracle
{
public:
  Scripted(std::string name, std::map<std::string, Allocation> responses)
    : name_(std::move(name))
    , responses_(std::move(responses))
  {}

  std::string name() const override
  {
    return name_;
  }
  std::string tie_break() const override
  {
    return "scripted";
  }

  Allocation allocate(CostMatrix const &costs) const override
  {
    require_finite(costs, name_);
    std::string const digest = instance_digest(costs);
    auto const        it     = responses_.find(digest);
    if (it == responses_.end())
    {
      throw MissingScript("scripted oracle '" + name_ + "' has no response for instance " + digest);
    }
    if (it->second.machines() != costs.machines() || it->second.tasks() != costs.tasks())
    {
      throw InfeasibleAllocation("scripted allocation for " + digest + " has the wrong shape");
    }
    return it->second;
  }

private:
  std::string                       name_;
  std::map<std::string, Allocation> responses_;
};

class Swapped final : public MechanismOracle
{
public:
  Swapped(MechanismPtr inner, std::size_t first, std::size_t second, bool swap_tasks)
    : inner_(std::move(inner))
    , first_(first)
    , second_(second)
    , swap_tasks_(swap_tasks)
  {}

  std::string name() const override
  {
    return inner_->name() + "-swap" + std::to_string(first_) + std::to_string(second_);
  }
  std::string tie_break() const override
  {
    return inner_->tie_break();
  }

  Allocation allocate(CostMatrix const &costs) const override
  {
    auto const inner = inner_->allocate(swap_machines(costs, first_, second_, swap_tasks_));
    return swap_machines(inner, first_, second_, swap_tasks_);
  }

  std::optional<PaymentVector> pay(CostMatrix const &costs) const override
  {
    auto p = inner_->pay(swap_machines(costs, first_, second_, swap_tasks_));
    if (p)
    {
      std::swap((*p)[first_], (*p)[second_]);
    }
    return p;
  }

private:
  MechanismPtr inner_;
  std::size_t  first_;
  std::size_t  second_;
  bool         swap_tasks_;
};

}  // namespace

MechanismPtr vcg(TieBreak tie_break)
{
  return std::make_shared<Vcg>(tie_break);
}

MechanismPtr greedy_load()
{
  return std::make_shared<GreedyLoad>();
}

MechanismPtr scripted(std::string name, std::map<std::string, Allocation> responses)
{
  return std::make_shared<Scripted>(std::move(name), std::move(responses));
}

MechanismPtr with_swapped_machines(MechanismPtr inner, std::size_t first, std::size_t second, bool swap_owned_tasks)
{
  return std::make_shared<Swapped>(std::move(inner), first, second, swap_owned_tasks);
}

MechanismPtr scripted_from_json(Json const &script, double big_m)
{
  if (!script.is_object() || !script.contains("responses") || !script.at("responses").is_array())
  {
    throw ParseError("script must be an object with a 'responses' array");
  }
  std::string const name = script.value("name", std::string("scripted"));

  std::map<std::string, Allocation> responses;
  for (auto const &entry : script.at("responses"))
  {
    if (!entry.is_object() || !entry.contains("allocation"))
    {
      throw ParseError("script response needs an 'allocation'");
    }
    std::string digest;
    if (entry.contains("digest"))
    {
      digest = entry.at("digest").get<std::string>();
    }
    else if (entry.contains("instance"))
    {
      digest = instance_digest(materialize(cost_matrix_from_json(entry.at("instance")), big_m));
    }
    else
    {
      throw ParseError("script response needs a 'digest' or an 'instance'");
    }
    responses.insert_or_assign(digest, allocation_from_json(entry.at("allocation")));
  }
  return scripted(name, std::move(responses));
}

std::vector<std::string> registered_mechanisms()
{
  return {"vcg", "vcg-lowest", "vcg-highest", "vcg-prefer-2", "greedy-load"};
}

MechanismPtr make_mechanism(std::string const &name)
{
  if (name == "vcg" || name == "vcg-lowest")
  {
    return vcg(TieBreak::LowestIndex);
  }
  if (name == "vcg-highest")
  {
    return vcg(TieBreak::HighestIndex);
  }
  if (name == "vcg-prefer-2")
  {
    return vcg(TieBreak::PreferMachine2);
  }
  if (name == "greedy-load")
  {
    return greedy_load();
  }
  throw PreconditionError("unknown mechanism '" + name + "'");
}

CostMatrix swap_machines(CostMatrix const &costs, std::size_t first, std::size_t second, bool swap_owned_tasks)
{
  std::size_t const n = costs.machines();
  std::size_t const m = costs.tasks();
  if (first >= n || second >= n || (swap_owned_tasks && (first >= m || second >= m)))
  {
    throw DimensionError("machine swap index out of range");
  }
  auto row_of = [&](std::size_t i) { return i == first ? second : i == second ? first : i; };
  auto col_of = [&](std::size_t j) {
    if (!swap_owned_tasks)
    {
      return j;
    }
    return j == first ? second : j == second ? first : j;
  };
  std::vector<ExtendedCost> entries(n * m);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = 0; j < m; ++j)
    {
      entries[i * m + j] = costs.at(row_of(i), col_of(j));
    }
  }
  return CostMatrix(n, m, std::move(entries));
}

Allocation swap_machines(Allocation const &alloc, std::size_t first, std::size_t second, bool swap_owned_tasks)
{
  std::size_t const n = alloc.machines();
  std::size_t const m = alloc.tasks();
  if (first >= n || second >= n || (swap_owned_tasks && (first >= m || second >= m)))
  {
    throw DimensionError("machine swap index out of range");
  }
  auto row_of = [&](std::size_t i) { return i == first ? second : i == second ? first : i; };
  auto col_of = [&](std::size_t j) {
    if (!swap_owned_tasks)
    {
      return j;
    }
    return j == first ? second : j == second ? first : j;
  };
  std::vector<std::size_t> owners(m);
  for (std::size_t j = 0; j < m; ++j)
  {
    owners[j] = row_of(alloc.owner(col_of(j)));
  }
  return Allocation(n, std::move(owners));
}

}  // namespace truthsched
