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

#include "truthsched/truthfulness.hpp"

#include "truthsched/errors.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <utility>

namespace truthsched {

// --- Partitions ---------------------------------------------------------------

void TaskPartition::validate(std::size_t tasks) const
{
  std::vector<int> seen(tasks, 0);
  for (auto const *set : {&s, &t, &v})
  {
    for (std::size_t k : *set)
    {
      if (k >= tasks)
      {
        throw PreconditionError("partition refers to task " + std::to_string(k) + " of " + std::to_string(tasks));
      }
      ++seen[k];
    }
  }
  for (std::size_t k = 0; k < tasks; ++k)
  {
    if (seen[k] != 1)
    {
      throw PreconditionError("task " + std::to_string(k) + " appears " + std::to_string(seen[k]) +
                              " times in the partition");
    }
  }
}

TaskPartition TaskPartition::from(std::size_t tasks, std::vector<std::size_t> pinned, std::vector<std::size_t> changing)
{
  TaskPartition p;
  p.s = std::move(pinned);
  p.t = std::move(changing);
  std::vector<bool> used(tasks, false);
  for (std::size_t k : p.s)
  {
    if (k < tasks)
    {
      used[k] = true;
    }
  }
  for (std::size_t k : p.t)
  {
    if (k < tasks)
    {
      used[k] = true;
    }
  }
  for (std::size_t k = 0; k < tasks; ++k)
  {
    if (!used[k])
    {
      p.v.push_back(k);
    }
  }
  p.validate(tasks);
  return p;
}

// --- WMON values --------------------------------------------------------------

namespace {

void require_same_length(std::size_t a, std::size_t ap, std::size_t t, std::size_t tp)
{
  if (a != ap || a != t || a != tp)
  {
    throw DimensionError("WMON rows must all have the same length");
  }
}

double wmon_term(std::size_t k, int a, int ap, ExtendedCost t, ExtendedCost tp)
{
  if (t.is_unbounded() && tp.is_unbounded())
  {
    if (a != ap)
    {
      throw UnboundedViolation(k, "allocation of task " + std::to_string(k) + " changes where both costs are unbounded");
    }
    return 0.0;
  }
  if (t.is_unbounded() || tp.is_unbounded())
  {
    throw PreconditionError("task " + std::to_string(k) + " switches between finite and unbounded cost");
  }
  return static_cast<double>(a - ap) * (t.value() - tp.value());
}

}  // namespace

double wmon_value(std::span<int const> a_row, std::span<int const> a_prime_row, std::span<ExtendedCost const> t_row,
                  std::span<ExtendedCost const> t_prime_row)
{
  require_same_length(a_row.size(), a_prime_row.size(), t_row.size(), t_prime_row.size());
  double total = 0.0;
  for (std::size_t k = 0; k < a_row.size(); ++k)
  {
    total += wmon_term(k, a_row[k], a_prime_row[k], t_row[k], t_prime_row[k]);
  }
  return total;
}

double restricted_wmon_value(TaskPartition const &partition, std::span<int const> a_row,
                             std::span<int const> a_prime_row, std::span<ExtendedCost const> t_row,
                             std::span<ExtendedCost const> t_prime_row)
{
  require_same_length(a_row.size(), a_prime_row.size(), t_row.size(), t_prime_row.size());
  partition.validate(a_row.size());
  for (std::size_t k : partition.v)
  {
    if (!(t_row[k] == t_prime_row[k]))
    {
      throw PreconditionError("cost of V-task " + std::to_string(k) + " changes");
    }
  }
  for (std::size_t k : partition.s)
  {
    if (a_row[k] != a_prime_row[k])
    {
      throw PreconditionError("allocation of S-task " + std::to_string(k) + " changes");
    }
  }
  double total = 0.0;
  for (std::size_t k : partition.t)
  {
    total += wmon_term(k, a_row[k], a_prime_row[k], t_row[k], t_prime_row[k]);
  }
  return total;
}

PersistenceResult check_persistence(TaskPartition const &partition, std::span<int const> a_row,
                                    std::span<int const> a_prime_row, std::span<ExtendedCost const> t_row,
                                    std::span<ExtendedCost const> t_prime_row)
{
  require_same_length(a_row.size(), a_prime_row.size(), t_row.size(), t_prime_row.size());
  partition.validate(a_row.size());
  for (std::size_t k : partition.t)
  {
    if (t_row[k].is_unbounded() || t_prime_row[k].is_unbounded())
    {
      throw PreconditionError("T-task " + std::to_string(k) + " has an unbounded cost");
    }
    bool const allocated = a_row[k] == 1;
    if (allocated && !(t_prime_row[k] < t_row[k]))
    {
      throw PreconditionError("allocated T-task " + std::to_string(k) + " does not get strictly cheaper");
    }
    if (!allocated && !(t_prime_row[k] > t_row[k]))
    {
      throw PreconditionError("unallocated T-task " + std::to_string(k) + " does not get strictly dearer");
    }
  }

  PersistenceResult result;
  result.restricted_value = restricted_wmon_value(partition, a_row, a_prime_row, t_row, t_prime_row);
  for (std::size_t k : partition.t)
  {
    if (a_row[k] != a_prime_row[k])
    {
      result.changed_tasks.push_back(k);
    }
  }
  std::sort(result.changed_tasks.begin(), result.changed_tasks.end());
  result.holds = result.changed_tasks.empty();
  return result;
}

WmonWitness make_witness(std::size_t machine, CostMatrix const &t, Allocation const &alloc, CostMatrix const &t_prime,
                         Allocation const &alloc_prime)
{
  WmonWitness w;
  w.machine     = machine;
  w.t           = t;
  w.t_prime     = t_prime;
  w.t_row       = std::vector<ExtendedCost>(t.row(machine).begin(), t.row(machine).end());
  w.t_prime_row = std::vector<ExtendedCost>(t_prime.row(machine).begin(), t_prime.row(machine).end());
  w.a_row       = alloc.row(machine);
  w.a_prime_row = alloc_prime.row(machine);
  w.value       = wmon_value(w.a_row, w.a_prime_row, w.t_row, w.t_prime_row);
  return w;
}

// --- JSON -----------------------------------------------------------------------

namespace {

Json row_to_json(std::vector<ExtendedCost> const &row)
{
  Json out = Json::array();
  for (auto c : row)
  {
    if (c.is_unbounded())
    {
      out.push_back("inf");
    }
    else
    {
      out.push_back(c.value());
    }
  }
  return out;
}

std::vector<ExtendedCost> row_from_json(Json const &j)
{
  if (!j.is_array())
  {
    throw ParseError("cost row must be an array");
  }
  std::vector<ExtendedCost> out;
  for (auto const &e : j)
  {
    if (e.is_string() && e.get<std::string>() == "inf")
    {
      out.push_back(kUnbounded);
    }
    else if (e.is_number() && e.get<double>() >= 0.0)
    {
      out.emplace_back(e.get<double>());
    }
    else
    {
      throw ParseError("cost row entries must be nonnegative numbers or \"inf\"");
    }
  }
  return out;
}

}  // namespace

Json to_json(WmonWitness const &w)
{
  Json j;
  j["machine"]     = w.machine;
  j["value"]       = w.value;
  j["a_row"]       = w.a_row;
  j["a_prime_row"] = w.a_prime_row;
  j["t_row"]       = row_to_json(w.t_row);
  j["t_prime_row"] = row_to_json(w.t_prime_row);
  j["t"]           = w.t ? to_json(*w.t) : Json(nullptr);
  j["t_prime"]     = w.t_prime ? to_json(*w.t_prime) : Json(nullptr);
  return j;
}

WmonWitness witness_from_json(Json const &j)
{
  if (!j.is_object())
  {
    throw ParseError("witness must be an object");
  }
  WmonWitness w;
  try
  {
    w.machine     = j.at("machine").get<std::size_t>();
    w.value       = j.at("value").get<double>();
    w.a_row       = j.at("a_row").get<std::vector<int>>();
    w.a_prime_row = j.at("a_prime_row").get<std::vector<int>>();
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("bad witness: ") + e.what());
  }
  w.t_row       = row_from_json(j.at("t_row"));
  w.t_prime_row = row_from_json(j.at("t_prime_row"));
  if (j.contains("t") && !j.at("t").is_null())
  {
    w.t = cost_matrix_from_json(j.at("t"));
  }
  if (j.contains("t_prime") && !j.at("t_prime").is_null())
  {
    w.t_prime = cost_matrix_from_json(j.at("t_prime"));
  }
  return w;
}

// --- Generators ---------------------------------------------------------------

namespace {

constexpr std::array<std::pair<GeneratorKind, std::string_view>, 4> kGeneratorNames{{
    {GeneratorKind::SingleEntry, "single-entry"},
    {GeneratorKind::RowScaling, "row-scaling"},
    {GeneratorKind::Structured, "structured"},
    {GeneratorKind::Random, "random"},
}};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64 &rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64 &rng, std::size_t bound)
{
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(bound));
}

double random_cost(std::mt19937_64 &rng)
{
  return 0.05 + unit(rng);
}

CostMatrix random_matrix(std::mt19937_64 &rng, std::size_t n, std::size_t m)
{
  std::vector<ExtendedCost> entries;
  entries.reserve(n * m);
  for (std::size_t k = 0; k < n * m; ++k)
  {
    entries.emplace_back(random_cost(rng));
  }
  return CostMatrix(n, m, std::move(entries));
}

CostMatrix replace_row(CostMatrix const &t, std::size_t machine, std::vector<double> const &row)
{
  std::vector<ExtendedCost> entries(t.entries().begin(), t.entries().end());
  for (std::size_t j = 0; j < t.tasks(); ++j)
  {
    entries[machine * t.tasks() + j] = row[j];
  }
  return CostMatrix(t.machines(), t.tasks(), std::move(entries));
}

std::vector<double> finite_row(CostMatrix const &t, std::size_t machine)
{
  std::vector<double> row;
  for (auto c : t.row(machine))
  {
    row.push_back(c.value());
  }
  return row;
}

void append_structured(std::vector<DeviationPair> &out, ConstructionParams const &p)
{
  struct Step
  {
    CostMatrix  from;
    CostMatrix  to;
    std::size_t machine;
    std::string label;
  };
  std::vector<Step> steps;
  auto const        a1 = build_matrix(MatrixKind::A1, p);
  steps.push_back({build_matrix(MatrixKind::A0, p), a1, 0, "A0->A1"});
  steps.push_back({a1, build_matrix(MatrixKind::B1, p), 0, "A1->B1"});
  for (std::size_t j = 2; j <= p.n - 1; ++j)
  {
    auto const b2 = build_matrix(MatrixKind::B2, p, j);
    steps.push_back({a1, b2, 0, "A1->B2[j=" + std::to_string(j) + "]"});
    for (std::size_t d : {std::size_t{1}, j})
    {
      steps.push_back({b2, build_matrix(MatrixKind::C2, p, j, d), d,
                       "B2->C2[j=" + std::to_string(j) + ",d=" + std::to_string(d) + "]"});
    }
  }
  auto const b3 = build_matrix(MatrixKind::B3, p);
  steps.push_back({a1, b3, 0, "A1->B3"});
  steps.push_back({b3, build_matrix(MatrixKind::C3, p), 1, "B3->C3"});

  for (bool swapped : {false, true})
  {
    for (auto const &s : steps)
    {
      auto from = materialize(s.from, p.big_m);
      auto to   = materialize(s.to, p.big_m);
      auto who  = s.machine;
      if (swapped)
      {
        from = swap_machines(from, 0, 1, true);
        to   = swap_machines(to, 0, 1, true);
        who  = who == 0 ? 1 : who == 1 ? 0 : who;
      }
      out.push_back({std::move(from), std::move(to), who, (swapped ? "swapped " : "") + s.label});
    }
  }
}

}  // namespace

std::string_view to_string(GeneratorKind kind) noexcept
{
  for (auto const &[k, name] : kGeneratorNames)
  {
    if (k == kind)
    {
      return name;
    }
  }
  return "?";
}

std::optional<GeneratorKind> generator_kind_from_string(std::string_view name) noexcept
{
  for (auto const &[k, s] : kGeneratorNames)
  {
    if (s == name)
    {
      return k;
    }
  }
  return std::nullopt;
}

std::vector<DeviationPair> generate_deviations(GeneratorKind kind, GeneratorConfig const &config)
{
  std::vector<DeviationPair> out;
  if (kind == GeneratorKind::Structured)
  {
    if (!config.params)
    {
      throw PreconditionError("the structured generator needs construction parameters");
    }
    append_structured(out, *config.params);
    return out;
  }
  if (config.machines == 0 || config.tasks == 0)
  {
    throw PreconditionError("generator needs at least one machine and one task");
  }

  std::mt19937_64 rng(config.seed);
  out.reserve(config.pairs);
  for (std::size_t k = 0; k < config.pairs; ++k)
  {
    auto const        t       = random_matrix(rng, config.machines, config.tasks);
    std::size_t const machine = below(rng, config.machines);
    auto              row     = finite_row(t, machine);
    switch (kind)
    {
    case GeneratorKind::SingleEntry:
      row[below(rng, config.tasks)] *= 0.5 + unit(rng);
      break;
    case GeneratorKind::RowScaling:
    {
      double const factor = 0.5 + unit(rng);
      for (double &c : row)
      {
        c *= factor;
      }
      break;
    }
    case GeneratorKind::Random:
      for (double &c : row)
      {
        c = random_cost(rng);
      }
      break;
    case GeneratorKind::Structured:
      break;
    }
    out.push_back({t, replace_row(t, machine, row), machine, std::string(to_string(kind)) + " #" + std::to_string(k)});
  }
  return out;
}

// --- Audit ----------------------------------------------------------------------

AuditReport audit_mechanism(MechanismOracle const &mech, std::span<DeviationPair const> pairs, double tol)
{
  AuditReport report;
  report.mechanism = mech.name();
  for (std::size_t idx = 0; idx < pairs.size(); ++idx)
  {
    auto const &pair = pairs[idx];
    if (pair.t.machines() != pair.t_prime.machines() || pair.t.tasks() != pair.t_prime.tasks())
    {
      throw DimensionError("deviation pair " + std::to_string(idx) + " has mismatched shapes");
    }
    if (!pair.t.all_finite() || !pair.t_prime.all_finite())
    {
      throw PreconditionError("deviation pair " + std::to_string(idx) + " is not finite");
    }
    for (std::size_t i = 0; i < pair.t.machines(); ++i)
    {
      if (i == pair.machine)
      {
        continue;
      }
      if (!std::equal(pair.t.row(i).begin(), pair.t.row(i).end(), pair.t_prime.row(i).begin()))
      {
        throw PreconditionError("deviation pair " + std::to_string(idx) + " changes more than one machine");
      }
    }

    std::optional<Allocation> a;
    std::optional<Allocation> a_prime;
    try
    {
      a       = mech.allocate(pair.t);
      a_prime = mech.allocate(pair.t_prime);
      for (auto const *alloc : {&*a, &*a_prime})
      {
        if (alloc->machines() != pair.t.machines() || alloc->tasks() != pair.t.tasks())
        {
          throw InfeasibleAllocation("allocation has the wrong shape");
        }
      }
    }
    catch (InfeasibleAllocation const &e)
    {
      report.feasibility_failures.push_back({idx, e.what()});
      continue;
    }

    ++report.pairs_checked;
    auto witness       = make_witness(pair.machine, pair.t, *a, pair.t_prime, *a_prime);
    report.worst_value = report.worst_value ? std::max(*report.worst_value, witness.value) : witness.value;
    if (witness.value > tol)
    {
      report.witnesses.push_back(std::move(witness));
    }
    else if (witness.value > 0.0)
    {
      ++report.inconclusive;
    }
  }
  return report;
}

}  // namespace truthsched
