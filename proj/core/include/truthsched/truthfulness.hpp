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

#include "truthsched/instances.hpp"
#include "truthsched/mechanisms.hpp"
#include "truthsched/serialization.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truthsched {

/// Disjoint task sets S, T, V covering all tasks of a single-machine deviation.
///
/// S: tasks whose allocation is known not to change; V: tasks whose cost
/// does not change; T: everything else.
struct TaskPartition
{
  std::vector<std::size_t> s;
  std::vector<std::size_t> t;
  std::vector<std::size_t> v;

  /// Throws PreconditionError unless the three sets partition {0, ..., tasks-1}.
  void validate(std::size_t tasks) const;

  /// S = `pinned`, T = `changing`, V = all remaining tasks.
  static TaskPartition from(std::size_t tasks, std::vector<std::size_t> pinned, std::vector<std::size_t> changing);
};

/// A single machine's report change that breaks weak monotonicity.
struct WmonWitness
{
  std::size_t               machine{0};
  std::optional<CostMatrix> t;        ///< first full report, when known
  std::optional<CostMatrix> t_prime;  ///< second full report, when known
  std::vector<ExtendedCost> t_row;
  std::vector<ExtendedCost> t_prime_row;
  std::vector<int>          a_row;
  std::vector<int>          a_prime_row;
  double                    value{0.0};  ///< (a - a') . (t - t'), positive for a violation
};

inline constexpr double kDefaultWitnessTolerance = 1e-9;

/// (a - a') . (t - t') over one machine's row.
///
/// Coordinates where both costs are unbounded contribute nothing when the
/// allocation agrees there, and throw UnboundedViolation when it does not.
/// A coordinate that is unbounded on one side only throws PreconditionError.
double wmon_value(std::span<int const> a_row, std::span<int const> a_prime_row,
                  std::span<ExtendedCost const> t_row, std::span<ExtendedCost const> t_prime_row);

/// The T-restricted inner product. Requires t and t' to agree on V and a, a'
/// to agree on S; throws PreconditionError otherwise. A truthful mechanism
/// always yields a value <= 0.
double restricted_wmon_value(TaskPartition const &partition, std::span<int const> a_row,
                             std::span<int const> a_prime_row, std::span<ExtendedCost const> t_row,
                             std::span<ExtendedCost const> t_prime_row);

struct PersistenceResult
{
  bool                     holds{true};
  double                   restricted_value{0.0};
  std::vector<std::size_t> changed_tasks;  ///< tasks of T whose allocation changed
};

/// Checks that lowering the costs of allocated T-tasks and raising those of
/// unallocated T-tasks leaves the T-allocation unchanged.
///
/// Preconditions (throw PreconditionError, distinct from a violation):
/// V costs unchanged, S allocation unchanged, every T cost strictly down
/// where a = 1 and strictly up where a = 0. On violation every changed term
/// is strictly positive, so restricted_value > 0.
PersistenceResult check_persistence(TaskPartition const &partition, std::span<int const> a_row,
                                    std::span<int const> a_prime_row, std::span<ExtendedCost const> t_row,
                                    std::span<ExtendedCost const> t_prime_row);

/// Builds a full witness for `machine` between (t, alloc) and (t', alloc').
WmonWitness make_witness(std::size_t machine, CostMatrix const &t, Allocation const &alloc,
                         CostMatrix const &t_prime, Allocation const &alloc_prime);

Json        to_json(WmonWitness const &w);
WmonWitness witness_from_json(Json const &j);

// --- Auditing ---------------------------------------------------------------

/// Two finite reports that differ at most in `machine`'s row.
struct DeviationPair
{
  CostMatrix  t;
  CostMatrix  t_prime;
  std::size_t machine{0};
  std::string label;
};

enum class GeneratorKind
{
  SingleEntry,  ///< one entry of one row rescaled
  RowScaling,   ///< one whole row rescaled by a common factor
  Structured,   ///< the lower-bound construction's own report changes
  Random,       ///< one row replaced by fresh random costs
};

std::string_view             to_string(GeneratorKind kind) noexcept;
std::optional<GeneratorKind> generator_kind_from_string(std::string_view name) noexcept;

struct GeneratorConfig
{
  std::size_t                machines{3};
  std::size_t                tasks{4};
  std::size_t                pairs{500};
  std::uint64_t              seed{20240917};
  std::optional<ConstructionParams> params;  ///< required for Structured
};

/// Deterministic for a fixed config. Structured ignores machines/tasks/pairs
/// and yields every transition of the construction (in both machine labellings).
std::vector<DeviationPair> generate_deviations(GeneratorKind kind, GeneratorConfig const &config);

struct FeasibilityFailure
{
  std::size_t pair_index{0};
  std::string message;
};

struct AuditReport
{
  std::string                     mechanism;
  std::size_t                     pairs_checked{0};
  std::vector<WmonWitness>        witnesses;     ///< value > tol
  std::size_t                     inconclusive{0};  ///< 0 < value <= tol
  std::vector<FeasibilityFailure> feasibility_failures;
  std::optional<double>           worst_value;   ///< largest value seen over all pairs
};

/// Queries the mechanism on both reports of every pair and collects every
/// pair whose WMON value exceeds `tol`, in generator order.
AuditReport audit_mechanism(MechanismOracle const &mech, std::span<DeviationPair const> pairs,
                            double tol = kDefaultWitnessTolerance);

}  // namespace truthsched
