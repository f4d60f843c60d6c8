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
#include "truthsched/serialization.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace truthsched {

/// A deterministic allocation rule (with optional payments) queried on
/// finite cost matrices. Implementations hold no state between queries.
class MechanismOracle
{
public:
  virtual ~MechanismOracle() = default;

  virtual std::string name() const      = 0;
  virtual std::string tie_break() const = 0;

  /// Allocation for a finite matrix; throws PreconditionError if any entry is unbounded.
  virtual Allocation allocate(CostMatrix const &costs) const = 0;

  /// Payments, when the mechanism defines them.
  virtual std::optional<PaymentVector> pay(CostMatrix const & /*costs*/) const
  {
    return std::nullopt;
  }
};

using MechanismPtr = std::shared_ptr<MechanismOracle const>;

enum class TieBreak
{
  LowestIndex,
  HighestIndex,
  PreferMachine2,  ///< machine index 1 wins any tie it is part of, otherwise lowest index
};

/// Per-task argmin allocation with second-price payments.
MechanismPtr vcg(TieBreak tie_break = TieBreak::LowestIndex);

/// Tasks in index order, each to the machine with the smallest resulting
/// load (ties to the lowest index). Not weakly monotone.
MechanismPtr greedy_load();

/// Replays fixed allocations keyed by instance_digest() of the queried matrix.
/// Allocations are checked for shape on every query; a missing digest
/// throws MissingScript.
MechanismPtr scripted(std::string name, std::map<std::string, Allocation> responses);

/// `inner` with machines `first` and `second` swapped, and the dummy tasks
/// they own (columns `first`, `second`) swapped along with them when
/// `swap_owned_tasks` is set.
MechanismPtr with_swapped_machines(MechanismPtr inner, std::size_t first, std::size_t second,
                                   bool swap_owned_tasks = true);

/// Loads a scripted oracle from {"name", "responses": [{"digest"|"instance", "allocation"}]}.
/// Instances given inline may contain "inf", which is replaced by `big_m`
/// before the digest is taken.
MechanismPtr scripted_from_json(Json const &script, double big_m);

/// Names accepted by make_mechanism().
std::vector<std::string> registered_mechanisms();

/// Resolves "vcg", "vcg-lowest", "vcg-highest", "vcg-prefer-2", "greedy-load".
MechanismPtr make_mechanism(std::string const &name);

/// Applies a permutation of machines (and optionally of the owned dummy tasks)
/// to a matrix or allocation. Used by relabelling wrappers and the adversary.
CostMatrix swap_machines(CostMatrix const &costs, std::size_t first, std::size_t second, bool swap_owned_tasks);
Allocation swap_machines(Allocation const &alloc, std::size_t first, std::size_t second, bool swap_owned_tasks);

}  // namespace truthsched
