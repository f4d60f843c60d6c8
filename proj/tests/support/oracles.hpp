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

#include "truthsched/adversary.hpp"
#include "truthsched/instances.hpp"
#include "truthsched/mechanisms.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace truthsched::testing {

/// Exhaustive minimum makespan over all n^m allocations. Independent of the
/// library's branch and bound: no ordering, no pruning.
double brute_force_opt(CostMatrix const &costs);

/// Uniform costs in [0, 2) with roughly `unbounded_share` unbounded entries;
/// column 0 of each task is redrawn finite when needed.
CostMatrix random_matrix(std::mt19937_64 &rng, std::size_t machines, std::size_t tasks, double unbounded_share);

/// Construction-frame owners: dummy i on machine i, proper rank k on
/// `rank_owner(k)`.
Allocation construction_allocation(std::size_t n, std::function<std::size_t(std::size_t)> const &rank_owner);

/// Collects (matrix, allocation) responses in the construction frame and
/// emits a replay mechanism. When `relabeled` is set, matrices and answers are
/// mapped through the 0 <-> 1 swap, i.e. the mechanism is the mirror image
/// the adversary has to relabel.
class ScriptBuilder
{
public:
  ScriptBuilder(ConstructionParams params, bool relabeled = false);

  ScriptBuilder &respond(MatrixKind kind, Allocation const &construction_alloc,
                         std::optional<std::size_t> j = std::nullopt, std::optional<std::size_t> d = std::nullopt);

  MechanismPtr build(std::string name) const;

private:
  ConstructionParams                       params_;
  bool                              relabeled_;
  std::map<std::string, Allocation> responses_;
};

enum class Expected
{
  Ratio,
  Violation,
};

struct BranchScript
{
  std::string  label;
  MechanismPtr mechanism;
  int          expected_case;  ///< 0 for the first-two-tasks violation
  Expected     expected;
  std::optional<std::size_t> detour_machine;
};

/// Ten replay mechanisms walking every branch of the game for `params`:
/// each case compliant, each persistence check broken, both detour machines,
/// and the first-two-tasks violation. Requires n >= 3.
std::vector<BranchScript> branch_scripts(ConstructionParams const &params);

/// Hand-computed (a - a') . (t - t') over finite coordinates.
double hand_wmon(std::vector<int> const &a, std::vector<int> const &a_prime, std::vector<double> const &t,
                 std::vector<double> const &t_prime);

}  // namespace truthsched::testing
