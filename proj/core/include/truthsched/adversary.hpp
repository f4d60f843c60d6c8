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
#include "truthsched/truthfulness.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace truthsched {

inline constexpr int    kCertificateVersion = 1;
inline constexpr double kDefaultBoundaryDelta = 1e-6;

/// One query of the game: the matrix shown to the mechanism (unbounded
/// entries kept symbolic; the mechanism saw them as params.big_m) and the
/// allocation it returned, both in the mechanism's own machine labels.
struct TraceEntry
{
  MatrixKind                 kind{MatrixKind::A0};
  std::optional<std::size_t> detour;          ///< rank j for B2/C2
  std::optional<std::size_t> detour_machine;  ///< construction-frame machine for C2
  CostMatrix                 instance;
  Allocation                 allocation;
  std::string                check;
  std::optional<double>      analytic_opt;
};

struct RatioAtLeast
{
  double value{0.0};          ///< makespan / opt on the final query, including epsilon losses
  double formula_value{0.0};  ///< the case's closed-form ratio in (r, a)
  double makespan{0.0};
  double opt{0.0};
};

struct TruthfulnessViolation
{
  std::string  reason;
  std::size_t  from_step{0};
  std::size_t  to_step{0};
  WmonWitness  witness;
};

struct UnboundedRatio
{
  std::size_t step{0};
  std::size_t task{0};
  std::size_t machine{0};
  double      implied_ratio{0.0};  ///< makespan with bigM surrogates over the true OPT
};

using Outcome = std::variant<RatioAtLeast, TruthfulnessViolation, UnboundedRatio>;

/// Replayable record of one game against one mechanism.
///
/// `relabeled` is set when the mechanism gave the first proper task to
/// machine 1 on A0; every later query then swaps machines 0 and 1 (and their
/// dummy tasks). Witness and unbounded-task indices use the mechanism's labels.
struct Certificate
{
  int                        version{kCertificateVersion};
  std::string                mechanism;
  ConstructionParams                params;
  double                     witness_tolerance{kDefaultWitnessTolerance};
  double                     guaranteed_ratio{0.0};
  bool                       relabeled{false};
  std::optional<int>         case_taken;
  std::optional<std::size_t> detour;
  std::optional<std::size_t> detour_machine;
  std::vector<TraceEntry>    trace;
  Outcome                    outcome;
};

/// min{1 + r + a^{-1} + ... + a^{-(n-2)}, 1 + 1/r, 1 + a}: the smallest ratio
/// any case of the game can end in.
double guaranteed_ratio(ConstructionParams const &params);

/// Parameters maximising guaranteed_ratio for n machines. When the optimum
/// sits on the strict-feasibility boundary (n >= 6) r is lowered by `delta`.
ConstructionParams default_game_params(std::size_t n, double delta = kDefaultBoundaryDelta);

/// Witness threshold used by run_game: the library default, shrunk to
/// epsilon / 2 when perturbations are smaller than it.
double game_witness_tolerance(ConstructionParams const &params);

/// Plays the lower-bound game. Throws InvalidParams for bad parameters and
/// InfeasibleAllocation when the oracle breaks one-machine-per-task.
Certificate run_game(MechanismOracle const &mech, ConstructionParams const &params);

struct VerifyReport
{
  bool                     ok{true};
  std::vector<std::string> reasons;
};

/// Rebuilds every matrix from the parameters, replays the case analysis on
/// the recorded allocations and recomputes every ratio and witness.
VerifyReport verify_certificate(Certificate const &cert);

Json        to_json(Certificate const &cert);
Certificate certificate_from_json(Json const &j);

std::string_view outcome_name(Outcome const &outcome) noexcept;

}  // namespace truthsched
