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

#include <nlohmann/json.hpp>

#include <string>

namespace truthsched {

using Json = nlohmann::ordered_json;

/// {"n", "m", "entries"} with row-major entries; unbounded encodes as "inf".
Json       to_json(CostMatrix const &costs);
CostMatrix cost_matrix_from_json(Json const &j);

/// Allocation as a 0/1 grid, one row per machine.
Json       to_json(Allocation const &alloc);
Allocation allocation_from_json(Json const &j);

Json        to_json(ConstructionParams const &params);
ConstructionParams params_from_json(Json const &j);

/// Canonical text of an instance: compact JSON with every finite entry
/// printed to 12 significant digits. Identical instances up to that
/// precision produce identical text.
std::string canonical_instance_text(CostMatrix const &costs);

/// 64-bit FNV-1a of canonical_instance_text, as 16 lowercase hex digits.
std::string instance_digest(CostMatrix const &costs);

}  // namespace truthsched
