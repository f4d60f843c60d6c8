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

#include "truthsched/serialization.hpp"

#include "truthsched/errors.hpp"

#include <cstdint>
#include <cstdio>

namespace truthsched {

namespace {

template <typename T>
T get_field(Json const &j, char const *key)
{
  if (!j.is_object() || !j.contains(key))
  {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  try
  {
    return j.at(key).get<T>();
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(CostMatrix const &costs)
{
  Json entries = Json::array();
  for (auto c : costs.entries())
  {
    if (c.is_unbounded())
    {
      entries.push_back("inf");
    }
    else
    {
      entries.push_back(c.value());
    }
  }
  Json j;
  j["n"]       = costs.machines();
  j["m"]       = costs.tasks();
  j["entries"] = std::move(entries);
  return j;
}

CostMatrix cost_matrix_from_json(Json const &j)
{
  auto const n = get_field<std::size_t>(j, "n");
  auto const m = get_field<std::size_t>(j, "m");
  if (!j.at("entries").is_array())
  {
    throw ParseError("'entries' must be an array");
  }
  std::vector<ExtendedCost> entries;
  for (auto const &e : j.at("entries"))
  {
    if (e.is_string() && e.get<std::string>() == "inf")
    {
      entries.push_back(kUnbounded);
    }
    else if (e.is_number())
    {
      try
      {
        entries.emplace_back(e.get<double>());
      }
      catch (PreconditionError const &err)
      {
        throw ParseError(err.what());
      }
    }
    else
    {
      throw ParseError("cost entries must be numbers or \"inf\"");
    }
  }
  try
  {
    return CostMatrix(n, m, std::move(entries));
  }
  catch (Error const &err)
  {
    throw ParseError(err.what());
  }
}

Json to_json(Allocation const &alloc)
{
  Json j = Json::array();
  for (auto const &row : alloc.grid())
  {
    j.push_back(row);
  }
  return j;
}

Allocation allocation_from_json(Json const &j)
{
  std::vector<std::vector<int>> grid;
  try
  {
    grid = j.get<std::vector<std::vector<int>>>();
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("allocation must be a 0/1 grid: ") + e.what());
  }
  return Allocation::from_grid(grid);
}

Json to_json(ConstructionParams const &params)
{
  Json j;
  j["n"]       = params.n;
  j["r"]       = params.r;
  j["a"]       = params.a;
  j["epsilon"] = params.epsilon;
  j["big_m"]   = params.big_m;
  return j;
}

ConstructionParams params_from_json(Json const &j)
{
  ConstructionParams p;
  p.n       = get_field<std::size_t>(j, "n");
  p.r       = get_field<double>(j, "r");
  p.a       = get_field<double>(j, "a");
  p.epsilon = get_field<double>(j, "epsilon");
  p.big_m   = get_field<double>(j, "big_m");
  return p;
}

std::string canonical_instance_text(CostMatrix const &costs)
{
  std::string out = "{\"n\":" + std::to_string(costs.machines()) + ",\"m\":" +
                    std::to_string(costs.tasks()) + ",\"entries\":[";
  char buf[32];
  bool first = true;
  for (auto c : costs.entries())
  {
    if (!first)
    {
      out += ',';
    }
    first = false;
    if (c.is_unbounded())
    {
      out += "\"inf\"";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%.12g", c.value());
    out += buf;
  }
  out += "]}";
  return out;
}

std::string instance_digest(CostMatrix const &costs)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_instance_text(costs))
  {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace truthsched
