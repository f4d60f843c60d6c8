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

#include "truthsched/cost.hpp"

#include "truthsched/errors.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace truthsched {

ExtendedCost::ExtendedCost(double value)
  : value_(value)
{
  if (!std::isfinite(value) || value < 0.0)
  {
    throw PreconditionError("cost must be finite and nonnegative, got " + std::to_string(value));
  }
}

double ExtendedCost::value() const
{
  if (unbounded_)
  {
    throw PreconditionError("value() called on an unbounded cost");
  }
  return value_;
}

ExtendedCost operator+(ExtendedCost lhs, ExtendedCost rhs) noexcept
{
  if (lhs.unbounded_ || rhs.unbounded_)
  {
    return ExtendedCost::unbounded();
  }
  ExtendedCost sum;
  sum.value_ = lhs.value_ + rhs.value_;
  return sum;
}

std::ostream &operator<<(std::ostream &os, ExtendedCost c)
{
  if (c.is_unbounded())
  {
    return os << "inf";
  }
  return os << c.value_or(0.0);
}

}  // namespace truthsched
