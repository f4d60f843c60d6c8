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

#include <compare>
#include <iosfwd>

namespace truthsched {

/// A nonnegative processing time, or the distinguished value "unbounded".
///
/// Unbounded compares greater than every finite cost and absorbs addition.
/// Construction of a negative or non-finite value throws; use
/// ExtendedCost::unbounded() for the sentinel.
class ExtendedCost
{
public:
  constexpr ExtendedCost() noexcept = default;

  ExtendedCost(double value);  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedCost unbounded() noexcept
  {
    ExtendedCost c;
    c.unbounded_ = true;
    return c;
  }

  constexpr bool is_unbounded() const noexcept
  {
    return unbounded_;
  }
  constexpr bool is_finite() const noexcept
  {
    return !unbounded_;
  }

  /// Finite value; throws PreconditionError on the unbounded sentinel.
  double value() const;

  /// Finite value, or `surrogate` when unbounded.
  constexpr double value_or(double surrogate) const noexcept
  {
    return unbounded_ ? surrogate : value_;
  }

  friend ExtendedCost operator+(ExtendedCost lhs, ExtendedCost rhs) noexcept;
  ExtendedCost &operator+=(ExtendedCost rhs) noexcept
  {
    *this = *this + rhs;
    return *this;
  }

  friend constexpr bool operator==(ExtendedCost lhs, ExtendedCost rhs) noexcept
  {
    if (lhs.unbounded_ || rhs.unbounded_)
    {
      return lhs.unbounded_ == rhs.unbounded_;
    }
    return lhs.value_ == rhs.value_;
  }

  friend constexpr std::partial_ordering operator<=>(ExtendedCost lhs, ExtendedCost rhs) noexcept
  {
    if (lhs.unbounded_ || rhs.unbounded_)
    {
      return lhs.unbounded_ <=> rhs.unbounded_;
    }
    return lhs.value_ <=> rhs.value_;
  }

private:
  double value_{0.0};
  bool   unbounded_{false};
};

inline constexpr ExtendedCost kUnbounded = ExtendedCost::unbounded();

std::ostream &operator<<(std::ostream &os, ExtendedCost c);

}  // namespace truthsched
