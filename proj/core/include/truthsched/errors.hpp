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

#include <stdexcept>
#include <string>

namespace truthsched {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Matrix/vector shapes disagree.
class DimensionError : public Error
{
public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error
{
public:
  using Error::Error;
};

/// Parameters violate the construction's invariants (ordering, strict feasibility, ...).
class InvalidParams : public Error
{
public:
  using Error::Error;
};

/// Exact search ran past its node budget.
class BudgetExhausted : public Error
{
public:
  using Error::Error;
};

/// A mechanism returned an allocation that is not one-machine-per-task.
class InfeasibleAllocation : public Error
{
public:
  using Error::Error;
};

/// A scripted oracle was queried on an instance it has no response for.
class MissingScript : public Error
{
public:
  using Error::Error;
};

/// A weak-monotonicity term involves an unbounded cost on a task whose
/// allocation changed, so the inner product is not a finite number.
class UnboundedViolation : public Error
{
public:
  UnboundedViolation(std::size_t task, std::string const &what)
    : Error(what)
    , task_(task)
  {}

  std::size_t task() const noexcept
  {
    return task_;
  }

private:
  std::size_t task_;
};

/// Malformed JSON input (instance, script or certificate).
class ParseError : public Error
{
public:
  using Error::Error;
};

}  // namespace truthsched
