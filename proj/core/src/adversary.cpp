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

#include "truthsched/adversary.hpp"

#include "truthsched/bounds.hpp"
#include "truthsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace truthsched {

namespace {

std::size_t swap01(std::size_t k)
{
  return k == 0 ? 1 : k == 1 ? 0 : k;
}

double power_sum_inv(double a, std::size_t top)
{
  double total = 0.0;
  for (std::size_t k = 1; k <= top; ++k)
  {
    total += std::pow(a, -static_cast<double>(k));
  }
  return total;
}

std::vector<std::size_t> proper_tasks(std::size_t n, std::size_t first_rank, std::size_t last_rank)
{
  std::vector<std::size_t> out;
  for (std::size_t rank = first_rank; rank <= last_rank; ++rank)
  {
    out.push_back(proper_task(n, rank));
  }
  return out;
}

std::string describe(std::string const &label, std::vector<std::size_t> const &tasks)
{
  std::ostringstream os;
  os << label << "{";
  for (std::size_t k = 0; k < tasks.size(); ++k)
  {
    os << (k ? "," : "") << tasks[k];
  }
  os << "}";
  return os.str();
}

/// One persistence step of the game in the construction frame.
struct PersistenceStep
{
  std::size_t              machine;
  std::vector<std::size_t> pinned;
  std::vector<std::size_t> changing;

  std::string check() const
  {
    return "persistence machine " + std::to_string(machine) + " " + describe("S=", pinned) + " " +
           describe("T=", changing);
  }
};

/// Case-dependent closed forms, shared by the game and the verifier.
double analytic_opt_for(int game_case, ConstructionParams const &p, std::optional<std::size_t> detour)
{
  switch (game_case)
  {
  case 1:
    return 1.0;
  case 2:
    return std::pow(p.a, -static_cast<double>(*detour - 1)) + p.epsilon;
  case 3:
    return std::max(p.r + p.epsilon, 1.0 / p.a);
  default:
    throw PreconditionError("unknown case");
  }
}

double formula_value_for(int game_case, ConstructionParams const &p)
{
  switch (game_case)
  {
  case 1:
    return 1.0 + p.r + power_sum_inv(p.a, p.n - 2);
  case 2:
    return 1.0 + p.a;
  case 3:
    return 1.0 + std::min(1.0 / p.r, p.a);
  default:
    throw PreconditionError("unknown case");
  }
}

std::optional<std::size_t> first_unbounded_assignment(Allocation const &alloc, CostMatrix const &costs)
{
  for (std::size_t j = 0; j < costs.tasks(); ++j)
  {
    if (costs.at(alloc.owner(j), j).is_unbounded())
    {
      return j;
    }
  }
  return std::nullopt;
}

double implied_unbounded_ratio(Allocation const &alloc, CostMatrix const &costs, double big_m)
{
  double const span = makespan(alloc, materialize(costs, big_m)).value();
  double const opt  = optimal_makespan(costs);
  return opt > 0.0 ? span / opt : std::numeric_limits<double>::infinity();
}

CostMatrix present(CostMatrix const &m, bool relabeled)
{
  return relabeled ? swap_machines(m, 0, 1, true) : m;
}

Allocation to_construction_frame(Allocation const &a, bool relabeled)
{
  return relabeled ? swap_machines(a, 0, 1, true) : a;
}

std::optional<std::size_t> lowest_missing_rank(Allocation const &construction_alloc, std::size_t n)
{
  for (std::size_t rank = 1; rank <= n - 1; ++rank)
  {
    if (construction_alloc.owner(proper_task(n, rank)) != 0)
    {
      return rank;
    }
  }
  return std::nullopt;
}

/// Persistence steps of each case, indexed by the query they lead into.
PersistenceStep step_for(MatrixKind kind, std::size_t n, std::optional<std::size_t> j, std::optional<std::size_t> d)
{
  switch (kind)
  {
  case MatrixKind::B1:
    return {0, {dummy_task(0)}, proper_tasks(n, 1, n - 1)};
  case MatrixKind::B2:
    return {0, {}, proper_tasks(n, 1, *j)};
  case MatrixKind::C2:
    return {*d, {dummy_task(*d)}, {proper_task(n, *j)}};
  case MatrixKind::B3:
    return {0, {}, proper_tasks(n, 1, 2)};
  case MatrixKind::C3:
    return {1, {dummy_task(1)}, {proper_task(n, 1)}};
  default:
    throw PreconditionError("no persistence step leads into this matrix");
  }
}

class Game
{
public:
  Game(MechanismOracle const &mech, ConstructionParams const &params)
    : mech_(mech)
    , p_(params)
  {
    cert_.mechanism         = mech.name();
    cert_.params            = params;
    cert_.witness_tolerance = game_witness_tolerance(params);
    cert_.guaranteed_ratio  = guaranteed_ratio(params);
  }

  Certificate play()
  {
    std::size_t const n = p_.n;

    // A0: dummies must go to their owners, the first proper task to machine 0 or 1.
    if (!query(MatrixKind::A0, {}, {}, "finite-ratio; relabel if machine 1 takes the first proper task"))
    {
      return finish();
    }
    if (cert_.trace.back().allocation.owner(proper_task(n, 1)) == 1)
    {
      cert_.relabeled = true;
    }

    if (!query(MatrixKind::A1, {}, {}, "finite-ratio; machine 0 keeps one of the first two proper tasks"))
    {
      return finish();
    }
    Allocation const a1 = construction_alloc(1);
    bool const       has_first  = a1.owner(proper_task(n, 1)) == 0;
    bool const       has_second = a1.owner(proper_task(n, 2)) == 0;
    if (!has_first && !has_second)
    {
      emit_first_two_violation();
      return finish();
    }

    auto const missing = lowest_missing_rank(a1, n);
    if (!missing)
    {
      cert_.case_taken = 1;
      if (persistence_query(MatrixKind::B1, {}, {}))
      {
        emit_ratio(1);
      }
    }
    else if (has_first)
    {
      std::size_t const j = *missing;
      cert_.case_taken    = 2;
      cert_.detour        = j;
      if (!persistence_query(MatrixKind::B2, j, {}))
      {
        return finish();
      }
      std::size_t const d  = construction_alloc(cert_.trace.size() - 1).owner(proper_task(n, j));
      cert_.detour_machine = d;
      if (persistence_query(MatrixKind::C2, j, d))
      {
        emit_ratio(2);
      }
    }
    else
    {
      cert_.case_taken = 3;
      if (persistence_query(MatrixKind::B3, {}, {}) && persistence_query(MatrixKind::C3, {}, {}))
      {
        emit_ratio(3);
      }
    }
    return finish();
  }

private:
  Allocation construction_alloc(std::size_t step) const
  {
    return to_construction_frame(cert_.trace[step].allocation, cert_.relabeled);
  }

  std::size_t real_machine(std::size_t k) const
  {
    return cert_.relabeled ? swap01(k) : k;
  }

  // Records the query; false when the game ended with an unbounded assignment.
  bool query(MatrixKind kind, std::optional<std::size_t> j, std::optional<std::size_t> d, std::string check)
  {
    CostMatrix const shown = present(build_matrix(kind, p_, j, d), cert_.relabeled);
    Allocation       alloc = mech_.allocate(materialize(shown, p_.big_m));
    if (alloc.machines() != shown.machines() || alloc.tasks() != shown.tasks())
    {
      throw InfeasibleAllocation(mech_.name() + " returned an allocation of the wrong shape on " +
                                 std::string(to_string(kind)));
    }
    std::size_t const step = cert_.trace.size();
    cert_.trace.push_back(TraceEntry{kind, j, d, shown, alloc, std::move(check), std::nullopt});

    if (auto task = first_unbounded_assignment(alloc, shown))
    {
      cert_.outcome = UnboundedRatio{step, *task, alloc.owner(*task), implied_unbounded_ratio(alloc, shown, p_.big_m)};
      ended_        = true;
      return false;
    }
    return true;
  }

  bool persistence_query(MatrixKind kind, std::optional<std::size_t> j, std::optional<std::size_t> d)
  {
    PersistenceStep const step = step_for(kind, p_.n, j, d);
    if (!query(kind, j, d, step.check()))
    {
      return false;
    }
    std::size_t const cur  = cert_.trace.size() - 1;
    std::size_t const prev = cur - 1;

    CostMatrix const before = build_matrix(cert_.trace[prev].kind, p_, cert_.trace[prev].detour,
                                           cert_.trace[prev].detour_machine);
    CostMatrix const after  = build_matrix(kind, p_, j, d);
    auto const       a      = construction_alloc(prev).row(step.machine);
    auto const       a2     = construction_alloc(cur).row(step.machine);
    auto const partition    = TaskPartition::from(p_.n * 2 - 1, step.pinned, step.changing);
    auto const result = check_persistence(partition, a, a2, before.row(step.machine), after.row(step.machine));
    if (result.holds)
    {
      return true;
    }
    emit_violation("persistence", prev, cur, real_machine(step.machine));
    return false;
  }

  void emit_first_two_violation()
  {
    std::size_t const n         = p_.n;
    auto const        partition = TaskPartition::from(2 * n - 1, {}, proper_tasks(n, 1, n - 1));
    CostMatrix const  a0        = build_matrix(MatrixKind::A0, p_);
    CostMatrix const  a1        = build_matrix(MatrixKind::A1, p_);
    double const      value     = restricted_wmon_value(partition, construction_alloc(0).row(0),
                                                        construction_alloc(1).row(0), a0.row(0), a1.row(0));
    if (!(value > cert_.witness_tolerance))
    {
      throw Error("first-two-proper-tasks argument produced a non-positive witness; parameters too close to "
                  "the feasibility boundary");
    }
    emit_violation("machine 0 lost both of the first two proper tasks", 0, 1, real_machine(0));
  }

  void emit_violation(std::string reason, std::size_t from, std::size_t to, std::size_t machine)
  {
    auto const &x = cert_.trace[from];
    auto const &y = cert_.trace[to];
    WmonWitness w = make_witness(machine, x.instance, x.allocation, y.instance, y.allocation);
    if (!(w.value > cert_.witness_tolerance))
    {
      throw Error("violation witness did not exceed the tolerance (value " + std::to_string(w.value) + ")");
    }
    cert_.outcome = TruthfulnessViolation{std::move(reason), from, to, std::move(w)};
    ended_        = true;
  }

  void emit_ratio(int game_case)
  {
    auto &last         = cert_.trace.back();
    double const opt   = analytic_opt_for(game_case, p_, cert_.detour);
    last.analytic_opt  = opt;
    double const span  = makespan(last.allocation, last.instance).value();
    cert_.outcome      = RatioAtLeast{span / opt, formula_value_for(game_case, p_), span, opt};
    ended_             = true;
  }

  Certificate finish()
  {
    if (!ended_)
    {
      throw Error("game ended without an outcome");
    }
    return std::move(cert_);
  }

  MechanismOracle const &mech_;
  ConstructionParams            p_;
  Certificate            cert_;
  bool                   ended_{false};
};

}  // namespace

double guaranteed_ratio(ConstructionParams const &params)
{
  double const sum_branch = 1.0 + params.r + power_sum_inv(params.a, params.n - 2);
  return std::min({sum_branch, 1.0 + 1.0 / params.r, 1.0 + params.a});
}

ConstructionParams default_game_params(std::size_t n, double delta)
{
  BoundSolution const sol = analytic_bound(n);
  double              r   = sol.r;
  bool const on_boundary  = std::find(sol.tight.begin(), sol.tight.end(), Constraint::RandaBoundary) != sol.tight.end();
  if (on_boundary)
  {
    r -= delta;
  }
  ConstructionParams p = ConstructionParams::with_defaults(n, r, sol.a);
  p.validate();
  return p;
}

double game_witness_tolerance(ConstructionParams const &params)
{
  return std::min(kDefaultWitnessTolerance, 0.5 * params.epsilon);
}

Certificate run_game(MechanismOracle const &mech, ConstructionParams const &params)
{
  params.validate();
  return Game(mech, params).play();
}

std::string_view outcome_name(Outcome const &outcome) noexcept
{
  switch (outcome.index())
  {
  case 0:
    return "RatioAtLeast";
  case 1:
    return "TruthfulnessViolation";
  default:
    return "UnboundedRatio";
  }
}

// --- Verification ---------------------------------------------------------------

namespace {

bool close(double x, double y, double rel = 1e-12)
{
  return std::fabs(x - y) <= rel * std::max({1.0, std::fabs(x), std::fabs(y)});
}

bool same_matrix(CostMatrix const &x, CostMatrix const &y)
{
  if (x.machines() != y.machines() || x.tasks() != y.tasks())
  {
    return false;
  }
  for (std::size_t k = 0; k < x.entries().size(); ++k)
  {
    auto const u = x.entries()[k];
    auto const v = y.entries()[k];
    if (u.is_unbounded() != v.is_unbounded())
    {
      return false;
    }
    if (u.is_finite() && !close(u.value(), v.value()))
    {
      return false;
    }
  }
  return true;
}

class Verifier
{
public:
  explicit Verifier(Certificate const &cert)
    : c_(cert)
  {}

  VerifyReport run()
  {
    if (c_.version != kCertificateVersion)
    {
      fail("unsupported certificate version " + std::to_string(c_.version));
      return report_;
    }
    try
    {
      c_.params.validate();
    }
    catch (Error const &e)
    {
      fail(std::string("invalid parameters: ") + e.what());
      return report_;
    }
    if (!close(c_.guaranteed_ratio, guaranteed_ratio(c_.params)))
    {
      fail("guaranteed ratio does not match the parameters");
    }
    if (!close(c_.witness_tolerance, game_witness_tolerance(c_.params)))
    {
      fail("witness tolerance does not match the parameters");
    }
    try
    {
      check_trace();
    }
    catch (Error const &e)
    {
      fail(std::string("trace could not be replayed: ") + e.what());
    }
    return report_;
  }

private:
  void fail(std::string reason)
  {
    report_.ok = false;
    report_.reasons.push_back(std::move(reason));
  }

  Allocation frame(std::size_t step) const
  {
    return to_construction_frame(c_.trace[step].allocation, c_.relabeled);
  }

  std::size_t real_machine(std::size_t k) const
  {
    return c_.relabeled ? swap01(k) : k;
  }

  // Kinds the game must query for the recorded allocations, in order.
  std::vector<MatrixKind> expected_kinds(std::optional<int> game_case) const
  {
    switch (game_case.value_or(0))
    {
    case 1:
      return {MatrixKind::A0, MatrixKind::A1, MatrixKind::B1};
    case 2:
      return {MatrixKind::A0, MatrixKind::A1, MatrixKind::B2, MatrixKind::C2};
    case 3:
      return {MatrixKind::A0, MatrixKind::A1, MatrixKind::B3, MatrixKind::C3};
    default:
      return {MatrixKind::A0, MatrixKind::A1};
    }
  }

  void check_trace()
  {
    auto const  &trace = c_.trace;
    std::size_t  n     = c_.params.n;
    if (trace.empty() || trace.front().kind != MatrixKind::A0)
    {
      fail("trace must start with A0");
      return;
    }

    bool const expect_relabel = trace[0].allocation.machines() == n && trace[0].allocation.tasks() == 2 * n - 1 &&
                                trace[0].allocation.owner(proper_task(n, 1)) == 1;
    if (expect_relabel != c_.relabeled)
    {
      fail("relabel flag disagrees with the A0 allocation");
    }

    // Matrices and shapes.
    for (std::size_t s = 0; s < trace.size(); ++s)
    {
      auto const &e = trace[s];
      if (e.allocation.machines() != n || e.allocation.tasks() != 2 * n - 1)
      {
        fail("step " + std::to_string(s) + ": allocation has the wrong shape");
        return;
      }
      CostMatrix const rebuilt = present(build_matrix(e.kind, c_.params, e.detour, e.detour_machine), c_.relabeled);
      if (!same_matrix(rebuilt, e.instance))
      {
        fail("step " + std::to_string(s) + ": matrix " + std::string(to_string(e.kind)) +
             " does not match the parameters");
      }
    }

    // Unbounded assignments may only appear at the final step of an UnboundedRatio certificate.
    for (std::size_t s = 0; s < trace.size(); ++s)
    {
      auto const task = first_unbounded_assignment(trace[s].allocation, trace[s].instance);
      bool const last = s + 1 == trace.size();
      if (task && !(last && std::holds_alternative<UnboundedRatio>(c_.outcome)))
      {
        fail("step " + std::to_string(s) + ": unbounded assignment not reported");
      }
    }

    // Case analysis from A1.
    std::optional<int>         game_case;
    std::optional<std::size_t> j;
    std::optional<std::size_t> d;
    if (trace.size() >= 2)
    {
      auto const a1         = frame(1);
      bool const has_first  = a1.owner(proper_task(n, 1)) == 0;
      bool const has_second = a1.owner(proper_task(n, 2)) == 0;
      auto const missing    = lowest_missing_rank(a1, n);
      if (has_first || has_second)
      {
        game_case = !missing ? 1 : has_first ? 2 : 3;
      }
      if (game_case == 2)
      {
        j = missing;
        if (trace.size() >= 3)
        {
          d = frame(2).owner(proper_task(n, *j));
        }
      }
    }
    bool const unbounded_early = std::holds_alternative<UnboundedRatio>(c_.outcome) && trace.size() <= 2;
    if (!unbounded_early && game_case != c_.case_taken)
    {
      fail("recorded case does not follow from the A1 allocation");
    }
    if (!unbounded_early && (j != c_.detour || (trace.size() >= 4 && d != c_.detour_machine)))
    {
      fail("recorded detour does not follow from the allocations");
    }

    auto const kinds = expected_kinds(game_case);
    if (trace.size() > kinds.size())
    {
      fail("trace is longer than the case allows");
      return;
    }
    for (std::size_t s = 0; s < trace.size(); ++s)
    {
      if (trace[s].kind != kinds[s])
      {
        fail("step " + std::to_string(s) + " should query " + std::string(to_string(kinds[s])));
      }
      if (trace[s].kind == MatrixKind::B2 || trace[s].kind == MatrixKind::C2)
      {
        if (trace[s].detour != j)
        {
          fail("step " + std::to_string(s) + " uses the wrong detour rank");
        }
      }
      if (trace[s].kind == MatrixKind::C2 && trace[s].detour_machine != d)
      {
        fail("step " + std::to_string(s) + " uses the wrong detour machine");
      }
    }

    // Persistence along the trace; a failure must be the certificate's violation.
    std::optional<std::size_t> first_break;
    for (std::size_t s = 2; s < trace.size(); ++s)
    {
      if (first_unbounded_assignment(trace[s].allocation, trace[s].instance))
      {
        break;
      }
      auto const step      = step_for(trace[s].kind, n, trace[s].detour, trace[s].detour_machine);
      auto const partition = TaskPartition::from(2 * n - 1, step.pinned, step.changing);
      auto const before    = build_matrix(trace[s - 1].kind, c_.params, trace[s - 1].detour, trace[s - 1].detour_machine);
      auto const after     = build_matrix(trace[s].kind, c_.params, trace[s].detour, trace[s].detour_machine);
      auto const result    = check_persistence(partition, frame(s - 1).row(step.machine), frame(s).row(step.machine),
                                               before.row(step.machine), after.row(step.machine));
      if (!result.holds)
      {
        first_break = s;
        break;
      }
    }

    std::visit([&](auto const &o) { check_outcome(o, game_case, j, first_break); }, c_.outcome);
  }

  void check_outcome(RatioAtLeast const &o, std::optional<int> game_case, std::optional<std::size_t> j,
                     std::optional<std::size_t> first_break)
  {
    auto const &trace = c_.trace;
    if (!game_case || trace.size() != expected_kinds(game_case).size())
    {
      fail("ratio outcome requires a completed case");
      return;
    }
    if (first_break)
    {
      fail("persistence fails at step " + std::to_string(*first_break) + " but no violation was reported");
    }
    auto const &last = trace.back();
    double const opt = analytic_opt_for(*game_case, c_.params, j);
    if (!last.analytic_opt || !close(*last.analytic_opt, opt))
    {
      fail("final analytic OPT does not match the case");
    }
    double const exact_opt = optimal_makespan(last.instance);
    if (!close(exact_opt, opt))
    {
      fail("analytic OPT disagrees with exact search (" + std::to_string(exact_opt) + ")");
    }
    double const span = makespan(last.allocation, last.instance).value();
    if (!close(span, o.makespan) || !close(opt, o.opt))
    {
      fail("recorded makespan or OPT differs from the trace");
    }
    if (!close(o.value, span / opt))
    {
      fail("recorded ratio differs from makespan / OPT of the final query");
    }
    if (!close(o.formula_value, formula_value_for(*game_case, c_.params)))
    {
      fail("recorded closed-form ratio differs from the case formula");
    }
  }

  void check_outcome(TruthfulnessViolation const &o, std::optional<int> game_case, std::optional<std::size_t>,
                     std::optional<std::size_t> first_break)
  {
    auto const &trace = c_.trace;
    if (o.to_step != o.from_step + 1 || o.to_step + 1 != trace.size())
    {
      fail("violation must relate the last two queries");
      return;
    }
    auto const &x = trace[o.from_step];
    auto const &y = trace[o.to_step];
    auto const &w = o.witness;
    if (!w.t || !w.t_prime || !same_matrix(*w.t, x.instance) || !same_matrix(*w.t_prime, y.instance))
    {
      fail("witness matrices differ from the trace");
    }
    if (w.machine >= c_.params.n || w.a_row != x.allocation.row(w.machine) ||
        w.a_prime_row != y.allocation.row(w.machine))
    {
      fail("witness allocations differ from the trace");
      return;
    }
    auto const t_row  = x.instance.row(w.machine);
    auto const tp_row = y.instance.row(w.machine);
    if (!std::equal(t_row.begin(), t_row.end(), w.t_row.begin(), w.t_row.end()) ||
        !std::equal(tp_row.begin(), tp_row.end(), w.t_prime_row.begin(), w.t_prime_row.end()))
    {
      fail("witness cost rows differ from the trace");
    }
    double const value = wmon_value(x.allocation.row(w.machine), y.allocation.row(w.machine), t_row, tp_row);
    if (!close(value, w.value))
    {
      fail("witness value does not recompute");
    }
    if (!(value > c_.witness_tolerance))
    {
      fail("witness value is not above the tolerance");
    }

    if (o.to_step == 1)
    {
      if (game_case)
      {
        fail("first-two-proper-tasks violation reported although machine 0 kept one of them");
      }
      if (w.machine != real_machine(0))
      {
        fail("first-two-proper-tasks violation names the wrong machine");
      }
    }
    else
    {
      if (first_break != o.to_step)
      {
        fail("reported persistence violation is not the first break in the trace");
      }
      auto const step = step_for(y.kind, c_.params.n, y.detour, y.detour_machine);
      if (w.machine != real_machine(step.machine))
      {
        fail("persistence violation names the wrong machine");
      }
    }
  }

  void check_outcome(UnboundedRatio const &o, std::optional<int>, std::optional<std::size_t>,
                     std::optional<std::size_t>)
  {
    auto const &trace = c_.trace;
    if (o.step + 1 != trace.size())
    {
      fail("unbounded outcome must refer to the final query");
      return;
    }
    auto const &last = trace.back();
    auto const  task = first_unbounded_assignment(last.allocation, last.instance);
    if (!task || *task != o.task || last.allocation.owner(o.task) != o.machine)
    {
      fail("unbounded outcome does not match the final allocation");
      return;
    }
    if (!close(o.implied_ratio, implied_unbounded_ratio(last.allocation, last.instance, c_.params.big_m)))
    {
      fail("implied ratio does not recompute");
    }
  }

  Certificate const &c_;
  VerifyReport       report_;
};

}  // namespace

VerifyReport verify_certificate(Certificate const &cert)
{
  return Verifier(cert).run();
}

// --- JSON -------------------------------------------------------------------------

namespace {

template <typename T>
Json optional_json(std::optional<T> const &v)
{
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(Json const &j, char const *key)
{
  if (!j.contains(key) || j.at(key).is_null())
  {
    return std::nullopt;
  }
  return j.at(key).get<T>();
}

Json outcome_json(Outcome const &outcome)
{
  Json j;
  j["type"] = outcome_name(outcome);
  std::visit(
      [&](auto const &o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RatioAtLeast>)
        {
          j["value"]         = o.value;
          j["formula_value"] = o.formula_value;
          j["makespan"]      = o.makespan;
          j["opt"]           = o.opt;
        }
        else if constexpr (std::is_same_v<T, TruthfulnessViolation>)
        {
          j["reason"]    = o.reason;
          j["from_step"] = o.from_step;
          j["to_step"]   = o.to_step;
          j["witness"]   = to_json(o.witness);
        }
        else
        {
          j["step"]          = o.step;
          j["task"]          = o.task;
          j["machine"]       = o.machine;
          j["implied_ratio"] = o.implied_ratio;
        }
      },
      outcome);
  return j;
}

Outcome outcome_from_json(Json const &j)
{
  auto const type = j.at("type").get<std::string>();
  if (type == "RatioAtLeast")
  {
    return RatioAtLeast{j.at("value").get<double>(), j.at("formula_value").get<double>(),
                        j.at("makespan").get<double>(), j.at("opt").get<double>()};
  }
  if (type == "TruthfulnessViolation")
  {
    return TruthfulnessViolation{j.at("reason").get<std::string>(), j.at("from_step").get<std::size_t>(),
                                 j.at("to_step").get<std::size_t>(), witness_from_json(j.at("witness"))};
  }
  if (type == "UnboundedRatio")
  {
    return UnboundedRatio{j.at("step").get<std::size_t>(), j.at("task").get<std::size_t>(),
                          j.at("machine").get<std::size_t>(), j.at("implied_ratio").get<double>()};
  }
  throw ParseError("unknown outcome type '" + type + "'");
}

}  // namespace

Json to_json(Certificate const &cert)
{
  Json j;
  j["schema"]            = "truthsched-certificate";
  j["version"]           = cert.version;
  j["mechanism"]         = cert.mechanism;
  j["params"]            = to_json(cert.params);
  j["witness_tolerance"] = cert.witness_tolerance;
  j["guaranteed_ratio"]  = cert.guaranteed_ratio;
  j["relabeled"]         = cert.relabeled;
  j["case"]              = optional_json(cert.case_taken);
  j["detour_j"]          = optional_json(cert.detour);
  j["detour_machine"]    = optional_json(cert.detour_machine);
  Json trace             = Json::array();
  for (std::size_t s = 0; s < cert.trace.size(); ++s)
  {
    auto const &e = cert.trace[s];
    Json        t;
    t["step"]           = s;
    t["kind"]           = to_string(e.kind);
    t["detour_j"]       = optional_json(e.detour);
    t["detour_machine"] = optional_json(e.detour_machine);
    t["check"]          = e.check;
    t["analytic_opt"]   = optional_json(e.analytic_opt);
    t["instance"]       = to_json(e.instance);
    t["allocation"]     = to_json(e.allocation);
    trace.push_back(std::move(t));
  }
  j["trace"]   = std::move(trace);
  j["outcome"] = outcome_json(cert.outcome);
  return j;
}

Certificate certificate_from_json(Json const &j)
{
  try
  {
    if (!j.is_object() || j.value("schema", std::string()) != "truthsched-certificate")
    {
      throw ParseError("not a truthsched certificate");
    }
    Certificate c;
    c.version           = j.at("version").get<int>();
    c.mechanism         = j.at("mechanism").get<std::string>();
    c.params            = params_from_json(j.at("params"));
    c.witness_tolerance = j.at("witness_tolerance").get<double>();
    c.guaranteed_ratio  = j.at("guaranteed_ratio").get<double>();
    c.relabeled         = j.at("relabeled").get<bool>();
    c.case_taken        = optional_from<int>(j, "case");
    c.detour            = optional_from<std::size_t>(j, "detour_j");
    c.detour_machine    = optional_from<std::size_t>(j, "detour_machine");
    for (auto const &t : j.at("trace"))
    {
      auto const kind = matrix_kind_from_string(t.at("kind").get<std::string>());
      if (!kind)
      {
        throw ParseError("unknown matrix kind in trace");
      }
      c.trace.push_back(TraceEntry{*kind, optional_from<std::size_t>(t, "detour_j"),
                                   optional_from<std::size_t>(t, "detour_machine"), cost_matrix_from_json(t.at("instance")),
                                   allocation_from_json(t.at("allocation")), t.at("check").get<std::string>(),
                                   optional_from<double>(t, "analytic_opt")});
    }
    c.outcome = outcome_from_json(j.at("outcome"));
    return c;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
  catch (InfeasibleAllocation const &e)
  {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace truthsched
