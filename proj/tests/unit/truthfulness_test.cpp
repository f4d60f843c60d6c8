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

#include "oracles.hpp"

#include "truthsched/adversary.hpp"
#include "truthsched/errors.hpp"
#include "truthsched/truthfulness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace ts = truthsched;
namespace tt = truthsched::testing;

using ts::ExtendedCost;
using ts::kUnbounded;

namespace {

std::vector<ExtendedCost> costs(std::vector<double> const &x)
{
  return {x.begin(), x.end()};
}

}  // namespace

TEST(WmonValue, IdenticalReportsGiveZero)
{
  std::vector<int> const a = {1, 0, 1};
  auto const             t = costs({0.3, 1.0, 2.0});
  EXPECT_EQ(ts::wmon_value(a, a, t, t), 0.0);
}

TEST(WmonValue, TwoTaskExpansion)
{
  double const r = 0.6;
  double const a = 1.7;
  double const v = ts::wmon_value(std::vector<int>{1, 0}, std::vector<int>{0, 1}, costs({1.0, 1.0}),
                                  costs({r, 1.0 / a}));
  EXPECT_NEAR(v, 1.0 / a - r, 1e-15);
  EXPECT_NEAR(v, tt::hand_wmon({1, 0}, {0, 1}, {1.0, 1.0}, {r, 1.0 / a}), 1e-15);
}

TEST(WmonValue, SymmetricUnderSwappingBothSides)
{
  std::mt19937_64                        rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 100; ++k)
  {
    std::vector<int>    a(5), b(5);
    std::vector<double> t(5), s(5);
    for (int j = 0; j < 5; ++j)
    {
      a[j] = static_cast<int>(rng() % 2);
      b[j] = static_cast<int>(rng() % 2);
      t[j] = u(rng);
      s[j] = u(rng);
    }
    double const v = ts::wmon_value(a, b, costs(t), costs(s));
    EXPECT_NEAR(v, tt::hand_wmon(a, b, t, s), 1e-12);
    EXPECT_NEAR(ts::wmon_value(b, a, costs(s), costs(t)), v, 1e-12);
    EXPECT_NEAR(ts::wmon_value(b, a, costs(t), costs(s)), -v, 1e-12);
  }
}

TEST(WmonValue, UnboundedCoordinates)
{
  std::vector<ExtendedCost> const t  = {kUnbounded, 1.0};
  std::vector<ExtendedCost> const t2 = {kUnbounded, 0.5};
  EXPECT_NEAR(ts::wmon_value(std::vector<int>{0, 0}, std::vector<int>{0, 1}, t, t2), 0.0 - (1.0 - 0.5) * 1.0, 1e-15);
  EXPECT_THROW(ts::wmon_value(std::vector<int>{1, 0}, std::vector<int>{0, 0}, t, t2), ts::UnboundedViolation);
  std::vector<ExtendedCost> const mixed = {0.0, 1.0};
  EXPECT_THROW(ts::wmon_value(std::vector<int>{0, 0}, std::vector<int>{0, 0}, t, mixed), ts::PreconditionError);
  EXPECT_THROW(ts::wmon_value(std::vector<int>{0}, std::vector<int>{0, 0}, t, t2), ts::DimensionError);
}

TEST(WmonValue, FirstTwoTasksScenarioMeetsTheBound)
{
  // Machine 0 keeps everything on A0 and loses every proper task on A1: the
  // worst case for the first-two-tasks argument.
  for (std::size_t n = 3; n <= 8; ++n)
  {
    auto const p     = ts::default_game_params(n);
    auto const a0    = ts::build_matrix(ts::MatrixKind::A0, p);
    auto const a1    = ts::build_matrix(ts::MatrixKind::A1, p);
    auto const keeps = tt::construction_allocation(n, [](std::size_t k) { return k <= 2 ? 0 : k; });
    auto const loses = tt::construction_allocation(n, [](std::size_t k) { return k == 1 ? 1 : k == 2 ? 2 : 0; });
    double const v   = ts::wmon_value(keeps.row(0), loses.row(0), a0.row(0), a1.row(0));
    double const floor = 1.0 - p.r - 1.0 / p.a + std::pow(p.a, 2.0 - double(n));
    EXPECT_GE(v, floor - 1e-12) << "n = " << n;
    EXPECT_GT(v, 0.0);
  }
}

TEST(RestrictedWmon, EmptyTIsZero)
{
  auto const p = ts::TaskPartition::from(3, {0}, {});
  std::vector<int> const a = {1, 0, 1};
  EXPECT_EQ(ts::restricted_wmon_value(p, a, a, costs({1, 2, 3}), costs({1, 2, 3})), 0.0);
}

TEST(RestrictedWmon, FirstTwoTasksInstantiationMatchesProperColumns)
{
  std::size_t const n     = 4;
  auto const        p     = ts::default_game_params(n);
  auto const        a0    = ts::build_matrix(ts::MatrixKind::A0, p);
  auto const        a1    = ts::build_matrix(ts::MatrixKind::A1, p);
  auto const        before = tt::construction_allocation(n, [](std::size_t k) { return k == 1 ? 0 : k; });
  auto const        after  = tt::construction_allocation(n, [](std::size_t k) { return k == 3 ? 0 : k == 1 ? 1 : k; });
  std::vector<std::size_t> proper;
  for (std::size_t k = 1; k < n; ++k)
  {
    proper.push_back(ts::proper_task(n, k));
  }
  auto const part       = ts::TaskPartition::from(2 * n - 1, {}, proper);
  double const restricted = ts::restricted_wmon_value(part, before.row(0), after.row(0), a0.row(0), a1.row(0));
  double const full       = ts::wmon_value(before.row(0), after.row(0), a0.row(0), a1.row(0));
  EXPECT_NEAR(restricted, full, 1e-15);
  EXPECT_NEAR(restricted, (1.0 - p.r) - (std::pow(p.a, -1.0) - std::pow(p.a, -2.0)), 1e-12);
}

TEST(RestrictedWmon, DecompositionWhenPreconditionsHold)
{
  std::mt19937_64                        rng(21);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int k = 0; k < 200; ++k)
  {
    std::vector<int>    a(6), b(6);
    std::vector<double> t(6), s(6);
    for (int j = 0; j < 6; ++j)
    {
      a[j] = static_cast<int>(rng() % 2);
      b[j] = static_cast<int>(rng() % 2);
      t[j] = u(rng);
      s[j] = u(rng);
    }
    // tasks 0,1 in S (allocation pinned), 2,3 in T, 4,5 in V (costs pinned)
    b[0] = a[0];
    b[1] = a[1];
    s[4] = t[4];
    s[5] = t[5];
    auto const part = ts::TaskPartition{{0, 1}, {2, 3}, {4, 5}};
    double const s_term = tt::hand_wmon({a[0], a[1]}, {b[0], b[1]}, {t[0], t[1]}, {s[0], s[1]});
    double const v_term = tt::hand_wmon({a[4], a[5]}, {b[4], b[5]}, {t[4], t[5]}, {s[4], s[5]});
    double const restricted = ts::restricted_wmon_value(part, a, b, costs(t), costs(s));
    EXPECT_NEAR(restricted + s_term + v_term, ts::wmon_value(a, b, costs(t), costs(s)), 1e-12);
  }
}

TEST(RestrictedWmon, PreconditionBreaches)
{
  auto const part = ts::TaskPartition{{0}, {1}, {2}};
  std::vector<int> const a = {1, 0, 0};
  std::vector<int> const b = {0, 1, 0};
  EXPECT_THROW(ts::restricted_wmon_value(part, a, b, costs({1, 1, 1}), costs({1, 1, 1})), ts::PreconditionError);
  std::vector<int> const c = {1, 1, 0};
  EXPECT_THROW(ts::restricted_wmon_value(part, a, c, costs({1, 1, 1}), costs({1, 1, 2})), ts::PreconditionError);
  EXPECT_THROW((ts::TaskPartition{{0}, {0}, {1, 2}}.validate(3)), ts::PreconditionError);
  EXPECT_THROW((ts::TaskPartition{{0}, {1}, {}}.validate(3)), ts::PreconditionError);
}

TEST(Persistence, B1StepHoldsForCompliantAllocation)
{
  std::size_t const n   = 5;
  auto const        p   = ts::default_game_params(n);
  auto const        a1  = ts::build_matrix(ts::MatrixKind::A1, p);
  auto const        b1  = ts::build_matrix(ts::MatrixKind::B1, p);
  auto const        all = tt::construction_allocation(n, [](std::size_t) { return std::size_t{0}; });
  std::vector<std::size_t> proper;
  for (std::size_t k = 1; k < n; ++k)
  {
    proper.push_back(ts::proper_task(n, k));
  }
  auto const part = ts::TaskPartition::from(2 * n - 1, {ts::dummy_task(0)}, proper);
  auto const res  = ts::check_persistence(part, all.row(0), all.row(0), a1.row(0), b1.row(0));
  EXPECT_TRUE(res.holds);
  EXPECT_TRUE(res.changed_tasks.empty());
}

TEST(Persistence, DroppingADecreasedTaskIsAViolation)
{
  // 2 tasks: task 0 pinned in S, task 1 allocated and lowered by 0.25, then dropped.
  auto const part = ts::TaskPartition{{0}, {1}, {}};
  auto const res  = ts::check_persistence(part, std::vector<int>{1, 1}, std::vector<int>{1, 0}, costs({0.0, 1.0}),
                                          costs({2.0, 0.75}));
  EXPECT_FALSE(res.holds);
  EXPECT_NEAR(res.restricted_value, 0.25, 1e-15);
  EXPECT_EQ(res.changed_tasks, std::vector<std::size_t>{1});
}

TEST(Persistence, RejectsCostsThatDoNotMoveStrictly)
{
  auto const part = ts::TaskPartition{{}, {0, 1}, {}};
  // allocated task 0 must strictly decrease
  EXPECT_THROW(ts::check_persistence(part, std::vector<int>{1, 0}, std::vector<int>{1, 0}, costs({1.0, 1.0}),
                                     costs({1.0, 2.0})),
               ts::PreconditionError);
  // unallocated task 1 must strictly increase
  EXPECT_THROW(ts::check_persistence(part, std::vector<int>{1, 0}, std::vector<int>{1, 0}, costs({1.0, 1.0}),
                                     costs({0.5, 0.5})),
               ts::PreconditionError);
}

TEST(Persistence, HoldsWheneverWmonIsNonPositive)
{
  std::mt19937_64                        rng(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::uniform_real_distribution<double> step(0.01, 0.5);
  int                                    checked = 0;
  for (int k = 0; k < 2000; ++k)
  {
    std::vector<int>    a(5), b(5);
    std::vector<double> t(5), s(5);
    for (int j = 0; j < 5; ++j)
    {
      a[j] = static_cast<int>(rng() % 2);
      b[j] = static_cast<int>(rng() % 2);
      t[j] = u(rng);
    }
    // S = {0}, T = {1,2,3}, V = {4}
    b[0] = a[0];
    s[0] = u(rng);
    s[4] = t[4];
    for (int j = 1; j <= 3; ++j)
    {
      s[j] = a[j] ? t[j] - step(rng) * t[j] * 0.9 : t[j] + step(rng);
    }
    auto const part = ts::TaskPartition{{0}, {1, 2, 3}, {4}};
    if (ts::wmon_value(a, b, costs(t), costs(s)) <= 0.0)
    {
      ++checked;
      EXPECT_TRUE(ts::check_persistence(part, a, b, costs(t), costs(s)).holds);
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Witness, JsonRoundTrip)
{
  auto const p  = ts::default_game_params(3);
  auto const t  = ts::build_matrix(ts::MatrixKind::A0, p);
  auto const t2 = ts::build_matrix(ts::MatrixKind::A1, p);
  ts::Allocation const x(3, {0, 1, 2, 0, 2});
  ts::Allocation const y(3, {0, 1, 2, 1, 2});
  auto const w    = ts::make_witness(0, t, x, t2, y);
  auto const back = ts::witness_from_json(ts::to_json(w));
  EXPECT_EQ(back.machine, w.machine);
  EXPECT_EQ(back.a_row, w.a_row);
  EXPECT_EQ(back.a_prime_row, w.a_prime_row);
  EXPECT_EQ(back.t_row, w.t_row);
  EXPECT_EQ(back.t_prime_row, w.t_prime_row);
  EXPECT_DOUBLE_EQ(back.value, w.value);
  ASSERT_TRUE(back.t && back.t_prime);
  EXPECT_EQ(*back.t, t);
  EXPECT_NEAR(w.value, 1.0 - p.r, 1e-15);
}

TEST(Audit, VcgIsCleanOnRandomPairs)
{
  ts::GeneratorConfig config;  // 3 machines, 4 tasks, 500 pairs
  auto const          pairs  = ts::generate_deviations(ts::GeneratorKind::Random, config);
  ASSERT_EQ(pairs.size(), 500u);
  auto const          report = ts::audit_mechanism(*ts::vcg(), pairs, 0.0);
  EXPECT_TRUE(report.witnesses.empty());
  ASSERT_TRUE(report.worst_value.has_value());
  EXPECT_LE(*report.worst_value, 1e-12);
}

TEST(Audit, VcgIsCleanOnEveryGenerator)
{
  for (auto kind : {ts::GeneratorKind::SingleEntry, ts::GeneratorKind::RowScaling, ts::GeneratorKind::Random,
                    ts::GeneratorKind::Structured})
  {
    ts::GeneratorConfig config;
    config.params = ts::default_game_params(4);
    config.pairs  = 300;
    auto const pairs = ts::generate_deviations(kind, config);
    for (auto tb : {ts::TieBreak::LowestIndex, ts::TieBreak::HighestIndex, ts::TieBreak::PreferMachine2})
    {
      EXPECT_TRUE(ts::audit_mechanism(*ts::vcg(tb), pairs).witnesses.empty()) << ts::to_string(kind);
    }
  }
}

TEST(Audit, GreedyLoadFailsOnStructuredPairs)
{
  ts::GeneratorConfig config;
  config.params    = ts::default_game_params(4);
  auto const pairs = ts::generate_deviations(ts::GeneratorKind::Structured, config);
  auto const report = ts::audit_mechanism(*ts::greedy_load(), pairs);
  EXPECT_FALSE(report.witnesses.empty());
  for (auto const &w : report.witnesses)
  {
    EXPECT_GT(ts::wmon_value(w.a_row, w.a_prime_row, w.t_row, w.t_prime_row), ts::kDefaultWitnessTolerance);
  }
}

TEST(Audit, IdenticalPairsGiveNothing)
{
  std::mt19937_64                  rng(4);
  std::vector<ts::DeviationPair> pairs;
  for (int k = 0; k < 20; ++k)
  {
    auto const m = tt::random_matrix(rng, 3, 4, 0.0);
    pairs.push_back({m, m, static_cast<std::size_t>(k % 3), "same"});
  }
  EXPECT_TRUE(ts::audit_mechanism(*ts::greedy_load(), pairs).witnesses.empty());
  EXPECT_EQ(ts::audit_mechanism(*ts::greedy_load(), {}).pairs_checked, 0u);
}

TEST(Audit, InfeasibleAnswersAreFeasibilityFailures)
{
  std::mt19937_64 rng(4);
  auto const      m     = tt::random_matrix(rng, 2, 2, 0.0);
  auto const      wrong = ts::scripted("wrong-shape", {{ts::instance_digest(m), ts::Allocation(3, {0, 0})}});
  std::vector<ts::DeviationPair> pairs = {{m, m, 0, "same"}};
  auto const report = ts::audit_mechanism(*wrong, pairs);
  EXPECT_TRUE(report.witnesses.empty());
  EXPECT_EQ(report.feasibility_failures.size(), 1u);
}

TEST(Generators, SeededAndDeterministic)
{
  for (auto kind : {ts::GeneratorKind::SingleEntry, ts::GeneratorKind::RowScaling, ts::GeneratorKind::Random})
  {
    ts::GeneratorConfig config;
    config.pairs = 50;
    auto const x = ts::generate_deviations(kind, config);
    auto const y = ts::generate_deviations(kind, config);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t k = 0; k < x.size(); ++k)
    {
      EXPECT_EQ(x[k].t, y[k].t);
      EXPECT_EQ(x[k].t_prime, y[k].t_prime);
      EXPECT_EQ(x[k].machine, y[k].machine);
      // only the deviating machine's row changes
      for (std::size_t i = 0; i < x[k].t.machines(); ++i)
      {
        if (i != x[k].machine)
        {
          for (std::size_t j = 0; j < x[k].t.tasks(); ++j)
          {
            EXPECT_EQ(x[k].t.at(i, j), x[k].t_prime.at(i, j));
          }
        }
      }
    }
    config.seed = 1;
    EXPECT_NE(ts::generate_deviations(kind, config)[0].t_prime, x[0].t_prime);
  }
  EXPECT_EQ(ts::generator_kind_from_string("row-scaling"), ts::GeneratorKind::RowScaling);
  EXPECT_FALSE(ts::generator_kind_from_string("bogus").has_value());
  EXPECT_THROW(ts::generate_deviations(ts::GeneratorKind::Structured, ts::GeneratorConfig{}), ts::PreconditionError);
}
