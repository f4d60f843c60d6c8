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
#include "truthsched/bounds.hpp"
#include "truthsched/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ts = truthsched;
namespace tt = truthsched::testing;

namespace {

ts::Certificate play(ts::MechanismPtr const &mech, ts::ConstructionParams const &p)
{
  auto cert   = ts::run_game(*mech, p);
  auto report = ts::verify_certificate(cert);
  EXPECT_TRUE(report.ok) << (report.reasons.empty() ? "" : report.reasons.front());
  return cert;
}

ts::Certificate reparse(ts::Certificate const &cert)
{
  return ts::certificate_from_json(ts::Json::parse(ts::to_json(cert).dump()));
}

}  // namespace

TEST(GuaranteedRatio, TableValues)
{
  EXPECT_NEAR(ts::guaranteed_ratio(ts::ConstructionParams::with_defaults(3, 1.0 / std::sqrt(2.0), std::sqrt(2.0))),
              1.0 + std::sqrt(2.0), 1e-12);
  double const phi = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(ts::guaranteed_ratio(ts::ConstructionParams::with_defaults(4, 1.0 / phi, phi)), 1.0 + phi, 1e-12);
  // tiny r: the 1/r branch drops out and the sum branch or 1 + a decides
  auto const p = ts::ConstructionParams::with_defaults(4, 1e-3, 1.2);
  EXPECT_NEAR(ts::guaranteed_ratio(p), std::min(1.0 + 1e-3 + 1.0 / 1.2 + 1.0 / 1.44, 2.2), 1e-12);
}

TEST(GuaranteedRatio, DefaultParamsReachTheBound)
{
  for (std::size_t n = 3; n <= 12; ++n)
  {
    auto const p = ts::default_game_params(n);
    EXPECT_GE(ts::guaranteed_ratio(p), ts::analytic_bound(n).rho - 10.0 * ts::kDefaultBoundaryDelta) << n;
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(RunGame, VcgLandsInCaseOne)
{
  auto const p    = ts::ConstructionParams::with_defaults(3, 1.0 / std::sqrt(2.0), std::sqrt(2.0));
  auto const cert = play(ts::vcg(), p);
  ASSERT_EQ(cert.case_taken, 1);
  auto const &ratio = std::get<ts::RatioAtLeast>(cert.outcome);
  EXPECT_NEAR(ratio.value, 1.0 + std::sqrt(2.0), 1e-5);
  EXPECT_LE(ratio.value, ratio.formula_value);
  EXPECT_EQ(cert.trace.size(), 3u);
  EXPECT_FALSE(cert.relabeled);
}

TEST(RunGame, EveryBranchScriptEndsAsExpected)
{
  for (std::size_t n = 3; n <= 6; ++n)
  {
    auto const   p   = ts::default_game_params(n);
    double const rho = ts::analytic_bound(n).rho;
    for (auto const &script : tt::branch_scripts(p))
    {
      SCOPED_TRACE(script.label + " n=" + std::to_string(n));
      auto const cert = play(script.mechanism, p);
      if (script.expected_case == 0)
      {
        EXPECT_FALSE(cert.case_taken.has_value());
      }
      else
      {
        EXPECT_EQ(cert.case_taken, script.expected_case);
      }
      if (script.detour_machine && cert.detour_machine)
      {
        EXPECT_EQ(cert.detour_machine, script.detour_machine);
      }
      if (script.expected == tt::Expected::Ratio)
      {
        auto const &ratio = std::get<ts::RatioAtLeast>(cert.outcome);
        EXPECT_GE(ratio.value, rho - 1e-3);
        EXPECT_NEAR(ratio.value, ratio.formula_value, 1e-4);
      }
      else
      {
        auto const &v = std::get<ts::TruthfulnessViolation>(cert.outcome);
        EXPECT_GT(v.witness.value, cert.witness_tolerance);
        EXPECT_EQ(v.to_step + 1, cert.trace.size());
      }
    }
  }
}

TEST(RunGame, CaseTwoRatioIsTheSameForBothDetourMachines)
{
  auto const p       = ts::default_game_params(4);
  auto const scripts = tt::branch_scripts(p);
  std::vector<double> values;
  for (auto const &s : scripts)
  {
    if (s.expected_case == 2 && s.expected == tt::Expected::Ratio)
    {
      values.push_back(std::get<ts::RatioAtLeast>(play(s.mechanism, p).outcome).formula_value);
    }
  }
  ASSERT_EQ(values.size(), 2u);
  EXPECT_DOUBLE_EQ(values[0], values[1]);
  EXPECT_DOUBLE_EQ(values[0], 1.0 + p.a);
}

TEST(RunGame, CaseThreeRatio)
{
  auto const p = ts::default_game_params(5);
  for (auto const &s : tt::branch_scripts(p))
  {
    if (s.label == "case3")
    {
      auto const &ratio = std::get<ts::RatioAtLeast>(play(s.mechanism, p).outcome);
      EXPECT_NEAR(ratio.formula_value, 1.0 + std::min(1.0 / p.r, p.a), 1e-12);
      EXPECT_NEAR(ratio.value, ratio.formula_value, 1e-4);
    }
  }
}

TEST(RunGame, MirroredMechanismGivesAnIsomorphicCertificate)
{
  for (std::size_t n = 3; n <= 6; ++n)
  {
    auto const p = ts::default_game_params(n);
    for (auto const &base : {ts::vcg(ts::TieBreak::LowestIndex), ts::greedy_load()})
    {
      auto const plain  = play(base, p);
      auto const mirror = play(ts::with_swapped_machines(base, 0, 1, true), p);
      EXPECT_NE(plain.relabeled, mirror.relabeled);
      EXPECT_EQ(plain.case_taken, mirror.case_taken);
      EXPECT_EQ(plain.detour, mirror.detour);
      EXPECT_EQ(plain.detour_machine, mirror.detour_machine);
      ASSERT_EQ(plain.trace.size(), mirror.trace.size());
      for (std::size_t s = 0; s < plain.trace.size(); ++s)
      {
        EXPECT_EQ(plain.trace[s].kind, mirror.trace[s].kind);
        EXPECT_EQ(ts::swap_machines(plain.trace[s].allocation, 0, 1, true), mirror.trace[s].allocation);
      }
      EXPECT_EQ(plain.outcome.index(), mirror.outcome.index());
      if (auto const *v = std::get_if<ts::TruthfulnessViolation>(&plain.outcome))
      {
        auto const &w = std::get<ts::TruthfulnessViolation>(mirror.outcome).witness;
        EXPECT_EQ(w.machine, v->witness.machine == 0 ? 1u : v->witness.machine == 1 ? 0u : v->witness.machine);
        EXPECT_DOUBLE_EQ(w.value, v->witness.value);
      }
    }
  }
}

TEST(RunGame, RelabeledScriptsBehaveLikeTheOriginals)
{
  auto const p = ts::default_game_params(4);
  tt::ScriptBuilder b(p, true);
  auto const a0 = tt::construction_allocation(4, [](std::size_t k) { return k == 1 ? 0 : k; });
  auto const hi = tt::construction_allocation(4, [](std::size_t k) { return k == 3 ? 3 : 0; });
  b.respond(ts::MatrixKind::A0, a0)
      .respond(ts::MatrixKind::A1, hi)
      .respond(ts::MatrixKind::B2, hi, 3)
      .respond(ts::MatrixKind::C2, hi, 3, 3);
  auto const cert = play(b.build("mirror-case2"), p);
  EXPECT_TRUE(cert.relabeled);
  EXPECT_EQ(cert.case_taken, 2);
  EXPECT_EQ(cert.detour, 3u);
  EXPECT_NEAR(std::get<ts::RatioAtLeast>(cert.outcome).value, 1.0 + p.a, 1e-4);
}

TEST(RunGame, UnboundedAssignmentEndsTheGame)
{
  auto const p = ts::default_game_params(3);
  tt::ScriptBuilder b(p);
  // dummy task 2 handed to machine 0
  b.respond(ts::MatrixKind::A0, ts::Allocation(3, {0, 1, 0, 0, 2}));
  auto const cert = play(b.build("careless"), p);
  auto const &u   = std::get<ts::UnboundedRatio>(cert.outcome);
  EXPECT_EQ(u.step, 0u);
  EXPECT_EQ(u.task, ts::dummy_task(2));
  EXPECT_EQ(u.machine, 0u);
  EXPECT_GT(u.implied_ratio, p.big_m / 2.0);
}

TEST(RunGame, Errors)
{
  auto p = ts::default_game_params(3);
  p.epsilon = 0.0;
  EXPECT_THROW(ts::run_game(*ts::vcg(), p), ts::InvalidParams);

  auto const good = ts::default_game_params(3);
  EXPECT_THROW(ts::run_game(*ts::scripted("empty", {}), good), ts::MissingScript);

  tt::ScriptBuilder b(good);
  b.respond(ts::MatrixKind::A0, ts::Allocation(2, {0, 1, 0, 0, 1}));
  EXPECT_THROW(ts::run_game(*b.build("wrong-shape"), good), ts::InfeasibleAllocation);
}

TEST(Certificate, JsonRoundTripStillVerifies)
{
  auto const p = ts::default_game_params(5);
  for (auto const &s : tt::branch_scripts(p))
  {
    auto const cert = ts::run_game(*s.mechanism, p);
    auto const back = reparse(cert);
    EXPECT_TRUE(ts::verify_certificate(back).ok) << s.label;
    EXPECT_EQ(ts::to_json(back).dump(), ts::to_json(cert).dump());
  }
}

TEST(Certificate, TamperedOutcomeIsRejected)
{
  auto const p    = ts::default_game_params(4);
  auto       cert = ts::run_game(*ts::vcg(), p);
  std::get<ts::RatioAtLeast>(cert.outcome).value += 0.01;
  auto const report = ts::verify_certificate(cert);
  EXPECT_FALSE(report.ok);
  EXPECT_FALSE(report.reasons.empty());
}

TEST(Certificate, TamperedAllocationIsRejected)
{
  auto const p    = ts::default_game_params(4);
  auto       cert = ts::run_game(*ts::vcg(), p);
  auto       owners = std::vector<std::size_t>(cert.trace.back().allocation.owners().begin(),
                                               cert.trace.back().allocation.owners().end());
  owners[ts::proper_task(4, 3)] = 3;
  cert.trace.back().allocation = ts::Allocation(4, owners);
  EXPECT_FALSE(ts::verify_certificate(cert).ok);
}

TEST(Certificate, TamperedWitnessAndMatrixAreRejected)
{
  auto const p = ts::default_game_params(4);
  ts::Certificate violation;
  for (auto const &s : tt::branch_scripts(p))
  {
    if (s.label == "case3-drop-b3")
    {
      violation = ts::run_game(*s.mechanism, p);
    }
  }
  ASSERT_TRUE(std::holds_alternative<ts::TruthfulnessViolation>(violation.outcome));

  auto w = violation;
  std::get<ts::TruthfulnessViolation>(w.outcome).witness.value *= 2.0;
  EXPECT_FALSE(ts::verify_certificate(w).ok);

  auto m = violation;
  m.trace[1].instance = m.trace[1].instance.with_entry(0, ts::proper_task(4, 1), 0.123);
  EXPECT_FALSE(ts::verify_certificate(m).ok);

  auto r = violation;
  r.relabeled = !r.relabeled;
  EXPECT_FALSE(ts::verify_certificate(r).ok);

  auto v = violation;
  v.version = 99;
  EXPECT_FALSE(ts::verify_certificate(v).ok);
}

TEST(Certificate, MalformedJsonIsAParseError)
{
  EXPECT_THROW(ts::certificate_from_json(ts::Json::parse("{}")), ts::ParseError);
  auto j = ts::to_json(ts::run_game(*ts::vcg(), ts::default_game_params(3)));
  j["outcome"]["type"] = "Draw";
  EXPECT_THROW(ts::certificate_from_json(j), ts::ParseError);
  j = ts::to_json(ts::run_game(*ts::vcg(), ts::default_game_params(3)));
  j["trace"][0].erase("allocation");
  EXPECT_THROW(ts::certificate_from_json(j), ts::ParseError);
}
