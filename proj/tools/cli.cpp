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

#include "cli.hpp"

#include "truthsched/adversary.hpp"
#include "truthsched/bounds.hpp"
#include "truthsched/errors.hpp"
#include "truthsched/mechanisms.hpp"
#include "truthsched/truthfulness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace truthsched::cli {

namespace {

// Tolerance for "the game reached the bound" in adversary exit codes.
constexpr double kRatioSlack = 1e-3;

std::string fixed3(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string full(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Options
{
  std::string format{"text"};
  std::string output;

  std::optional<std::size_t> bounds_n;
  bool                       bounds_limit{false};
  std::optional<std::size_t> bounds_table;
  std::size_t                table_n_max{8};

  std::string                mechanism;
  std::string                script;
  std::size_t                n{0};
  std::optional<double>      r, a, epsilon, big_m;
  double                     delta{kDefaultBoundaryDelta};
  std::string                certificate_path;

  std::string   audit_mechanism{"vcg"};
  std::string   generator{"random"};
  std::size_t   pairs{500};
  std::uint64_t seed{GeneratorConfig{}.seed};
  std::size_t   machines{3};
  std::size_t   tasks{4};
  double        tol{kDefaultWitnessTolerance};

  std::string verify_path;
};

void require_machines(std::size_t n)
{
  if (n < 3)
  {
    throw PreconditionError("n must be at least 3; the two-machine case is settled separately and not covered here");
  }
}

/// Destination for command results: the --output file or the given stream.
class Sink
{
public:
  Sink(std::string const &path, std::ostream &fallback)
    : fallback_(fallback)
  {
    if (!path.empty())
    {
      file_.open(path, std::ios::binary);
      if (!file_)
      {
        throw PreconditionError("cannot open output file '" + path + "'");
      }
    }
  }

  std::ostream &stream()
  {
    return file_.is_open() ? static_cast<std::ostream &>(file_) : fallback_;
  }

private:
  std::ostream &fallback_;
  std::ofstream file_;
};

void write_json(std::ostream &os, Json const &j)
{
  os << j.dump(2) << '\n';
}

// --- bounds / table ----------------------------------------------------------------

Json solution_json(BoundSolution const &s)
{
  Json j;
  j["n"]      = s.n ? Json(*s.n) : Json("limit");
  j["branch"] = to_string(s.branch);
  j["a"]      = s.a;
  j["z"]      = s.z;
  j["r"]      = s.r;
  j["rho"]    = s.rho;
  Json tight  = Json::array();
  for (auto c : s.tight)
  {
    tight.push_back(to_string(c));
  }
  j["tight"] = std::move(tight);
  return j;
}

std::string tight_list(BoundSolution const &s)
{
  std::string out;
  for (auto c : s.tight)
  {
    out += (out.empty() ? "" : ",") + std::string(to_string(c));
  }
  return out;
}

constexpr char const *kCsvHeader = "n,a_n1,a_n2,branch,r,rho,rho_limit\n";

int emit_single(std::size_t n, Options const &o, std::ostream &os)
{
  require_machines(n);
  BoundSolution const s     = analytic_bound(n);
  double const        a1    = solve_an1(n);
  double const        a2    = solve_an2(n);
  double const        limit = limit_bound();
  if (o.format == "json")
  {
    Json j          = solution_json(s);
    j["a_n1"]       = a1;
    j["a_n2"]       = a2;
    j["rho_limit"]  = limit;
    write_json(os, j);
  }
  else if (o.format == "csv")
  {
    os << kCsvHeader << n << ',' << full(a1) << ',' << full(a2) << ',' << to_string(s.branch) << ',' << full(s.r)
       << ',' << full(s.rho) << ',' << full(limit) << '\n';
  }
  else
  {
    os << "n       " << n << '\n'
       << "branch  " << to_string(s.branch) << '\n'
       << "a_n1    " << fixed3(a1) << '\n'
       << "a_n2    " << fixed3(a2) << '\n'
       << "a       " << fixed3(s.a) << '\n'
       << "r       " << fixed3(s.r) << '\n'
       << "rho     " << fixed3(s.rho) << '\n'
       << "tight   " << tight_list(s) << '\n';
  }
  return kExitOk;
}

int emit_limit(Options const &o, std::ostream &os)
{
  BoundSolution const s        = limit_solution();
  double const        residual = (s.rho - 1.0) * (s.rho - 2.0) * (s.rho - 2.0) - 1.0;
  if (o.format == "json")
  {
    Json j        = solution_json(s);
    j["residual"] = residual;
    write_json(os, j);
  }
  else if (o.format == "csv")
  {
    os << kCsvHeader << "limit,," << full(s.a) << ',' << to_string(s.branch) << ',' << full(s.r) << ','
       << full(s.rho) << ',' << full(s.rho) << '\n';
  }
  else
  {
    os << "rho_limit  " << fixed3(s.rho) << '\n'
       << "a          " << fixed3(s.a) << '\n'
       << "r          " << fixed3(s.r) << '\n';
  }
  return kExitOk;
}

int emit_table(std::size_t n_max, Options const &o, std::ostream &os)
{
  require_machines(n_max);
  std::vector<SequenceRow> rows;
  for (std::size_t n = 3; n <= n_max; ++n)
  {
    auto const s = analytic_bound(n);
    rows.push_back(SequenceRow{n, solve_an1(n), solve_an2(n), s.branch, s.r, s.rho});
  }
  double const limit = limit_bound();

  if (o.format == "json")
  {
    Json j;
    j["rho_limit"] = limit;
    Json arr       = Json::array();
    for (auto const &row : rows)
    {
      Json e;
      e["n"]      = row.n;
      e["a_n1"]   = row.a_n1;
      e["a_n2"]   = row.a_n2;
      e["branch"] = to_string(row.branch);
      e["r"]      = row.r;
      e["rho"]    = row.rho;
      arr.push_back(std::move(e));
    }
    j["rows"] = std::move(arr);
    write_json(os, j);
  }
  else if (o.format == "csv")
  {
    os << kCsvHeader;
    for (auto const &row : rows)
    {
      os << row.n << ',' << full(row.a_n1) << ',' << full(row.a_n2) << ',' << to_string(row.branch) << ','
         << full(row.r) << ',' << full(row.rho) << ',' << full(limit) << '\n';
    }
  }
  else
  {
    char line[128];
    os << "  n   a_n1   a_n2  branch      r    rho\n";
    for (auto const &row : rows)
    {
      std::snprintf(line, sizeof line, "%3zu  %5.3f  %5.3f  %-6s  %5.3f  %5.3f\n", row.n, row.a_n1, row.a_n2,
                    std::string(to_string(row.branch)).c_str(), row.r, row.rho);
      os << line;
    }
    os << "limit  rho = " << fixed3(limit) << '\n';
  }
  return kExitOk;
}

int cmd_bounds(Options const &o, std::ostream &os)
{
  int const chosen = int(o.bounds_n.has_value()) + int(o.bounds_limit) + int(o.bounds_table.has_value());
  if (chosen != 1)
  {
    throw PreconditionError("bounds needs exactly one of --n, --limit, --table");
  }
  if (o.bounds_limit)
  {
    return emit_limit(o, os);
  }
  if (o.bounds_table)
  {
    return emit_table(*o.bounds_table, o, os);
  }
  return emit_single(*o.bounds_n, o, os);
}

// --- adversary ---------------------------------------------------------------------

ConstructionParams game_params(Options const &o)
{
  require_machines(o.n);
  ConstructionParams p = default_game_params(o.n, o.delta);
  if (o.r || o.a)
  {
    p = ConstructionParams::with_defaults(o.n, o.r.value_or(p.r), o.a.value_or(p.a));
  }
  if (o.epsilon)
  {
    p.epsilon = *o.epsilon;
  }
  if (o.big_m)
  {
    p.big_m = *o.big_m;
  }
  p.validate();
  return p;
}

Json read_json_file(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw PreconditionError("cannot read '" + path + "'");
  }
  try
  {
    return Json::parse(in);
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string default_certificate_path(std::string const &mechanism, std::size_t n)
{
  char const *dir = std::getenv("TRUTHSCHED_OUTPUT_DIR");
  std::filesystem::path base = dir && *dir ? dir : ".";
  return (base / ("certificate_" + mechanism + "_n" + std::to_string(n) + ".json")).string();
}

int cmd_adversary(Options const &o, std::ostream &os, std::ostream &err)
{
  if (o.mechanism.empty() == o.script.empty())
  {
    throw PreconditionError("adversary needs exactly one of --mechanism, --script");
  }
  ConstructionParams const  params = game_params(o);
  MechanismPtr const mech =
      o.script.empty() ? make_mechanism(o.mechanism) : scripted_from_json(read_json_file(o.script), params.big_m);

  Certificate const  cert   = run_game(*mech, params);
  VerifyReport const report = verify_certificate(cert);
  std::string const  path   = o.certificate_path.empty() ? default_certificate_path(mech->name(), params.n)
                                                         : o.certificate_path;
  {
    std::ofstream file(path, std::ios::binary);
    if (!file)
    {
      throw PreconditionError("cannot write certificate to '" + path + "'");
    }
    write_json(file, to_json(cert));
  }

  bool below_bound = false;
  if (auto const *ratio = std::get_if<RatioAtLeast>(&cert.outcome))
  {
    below_bound = ratio->value < cert.guaranteed_ratio - kRatioSlack;
  }

  if (o.format == "json")
  {
    Json j;
    j["mechanism"]        = cert.mechanism;
    j["n"]                = params.n;
    j["relabeled"]        = cert.relabeled;
    j["case"]             = cert.case_taken ? Json(*cert.case_taken) : Json(nullptr);
    j["outcome"]          = to_json(cert)["outcome"];
    j["guaranteed_ratio"] = cert.guaranteed_ratio;
    j["verified"]         = report.ok;
    j["certificate"]      = path;
    write_json(os, j);
  }
  else
  {
    os << "mechanism  " << cert.mechanism << '\n'
       << "n          " << params.n << '\n'
       << "case       " << (cert.case_taken ? std::to_string(*cert.case_taken) : "-") << '\n'
       << "outcome    " << outcome_name(cert.outcome);
    std::visit(
        [&](auto const &x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, RatioAtLeast>)
          {
            os << " " << fixed3(x.value) << " (closed form " << fixed3(x.formula_value) << ")";
          }
          else if constexpr (std::is_same_v<T, TruthfulnessViolation>)
          {
            os << " machine " << x.witness.machine << " value " << full(x.witness.value) << " (" << x.reason << ")";
          }
          else
          {
            os << " task " << x.task << " on machine " << x.machine << " implied ratio " << fixed3(x.implied_ratio);
          }
        },
        cert.outcome);
    os << '\n'
       << "bound      " << fixed3(cert.guaranteed_ratio) << '\n'
       << "verified   " << (report.ok ? "yes" : "no") << '\n'
       << "certificate " << path << '\n';
  }

  if (!report.ok)
  {
    for (auto const &reason : report.reasons)
    {
      err << "verification: " << reason << '\n';
    }
    return kExitInternal;
  }
  if (below_bound)
  {
    err << "ratio fell below the guaranteed bound\n";
    return kExitInternal;
  }
  return kExitOk;
}

// --- audit -------------------------------------------------------------------------

int cmd_audit(Options const &o, std::ostream &os)
{
  auto const kind = generator_kind_from_string(o.generator);
  if (!kind)
  {
    throw PreconditionError("unknown generator '" + o.generator + "' (single-entry, row-scaling, structured, random)");
  }
  MechanismPtr const mech = make_mechanism(o.audit_mechanism);

  GeneratorConfig config;
  config.machines = o.machines;
  config.tasks    = o.tasks;
  config.pairs    = o.pairs;
  config.seed     = o.seed;
  if (*kind == GeneratorKind::Structured)
  {
    std::size_t const n = o.n ? o.n : o.machines;
    require_machines(n);
    config.params = default_game_params(n);
  }
  else if (o.machines == 0 || o.tasks == 0)
  {
    throw PreconditionError("--machines and --tasks must be positive");
  }

  auto const        pairs  = generate_deviations(*kind, config);
  AuditReport const report = audit_mechanism(*mech, pairs, o.tol);

  if (o.format == "json")
  {
    Json j;
    j["mechanism"]     = report.mechanism;
    j["generator"]     = o.generator;
    j["seed"]          = o.seed;
    j["pairs_checked"] = report.pairs_checked;
    j["witness_count"] = report.witnesses.size();
    j["inconclusive"]  = report.inconclusive;
    j["feasibility_failures"] = report.feasibility_failures.size();
    j["worst_value"]   = report.worst_value ? Json(*report.worst_value) : Json(nullptr);
    Json w             = Json::array();
    for (auto const &x : report.witnesses)
    {
      w.push_back(to_json(x));
    }
    j["witnesses"] = std::move(w);
    write_json(os, j);
  }
  else
  {
    os << "mechanism     " << report.mechanism << '\n'
       << "generator     " << o.generator << '\n'
       << "pairs         " << report.pairs_checked << '\n'
       << "witnesses     " << report.witnesses.size() << '\n'
       << "inconclusive  " << report.inconclusive << '\n'
       << "infeasible    " << report.feasibility_failures.size() << '\n'
       << "worst value   " << (report.worst_value ? full(*report.worst_value) : std::string("-")) << '\n';
  }
  return kExitOk;
}

// --- verify ------------------------------------------------------------------------

int cmd_verify(Options const &o, std::ostream &os)
{
  Certificate const  cert   = certificate_from_json(read_json_file(o.verify_path));
  VerifyReport const report = verify_certificate(cert);
  if (o.format == "json")
  {
    Json j;
    j["valid"]   = report.ok;
    j["outcome"] = outcome_name(cert.outcome);
    j["reasons"] = report.reasons;
    write_json(os, j);
  }
  else
  {
    os << (report.ok ? "valid" : "invalid") << '\n';
    for (auto const &reason : report.reasons)
    {
      os << "  " << reason << '\n';
    }
  }
  return report.ok ? kExitOk : kExitInvalid;
}

}  // namespace

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  Options  o;
  CLI::App app{"Lower bounds and truthfulness certificates for scheduling on unrelated machines", "truthsched"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--output", o.output, "Write results to this file instead of stdout");

  auto *bounds = app.add_subcommand("bounds", "Analytic lower bound for n machines, the limit, or a table");
  bounds->add_option("--n", o.bounds_n, "Number of machines (>= 3)");
  bounds->add_flag("--limit", o.bounds_limit, "Limit bound as n grows");
  bounds->add_option("--table", o.bounds_table, "Rows n = 3..N_MAX");

  auto *table = app.add_subcommand("table", "Table of roots and bounds for n = 3..N_MAX");
  table->add_option("--n-max", o.table_n_max, "Largest n")->capture_default_str();

  auto *adversary = app.add_subcommand("adversary", "Play the lower-bound game against a mechanism");
  adversary->add_option("--mechanism", o.mechanism, "Registered mechanism name");
  adversary->add_option("--script", o.script, "JSON script for a replay mechanism");
  adversary->add_option("--n", o.n, "Number of machines (>= 3)")->required();
  adversary->add_option("--r", o.r, "Override r");
  adversary->add_option("--a", o.a, "Override a");
  adversary->add_option("--epsilon", o.epsilon, "Override the perturbation size");
  adversary->add_option("--delta", o.delta, "Shift of r off the feasibility boundary")->capture_default_str();
  adversary->add_option("--big-m", o.big_m, "Override the surrogate for unbounded costs");
  adversary->add_option("--emit-certificate", o.certificate_path, "Certificate path");

  auto *audit = app.add_subcommand("audit", "Search for weak-monotonicity violations");
  audit->add_option("--mechanism", o.audit_mechanism, "Registered mechanism name")->capture_default_str();
  audit->add_option("--generator", o.generator, "single-entry, row-scaling, structured or random")
      ->capture_default_str();
  audit->add_option("--pairs", o.pairs, "Deviation pairs to generate")->capture_default_str();
  audit->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  audit->add_option("--m,--machines", o.machines, "Machines per random instance")->capture_default_str();
  audit->add_option("--tasks", o.tasks, "Tasks per random instance")->capture_default_str();
  audit->add_option("--n", o.n, "Machines of the construction for the structured generator");
  audit->add_option("--tol", o.tol, "Witness tolerance")->capture_default_str();

  auto *verify = app.add_subcommand("verify", "Re-check a certificate file");
  verify->add_option("certificate", o.verify_path, "Certificate JSON")->required();

  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try
  {
    Sink          sink(o.output, out);
    std::ostream &os = sink.stream();
    if (*bounds)
    {
      return cmd_bounds(o, os);
    }
    if (*table)
    {
      return emit_table(o.table_n_max, o, os);
    }
    if (*adversary)
    {
      return cmd_adversary(o, os, err);
    }
    if (*audit)
    {
      return cmd_audit(o, os);
    }
    return cmd_verify(o, os);
  }
  catch (PreconditionError const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (InvalidParams const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (ParseError const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (MissingScript const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (DimensionError const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (std::exception const &e)
  {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace truthsched::cli
