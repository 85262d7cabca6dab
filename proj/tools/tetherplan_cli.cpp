// Command-line front end: scenario generation, validation, single planning
// runs and seeded batch evaluation with Table-style aggregate output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tetherplan/metrics.hpp"
#include "tetherplan/pipeline.hpp"
#include "tetherplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace tetherplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoPath = 4;
constexpr int kExitInternal = 5;

int exit_code_for(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::ParseError:
      return kExitParse;
    case ErrorClass::TautTether:
    case ErrorClass::InfeasibleGeometry:
    case ErrorClass::InfeasibleAtStart:
    case ErrorClass::FollowerStuck:
    case ErrorClass::InvalidEndpoint:
    case ErrorClass::GenerationFailed:
      return kExitInfeasible;
    case ErrorClass::NoPathFound:
      return kExitNoPath;
    default:
      return kExitInternal;
  }
}

ScenarioKind parse_kind(const std::string& k) {
  if (k.size() != 1) fail(ErrorClass::ParseError, "kind must be one of a|b|c|d");
  return kind_from_letter(k[0]);
}

struct BatchRow {
  std::uint64_t seed = 0;
  std::string first_robot;
  std::string status = "ok";
  MetricsReport metrics;
};

void write_batch(const fs::path& dir, const std::string& label,
                 const std::vector<BatchRow>& rows) {
  fs::create_directories(dir);
  std::ofstream out(dir / ("rows_" + label + ".csv"));
  out << "seed,first_robot,status,CASV,CAUV," << metrics_csv_header() << "\n";
  std::vector<MetricsReport> ok;
  for (const auto& r : rows) {
    out << r.seed << "," << r.first_robot << "," << r.status << ","
        << detail::fmt(r.metrics.casv) << "," << detail::fmt(r.metrics.cauv) << ","
        << metrics_csv_row(r.metrics) << "\n";
    if (r.status == "ok") ok.push_back(r.metrics);
  }
  if (ok.empty()) return;

  const MetricsAggregate agg = aggregate(ok);
  std::ofstream aout(dir / ("aggregate_" + label + ".csv"));
  aout << "stat,runs,CASV,CAUV," << metrics_csv_header() << "\n";
  aout << "mean," << ok.size() << "," << detail::fmt(agg.mean.casv) << ","
       << detail::fmt(agg.mean.cauv) << "," << detail::fmt(agg.mean.lasv) << ","
       << detail::fmt(agg.mean.lauv) << "," << agg.nc_total << ","
       << detail::fmt(agg.mean.stds) << "," << detail::fmt(agg.mean.stdu) << ","
       << detail::fmt(agg.mean.stdt) << "," << detail::fmt(agg.mean.dobs) << ","
       << detail::fmt(static_cast<double>(agg.mean.rfrq)) << "\n";
  aout << "std," << ok.size() << "," << detail::fmt(agg.stddev.casv) << ","
       << detail::fmt(agg.stddev.cauv) << "," << detail::fmt(agg.stddev.lasv) << ","
       << detail::fmt(agg.stddev.lauv) << "," << agg.nc_max << ","
       << detail::fmt(agg.stddev.stds) << "," << detail::fmt(agg.stddev.stdu) << ","
       << detail::fmt(agg.stddev.stdt) << "," << detail::fmt(agg.stddev.dobs) << ",0\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tether-aware ASV/AUV mission planner"};
  app.require_subcommand(1);

  // plan
  std::string plan_file, plan_out = "out";
  std::optional<std::uint64_t> plan_seed;
  std::string plan_first;
  auto* plan = app.add_subcommand("plan", "Run the planning pipeline on a scenario file");
  plan->add_option("scenario", plan_file, "scenario JSON file")->required();
  plan->add_option("--out", plan_out, "output directory");
  plan->add_option("--seed", plan_seed, "override the scenario seed");
  plan->add_option("--first-robot", plan_first, "override the lead vehicle (asv|auv)");

  // gen
  std::string gen_kind = "a", gen_out = "scenario.json";
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a built-in scenario");
  gen->add_option("--kind", gen_kind, "scenario kind a|b|c|d")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output scenario file");

  // batch
  std::string batch_kind = "b", batch_first = "asv", batch_out = "batch";
  int batch_count = 10;
  std::uint64_t batch_base = 0;
  auto* batch = app.add_subcommand("batch", "Run seeded batches and aggregate metrics");
  batch->add_option("--kind", batch_kind, "scenario kind a|b|c|d")->required();
  batch->add_option("--count", batch_count, "number of runs")->required();
  batch->add_option("--base-seed", batch_base, "first seed")->required();
  batch->add_option("--first-robot", batch_first, "asv|auv|both");
  batch->add_option("--out", batch_out, "output directory");

  // validate
  std::string val_file;
  auto* validate = app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("scenario", val_file, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Scenario sc = generate_scenario(parse_kind(gen_kind), gen_seed);
      save_scenario(sc, gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }

    if (*validate) {
      const Scenario sc = load_scenario(val_file);
      validate_scenario(sc);
      std::cout << val_file << ": ok\n";
      return kExitOk;
    }

    if (*plan) {
      Scenario sc = load_scenario(plan_file);
      if (plan_seed) sc.seed = *plan_seed;
      if (!plan_first.empty()) {
        if (plan_first != "asv" && plan_first != "auv")
          fail(ErrorClass::ParseError, "--first-robot must be asv or auv");
        sc.first_robot = plan_first == "asv" ? VehicleKind::Asv : VehicleKind::Auv;
        sc.planner.first_robot = sc.first_robot;
      }
      const RunResult rr = run_pipeline(sc);
      write_run_artifacts(plan_out, sc, rr);
      std::cout << "ok: NC=" << rr.metrics.nc << " replans=" << rr.metrics.rfrq
                << " T=" << rr.trajectory.schedule.total_time() << "s -> " << plan_out
                << "\n";
      return kExitOk;
    }

    if (*batch) {
      const ScenarioKind kind = parse_kind(batch_kind);
      if (batch_count < 1) fail(ErrorClass::ParseError, "--count must be >= 1");
      std::vector<std::string> orders;
      if (batch_first == "both")
        orders = {"asv", "auv"};
      else if (batch_first == "asv" || batch_first == "auv")
        orders = {batch_first};
      else
        fail(ErrorClass::ParseError, "--first-robot must be asv, auv or both");

      for (const auto& order : orders) {
        std::vector<BatchRow> rows;
        for (int i = 0; i < batch_count; ++i) {
          BatchRow row;
          row.seed = batch_base + static_cast<std::uint64_t>(i);
          row.first_robot = order;
          try {
            Scenario sc = generate_scenario(kind, row.seed);
            sc.first_robot = order == "asv" ? VehicleKind::Asv : VehicleKind::Auv;
            sc.planner.first_robot = sc.first_robot;
            const RunResult rr = run_pipeline(sc);
            row.metrics = rr.metrics;
            const fs::path run_dir =
                fs::path(batch_out) / (std::string("run_") + order + "_" +
                                       std::to_string(row.seed));
            write_run_artifacts(run_dir, sc, rr);
          } catch (const Error& e) {
            row.status = e.what();
          }
          rows.push_back(row);
        }
        write_batch(batch_out, std::string(1, kind_letter(kind)) + "_" + order, rows);
      }
      std::cout << "batch complete -> " << batch_out << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.cls());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
