// Copyright 2026 the sbftsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: run one scenario, sweep a family of them, or
// re-check a stored trace against the invariant monitors and the replay
// oracle. Exit status is nonzero whenever any check fails, so the binary
// can gate CI jobs directly.

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "sbft/monitors.hpp"
#include "sbft/oracle.hpp"
#include "sbft/runner.hpp"
#include "sbft/scenario.hpp"
#include "sbft/sweep.hpp"

namespace fs = std::filesystem;
using namespace sbft;

namespace {

std::string out_dir(const std::string& flagValue) {
  if (!flagValue.empty()) return flagValue;
  if (const char* env = std::getenv("SBFTSIM_OUT")) return env;
  return ".";
}

SweepRow row_for(const std::string& label, const Scenario& s,
                 const RunResult& r) {
  SweepRow row;
  row.label = label;
  row.mode = s.config.mode;
  row.clients = s.workload.clients;
  row.batchSize = s.config.batchSize;
  row.conflictRate = s.workload.conflictRate;
  row.nR = s.config.nR;
  row.nE = s.config.nE;
  row.metrics = r.metrics;
  row.checksOk = r.findings.ok && r.oracle.ok;
  return row;
}

int cmd_run(const std::string& path, const std::string& outFlag,
            bool traceText, bool saveState) {
  Scenario s = Scenario::load(path);
  RunResult r = run_scenario(s);

  fs::path out = out_dir(outFlag);
  fs::create_directories(out);
  fs::path base = out / s.name;

  SweepResult one;
  one.name = s.name;
  one.rows.push_back(row_for(s.name, s, r));
  std::ofstream csv(base.string() + ".metrics.csv");
  csv << one.csv();

  r.trace.save_binary(base.string() + ".trace.bin");
  if (traceText) r.trace.save_text(base.string() + ".trace.txt");
  if (saveState && r.storage) r.storage->save_snapshot(base.string() + ".state.bin");

  fmt::print("{}\n", r.verdict_line());
  fmt::print("trace digest {}\n", r.traceDigest.hex());
  if (!r.findings.ok) fmt::print("{}", r.findings.summary());
  if (!r.oracle.ok)
    for (const auto& p : r.oracle.problems) fmt::print("oracle: {}\n", p);
  return r.findings.ok && r.oracle.ok ? 0 : 1;
}

int cmd_sweep(const std::string& kind, const std::string& basePath,
              const std::string& outFlag, bool gnuplot) {
  Scenario base;
  if (!basePath.empty()) base = Scenario::load(basePath);

  std::vector<SweepPoint> points;
  if (kind == "clients") {
    points = sweep_clients(base, {1, 2, 4, 8, 16, 32, 64, 96});
  } else if (kind == "conflict") {
    points = sweep_conflict(base, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
  } else if (kind == "batch") {
    points = sweep_batch(base, {1, 2, 5, 10, 20, 50, 100, 200});
  } else if (kind == "modes") {
    points = sweep_modes(base);
  } else {
    fmt::print(stderr, "unknown sweep kind '{}'\n", kind);
    return 2;
  }
  SweepResult res = run_sweep(kind, points);

  fs::path out = out_dir(outFlag);
  fs::create_directories(out);
  fs::path csvPath = out / (res.name + ".csv");
  std::ofstream csv(csvPath);
  csv << res.csv();
  fmt::print("wrote {}\n", csvPath.string());

  if (gnuplot) {
    fs::path gp = out / (res.name + ".gp");
    std::ofstream script(gp);
    script << res.gnuplot(csvPath.string());
    fmt::print("wrote {}\n", gp.string());
  }

  for (const auto& row : res.rows)
    fmt::print("  {:<24} tps={:>8.0f} p50={:>7.2f}ms {}\n", row.label,
               row.metrics.throughputTps, row.metrics.p50Ms,
               row.checksOk ? "ok" : "CHECKS FAILED");
  return res.all_ok() ? 0 : 1;
}

int cmd_check(const std::string& tracePath, const std::string& scenarioPath) {
  Scenario s = Scenario::load(scenarioPath);
  auto records = Trace::load_binary(tracePath);
  MonitorFindings f = check_invariants(records, s.config);
  if (f.ok) {
    fmt::print("ok: {} records, no invariant violations\n", records.size());
    return 0;
  }
  fmt::print("{}", f.summary());
  return 1;
}

int cmd_oracle(const std::string& tracePath, const std::string& scenarioPath,
               const std::string& statePath) {
  Scenario s = Scenario::load(scenarioPath);
  auto records = Trace::load_binary(tracePath);
  OracleReport rep;
  if (!statePath.empty()) {
    Storage fin = Storage::load_snapshot(statePath);
    rep = check_trace(records, s.kvSeed, s.workload.keyspace, &fin);
  } else {
    rep = check_trace(records, s.kvSeed, s.workload.keyspace, nullptr);
  }
  if (rep.ok) {
    fmt::print("ok: replayed {} batches / {} txns, digest {}\n", rep.batches,
               rep.txns, rep.finalDigest.hex());
    return 0;
  }
  for (const auto& p : rep.problems) fmt::print("{}\n", p);
  if (rep.problemCount > rep.problems.size())
    fmt::print("... {} more\n", rep.problemCount - rep.problems.size());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serverless BFT simulator"};
  app.require_subcommand(1);

  std::string scenarioPath, outFlag, tracePath, statePath, sweepKind, basePath;
  bool traceText = false, gnuplot = false, noState = false;

  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenarioPath, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", outFlag, "output directory (default $SBFTSIM_OUT or .)");
  run->add_flag("--trace-text", traceText, "also write a readable trace");
  run->add_flag("--no-state", noState, "skip the final storage snapshot");

  auto* sweep = app.add_subcommand("sweep", "run a scenario family");
  sweep->add_option("kind", sweepKind, "clients | conflict | batch | modes")
      ->required();
  sweep->add_option("--base", basePath, "scenario JSON to start from")
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", outFlag, "output directory (default $SBFTSIM_OUT or .)");
  sweep->add_flag("--gnuplot", gnuplot, "emit a plot script next to the CSV");

  auto* check = app.add_subcommand("check", "re-check a stored trace");
  check->add_option("trace", tracePath, "binary trace file")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--scenario", scenarioPath, "scenario the trace came from")
      ->required()
      ->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "serial replay of a stored trace");
  oracle->add_option("trace", tracePath, "binary trace file")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--scenario", scenarioPath, "scenario the trace came from")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--state", statePath, "final storage snapshot to compare")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenarioPath, outFlag, traceText, !noState);
    if (sweep->parsed()) return cmd_sweep(sweepKind, basePath, outFlag, gnuplot);
    if (check->parsed()) return cmd_check(tracePath, scenarioPath);
    if (oracle->parsed()) return cmd_oracle(tracePath, scenarioPath, statePath);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 2;
}
