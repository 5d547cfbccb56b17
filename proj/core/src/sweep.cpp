// Copyright 2026 the sbftsim authors
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

#include "sbft/sweep.hpp"

#include <fmt/format.h>

namespace sbft {

SweepResult run_sweep(const std::string& name,
                      const std::vector<SweepPoint>& points) {
  SweepResult out;
  out.name = name;
  for (const SweepPoint& pt : points) {
    RunResult res = run_scenario(pt.scenario);
    SweepRow row;
    row.label = pt.label;
    row.mode = pt.scenario.config.mode;
    row.clients = pt.scenario.workload.clients;
    row.batchSize = pt.scenario.config.batchSize;
    row.conflictRate = pt.scenario.workload.conflictRate;
    row.nR = pt.scenario.config.nR;
    row.nE = pt.scenario.config.nE;
    row.metrics = res.metrics;
    row.checksOk = res.findings.ok;
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string SweepResult::csv() const {
  std::string out =
      "label,mode,clients,batch_size,conflict_rate,n_r,n_e,issued,committed,"
      "aborted,unfinished,tps,mean_ms,p50_ms,p95_ms,p99_ms,abort_rate,msgs,"
      "bytes,spawns,cost_cents,cost_per_ktxn,checks\n";
  for (const SweepRow& r : rows) {
    out += fmt::format(
        "{},{},{},{},{:.3f},{},{},{},{},{},{},{:.1f},{:.3f},{:.3f},{:.3f},"
        "{:.3f},{:.4f},{},{},{},{:.4f},{:.4f},{}\n",
        r.label, run_mode_name(r.mode), r.clients, r.batchSize,
        r.conflictRate, r.nR, r.nE, r.metrics.issued, r.metrics.committed,
        r.metrics.aborted, r.metrics.unfinished, r.metrics.throughputTps,
        r.metrics.meanMs, r.metrics.p50Ms, r.metrics.p95Ms, r.metrics.p99Ms,
        r.metrics.abortRate, r.metrics.totalMsgs, r.metrics.totalBytes,
        r.metrics.totalSpawns, r.metrics.totalCostCents,
        r.metrics.costCentsPerKtxn, r.checksOk ? "ok" : "failed");
  }
  return out;
}

std::string SweepResult::gnuplot(const std::string& csvPath) const {
  return fmt::format(
      "set datafile separator ','\n"
      "set terminal pngcairo size 900,600\n"
      "set key autotitle columnhead\n"
      "set style data linespoints\n"
      "set output '{0}_tps.png'\n"
      "set ylabel 'throughput (txn/s)'\n"
      "set xtics rotate by -30\n"
      "plot '{1}' using 12:xtic(1) title '{0}'\n"
      "set output '{0}_p50.png'\n"
      "set ylabel 'p50 latency (ms)'\n"
      "plot '{1}' using 14:xtic(1) title '{0}'\n",
      name, csvPath);
}

bool SweepResult::all_ok() const {
  for (const SweepRow& r : rows) {
    if (!r.checksOk) return false;
  }
  return true;
}

std::vector<SweepPoint> sweep_clients(const Scenario& base,
                                      const std::vector<uint32_t>& counts) {
  std::vector<SweepPoint> out;
  for (uint32_t c : counts) {
    SweepPoint pt{fmt::format("clients={}", c), base};
    pt.scenario.name = fmt::format("{}-c{}", base.name, c);
    pt.scenario.workload.clients = c;
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<SweepPoint> sweep_conflict(const Scenario& base,
                                       const std::vector<double>& rates) {
  std::vector<SweepPoint> out;
  for (double r : rates) {
    SweepPoint pt{fmt::format("conflict={:.0f}%", r * 100), base};
    pt.scenario.name = fmt::format("{}-x{:.0f}", base.name, r * 100);
    pt.scenario.workload.conflictRate = r;
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<SweepPoint> sweep_batch(const Scenario& base,
                                    const std::vector<uint32_t>& sizes) {
  std::vector<SweepPoint> out;
  for (uint32_t b : sizes) {
    SweepPoint pt{fmt::format("batch={}", b), base};
    pt.scenario.name = fmt::format("{}-b{}", base.name, b);
    pt.scenario.config.batchSize = b;
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<SweepPoint> sweep_modes(const Scenario& base) {
  std::vector<SweepPoint> out;
  for (RunMode m : {RunMode::kNoShim, RunMode::kServerlessCft,
                    RunMode::kShimLocal, RunMode::kServerlessBft}) {
    SweepPoint pt{run_mode_name(m), base};
    pt.scenario.name = fmt::format("{}-{}", base.name, run_mode_name(m));
    pt.scenario.config.mode = m;
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace sbft
