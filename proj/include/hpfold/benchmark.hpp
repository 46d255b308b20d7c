#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpfold/trainer.hpp"

namespace hpfold {

// One Istrail benchmark instance.
struct BenchmarkEntry {
  std::string id;
  std::string sequence;
  int best_known_energy = 0;
  std::int64_t episodes_default = 0;
};

const std::vector<BenchmarkEntry>& istrailBenchmark();
const BenchmarkEntry* findBenchmarkEntry(const std::string& id);

// Published lowest energies from earlier RL work on the same instances;
// display-only reference data, never recomputed.
struct ReferenceRow {
  std::string id;
  std::optional<int> ant_q;          // Dogan 2015
  std::optional<int> folding_zero;   // Li 2018
  std::optional<int> wu_ql;          // Wu 2019
  std::optional<int> yu_drl;         // Yu 2020, DRL
  std::optional<int> yu_alphago;     // Yu 2020, AlphaGo-Zero style
  std::optional<int> random_search;
  std::optional<int> lstm_dqn;
  int best_known = 0;
};

const std::vector<ReferenceRow>& referenceResults();

// Fig.-4-style curve post-processing.
std::vector<double> movingMinimum(const std::vector<double>& curve, int window = 200);

struct SeedBands {
  std::vector<double> mean;
  std::vector<double> stddev;  // population std across seeds, per episode
};

SeedBands aggregateSeeds(const std::vector<std::vector<double>>& curves);

// A single training/baseline run plus where to put its artifacts.
struct TrialSpec {
  std::string label;  // benchmark id or raw-sequence tag
  HPSequence sequence;
  std::optional<int> best_known;
  TrainerConfig config;
  std::string out_dir;  // empty: keep everything in memory
  std::function<void(const CurveRow&)> observer;  // progress reporting
};

struct TrialSummary {
  std::string label;
  std::uint64_t seed = 0;
  Mode mode = Mode::Drl;
  Arch arch = Arch::Lstm2x256;
  bool failed = false;
  std::string error;
  std::int64_t episodes = 0;
  std::optional<int> lowest_energy;          // over complete episodes
  std::int64_t first_attained_episode = -1;  // first episode reaching lowest_energy
  int distinct_best_known = 0;               // distinct conformations at best-known energy
  int distinct_next_best = 0;                // ... at best-known + 1
  double complete_ratio = 0.0;
  std::optional<int> best_known;
};

// Runs one trial, writing manifest.json, curve.csv, best.jsonl and a final
// checkpoint into the trial directory (when one is given).
TrialSummary runTrial(const TrialSpec& spec);

// Everything a finished trial left on disk.
struct TrialArtifacts {
  std::string sequence;
  std::string label;
  Mode mode = Mode::Drl;
  Arch arch = Arch::Lstm2x256;
  std::uint64_t seed = 0;
  std::int64_t episodes = 0;
  bool prune_forward_runs = false;
  bool prune_early_stop = false;
  bool reward_trapped_partial = false;
  std::vector<CurveRow> curve;
  std::vector<BestEntry> best_log;
};

TrialArtifacts loadTrialDir(const std::string& dir);

// Trials are deterministic in (config, seed), so finished artifacts are
// reusable: when the directory already holds a complete run with a matching
// manifest, summarize it instead of recomputing.
TrialSummary runTrialCached(const TrialSpec& spec);

// Schedules independent trials over a worker pool. Failures are isolated
// into their summaries; the suite always completes.
std::vector<TrialSummary> runSuite(const std::vector<TrialSpec>& specs, int workers = 1);

// Table-style outputs: summary.csv and summary.json (the JSON carries the
// published reference columns next to the measured results).
void writeSuiteSummary(const std::string& out_dir, const std::vector<TrialSummary>& summaries);

// Standard layout: <root>/<label>_<mode>_seed<k>
std::string trialDirName(const std::string& label, Mode mode, Arch arch, std::uint64_t seed);

}  // namespace hpfold
