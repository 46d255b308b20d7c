// hpfold: train, baseline, enumerate, benchmark, plot-data and conformation
// database commands for HP-model folding on the 2D square lattice.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"

#include "hpfold/benchmark.hpp"
#include "hpfold/checkpoint.hpp"
#include "hpfold/confdb.hpp"
#include "hpfold/oracle.hpp"

using namespace hpfold;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string outputRoot() {
  if (const char* env = std::getenv("HPFOLD_OUT_ROOT")) return env;
  return "runs";
}

struct SequenceChoice {
  std::string label;
  HPSequence sequence;
  std::optional<int> best_known;
  std::optional<std::int64_t> episodes_default;
};

SequenceChoice resolveSequence(const std::string& seq_text, const std::string& benchmark_id) {
  if (!seq_text.empty() && !benchmark_id.empty()) {
    throw std::invalid_argument("give either --seq or --benchmark-id, not both");
  }
  if (!seq_text.empty()) {
    return {seq_text, HPSequence::parse(seq_text), std::nullopt, std::nullopt};
  }
  if (!benchmark_id.empty()) {
    const BenchmarkEntry* entry = findBenchmarkEntry(benchmark_id);
    if (entry == nullptr) {
      std::string known;
      for (const auto& e : istrailBenchmark()) known += " " + e.id;
      throw std::invalid_argument("unknown benchmark id '" + benchmark_id + "'; known:" + known);
    }
    return {entry->id, HPSequence::parse(entry->sequence), entry->best_known_energy,
            entry->episodes_default};
  }
  throw std::invalid_argument("one of --seq or --benchmark-id is required");
}

json summaryJson(const TrialSummary& s) {
  json j;
  j["label"] = s.label;
  j["mode"] = modeName(s.mode);
  j["arch"] = archName(s.arch);
  j["seed"] = s.seed;
  j["episodes"] = s.episodes;
  j["lowest_energy"] = s.lowest_energy ? json(*s.lowest_energy) : json();
  j["best_known"] = s.best_known ? json(*s.best_known) : json();
  j["first_attained_episode"] = s.first_attained_episode;
  j["distinct_best_known"] = s.distinct_best_known;
  j["distinct_next_best"] = s.distinct_next_best;
  j["complete_ratio"] = s.complete_ratio;
  j["failed"] = s.failed;
  if (s.failed) j["error"] = s.error;
  return j;
}

int cmdTrain(const std::string& seq_text, const std::string& benchmark_id,
             std::int64_t episodes, std::uint64_t seed, const std::string& mode_name,
             const std::string& arch_name, bool prune, bool reward_trapped,
             std::string out_dir, std::int64_t checkpoint_every, std::int64_t progress,
             bool resume) {
  SequenceChoice choice = resolveSequence(seq_text, benchmark_id);

  TrialSpec spec;
  spec.label = choice.label;
  spec.sequence = choice.sequence;
  spec.best_known = choice.best_known;
  spec.config.mode = modeFromName(mode_name);
  if (!arch_name.empty()) spec.config.arch = archFromName(arch_name);
  spec.config.seed = seed;
  spec.config.episodes = episodes > 0 ? episodes : choice.episodes_default.value_or(0);
  if (spec.config.episodes <= 0) {
    throw std::invalid_argument("--episodes is required for raw sequences");
  }
  spec.config.prune_forward_runs = prune;
  spec.config.prune_early_stop = prune;
  spec.config.reward_trapped_partial = reward_trapped;
  spec.config.checkpoint_every = checkpoint_every;

  if (out_dir.empty()) {
    const Arch arch = spec.config.arch.value_or(defaultArchFor(spec.sequence.size()));
    out_dir = outputRoot() + "/" +
              trialDirName(spec.label, spec.config.mode, arch, spec.config.seed);
  }
  spec.out_dir = out_dir;

  if (spec.config.mode == Mode::Drl &&
      replayCapacityFor(spec.config.episodes) < static_cast<std::size_t>(spec.config.batch_size)) {
    std::cerr << "note: replay capacity " << replayCapacityFor(spec.config.episodes)
              << " is below the batch size; no gradient updates will happen\n";
  }

  int best_seen = 1;
  if (progress > 0) {
    spec.observer = [&, progress](const CurveRow& row) {
      if (row.complete && (best_seen > 0 || row.energy < best_seen)) best_seen = row.energy;
      if ((row.episode + 1) % progress == 0) {
        std::cerr << "episode " << (row.episode + 1) << "  eps=" << row.epsilon
                  << "  best=" << (best_seen > 0 ? 0 : best_seen) << "\n";
      }
    };
  }
  const TrialSummary summary = resume ? runTrialCached(spec) : runTrial(spec);
  if (summary.failed) {
    std::cerr << "trial failed: " << summary.error << "\n";
    return kExitRuntime;
  }
  std::cout << summaryJson(summary).dump(2) << "\n";
  return kExitOk;
}

int cmdEnumerate(const std::string& seq_text, int n, bool verify, bool verify_n24,
                 const std::string& landscape_path, int collect_cap, bool override_feasibility,
                 int workers) {
  if (verify || verify_n24) {
    const auto checks = verifyCounts(verify_n24, workers);
    json out = json::array();
    bool all_match = true;
    for (const CountCheck& c : checks) {
      out.push_back({{"n", c.n}, {"expected", c.expected}, {"actual", c.actual},
                     {"match", c.match}});
      all_match = all_match && c.match;
    }
    std::cout << out.dump(2) << "\n";
    return all_match ? kExitOk : kExitRuntime;
  }

  HPSequence seq = [&] {
    if (!seq_text.empty()) return HPSequence::parse(seq_text);
    if (n >= 3) return HPSequence::parse(std::string(static_cast<std::size_t>(n), 'P'));
    throw std::invalid_argument("one of --seq or --n is required");
  }();

  EnumerateOptions opts;
  opts.collect_optimal = collect_cap > 0;
  opts.cap = static_cast<std::size_t>(std::max(collect_cap, 0));
  opts.override_feasibility = override_feasibility;
  opts.workers = workers;
  const EnumerationReport report = enumerateWalks(seq, opts);

  if (!landscape_path.empty()) landscapeExport(seq, landscape_path);

  json j;
  j["n"] = report.n;
  j["sequence"] = seq.str();
  j["complete_count"] = report.complete_count;
  j["trapped_count"] = report.trapped_count;
  j["min_energy"] = report.min_energy ? json(*report.min_energy) : json();
  j["degeneracy"] = report.degeneracy;
  if (opts.collect_optimal) {
    j["optimal_actions"] = report.optimal_actions;
    j["optimal_truncated"] = report.optimal_truncated;
  }
  if (!landscape_path.empty()) j["landscape"] = landscape_path;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmdBench(std::vector<std::string> entries, std::vector<std::string> modes,
             std::vector<std::uint64_t> seeds, std::int64_t episodes_override,
             const std::string& arch_name, bool prune, std::string out_dir, int workers,
             bool resume) {
  if (entries.size() == 1 && entries[0] == "all") {
    entries.clear();
    for (const auto& e : istrailBenchmark()) entries.push_back(e.id);
  }
  if (out_dir.empty()) out_dir = outputRoot() + "/bench";

  std::vector<TrialSpec> specs;
  for (const std::string& id : entries) {
    const BenchmarkEntry* entry = findBenchmarkEntry(id);
    if (entry == nullptr) throw std::invalid_argument("unknown benchmark id '" + id + "'");
    for (const std::string& mode : modes) {
      for (std::uint64_t seed : seeds) {
        TrialSpec spec;
        spec.label = entry->id;
        spec.sequence = HPSequence::parse(entry->sequence);
        spec.best_known = entry->best_known_energy;
        spec.config.mode = modeFromName(mode);
        if (!arch_name.empty()) spec.config.arch = archFromName(arch_name);
        spec.config.seed = seed;
        spec.config.episodes =
            episodes_override > 0 ? episodes_override : entry->episodes_default;
        spec.config.prune_forward_runs = prune;
        spec.config.prune_early_stop = prune;
        const Arch arch = spec.config.arch.value_or(defaultArchFor(spec.sequence.size()));
        spec.out_dir = out_dir + "/" + trialDirName(spec.label, spec.config.mode, arch, seed);
        specs.push_back(std::move(spec));
      }
    }
  }

  std::vector<TrialSummary> summaries;
  if (resume) {
    summaries.resize(specs.size());
    std::vector<TrialSpec> const* all = &specs;
    // cached trials resolve instantly; fresh ones go through the pool
    std::vector<TrialSpec> pending;
    std::vector<std::size_t> pending_idx;
    for (std::size_t i = 0; i < all->size(); ++i) {
      TrialSummary s = runTrialCached((*all)[i]);
      summaries[i] = s;
    }
  } else {
    summaries = runSuite(specs, workers);
  }
  writeSuiteSummary(out_dir, summaries);

  json out = json::array();
  for (const TrialSummary& s : summaries) out.push_back(summaryJson(s));
  std::cout << out.dump(2) << "\n";
  std::cerr << "summary written to " << out_dir << "/summary.{csv,json}\n";
  return kExitOk;
}

std::vector<std::string> expandCurveDirs(const std::vector<std::string>& inputs) {
  std::vector<std::string> dirs;
  for (const std::string& input : inputs) {
    if (fs::exists(fs::path(input) / "curve.csv")) {
      dirs.push_back(input);
      continue;
    }
    if (fs::is_directory(input)) {
      std::vector<std::string> children;
      for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_directory() && fs::exists(entry.path() / "curve.csv")) {
          children.push_back(entry.path().string());
        }
      }
      std::sort(children.begin(), children.end());
      dirs.insert(dirs.end(), children.begin(), children.end());
      continue;
    }
    throw std::invalid_argument("no curve.csv under '" + input + "'");
  }
  if (dirs.empty()) throw std::invalid_argument("no trial directories found");
  return dirs;
}

int cmdPlotData(const std::vector<std::string>& inputs, int window, const std::string& out_dir) {
  const std::vector<std::string> dirs = expandCurveDirs(inputs);
  fs::create_directories(out_dir);

  struct GroupKey {
    std::string label, mode, arch;
    bool operator<(const GroupKey& o) const {
      return std::tie(label, mode, arch) < std::tie(o.label, o.mode, o.arch);
    }
  };
  std::map<GroupKey, std::vector<std::vector<double>>> groups;

  for (const std::string& dir : dirs) {
    const TrialArtifacts art = loadTrialDir(dir);
    // incomplete episodes carry no valid solution: scored as energy 0
    std::vector<double> energies(art.curve.size());
    for (std::size_t i = 0; i < art.curve.size(); ++i) {
      energies[i] = art.curve[i].complete ? art.curve[i].energy : 0.0;
    }
    const std::vector<double> minimum = movingMinimum(energies, window);

    const std::string stem = fs::path(dir).filename().string();
    std::ofstream os(out_dir + "/" + stem + "_minimum.csv");
    os << "episode,moving_min\n";
    for (std::size_t i = 0; i < minimum.size(); ++i) os << i << ',' << minimum[i] << "\n";

    groups[{art.label, modeName(art.mode), archName(art.arch)}].push_back(minimum);
  }

  for (const auto& [key, curves] : groups) {
    if (curves.size() < 2) continue;
    bool equal_len = true;
    for (const auto& c : curves) equal_len = equal_len && c.size() == curves.front().size();
    if (!equal_len) {
      std::cerr << "skipping band for " << key.label << "_" << key.mode
                << ": curve lengths differ\n";
      continue;
    }
    const SeedBands bands = aggregateSeeds(curves);
    std::ofstream os(out_dir + "/band_" + key.label + "_" + key.mode + "_" + key.arch + ".csv");
    os << "episode,mean,stddev\n";
    for (std::size_t i = 0; i < bands.mean.size(); ++i) {
      os << i << ',' << bands.mean[i] << ',' << bands.stddev[i] << "\n";
    }
  }
  std::cerr << "plot data written to " << out_dir << "\n";
  return kExitOk;
}

int cmdConfDb(const std::vector<std::string>& imports, const std::string& seq_text,
              const std::string& export_dir, bool print_stats, bool draw, int max_draw) {
  ConformationDb db;
  json rejections = json::array();
  std::uint64_t accepted = 0;

  for (const std::string& input : imports) {
    std::string best_path = input;
    std::string sequence = seq_text;
    std::string trial_id = fs::path(input).filename().string();
    if (fs::is_directory(input)) {
      best_path = (fs::path(input) / "best.jsonl").string();
      const TrialArtifacts art = loadTrialDir(input);
      sequence = art.sequence;
      trial_id = trialDirName(art.label, art.mode, art.arch, art.seed);
    } else if (sequence.empty()) {
      throw std::invalid_argument("--seq is required when importing raw log files");
    }

    std::ifstream is(best_path);
    if (!is) throw std::invalid_argument("cannot open '" + best_path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        json j = json::parse(line);
        ConformationRecord rec;
        rec.sequence = sequence;
        rec.actions = j.at("actions").get<std::string>();
        rec.energy = j.at("energy").get<int>();
        rec.first_episode = j.value("episode", static_cast<std::int64_t>(-1));
        rec.trial_id = trial_id;
        db.add(rec);
        ++accepted;
      } catch (const std::exception& e) {
        rejections.push_back(
            {{"file", best_path}, {"line", line_no}, {"error", e.what()}});
      }
    }
  }

  if (!export_dir.empty()) {
    fs::create_directories(export_dir);
    db.exportFiles(export_dir + "/records.jsonl", export_dir + "/stats.json");
    if (draw) {
      const std::string draw_dir = export_dir + "/drawings";
      fs::create_directories(draw_dir);
      int drawn = 0;
      for (const ConformationRecord& rec : db.records()) {
        if (drawn >= max_draw) break;
        const HPSequence seq = HPSequence::parse(rec.sequence);
        const ReplayOutcome replay = replayActions(seq, rec.actions);
        drawConformationSvg(seq, replay.state.placed,
                            draw_dir + "/conf_" + std::to_string(drawn) + "_e" +
                                std::to_string(rec.energy) + ".svg");
        ++drawn;
      }
    }
  }

  json out;
  out["records_accepted"] = accepted;
  out["distinct_stored"] = db.size();
  out["rejections"] = rejections;
  if (print_stats || export_dir.empty()) {
    const DatabaseStats stats = db.stats();
    json stats_json = json::array();
    for (const SequenceStats& s : stats.sequences) {
      json levels = json::array();
      for (const LevelStats& level : s.levels) {
        levels.push_back(
            {{"energy", level.energy}, {"distinct", level.distinct}, {"by_trial", level.by_trial}});
      }
      stats_json.push_back({{"sequence", s.sequence},
                            {"best_energy", s.best_energy ? json(*s.best_energy) : json()},
                            {"levels", levels}});
    }
    out["stats"] = stats_json;
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HP-model folding with an LSTM-based deep Q-network"};
  app.require_subcommand(1);

  // train
  std::string t_seq, t_bench, t_mode = "drl", t_arch, t_out;
  std::int64_t t_episodes = 0, t_ckpt_every = 0, t_progress = 0;
  std::uint64_t t_seed = 0;
  bool t_prune = false, t_reward_trapped = false, t_resume = false;
  CLI::App* train = app.add_subcommand("train", "train a DQN or run the random baseline");
  train->add_option("--seq", t_seq, "raw H/P sequence");
  train->add_option("--benchmark-id", t_bench, "Istrail benchmark id (e.g. 20mer-B)");
  train->add_option("--episodes", t_episodes, "episodes per trial (default: benchmark preset)");
  train->add_option("--seed", t_seed, "trial seed");
  train->add_option("--mode", t_mode, "drl or rand")->check(CLI::IsMember({"drl", "rand"}));
  train->add_option("--arch", t_arch, "lstm2x256, lstm3x512 or fcn")
      ->check(CLI::IsMember({"lstm2x256", "lstm3x512", "fcn"}));
  train->add_flag("--prune-heuristics", t_prune, "enable both manual pruning heuristics");
  train->add_flag("--reward-trapped", t_reward_trapped, "reward trapped walks with partial |E|");
  train->add_option("--out", t_out, "trial output directory");
  train->add_option("--checkpoint-every", t_ckpt_every, "episodes between checkpoints");
  train->add_option("--progress", t_progress, "print progress every K episodes (stderr)");
  train->add_flag("--resume", t_resume, "reuse finished artifacts if present");

  // enumerate
  std::string e_seq, e_landscape;
  int e_n = 0, e_cap = 0, e_workers = 2;
  bool e_verify = false, e_verify24 = false, e_override = false;
  CLI::App* enumerate = app.add_subcommand("enumerate", "exhaustive walk census for small N");
  enumerate->add_option("--seq", e_seq, "raw H/P sequence");
  enumerate->add_option("--n", e_n, "length (all-P sequence: counts only)");
  enumerate->add_flag("--verify-counts", e_verify, "check published complete-walk counts");
  enumerate->add_flag("--verify-n24", e_verify24, "include the long N = 24 count check");
  enumerate->add_option("--landscape", e_landscape, "write per-walk JSONL landscape data");
  enumerate->add_option("--collect-optimal", e_cap, "collect up to CAP optimal action strings");
  enumerate->add_flag("--override-feasibility", e_override, "lift the N <= 22 guard");
  enumerate->add_option("--workers", e_workers, "subtree workers");

  // bench
  std::vector<std::string> b_entries{"all"}, b_modes{"drl", "rand"};
  std::vector<std::uint64_t> b_seeds{1, 2, 3, 4};
  std::string b_out, b_arch;
  std::int64_t b_override = 0;
  int b_workers = 2;
  bool b_prune = false, b_resume = false;
  CLI::App* bench = app.add_subcommand("bench", "multi-seed benchmark suite");
  bench->add_option("--entries", b_entries, "benchmark ids or 'all'");
  bench->add_option("--modes", b_modes, "drl and/or rand");
  bench->add_option("--seeds", b_seeds, "trial seeds");
  bench->add_option("--episodes-override", b_override, "override per-entry episode defaults");
  bench->add_option("--arch", b_arch, "force architecture")
      ->check(CLI::IsMember({"lstm2x256", "lstm3x512", "fcn"}));
  bench->add_flag("--prune-heuristics", b_prune, "enable pruning heuristics");
  bench->add_option("--out", b_out, "suite output root");
  bench->add_option("--workers", b_workers, "parallel trials");
  bench->add_flag("--resume", b_resume, "reuse finished trial artifacts");

  // plotdata
  std::vector<std::string> p_curves;
  std::string p_out = "plotdata";
  int p_window = 200;
  CLI::App* plotdata = app.add_subcommand("plotdata", "moving-minimum curves and seed bands");
  plotdata->add_option("--curves", p_curves, "trial dirs or a root of trial dirs")->required();
  plotdata->add_option("--window", p_window, "moving-minimum window");
  plotdata->add_option("--out", p_out, "output directory");

  // confdb
  std::vector<std::string> c_imports;
  std::string c_seq, c_export;
  bool c_stats = false, c_draw = false;
  int c_max_draw = 64;
  CLI::App* confdb = app.add_subcommand("confdb", "build the conformation database");
  confdb->add_option("--import", c_imports, "trial dirs or best.jsonl files")->required();
  confdb->add_option("--seq", c_seq, "sequence for raw log files");
  confdb->add_option("--export", c_export, "write records.jsonl + stats.json here");
  confdb->add_flag("--stats", c_stats, "print stats to stdout");
  confdb->add_flag("--draw", c_draw, "render SVG drawings on export");
  confdb->add_option("--max-draw", c_max_draw, "cap on rendered drawings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (train->parsed()) {
      return cmdTrain(t_seq, t_bench, t_episodes, t_seed, t_mode, t_arch, t_prune,
                      t_reward_trapped, t_out, t_ckpt_every, t_progress, t_resume);
    }
    if (enumerate->parsed()) {
      return cmdEnumerate(e_seq, e_n, e_verify, e_verify24, e_landscape, e_cap, e_override,
                          e_workers);
    }
    if (bench->parsed()) {
      return cmdBench(b_entries, b_modes, b_seeds, b_override, b_arch, b_prune, b_out, b_workers,
                      b_resume);
    }
    if (plotdata->parsed()) return cmdPlotData(p_curves, p_window, p_out);
    if (confdb->parsed()) return cmdConfDb(c_imports, c_seq, c_export, c_stats, c_draw, c_max_draw);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
