#include "hpfold/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "json.hpp"

#include "hpfold/checkpoint.hpp"

namespace hpfold {

using nlohmann::json;

const std::vector<BenchmarkEntry>& istrailBenchmark() {
  static const std::vector<BenchmarkEntry> entries = {
      {"20mer-A", "HPHPPHHPHPPHPHHPPHPH", -9, 100000},
      {"20mer-B", "HHHPPHPHPHPPHPHPHPPH", -10, 100000},
      {"24mer", "HHPPHPPHPPHPPHPPHPPHPPHH", -9, 500000},
      {"25mer", "PPHPPHHPPPPHHPPPPHHPPPPHH", -8, 500000},
      {"36mer", "PPPHHPPHHPPPPPHHHHHHHPPHHPPPPHHPPHPP", -14, 500000},
      {"48mer", "PPHPPHHPPHHPPPPPHHHHHHHHHHPPPPPPHHPPHHPPHPPHHHHH", -23, 600000},
      {"50mer", "HHPHPHPHPHHHHPHPPPHPPPHPPPPHPPPHPPPHPHHHHPHPHPHPHH", -21, 600000},
  };
  return entries;
}

const BenchmarkEntry* findBenchmarkEntry(const std::string& id) {
  for (const BenchmarkEntry& e : istrailBenchmark()) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const std::vector<ReferenceRow>& referenceResults() {
  constexpr auto none = std::nullopt;
  static const std::vector<ReferenceRow> rows = {
      {"20mer-A", none, -9, -9, -6, -8, -9, -9, -9},
      {"20mer-B", none, none, -10, -8, -9, -9, -10, -10},
      {"24mer", -9, -8, none, -6, -8, -9, -9, -9},
      {"25mer", none, -7, none, none, -7, -7, -8, -8},
      {"36mer", -13, -13, none, none, -13, -12, -14, -14},
      {"48mer", -19, -18, none, none, none, -17, -23, -23},
      {"50mer", none, -18, none, none, none, -15, -21, -21},
  };
  return rows;
}

std::vector<double> movingMinimum(const std::vector<double>& curve, int window) {
  if (window < 1) throw std::invalid_argument("movingMinimum: window must be >= 1");
  std::vector<double> out(curve.size());
  // monotone deque of indices into the current window
  std::vector<std::size_t> dq;
  std::size_t head = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    while (dq.size() > head && curve[dq.back()] >= curve[i]) dq.pop_back();
    dq.push_back(i);
    if (dq[head] + static_cast<std::size_t>(window) <= i) ++head;
    out[i] = curve[dq[head]];
  }
  return out;
}

SeedBands aggregateSeeds(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw std::invalid_argument("aggregateSeeds: no curves");
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != len) throw std::invalid_argument("aggregateSeeds: curve length mismatch");
  }
  SeedBands bands;
  bands.mean.resize(len);
  bands.stddev.resize(len);
  const double k = static_cast<double>(curves.size());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[i];
    const double mean = sum / k;
    double var = 0.0;
    for (const auto& c : curves) var += (c[i] - mean) * (c[i] - mean);
    bands.mean[i] = mean;
    bands.stddev[i] = std::sqrt(var / k);
  }
  return bands;
}

std::string trialDirName(const std::string& label, Mode mode, Arch arch, std::uint64_t seed) {
  return label + "_" + modeName(mode) + "_" + archName(arch) + "_seed" + std::to_string(seed);
}

namespace {

json manifestJson(const TrialSpec& spec, Arch arch) {
  const TrainerConfig& c = spec.config;
  json j;
  j["tool"] = "hpfold";
  j["format_version"] = 1;
  j["label"] = spec.label;
  j["sequence"] = spec.sequence.str();
  j["n"] = spec.sequence.size();
  if (spec.best_known) j["best_known_energy"] = *spec.best_known;
  j["mode"] = modeName(c.mode);
  j["arch"] = archName(arch);
  j["seed"] = c.seed;
  j["episodes"] = c.episodes;
  j["gamma"] = c.gamma;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["target_sync_updates"] = c.target_sync_updates;
  j["replay_capacity"] = replayCapacityFor(c.episodes);
  j["eps_min"] = c.eps_min;
  j["eps_max"] = c.eps_max;
  j["eps_lambda"] = c.eps_lambda;
  j["adam"] = {{"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8}};
  j["prune_forward_runs"] = c.prune_forward_runs;
  j["prune_early_stop"] = c.prune_early_stop;
  j["reward_trapped_partial"] = c.reward_trapped_partial;
  j["checkpoint_every"] = c.checkpoint_every;
  return j;
}

}  // namespace

namespace {

void summarizeRun(TrialSummary& summary, const std::vector<CurveRow>& curve,
                  const std::vector<BestEntry>& best_log, std::optional<int> best_known) {
  std::optional<int> lowest;
  std::int64_t complete = 0;
  for (const CurveRow& row : curve) {
    complete += row.complete;
    if (row.complete && (!lowest || row.energy < *lowest)) lowest = row.energy;
  }
  summary.lowest_energy = lowest;
  if (lowest) {
    for (const CurveRow& row : curve) {
      if (row.complete && row.energy == *lowest) {
        summary.first_attained_episode = row.episode;
        break;
      }
    }
  }
  summary.complete_ratio =
      curve.empty() ? 0.0 : static_cast<double>(complete) / static_cast<double>(curve.size());
  if (best_known) {
    std::set<std::string> at_best, at_next;
    for (const BestEntry& e : best_log) {
      if (e.energy == *best_known) at_best.insert(e.actions);
      if (e.energy == *best_known + 1) at_next.insert(e.actions);
    }
    summary.distinct_best_known = static_cast<int>(at_best.size());
    summary.distinct_next_best = static_cast<int>(at_next.size());
  }
}

TrialSummary blankSummary(const TrialSpec& spec) {
  TrialSummary summary;
  summary.label = spec.label;
  summary.seed = spec.config.seed;
  summary.mode = spec.config.mode;
  summary.arch = spec.config.arch.value_or(defaultArchFor(spec.sequence.size()));
  summary.episodes = spec.config.episodes;
  summary.best_known = spec.best_known;
  return summary;
}

}  // namespace

TrialSummary runTrial(const TrialSpec& spec) {
  TrialSummary summary = blankSummary(spec);

  try {
    const bool write = !spec.out_dir.empty();
    std::ofstream curve_out, best_out;
    if (write) {
      std::filesystem::create_directories(spec.out_dir);
      std::ofstream manifest(spec.out_dir + "/manifest.json");
      manifest << manifestJson(spec, summary.arch).dump(2) << "\n";
      if (!manifest) throw std::runtime_error("cannot write manifest in " + spec.out_dir);
      curve_out.open(spec.out_dir + "/curve.csv");
      curve_out << "episode,energy,complete,epsilon\n";
      best_out.open(spec.out_dir + "/best.jsonl");
    }

    Trainer trainer(spec.sequence, spec.config);

    TrainHooks hooks;
    std::size_t best_written = 0;
    char line[96];
    hooks.on_episode = [&](const CurveRow& row) {
      if (write) {
        std::snprintf(line, sizeof(line), "%lld,%d,%d,%.9g\n",
                      static_cast<long long>(row.episode), row.energy,
                      row.complete ? 1 : 0, row.epsilon);
        curve_out << line;
        if ((row.episode + 1) % 1000 == 0) curve_out.flush();
      }
      if (spec.observer) spec.observer(row);
    };
    if (write) {
      hooks.on_checkpoint = [&](std::int64_t episode, const Trainer& tr) {
        saveCheckpoint(spec.out_dir + "/checkpoint_ep" + std::to_string(episode) + ".ckpt", tr);
      };
    }

    TrainResult result = trainer.train(hooks);

    if (write) {
      for (; best_written < result.best_log.size(); ++best_written) {
        const BestEntry& e = result.best_log[best_written];
        json j{{"episode", e.episode}, {"energy", e.energy}, {"actions", e.actions}};
        best_out << j.dump() << "\n";
      }
      best_out.flush();
      saveCheckpoint(spec.out_dir + "/checkpoint.ckpt", trainer);
    }

    summarizeRun(summary, result.curve, result.best_log, spec.best_known);
  } catch (const std::exception& e) {
    summary.failed = true;
    summary.error = e.what();
  }
  return summary;
}

TrialArtifacts loadTrialDir(const std::string& dir) {
  TrialArtifacts art;
  std::ifstream manifest(dir + "/manifest.json");
  if (!manifest) throw std::runtime_error("no manifest.json in " + dir);
  json m = json::parse(manifest);
  art.sequence = m.at("sequence").get<std::string>();
  art.label = m.value("label", art.sequence);
  art.mode = modeFromName(m.at("mode").get<std::string>());
  art.arch = archFromName(m.at("arch").get<std::string>());
  art.seed = m.at("seed").get<std::uint64_t>();
  art.episodes = m.at("episodes").get<std::int64_t>();
  art.prune_forward_runs = m.value("prune_forward_runs", false);
  art.prune_early_stop = m.value("prune_early_stop", false);
  art.reward_trapped_partial = m.value("reward_trapped_partial", false);

  std::ifstream curve(dir + "/curve.csv");
  if (!curve) throw std::runtime_error("no curve.csv in " + dir);
  std::string line;
  std::getline(curve, line);  // header
  while (std::getline(curve, line)) {
    CurveRow row;
    long long episode = 0;
    int complete = 0;
    if (std::sscanf(line.c_str(), "%lld,%d,%d,%lg", &episode, &row.energy, &complete,
                    &row.epsilon) != 4) {
      throw std::runtime_error("corrupt curve row in " + dir + ": " + line);
    }
    row.episode = episode;
    row.complete = complete != 0;
    art.curve.push_back(row);
  }

  std::ifstream best(dir + "/best.jsonl");
  if (best) {
    while (std::getline(best, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      art.best_log.push_back({j.at("episode").get<std::int64_t>(), j.at("energy").get<int>(),
                              j.at("actions").get<std::string>()});
    }
  }
  return art;
}

TrialSummary runTrialCached(const TrialSpec& spec) {
  if (!spec.out_dir.empty()) {
    try {
      TrialArtifacts art = loadTrialDir(spec.out_dir);
      const Arch arch = spec.config.arch.value_or(defaultArchFor(spec.sequence.size()));
      const bool matches = art.sequence == spec.sequence.str() &&
                           art.mode == spec.config.mode && art.arch == arch &&
                           art.seed == spec.config.seed &&
                           art.episodes == spec.config.episodes &&
                           art.prune_forward_runs == spec.config.prune_forward_runs &&
                           art.prune_early_stop == spec.config.prune_early_stop &&
                           art.reward_trapped_partial == spec.config.reward_trapped_partial &&
                           static_cast<std::int64_t>(art.curve.size()) == spec.config.episodes;
      if (matches) {
        TrialSummary summary = blankSummary(spec);
        summarizeRun(summary, art.curve, art.best_log, spec.best_known);
        return summary;
      }
    } catch (const std::exception&) {
      // fall through to a fresh run
    }
  }
  return runTrial(spec);
}

std::vector<TrialSummary> runSuite(const std::vector<TrialSpec>& specs, int workers) {
  std::vector<TrialSummary> summaries(specs.size());
  if (workers < 1) workers = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      summaries[i] = runTrial(specs[i]);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return summaries;
}

void writeSuiteSummary(const std::string& out_dir, const std::vector<TrialSummary>& summaries) {
  std::filesystem::create_directories(out_dir);

  std::ofstream csv(out_dir + "/summary.csv");
  csv << "label,mode,arch,seed,episodes,lowest_energy,best_known,first_attained_episode,"
         "distinct_best_known,distinct_next_best,complete_ratio,failed,error\n";
  for (const TrialSummary& s : summaries) {
    csv << s.label << ',' << modeName(s.mode) << ',' << archName(s.arch) << ',' << s.seed << ','
        << s.episodes << ',';
    if (s.lowest_energy) csv << *s.lowest_energy;
    csv << ',';
    if (s.best_known) csv << *s.best_known;
    csv << ',' << s.first_attained_episode << ',' << s.distinct_best_known << ','
        << s.distinct_next_best << ',' << s.complete_ratio << ',' << (s.failed ? 1 : 0) << ','
        << s.error << "\n";
  }

  json j;
  j["trials"] = json::array();
  for (const TrialSummary& s : summaries) {
    json t;
    t["label"] = s.label;
    t["mode"] = modeName(s.mode);
    t["arch"] = archName(s.arch);
    t["seed"] = s.seed;
    t["episodes"] = s.episodes;
    t["lowest_energy"] = s.lowest_energy ? json(*s.lowest_energy) : json();
    t["best_known"] = s.best_known ? json(*s.best_known) : json();
    t["first_attained_episode"] = s.first_attained_episode;
    t["distinct_best_known"] = s.distinct_best_known;
    t["distinct_next_best"] = s.distinct_next_best;
    t["complete_ratio"] = s.complete_ratio;
    t["failed"] = s.failed;
    if (s.failed) t["error"] = s.error;
    j["trials"].push_back(t);
  }
  j["reference"] = json::array();
  for (const ReferenceRow& r : referenceResults()) {
    auto opt = [](std::optional<int> v) { return v ? json(*v) : json(); };
    j["reference"].push_back({{"id", r.id},
                              {"ant_q_2015", opt(r.ant_q)},
                              {"folding_zero_2018", opt(r.folding_zero)},
                              {"wu_ql_2019", opt(r.wu_ql)},
                              {"yu_drl_2020", opt(r.yu_drl)},
                              {"yu_alphago_2020", opt(r.yu_alphago)},
                              {"random", opt(r.random_search)},
                              {"lstm_dqn", opt(r.lstm_dqn)},
                              {"best_known", r.best_known}});
  }
  std::ofstream js(out_dir + "/summary.json");
  js << j.dump(2) << "\n";
}

}  // namespace hpfold
