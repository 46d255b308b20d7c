// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance                 run the desk-scale criteria
//   acceptance --only 1,2      run a subset
//   acceptance --heavy         include the N = 24 census (about a minute of CPU)
//   acceptance --full          include the full-budget training reproductions (CPU-days)
//   acceptance --runs DIR      evaluate the long-running-recipe criteria on stored trials
//
// Training criteria reuse finished trial artifacts when the output root
// already holds them (trials are deterministic in config and seed).

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "hpfold/adam.hpp"
#include "hpfold/benchmark.hpp"
#include "hpfold/confdb.hpp"
#include "hpfold/loss.hpp"
#include "hpfold/oracle.hpp"
#include "hpfold/trainer.hpp"

using namespace hpfold;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::set<int> only;
  bool heavy = false;
  bool full = false;
  std::string runs_dir;
  std::string out_root = "acceptance_runs";
  int workers = 2;
};

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

Outcome pass(std::string detail) { return {Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Status::Skip, std::move(detail)}; }

std::string fmtEnergy(std::optional<int> e) { return e ? std::to_string(*e) : "none"; }

// ---------------------------------------------------------------- criterion 1
Outcome criterion1(const Options& opt) {
  const auto checks = verifyCounts(opt.heavy, opt.workers);
  std::string detail;
  for (const CountCheck& c : checks) {
    detail += "N=" + std::to_string(c.n) + ": " + std::to_string(c.actual) +
              (c.match ? " (= expected) " : " (expected " + std::to_string(c.expected) + ") ");
    if (!c.match) return fail(detail);
  }
  if (!opt.heavy) detail += "[N=24 census needs --heavy]";
  return pass(detail);
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion2(const Options& opt) {
  const std::vector<std::pair<std::string, int>> cases = {
      {"HPPHPH", -2},
      {"HPPHHPPH", -3},
      {"HPPHPHPHHPPHH", -6},
      {istrailBenchmark()[0].sequence, -9},   // 20mer-A
      {istrailBenchmark()[1].sequence, -10},  // 20mer-B
  };
  std::string detail;
  for (const auto& [seq, expected] : cases) {
    const int got = optimalEnergy(HPSequence::parse(seq), opt.workers);
    detail += "N" + std::to_string(seq.size()) + "=" + std::to_string(got) + " ";
    if (got != expected) {
      return fail("optimal energy of " + seq + " is " + std::to_string(got) + ", expected " +
                  std::to_string(expected));
    }
  }
  return pass(detail);
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion3(const Options&) {
  Rng rng(424242);
  QNetwork<double> net;
  net.arch = Arch::Lstm2x256;
  net.n = 6;
  net.hidden = 8;
  int in = kInputFeatures;
  for (int l = 0; l < 2; ++l) {
    LstmLayer<double> layer;
    layer.w.resize(32, in);
    detail::fillUniform(layer.w, 0.4, rng);
    layer.u.resize(32, 8);
    detail::fillUniform(layer.u, 0.4, rng);
    layer.b.resize(32, 1);
    detail::fillUniform(layer.b, 0.4, rng);
    net.lstm.push_back(std::move(layer));
    in = 8;
  }
  net.head_w.resize(3, 8);
  detail::fillUniform(net.head_w, 0.4, rng);
  net.head_b.resize(3, 1);
  detail::fillUniform(net.head_b, 0.4, rng);

  HPSequence seq = HPSequence::parse("HPPHPH");
  ReplayOutcome walk = replayActions(seq, "LF");
  EncodedState x = encode(walk.state, seq);
  const Vec3<double> upstream(0.7, -1.3, 0.4);

  QNetwork<double> analytic = backward(net, x, upstream);
  auto params = net.tensors();
  auto grads = analytic.tensors();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t]->size(); ++i) {
      const double saved = params[t]->data()[i];
      params[t]->data()[i] = saved + h;
      const double fp = upstream.dot(forward(net, x));
      params[t]->data()[i] = saved - h;
      const double fm = upstream.dot(forward(net, x));
      params[t]->data()[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = grads[t]->data()[i];
      worst = std::max(worst,
                       std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  std::ostringstream ss;
  ss << "max relative error " << worst << " (tolerance 1e-4)";
  return worst <= 1e-4 ? pass(ss.str()) : fail(ss.str());
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion4(const Options&) {
  EpsilonSchedule s;
  s.psi = 100000;
  const double eps0 = epsilonAt(s, 0);
  const double eps_end = epsilonAt(s, s.psi);
  const double expected_end = 0.01 + 0.99 * std::exp(-5.0);
  if (eps0 != 1.0) return fail("eps(0) = " + std::to_string(eps0));
  if (std::abs(eps_end - expected_end) > 1e-9) {
    return fail("eps(psi) = " + std::to_string(eps_end));
  }
  if (huber(0.5) != 0.125) return fail("huber(0.5) != 0.125");
  if (huber(2.0) != 1.5) return fail("huber(2) != 1.5");
  std::ostringstream ss;
  ss << "eps(0)=1, eps(psi)=" << eps_end << ", huber(0.5)=0.125, huber(2)=1.5";
  return pass(ss.str());
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion5(const Options&) {
  // replay capacity law
  if (replayCapacityFor(100000) != 10000 || replayCapacityFor(600000) != 50000 ||
      replayCapacityFor(20000) != 2000) {
    return fail("replay capacity law violated");
  }
  ReplayMemory mem(3);
  HPSequence hpph = HPSequence::parse("HPPH");
  for (int i = 0; i < 7; ++i) {
    WalkState st = reset(hpph);
    Experience e;
    e.s = encode(st, hpph);
    e.a = Action::Left;
    e.r = static_cast<float>(i);
    e.s_next = e.s;
    e.terminal = true;
    mem.push(e);
  }
  if (mem.size() != 3 || mem.at(0).r != 4.0f) return fail("FIFO eviction broken");

  // target constant between syncs, equal right after
  TrainerConfig cfg;
  cfg.episodes = 800;
  cfg.batch_size = 1;
  cfg.seed = 5;
  Trainer tr(hpph, cfg);
  {
    WalkState st = reset(hpph);
    Experience e;
    e.s = encode(st, hpph);
    e.a = Action::Left;
    e.r = 2.0f;
    StepResult res = step(st, hpph, Action::Left);
    e.s_next = encode(res.state, hpph);
    e.terminal = true;
    tr.memory().push(e);
  }
  auto paramsEqual = [](const QNetwork<float>& a, const QNetwork<float>& b) {
    auto ta = a.tensors();
    auto tb = b.tensors();
    for (std::size_t i = 0; i < ta.size(); ++i) {
      if (ta[i]->size() != tb[i]->size()) return false;
      if (std::memcmp(ta[i]->data(), tb[i]->data(),
                      sizeof(float) * static_cast<std::size_t>(ta[i]->size())) != 0)
        return false;
    }
    return true;
  };
  const QNetwork<float> target0 = tr.target();
  for (int i = 0; i < 99; ++i) tr.trainStep();
  if (!paramsEqual(tr.target(), target0)) return fail("target moved between syncs");
  if (paramsEqual(tr.policy(), tr.target())) return fail("policy did not move");
  tr.trainStep();  // 100th update syncs
  if (!paramsEqual(tr.policy(), tr.target())) return fail("target != policy after sync");

  // epsilon pinned at 1 reproduces the rand baseline exactly
  HPSequence seq = HPSequence::parse("HPPHHPPH");
  TrainerConfig rand_cfg;
  rand_cfg.episodes = 400;
  rand_cfg.mode = Mode::Rand;
  rand_cfg.seed = 77;
  TrainerConfig eps1_cfg = rand_cfg;
  eps1_cfg.mode = Mode::Drl;
  eps1_cfg.eps_min = 1.0;
  eps1_cfg.eps_max = 1.0;
  Trainer a(seq, rand_cfg);
  Trainer b(seq, eps1_cfg);
  TrainResult ra = a.train();
  TrainResult rb = b.train();
  for (std::size_t i = 0; i < ra.curve.size(); ++i) {
    if (ra.curve[i].energy != rb.curve[i].energy ||
        ra.curve[i].complete != rb.curve[i].complete) {
      return fail("eps=1 trajectory diverged from the baseline at episode " + std::to_string(i));
    }
  }
  if (rb.updates == 0) return fail("eps=1 trainer performed no updates");
  return pass("capacity law, FIFO, sync boundary, eps=1 == rand over 400 episodes");
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion6(const Options&) {
  HPSequence seq = HPSequence::parse(istrailBenchmark()[0].sequence);  // 20mer-A
  TrainerConfig cfg;
  cfg.episodes = 320;  // capacity 32 = exactly one frozen batch
  cfg.batch_size = 32;
  cfg.seed = 6;
  Trainer tr(seq, cfg);
  while (tr.memory().size() < 32) tr.runEpisode(1.0);

  std::vector<float> losses;
  losses.reserve(2000);
  bool reached = false;
  for (int i = 0; i < 2000; ++i) {
    auto loss = tr.trainStep();
    if (!loss) return fail("train step unexpectedly refused the batch");
    losses.push_back(*loss);
    if (*loss < 1e-3f) {
      reached = true;
      break;
    }
  }
  if (!reached) {
    return fail("loss still " + std::to_string(losses.back()) + " after 2000 steps");
  }
  // decreasing in trend: quarter means of the path so far
  const std::size_t q = losses.size() / 4;
  if (q >= 8) {
    double prev = 1e30;
    for (int w = 0; w < 4; ++w) {
      double mean = 0.0;
      for (std::size_t i = static_cast<std::size_t>(w) * q; i < (static_cast<std::size_t>(w) + 1) * q; ++i)
        mean += losses[i];
      mean /= static_cast<double>(q);
      if (mean > prev) return fail("loss trend not decreasing (window " + std::to_string(w) + ")");
      prev = mean;
    }
  }
  return pass("loss " + std::to_string(losses.front()) + " -> " +
              std::to_string(losses.back()) + " in " + std::to_string(losses.size()) + " steps");
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion7(const Options& opt) {
  const BenchmarkEntry* a20 = findBenchmarkEntry("20mer-A");
  auto runSeeds = [&](const BenchmarkEntry& entry, std::int64_t episodes,
                      std::vector<std::optional<int>>& lowest) {
    std::vector<TrialSpec> specs;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      TrialSpec spec;
      spec.label = entry.id;
      spec.sequence = HPSequence::parse(entry.sequence);
      spec.best_known = entry.best_known_energy;
      spec.config.mode = Mode::Drl;
      spec.config.seed = seed;
      spec.config.episodes = episodes;
      spec.out_dir = opt.out_root + "/" +
                     trialDirName(entry.id, Mode::Drl, Arch::Lstm2x256, seed);
      specs.push_back(std::move(spec));
    }
    for (const TrialSpec& spec : specs) {
      TrialSummary s = runTrialCached(spec);
      if (s.failed) throw std::runtime_error("trial failed: " + s.error);
      lowest.push_back(s.lowest_energy);
    }
  };

  if (opt.full) {
    std::vector<std::optional<int>> a_lowest, b_lowest;
    runSeeds(*a20, 100000, a_lowest);
    runSeeds(*findBenchmarkEntry("20mer-B"), 100000, b_lowest);
    int a_hits = 0, b_hits = 0;
    for (const auto& e : a_lowest) a_hits += (e && *e <= -9);
    for (const auto& e : b_lowest) b_hits += (e && *e <= -10);
    std::ostringstream ss;
    ss << "full budget: 20mer-A -9 in " << a_hits << "/4 seeds, 20mer-B -10 in " << b_hits
       << "/4 seeds";
    return (a_hits >= 3 && b_hits >= 3) ? pass(ss.str()) : fail(ss.str());
  }

  std::vector<std::optional<int>> lowest;
  runSeeds(*a20, 20000, lowest);
  int hits = 0;
  std::string detail = "smoke (psi=20000) lowest per seed:";
  for (const auto& e : lowest) {
    detail += " " + fmtEnergy(e);
    hits += (e && *e <= -8);
  }
  detail += "; <= -8 in " + std::to_string(hits) + "/4 seeds (need >= 2)";
  return hits >= 2 ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion8(const Options& opt) {
  // reported random-search values are the best over four seeded trials
  auto randBestOfSeeds = [&](const std::string& id, std::int64_t episodes) {
    const BenchmarkEntry* entry = findBenchmarkEntry(id);
    std::optional<int> best;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      TrialSpec spec;
      spec.label = entry->id;
      spec.sequence = HPSequence::parse(entry->sequence);
      spec.best_known = entry->best_known_energy;
      spec.config.mode = Mode::Rand;
      spec.config.seed = seed;
      spec.config.episodes = episodes;
      spec.out_dir = opt.out_root + "/" +
                     trialDirName(entry->id, Mode::Rand, Arch::Lstm2x256, seed);
      TrialSummary s = runTrialCached(spec);
      if (s.failed) throw std::runtime_error("rand trial failed: " + s.error);
      if (s.lowest_energy && (!best || *s.lowest_energy < *best)) best = s.lowest_energy;
    }
    return best;
  };

  const std::optional<int> a = randBestOfSeeds("20mer-A", 100000);
  const std::optional<int> b = randBestOfSeeds("25mer", 500000);
  std::string detail =
      "best over 4 seeds: rand 20mer-A(100K) = " + fmtEnergy(a) +
      " (expect -9 +- 1), 25mer(500K) = " + fmtEnergy(b) + " (expect -7 +- 1)";
  const bool ok_a = a && std::abs(*a - (-9)) <= 1;
  const bool ok_b = b && std::abs(*b - (-7)) <= 1;
  return (ok_a && ok_b) ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion9(const Options& opt) {
  if (opt.runs_dir.empty()) {
    return skip(
        "long-running recipe (36/48/50mer, multi-day CPU): run the suite per the README and "
        "re-check with --runs DIR; the partial-progress gate is the four-seed DRL "
        "moving-minimum band at 20% budget strictly dominating the RAND band");
  }
  // Expect trial dirs under runs_dir for one or more of the large entries,
  // both modes, any seed count >= 2.
  const std::vector<std::string> ids = {"36mer", "48mer", "50mer"};
  std::string detail;
  bool any = false;
  for (const std::string& id : ids) {
    std::map<Mode, std::vector<std::vector<double>>> curves;
    for (const auto& dir_entry : fs::directory_iterator(opt.runs_dir)) {
      if (!dir_entry.is_directory()) continue;
      const std::string name = dir_entry.path().filename().string();
      if (name.rfind(id + "_", 0) != 0) continue;
      try {
        TrialArtifacts art = loadTrialDir(dir_entry.path().string());
        std::vector<double> energies(art.curve.size());
        for (std::size_t i = 0; i < art.curve.size(); ++i) {
          energies[i] = art.curve[i].complete ? art.curve[i].energy : 0.0;
        }
        curves[art.mode].push_back(movingMinimum(energies, 200));
      } catch (const std::exception&) {
        continue;
      }
    }
    if (curves[Mode::Drl].size() < 2 || curves[Mode::Rand].size() < 2) continue;
    any = true;
    // compare at 20% of the shortest stored budget
    std::size_t len = SIZE_MAX;
    for (const auto& [mode, cs] : curves)
      for (const auto& c : cs) len = std::min(len, c.size());
    const std::size_t at = len / 5;
    SeedBands drl = aggregateSeeds(curves[Mode::Drl]);
    SeedBands rnd = aggregateSeeds(curves[Mode::Rand]);
    const double drl_hi = drl.mean[at] + drl.stddev[at];
    const double rnd_lo = rnd.mean[at] - rnd.stddev[at];
    detail += id + ": drl band " + std::to_string(drl.mean[at]) + "+-" +
              std::to_string(drl.stddev[at]) + " vs rand " + std::to_string(rnd.mean[at]) +
              "+-" + std::to_string(rnd.stddev[at]) + " at episode " + std::to_string(at) + "; ";
    if (!(drl_hi < rnd_lo)) {
      return fail(detail + "DRL band does not dominate");
    }
  }
  if (!any) return skip("no paired 36/48/50mer DRL+RAND trials (>= 2 seeds each) under " + opt.runs_dir);
  return pass(detail);
}

// --------------------------------------------------------------- criterion 10
Outcome criterion10(const Options& opt) {
  // exact degeneracy equality on random small sequences
  Rng rng(1031);
  for (int t = 0; t < 8; ++t) {
    const int n = 4 + static_cast<int>(uniformIndex(rng, 7));
    std::string text;
    for (int i = 0; i < n; ++i) text.push_back(uniformIndex(rng, 2) == 0 ? 'H' : 'P');
    text[0] = 'H';
    HPSequence seq = HPSequence::parse(text);
    EnumerateOptions eopts;
    eopts.collect_optimal = true;
    eopts.cap = 1 << 20;
    EnumerationReport r = enumerateWalks(seq, eopts);
    ConformationDb db;
    for (const std::string& actions : r.optimal_actions) {
      db.add({seq.str(), actions, *r.min_energy, 0, "oracle"});
    }
    if (db.distinctCount(seq.str(), *r.min_energy) != r.degeneracy) {
      return fail("degeneracy mismatch on " + text);
    }
  }

  std::string detail = "confdb distinct == oracle degeneracy on 8 random sequences (N 4..10)";
  if (opt.runs_dir.empty()) {
    return pass(detail +
                "; 48mer plurality and 36mer growth checks need --runs DIR with long-run trials");
  }

  // long-run checks on stored artifacts
  bool any48 = false;
  for (const auto& dir_entry : fs::directory_iterator(opt.runs_dir)) {
    if (!dir_entry.is_directory()) continue;
    const std::string name = dir_entry.path().filename().string();
    if (name.rfind("48mer_drl", 0) != 0) continue;
    TrialArtifacts art = loadTrialDir(dir_entry.path().string());
    std::set<std::string> distinct;
    for (const BestEntry& e : art.best_log) {
      if (e.energy == -23) distinct.insert(e.actions);
    }
    any48 = true;
    detail += "; " + name + ": " + std::to_string(distinct.size()) + " distinct at -23";
    if (distinct.size() <= 1) return fail(detail + " (need > 1)");
  }
  bool any36 = false;
  for (const auto& dir_entry : fs::directory_iterator(opt.runs_dir)) {
    if (!dir_entry.is_directory()) continue;
    const std::string name = dir_entry.path().filename().string();
    if (name.rfind("36mer_drl", 0) != 0) continue;
    TrialArtifacts art = loadTrialDir(dir_entry.path().string());
    // distinct count at -14 must grow over the run (monotone growth check)
    std::set<std::string> distinct;
    std::vector<std::size_t> counts;
    for (const BestEntry& e : art.best_log) {
      if (e.energy == -14) {
        distinct.insert(e.actions);
        counts.push_back(distinct.size());
      }
    }
    any36 = true;
    detail += "; " + name + ": distinct at -14 grows to " + std::to_string(distinct.size());
    if (counts.empty() || counts.back() < 2) return fail(detail + " (no growth)");
  }
  if (!any48 && !any36) {
    detail += "; no 36mer/48mer DRL trials found under " + opt.runs_dir;
  }
  return pass(detail);
}

// --------------------------------------------------------------- criterion 11
Outcome criterion11(const Options& opt) {
  const BenchmarkEntry* entry = findBenchmarkEntry("20mer-A");
  const std::int64_t episodes = 400;  // desk-scale harness check
  struct Config {
    std::string name;
    bool prune;
    std::optional<Arch> arch;
  };
  const std::vector<Config> configs = {
      {"lstm", false, std::nullopt},
      {"lstm_pruned", true, std::nullopt},
      {"fcn", false, Arch::FcnControl},
  };

  std::map<std::string, std::vector<std::vector<double>>> group_curves;
  for (const Config& config : configs) {
    std::vector<TrialSpec> specs;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      TrialSpec spec;
      spec.label = entry->id;
      spec.sequence = HPSequence::parse(entry->sequence);
      spec.best_known = entry->best_known_energy;
      spec.config.mode = Mode::Drl;
      spec.config.seed = seed;
      spec.config.episodes = episodes;
      spec.config.arch = config.arch;
      spec.config.prune_forward_runs = config.prune;
      spec.config.prune_early_stop = config.prune;
      const Arch arch = config.arch.value_or(defaultArchFor(20));
      spec.out_dir = opt.out_root + "/ablation/" + config.name + "/" +
                     trialDirName(entry->id, Mode::Drl, arch, seed);
      specs.push_back(std::move(spec));
    }
    for (const TrialSpec& spec : specs) {
      TrialSummary s = runTrialCached(spec);
      if (s.failed) return fail(config.name + " trial failed: " + s.error);
    }
    // artifacts complete and well-formed
    std::vector<std::vector<double>> curves;
    for (const TrialSpec& spec : specs) {
      TrialArtifacts art = loadTrialDir(spec.out_dir);
      if (static_cast<std::int64_t>(art.curve.size()) != episodes) {
        return fail(config.name + ": curve incomplete in " + spec.out_dir);
      }
      std::vector<double> energies(art.curve.size());
      for (std::size_t i = 0; i < art.curve.size(); ++i) {
        energies[i] = art.curve[i].complete ? art.curve[i].energy : 0.0;
      }
      curves.push_back(movingMinimum(energies, 200));
    }
    group_curves[config.name] = std::move(curves);

    const SeedBands bands = aggregateSeeds(group_curves[config.name]);
    const std::string band_path = opt.out_root + "/ablation/band_" + config.name + ".csv";
    std::ofstream os(band_path);
    os << "episode,mean,stddev\n";
    for (std::size_t i = 0; i < bands.mean.size(); ++i) {
      os << i << ',' << bands.mean[i] << ',' << bands.stddev[i] << "\n";
    }
    if (!os) return fail("cannot write " + band_path);
  }
  return pass(
      "paired four-seed bands written for lstm vs lstm_pruned (pruning ablation) and lstm vs fcn "
      "(architecture ablation) at psi=400; qualitative orderings documented, not gated");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        std::cerr << flag << " needs a value\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--heavy") {
      opt.heavy = true;
    } else if (arg == "--full") {
      opt.full = true;
    } else if (arg == "--runs") {
      opt.runs_dir = next("--runs");
    } else if (arg == "--out") {
      opt.out_root = next("--out");
    } else if (arg == "--workers") {
      opt.workers = std::stoi(next("--workers"));
    } else if (arg == "--only") {
      std::stringstream ss(next("--only"));
      std::string tok;
      while (std::getline(ss, tok, ',')) opt.only.insert(std::stoi(tok));
    } else {
      std::cerr << "unknown flag " << arg << "\n";
      return 2;
    }
  }

  struct Criterion {
    int id;
    std::string name;
    Outcome (*fn)(const Options&);
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle complete-walk counts", criterion1},
      {2, "oracle optimal energies", criterion2},
      {3, "analytic vs finite-difference gradients", criterion3},
      {4, "schedule and loss unit values", criterion4},
      {5, "dqn mechanics", criterion5},
      {6, "overfit one batch", criterion6},
      {7, "20mer training reproduction", criterion7},
      {8, "rand baseline reproduction", criterion8},
      {9, "large-benchmark partial progress (recipe)", criterion9},
      {10, "degeneracy properties", criterion10},
      {11, "ablation harness", criterion11},
  };

  bool any_fail = false;
  for (const Criterion& c : criteria) {
    if (!opt.only.empty() && !opt.only.count(c.id)) continue;
    Outcome outcome;
    try {
      outcome = c.fn(opt);
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.status == Status::Pass ? "PASS"
                      : outcome.status == Status::Skip ? "SKIP"
                                                       : "FAIL";
    std::cout << "[" << tag << "] criterion-" << c.id << " (" << c.name << "): "
              << outcome.detail << "\n";
    std::cout.flush();
    any_fail = any_fail || outcome.status == Status::Fail;
  }
  return any_fail ? 1 : 0;
}
