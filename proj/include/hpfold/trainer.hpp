#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "hpfold/adam.hpp"
#include "hpfold/network.hpp"
#include "hpfold/replay.hpp"
#include "hpfold/schedule.hpp"

namespace hpfold {

enum class Mode { Drl = 0, Rand = 1 };

inline std::string modeName(Mode m) { return m == Mode::Drl ? "drl" : "rand"; }
inline Mode modeFromName(const std::string& name) {
  if (name == "drl") return Mode::Drl;
  if (name == "rand") return Mode::Rand;
  throw std::invalid_argument("unknown mode '" + name + "' (expected drl or rand)");
}

struct TrainerConfig {
  double gamma = 0.98;
  int target_sync_updates = 100;  // gradient updates between target syncs
  int batch_size = 32;
  double learning_rate = 0.0005;
  std::int64_t episodes = 0;  // psi
  std::uint64_t seed = 0;
  std::optional<Arch> arch;  // default: picked from the sequence length
  Mode mode = Mode::Drl;
  bool prune_forward_runs = false;  // heuristic 1: cap consecutive-F runs
  bool prune_early_stop = false;    // heuristic 2: stop provably futile walks
  bool reward_trapped_partial = false;
  std::int64_t checkpoint_every = 0;  // episodes between checkpoint hooks; 0 = none
  double eps_min = 0.01;
  double eps_max = 1.0;
  double eps_lambda = 5.0;

  EpsilonSchedule schedule() const { return {eps_min, eps_max, eps_lambda, episodes}; }
};

// Heuristic 1: forbid Forward when it would extend a trailing consecutive-F
// run to half of the decision count or more.
ActionMask pruneForwardRun(const WalkState& state, int n, ActionMask mask);

// Heuristic 2: true when the best already-found |energy| is unreachable even
// under an optimistic bound (3 extra contacts per unplaced H, 2 for an H at
// the frontier).
bool shouldEarlyStop(const WalkState& state, const HPSequence& seq, int best_abs_energy);

// Epsilon-greedy over the valid actions: explore uniformly with probability
// eps, otherwise take the masked argmax with uniform tie-breaking.
Action selectAction(const Vec3<float>& q, const ActionMask& mask, double eps, Rng& exploration,
                    Rng& tie_break);

// Bootstrapped scalar target: r at terminal transitions, otherwise
// r + gamma * max over valid next actions of the target network's value.
// An all-false mask on a non-terminal transition is treated as terminal.
double tdTarget(const Experience& e, const QNetwork<float>& target, double gamma);

struct CurveRow {
  std::int64_t episode = 0;
  int energy = 0;
  bool complete = false;
  double epsilon = 0.0;
};

struct BestEntry {
  std::int64_t episode = 0;
  int energy = 0;
  std::string actions;
};

struct EpisodeRecord {
  int energy = 0;       // terminal energy; partial-chain energy when incomplete
  bool complete = false;
  int steps = 0;        // decisions taken
  int transitions = 0;  // experiences appended
  std::string actions;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  std::optional<int> best_energy;  // over complete episodes
  std::vector<BestEntry> best_log;
  std::int64_t updates = 0;
  std::int64_t syncs = 0;
};

class Trainer;

struct TrainHooks {
  std::function<void(const CurveRow&)> on_episode;
  std::function<void(std::int64_t, const Trainer&)> on_checkpoint;
};

// Owns the policy/target networks, optimizer, replay memory and the four
// RNG streams of one trial. Single-threaded by design; run independent
// trials (seeds) in parallel instead.
class Trainer {
 public:
  Trainer(HPSequence seq, TrainerConfig cfg);

  // One mini-batch update of the policy network. No-op (nullopt) while the
  // memory holds fewer than batch_size experiences.
  std::optional<float> trainStep();

  void syncTarget();

  // One full episode. Appends every transition to memory; trains per
  // environment step only when `learn` is set (the Rand baseline and plain
  // rollouts never touch the optimizer).
  EpisodeRecord runEpisode(double eps, bool learn = false);

  TrainResult train(const TrainHooks& hooks = {});

  const HPSequence& sequence() const { return seq_; }
  const TrainerConfig& config() const { return cfg_; }
  const QNetwork<float>& policy() const { return policy_; }
  QNetwork<float>& policy() { return policy_; }
  const QNetwork<float>& target() const { return target_; }
  const AdamState<float>& adam() const { return adam_; }
  AdamState<float>& adam() { return adam_; }
  ReplayMemory& memory() { return memory_; }
  const ReplayMemory& memory() const { return memory_; }
  RngStreams& streams() { return streams_; }
  std::int64_t updates() const { return updates_; }
  std::int64_t updatesSinceSync() const { return since_sync_; }
  std::int64_t episodesRun() const { return episodes_run_; }
  std::optional<int> bestEnergy() const { return best_energy_; }

  // Restores mid-run state from a checkpoint (networks, optimizer, streams,
  // counters are replaced wholesale).
  void restore(QNetwork<float> policy, QNetwork<float> target, AdamState<float> adam,
               RngStreams streams, std::int64_t episodes_run, std::int64_t updates);

 private:
  friend struct TrainerTestAccess;

  HPSequence seq_;
  TrainerConfig cfg_;
  RngStreams streams_;
  QNetwork<float> policy_;
  QNetwork<float> target_;
  AdamState<float> adam_;
  ReplayMemory memory_;
  std::int64_t updates_ = 0;
  std::int64_t since_sync_ = 0;
  std::int64_t episodes_run_ = 0;
  std::optional<int> best_energy_;

  // preallocated batch workspace
  ForwardTrace<float> trace_, scratch_;
  BatchRolling<float> target_work_;
  QNetwork<float> grads_;
  MatF q_batch_, q_target_, q_missing_, upstream_;
  std::vector<const EncodedState*> s_ptrs_, snext_ptrs_;
  // target values are constant between syncs; cache them per transition id
  std::unordered_map<std::uint64_t, std::array<float, 3>> target_q_cache_;
  std::vector<Eigen::Index> missing_cols_;
};

}  // namespace hpfold
