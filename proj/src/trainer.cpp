#include "hpfold/trainer.hpp"

#include <cmath>

#include "hpfold/loss.hpp"

namespace hpfold {

ActionMask pruneForwardRun(const WalkState& state, int n, ActionMask mask) {
  const int threshold = (n - 1) / 2;  // ceil((n - 2) / 2)
  if (trailingForwardRun(state) + 1 >= threshold) {
    mask[static_cast<std::size_t>(Action::Forward)] = false;
  }
  return mask;
}

bool shouldEarlyStop(const WalkState& state, const HPSequence& seq, int best_abs_energy) {
  const int placed = state.stepIndex();
  int unplaced_h = 0;
  for (int i = placed; i < seq.size(); ++i) unplaced_h += (seq[i] == Monomer::H);
  const int frontier_h = seq[placed - 1] == Monomer::H ? 2 : 0;
  const int bound = 3 * unplaced_h + frontier_h;
  const int current = countHHContacts(state.placed, seq);
  return current + bound < best_abs_energy;
}

namespace {

Action randomValidAction(const ActionMask& mask, Rng& rng) {
  std::uint64_t pick = uniformIndex(rng, static_cast<std::uint64_t>(validCount(mask)));
  for (Action a : kActions) {
    if (!mask[static_cast<std::size_t>(a)]) continue;
    if (pick == 0) return a;
    --pick;
  }
  throw std::logic_error("randomValidAction: empty mask");
}

Action greedyAction(const Vec3<float>& q, const ActionMask& mask, Rng& tie_break) {
  float best = 0.0f;
  bool seen = false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!mask[i]) continue;
    if (!seen || q(static_cast<Eigen::Index>(i)) > best) {
      best = q(static_cast<Eigen::Index>(i));
      seen = true;
    }
  }
  if (!seen) throw std::logic_error("greedyAction: empty mask");
  Action tied[3];
  int ties = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (mask[i] && q(static_cast<Eigen::Index>(i)) == best) {
      tied[ties++] = static_cast<Action>(i);
    }
  }
  if (ties == 1) return tied[0];
  return tied[uniformIndex(tie_break, static_cast<std::uint64_t>(ties))];
}

double maskedMax(const float* q, const ActionMask& mask) {
  double best = 0.0;
  bool seen = false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!mask[i]) continue;
    if (!seen || q[i] > best) {
      best = q[i];
      seen = true;
    }
  }
  return seen ? best : 0.0;
}

}  // namespace

Action selectAction(const Vec3<float>& q, const ActionMask& mask, double eps, Rng& exploration,
                    Rng& tie_break) {
  if (validCount(mask) == 0) {
    throw std::logic_error("selectAction: no valid actions (caller must detect trapping first)");
  }
  if (uniformReal01(exploration) < eps) return randomValidAction(mask, exploration);
  return greedyAction(q, mask, tie_break);
}

double tdTarget(const Experience& e, const QNetwork<float>& target, double gamma) {
  if (e.terminal || validCount(e.next_valid_mask) == 0) return e.r;
  const Vec3<float> q = forward(target, e.s_next);
  return e.r + gamma * maskedMax(q.data(), e.next_valid_mask);
}

Trainer::Trainer(HPSequence seq, TrainerConfig cfg)
    : seq_(std::move(seq)),
      cfg_(cfg),
      streams_(cfg.seed),
      policy_(makeNetwork<float>(cfg.arch.value_or(defaultArchFor(seq_.size())), seq_.size(),
                                 streams_.weight_init)),
      target_(policy_),
      adam_(makeAdamState(policy_, cfg.learning_rate)),
      memory_(replayCapacityFor(cfg.episodes)),
      grads_(policy_.zeroLike()) {
  if (cfg_.episodes < 0) throw std::invalid_argument("episodes must be non-negative");
  if (cfg_.batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (cfg_.gamma < 0.0 || cfg_.gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
  if (cfg_.target_sync_updates < 1) throw std::invalid_argument("target_sync_updates must be positive");
  s_ptrs_.reserve(static_cast<std::size_t>(cfg_.batch_size));
  snext_ptrs_.reserve(static_cast<std::size_t>(cfg_.batch_size));
}

void Trainer::syncTarget() {
  target_ = policy_;
  target_q_cache_.clear();
}

std::optional<float> Trainer::trainStep() {
  const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);
  if (memory_.size() < batch) return std::nullopt;

  const std::vector<std::size_t> idx = memory_.sampleIndices(streams_.batch_sample, batch);
  s_ptrs_.clear();
  for (std::size_t i : idx) s_ptrs_.push_back(&memory_.at(i).s);

  // next-state values under the frozen target network, cached per transition
  q_target_.resize(kNumActions, static_cast<Eigen::Index>(batch));
  snext_ptrs_.clear();
  missing_cols_.clear();
  for (std::size_t j = 0; j < batch; ++j) {
    const std::uint64_t id = memory_.idAt(idx[j]);
    auto it = target_q_cache_.find(id);
    if (it == target_q_cache_.end()) {
      snext_ptrs_.push_back(&memory_.at(idx[j]).s_next);
      missing_cols_.push_back(static_cast<Eigen::Index>(j));
    } else {
      q_target_(0, static_cast<Eigen::Index>(j)) = it->second[0];
      q_target_(1, static_cast<Eigen::Index>(j)) = it->second[1];
      q_target_(2, static_cast<Eigen::Index>(j)) = it->second[2];
    }
  }
  if (!snext_ptrs_.empty()) {
    forwardBatchNoTrace(target_, snext_ptrs_, target_work_, q_missing_);
    for (std::size_t k = 0; k < missing_cols_.size(); ++k) {
      const Eigen::Index col = missing_cols_[k];
      q_target_.col(col) = q_missing_.col(static_cast<Eigen::Index>(k));
      const std::uint64_t id = memory_.idAt(idx[static_cast<std::size_t>(col)]);
      target_q_cache_[id] = {q_target_(0, col), q_target_(1, col), q_target_(2, col)};
    }
  }

  forwardBatch(policy_, s_ptrs_, trace_, q_batch_);

  upstream_.setZero(kNumActions, static_cast<Eigen::Index>(batch));
  double loss = 0.0;
  for (std::size_t j = 0; j < batch; ++j) {
    const Experience& e = memory_.at(idx[j]);
    double target = e.r;
    if (!e.terminal && validCount(e.next_valid_mask) > 0) {
      target += cfg_.gamma *
                maskedMax(q_target_.col(static_cast<Eigen::Index>(j)).data(), e.next_valid_mask);
    }
    const double predicted =
        q_batch_(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(j));
    const double delta = target - predicted;
    loss += huber(delta);
    // d(mean huber)/dQ(s, a)
    upstream_(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(j)) =
        static_cast<float>(-huberGrad(delta) / static_cast<double>(batch));
  }
  loss /= static_cast<double>(batch);

  grads_.setZero();
  backwardBatch(policy_, trace_, upstream_, grads_, scratch_);
  adamStep(policy_, grads_, adam_);

  ++updates_;
  ++since_sync_;
  if (since_sync_ == cfg_.target_sync_updates) {
    syncTarget();
    since_sync_ = 0;
  }
  return static_cast<float>(loss);
}

EpisodeRecord Trainer::runEpisode(double eps, bool learn) {
  EpisodeRecord rec;
  WalkState state = reset(seq_);
  EncodedState enc = encode(state, seq_);
  ActionMask mask = validActions(state);
  if (cfg_.prune_forward_runs) mask = pruneForwardRun(state, seq_.size(), mask);
  const RewardConfig reward_cfg{cfg_.reward_trapped_partial};

  while (true) {
    if (validCount(mask) == 0) {
      // trapped by heuristic masking before any env trap
      rec.complete = false;
      rec.energy = energyOf(state.placed, seq_);
      break;
    }
    if (cfg_.prune_early_stop && best_energy_ && *best_energy_ < 0 &&
        shouldEarlyStop(state, seq_, -*best_energy_)) {
      rec.complete = false;
      rec.energy = energyOf(state.placed, seq_);
      break;
    }

    Action a;
    if (uniformReal01(streams_.exploration) < eps) {
      a = randomValidAction(mask, streams_.exploration);
    } else {
      a = greedyAction(forward(policy_, enc), mask, streams_.tie_break);
    }

    StepResult res = step(state, seq_, a, reward_cfg);
    ActionMask next_mask = res.valid_mask;
    if (cfg_.prune_forward_runs && res.status == EpisodeStatus::InProgress) {
      next_mask = pruneForwardRun(res.state, seq_.size(), next_mask);
    }
    EncodedState enc_next = encode(res.state, seq_);

    Experience e;
    e.s = std::move(enc);
    e.a = a;
    e.r = static_cast<float>(res.reward);
    e.s_next = enc_next;
    e.terminal = res.status != EpisodeStatus::InProgress;
    e.next_valid_mask = next_mask;
    memory_.push(std::move(e));
    ++rec.transitions;
    ++rec.steps;
    rec.actions.push_back(actionChar(a));

    if (learn) trainStep();

    state = std::move(res.state);
    enc = std::move(enc_next);
    mask = next_mask;

    if (res.status != EpisodeStatus::InProgress) {
      rec.complete = res.status == EpisodeStatus::CompleteTerminal;
      rec.energy = *res.energy_if_terminal;
      break;
    }
  }
  return rec;
}

TrainResult Trainer::train(const TrainHooks& hooks) {
  TrainResult result;
  result.curve.reserve(static_cast<std::size_t>(cfg_.episodes));
  const EpsilonSchedule schedule = cfg_.schedule();
  const bool learn = cfg_.mode == Mode::Drl;

  for (std::int64_t i = episodes_run_; i < cfg_.episodes; ++i) {
    const double eps = cfg_.mode == Mode::Rand ? 1.0 : epsilonAt(schedule, i);
    EpisodeRecord rec = runEpisode(eps, learn);
    ++episodes_run_;

    if (rec.complete && (!best_energy_ || rec.energy <= *best_energy_)) {
      best_energy_ = rec.energy;
      result.best_log.push_back({i, rec.energy, rec.actions});
    }
    CurveRow row{i, rec.energy, rec.complete, eps};
    result.curve.push_back(row);
    if (hooks.on_episode) hooks.on_episode(row);
    if (cfg_.checkpoint_every > 0 && (i + 1) % cfg_.checkpoint_every == 0 &&
        hooks.on_checkpoint) {
      hooks.on_checkpoint(i + 1, *this);
    }
  }
  result.best_energy = best_energy_;
  result.updates = updates_;
  result.syncs = updates_ / cfg_.target_sync_updates;
  return result;
}

void Trainer::restore(QNetwork<float> policy, QNetwork<float> target, AdamState<float> adam,
                      RngStreams streams, std::int64_t episodes_run, std::int64_t updates) {
  policy_ = std::move(policy);
  target_ = std::move(target);
  adam_ = std::move(adam);
  streams_ = std::move(streams);
  episodes_run_ = episodes_run;
  updates_ = updates;
  since_sync_ = updates % cfg_.target_sync_updates;
  grads_ = policy_.zeroLike();
}

}  // namespace hpfold
