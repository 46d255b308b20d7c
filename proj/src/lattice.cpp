#include "hpfold/lattice.hpp"

#include <stdexcept>
#include <unordered_map>

namespace hpfold {

HPSequence HPSequence::parse(const std::string& text) {
  HPSequence seq;
  seq.monomers.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == 'H') {
      seq.monomers.push_back(Monomer::H);
    } else if (c == 'P') {
      seq.monomers.push_back(Monomer::P);
    } else {
      throw std::invalid_argument("HP sequence: invalid character '" + std::string(1, c) +
                                  "' at position " + std::to_string(i) + " (expected H or P)");
    }
  }
  if (seq.size() < 3) {
    throw std::invalid_argument("HP sequence must have at least 3 units, got " +
                                std::to_string(seq.size()));
  }
  return seq;
}

std::string HPSequence::str() const {
  std::string s;
  s.reserve(monomers.size());
  for (Monomer m : monomers) s.push_back(m == Monomer::H ? 'H' : 'P');
  return s;
}

int HPSequence::countH() const {
  int n = 0;
  for (Monomer m : monomers) n += (m == Monomer::H);
  return n;
}

char actionChar(Action a) {
  switch (a) {
    case Action::Left: return 'L';
    case Action::Forward: return 'F';
    case Action::Right: return 'R';
  }
  return '?';
}

Action actionFromChar(char c) {
  switch (c) {
    case 'L': return Action::Left;
    case 'F': return Action::Forward;
    case 'R': return Action::Right;
    default:
      throw std::invalid_argument("action character must be L, F or R, got '" +
                                  std::string(1, c) + "'");
  }
}

std::string actionString(const std::vector<Action>& actions) {
  std::string s;
  s.reserve(actions.size());
  for (Action a : actions) s.push_back(actionChar(a));
  return s;
}

Coord headingVec(Heading h) {
  switch (h) {
    case Heading::Up: return {0, 1};
    case Heading::Down: return {0, -1};
    case Heading::Left: return {-1, 0};
    case Heading::Right: return {1, 0};
  }
  return {0, 0};
}

Heading rotateCcw(Heading h) {
  switch (h) {
    case Heading::Up: return Heading::Left;
    case Heading::Left: return Heading::Down;
    case Heading::Down: return Heading::Right;
    case Heading::Right: return Heading::Up;
  }
  return h;
}

Heading rotateCw(Heading h) {
  switch (h) {
    case Heading::Up: return Heading::Right;
    case Heading::Right: return Heading::Down;
    case Heading::Down: return Heading::Left;
    case Heading::Left: return Heading::Up;
  }
  return h;
}

Heading turn(Heading h, Action a) {
  switch (a) {
    case Action::Left: return rotateCcw(h);
    case Action::Forward: return h;
    case Action::Right: return rotateCw(h);
  }
  return h;
}

WalkState reset(const HPSequence& seq) {
  if (seq.size() < 3) {
    throw std::invalid_argument("reset: sequence must have at least 3 units, got " +
                                std::to_string(seq.size()));
  }
  WalkState s;
  s.placed = {{0, 0}, {0, 1}};
  s.occupancy.insert({0, 0});
  s.occupancy.insert({0, 1});
  s.heading = Heading::Up;
  s.first_turn_taken = false;
  return s;
}

ActionMask validActions(const WalkState& state) {
  ActionMask mask{false, false, false};
  const Coord head = state.head();
  for (Action a : kActions) {
    if (a == Action::Right && !state.first_turn_taken) continue;
    const Coord target = head + headingVec(turn(state.heading, a));
    mask[static_cast<std::size_t>(a)] = state.occupancy.count(target) == 0;
  }
  return mask;
}

double oneStepProbability(const WalkState& state) {
  const int k = validCount(validActions(state));
  return k == 0 ? 0.0 : 1.0 / k;
}

StepResult step(const WalkState& state, const HPSequence& seq, Action action,
                const RewardConfig& reward_cfg) {
  const ActionMask mask = validActions(state);
  if (!mask[static_cast<std::size_t>(action)]) {
    throw std::invalid_argument("step: action " + std::string(1, actionChar(action)) +
                                " is invalid at step " + std::to_string(state.stepIndex()));
  }
  if (state.stepIndex() >= seq.size()) {
    throw std::invalid_argument("step: walk already complete");
  }

  StepResult res;
  res.state = state;
  WalkState& next = res.state;
  next.heading = turn(state.heading, action);
  next.placed.push_back(state.head() + headingVec(next.heading));
  next.occupancy.insert(next.placed.back());
  next.first_turn_taken = state.first_turn_taken || action != Action::Forward;

  if (next.stepIndex() == seq.size()) {
    res.status = EpisodeStatus::CompleteTerminal;
  } else {
    res.valid_mask = validActions(next);
    res.status = validCount(res.valid_mask) == 0 ? EpisodeStatus::TrappedTerminal
                                                 : EpisodeStatus::InProgress;
  }
  if (res.status != EpisodeStatus::InProgress) {
    res.valid_mask = {false, false, false};
    res.energy_if_terminal = energyOf(next.placed, seq);
    res.reward = rewardOf(res.status, *res.energy_if_terminal, reward_cfg);
  }
  return res;
}

int countHHContacts(const std::vector<Coord>& placed, const HPSequence& seq) {
  std::unordered_map<Coord, int, CoordHash> index;
  index.reserve(placed.size() * 2);
  for (std::size_t i = 0; i < placed.size(); ++i) index.emplace(placed[i], static_cast<int>(i));

  // Each adjacent unordered pair is seen exactly once through its +x / +y side.
  static constexpr Coord kSides[2] = {{1, 0}, {0, 1}};
  int contacts = 0;
  for (std::size_t i = 0; i < placed.size(); ++i) {
    if (seq[static_cast<int>(i)] != Monomer::H) continue;
    for (Coord side : kSides) {
      auto it = index.find(placed[i] + side);
      if (it == index.end()) continue;
      const int j = it->second;
      if (seq[j] == Monomer::H && std::abs(j - static_cast<int>(i)) > 1) ++contacts;
    }
  }
  return contacts;
}

int energyOf(const std::vector<Coord>& placed, const HPSequence& seq) {
  return -countHHContacts(placed, seq);
}

double rewardOf(EpisodeStatus status, int energy, const RewardConfig& reward_cfg) {
  switch (status) {
    case EpisodeStatus::InProgress: return 0.0;
    case EpisodeStatus::CompleteTerminal: return std::abs(energy);
    case EpisodeStatus::TrappedTerminal:
      return reward_cfg.reward_trapped_partial ? std::abs(energy) : 0.0;
  }
  return 0.0;
}

int trailingForwardRun(const WalkState& state) {
  // A step is a Forward action exactly when its heading equals the previous
  // step's heading; the prefix step 0->1 is always heading Up.
  int run = 0;
  for (std::size_t j = state.placed.size() - 1; j >= 2; --j) {
    const Coord d1 = state.placed[j] - state.placed[j - 1];
    const Coord d0 = state.placed[j - 1] - state.placed[j - 2];
    if (!(d1 == d0)) break;
    ++run;
  }
  return run;
}

ReplayOutcome replayActions(const HPSequence& seq, const std::string& actions) {
  ReplayOutcome out;
  WalkState state = reset(seq);
  EpisodeStatus status = EpisodeStatus::InProgress;
  int energy = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (status != EpisodeStatus::InProgress) {
      out.error = "actions continue past terminal state at index " + std::to_string(i);
      out.state = std::move(state);
      out.status = status;
      out.energy = energy;
      return out;
    }
    Action a;
    try {
      a = actionFromChar(actions[i]);
    } catch (const std::invalid_argument& e) {
      out.error = e.what();
      out.state = std::move(state);
      return out;
    }
    if (!validActions(state)[static_cast<std::size_t>(a)]) {
      out.error = "invalid action '" + std::string(1, actions[i]) + "' at index " +
                  std::to_string(i);
      out.state = std::move(state);
      return out;
    }
    StepResult res = step(state, seq, a);
    state = std::move(res.state);
    status = res.status;
    if (res.energy_if_terminal) energy = *res.energy_if_terminal;
  }
  out.ok = true;
  out.state = std::move(state);
  out.status = status;
  out.energy = status == EpisodeStatus::InProgress ? energyOf(out.state.placed, seq) : energy;
  return out;
}

}  // namespace hpfold
