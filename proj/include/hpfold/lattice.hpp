#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace hpfold {

enum class Monomer : std::uint8_t { H = 0, P = 1 };

// An HP sequence: the problem instance. At least 3 units long; anything
// shorter leaves no decisions once the fixed two-unit prefix is placed.
struct HPSequence {
  std::vector<Monomer> monomers;

  // Parses an uppercase H/P string. Throws std::invalid_argument naming the
  // offending character, or rejecting a length below 3.
  static HPSequence parse(const std::string& text);

  int size() const { return static_cast<int>(monomers.size()); }
  Monomer operator[](int i) const { return monomers[static_cast<std::size_t>(i)]; }
  std::string str() const;
  int countH() const;
};

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(Coord a, Coord b) { return a.x == b.x && a.y == b.y; }
  friend Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }
  friend Coord operator-(Coord a, Coord b) { return {a.x - b.x, a.y - b.y}; }
};

struct CoordHash {
  std::size_t operator()(Coord c) const {
    std::uint64_t k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                      static_cast<std::uint32_t>(c.y);
    k *= 0x9e3779b97f4a7c15ull;
    return static_cast<std::size_t>(k ^ (k >> 32));
  }
};

// Relative direction scheme. Index order L, F, R is used everywhere:
// action masks, Q-value outputs, and serialized action strings.
enum class Action : std::uint8_t { Left = 0, Forward = 1, Right = 2 };

inline constexpr std::array<Action, 3> kActions{Action::Left, Action::Forward, Action::Right};

char actionChar(Action a);
Action actionFromChar(char c);  // throws on anything but L, F, R
std::string actionString(const std::vector<Action>& actions);

enum class Heading : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

Coord headingVec(Heading h);
Heading rotateCcw(Heading h);
Heading rotateCw(Heading h);

// L turns counter-clockwise, R clockwise, F keeps the heading.
Heading turn(Heading h, Action a);

using ActionMask = std::array<bool, 3>;

inline int validCount(const ActionMask& m) {
  return static_cast<int>(m[0]) + static_cast<int>(m[1]) + static_cast<int>(m[2]);
}

// A partial self-avoiding walk. Value type: step() returns a new state, so
// independent workers can each own their instance.
struct WalkState {
  std::vector<Coord> placed;                         // one coordinate per placed monomer
  std::unordered_set<Coord, CoordHash> occupancy;    // O(1) collision lookup
  Heading heading = Heading::Up;                     // direction of the last step
  bool first_turn_taken = false;                     // true once any non-F action occurred

  int stepIndex() const { return static_cast<int>(placed.size()); }
  Coord head() const { return placed.back(); }
};

enum class EpisodeStatus : std::uint8_t { InProgress = 0, CompleteTerminal = 1, TrappedTerminal = 2 };

struct StepResult {
  WalkState state;
  double reward = 0.0;
  EpisodeStatus status = EpisodeStatus::InProgress;
  ActionMask valid_mask{false, false, false};  // all-false exactly when terminal
  std::optional<int> energy_if_terminal;       // complete: full energy; trapped: partial-chain energy
};

struct RewardConfig {
  // When set, a trapped episode is rewarded with the partial chain's |energy|
  // instead of 0. Off by default: an incomplete walk is not a valid solution.
  bool reward_trapped_partial = false;
};

// Fresh walk with the fixed prefix (0,0) -> (0,1), heading Up.
WalkState reset(const HPSequence& seq);

// Marks action a valid iff its target site is unoccupied and, before the
// first turn, a != R (symmetry breaking: the first turn must be Left).
ActionMask validActions(const WalkState& state);

// 1 / number-of-valid-actions, or 0 when trapped. Takes values {1/3, 1/2, 1, 0}.
double oneStepProbability(const WalkState& state);

// Places the next monomer. Invalid actions are hard contract violations
// (std::invalid_argument), never silently masked.
StepResult step(const WalkState& state, const HPSequence& seq, Action action,
                const RewardConfig& reward_cfg = {});

// Number of unordered pairs (i, j), |i - j| > 1, both H, lattice-adjacent.
// Accepts partial chains (placed may be shorter than seq).
int countHHContacts(const std::vector<Coord>& placed, const HPSequence& seq);

// Negative contact count.
int energyOf(const std::vector<Coord>& placed, const HPSequence& seq);

double rewardOf(EpisodeStatus status, int energy, const RewardConfig& reward_cfg = {});

// Length of the trailing run of Forward actions (consecutive equal headings
// at the end of the walk).
int trailingForwardRun(const WalkState& state);

// Outcome of replaying a serialized action string through the environment.
struct ReplayOutcome {
  bool ok = false;
  std::string error;
  WalkState state;
  EpisodeStatus status = EpisodeStatus::InProgress;
  int energy = 0;  // terminal energy when the walk ended, else partial energy
};

// Replays actions from reset(). Reports rather than throws, so bulk
// verification loops can continue past bad records.
ReplayOutcome replayActions(const HPSequence& seq, const std::string& actions);

}  // namespace hpfold
