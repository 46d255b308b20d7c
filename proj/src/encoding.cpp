#include "hpfold/encoding.hpp"

#include <stdexcept>

namespace hpfold {

Action actionOfStep(const WalkState& state, int i) {
  if (i < 2 || i >= state.stepIndex()) {
    throw std::invalid_argument("actionOfStep: monomer " + std::to_string(i) +
                                " was not placed by an action");
  }
  const std::size_t j = static_cast<std::size_t>(i);
  const Coord cur = state.placed[j] - state.placed[j - 1];
  // Heading of the previous step; the prefix step is always Up.
  const Coord prev = state.placed[j - 1] - state.placed[j - 2];
  if (cur == prev) return Action::Forward;
  if (cur == Coord{-prev.y, prev.x}) return Action::Left;  // 90 degrees counter-clockwise
  if (cur == Coord{prev.y, -prev.x}) return Action::Right;
  throw std::logic_error("actionOfStep: non-adjacent consecutive coordinates");
}

EncodedState encode(const WalkState& state, const HPSequence& seq) {
  if (state.stepIndex() > seq.size()) {
    throw std::invalid_argument("encode: walk longer than sequence");
  }
  const int n = seq.size();
  EncodedState enc;
  enc.movement.assign(static_cast<std::size_t>(n), kMoveNone);
  enc.monomer.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    enc.monomer[static_cast<std::size_t>(i)] = seq[i] == Monomer::H ? 0 : 1;
  }
  for (int i = 2; i < state.stepIndex(); ++i) {
    switch (actionOfStep(state, i)) {
      case Action::Left: enc.movement[static_cast<std::size_t>(i)] = kMoveLeft; break;
      case Action::Forward: enc.movement[static_cast<std::size_t>(i)] = kMoveForward; break;
      case Action::Right: enc.movement[static_cast<std::size_t>(i)] = kMoveRight; break;
    }
  }
  return enc;
}

}  // namespace hpfold
