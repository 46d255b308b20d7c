#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "hpfold/encoding.hpp"
#include "hpfold/lattice.hpp"
#include "hpfold/rng.hpp"

namespace hpfold {

// One MDP transition. Rewards are nonzero only on terminal transitions.
struct Experience {
  EncodedState s;
  Action a = Action::Left;
  float r = 0.0f;
  EncodedState s_next;
  bool terminal = false;
  ActionMask next_valid_mask{false, false, false};
};

// Buffer keeps the last min(50000, episodes/10) transitions.
inline std::size_t replayCapacityFor(std::int64_t episodes) {
  const std::int64_t cap = std::min<std::int64_t>(50000, episodes / 10);
  return static_cast<std::size_t>(std::max<std::int64_t>(1, cap));
}

// Bounded FIFO of experiences; eviction removes oldest first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return buffer_.size(); }
  std::uint64_t totalPushes() const { return pushes_; }

  void push(Experience e) {
    if (buffer_.size() == capacity_) buffer_.pop_front();
    buffer_.push_back(std::move(e));
    ++pushes_;
  }

  const Experience& at(std::size_t i) const { return buffer_[i]; }

  // Monotonic id of the experience at index i (ids count every push ever).
  std::uint64_t idAt(std::size_t i) const { return pushes_ - buffer_.size() + i; }

  // k distinct indices drawn uniformly (Floyd's algorithm), deterministic
  // for a given stream state.
  std::vector<std::size_t> sampleIndices(Rng& rng, std::size_t k) const {
    std::vector<std::size_t> picked;
    picked.reserve(k);
    const std::size_t m = buffer_.size();
    for (std::size_t j = m - k; j < m; ++j) {
      const std::size_t t = static_cast<std::size_t>(uniformIndex(rng, j + 1));
      if (std::find(picked.begin(), picked.end(), t) != picked.end()) {
        picked.push_back(j);
      } else {
        picked.push_back(t);
      }
    }
    return picked;
  }

 private:
  std::deque<Experience> buffer_;
  std::size_t capacity_;
  std::uint64_t pushes_ = 0;
};

}  // namespace hpfold
