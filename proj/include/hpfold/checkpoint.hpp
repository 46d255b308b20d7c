#pragma once

#include <string>

#include "hpfold/trainer.hpp"

namespace hpfold {

// On-disk training state: both networks, optimizer moments, the four RNG
// streams and the run counters. Binary, versioned, bit-exact on round trip.
struct TrainerCheckpoint {
  Arch arch = Arch::Lstm2x256;
  int n = 0;
  std::int64_t episodes_run = 0;
  std::int64_t updates = 0;
  QNetwork<float> policy;
  QNetwork<float> target;
  AdamState<float> adam;
  RngStreams streams{0};
};

void saveCheckpoint(const std::string& path, const Trainer& trainer);
TrainerCheckpoint loadCheckpoint(const std::string& path);

// Replaces the trainer's state with the checkpoint's. The trainer must have
// been constructed for the same sequence length and architecture.
void restoreTrainer(Trainer& trainer, const TrainerCheckpoint& ck);

}  // namespace hpfold
