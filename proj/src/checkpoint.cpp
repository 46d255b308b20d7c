#include "hpfold/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hpfold {

namespace {

constexpr char kMagic[8] = {'H', 'P', 'F', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void writeBytes(std::ostream& os, const void* data, std::size_t size) {
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

template <typename T>
void writePod(std::ostream& os, T value) {
  writeBytes(os, &value, sizeof(T));
}

void writeString(std::ostream& os, const std::string& s) {
  writePod<std::uint64_t>(os, s.size());
  writeBytes(os, s.data(), s.size());
}

void writeTensor(std::ostream& os, const MatF& t) {
  writePod<std::uint32_t>(os, static_cast<std::uint32_t>(t.rows()));
  writePod<std::uint32_t>(os, static_cast<std::uint32_t>(t.cols()));
  writeBytes(os, t.data(), sizeof(float) * static_cast<std::size_t>(t.size()));
}

void writeNetwork(std::ostream& os, const QNetwork<float>& net) {
  auto tensors = net.tensors();
  writePod<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
  for (const MatF* t : tensors) writeTensor(os, *t);
}

void readBytes(std::istream& is, void* data, std::size_t size) {
  is.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
}

template <typename T>
T readPod(std::istream& is) {
  T value;
  readBytes(is, &value, sizeof(T));
  return value;
}

std::string readString(std::istream& is) {
  const std::uint64_t size = readPod<std::uint64_t>(is);
  if (size > (1ull << 30)) throw std::runtime_error("checkpoint: corrupt string length");
  std::string s(size, '\0');
  readBytes(is, s.data(), size);
  return s;
}

void readTensorInto(std::istream& is, MatF& t) {
  const std::uint32_t rows = readPod<std::uint32_t>(is);
  const std::uint32_t cols = readPod<std::uint32_t>(is);
  if (static_cast<Eigen::Index>(rows) != t.rows() || static_cast<Eigen::Index>(cols) != t.cols()) {
    throw std::runtime_error("checkpoint: tensor shape mismatch");
  }
  readBytes(is, t.data(), sizeof(float) * static_cast<std::size_t>(t.size()));
}

void readNetworkInto(std::istream& is, QNetwork<float>& net) {
  auto tensors = net.tensors();
  const std::uint32_t count = readPod<std::uint32_t>(is);
  if (count != tensors.size()) throw std::runtime_error("checkpoint: tensor count mismatch");
  for (MatF* t : tensors) readTensorInto(is, *t);
}

std::string rngToString(const Rng& rng) {
  std::ostringstream ss;
  ss << rng;
  return ss.str();
}

Rng rngFromString(const std::string& s) {
  std::istringstream ss(s);
  Rng rng;
  ss >> rng;
  if (ss.fail()) throw std::runtime_error("checkpoint: corrupt RNG state");
  return rng;
}

}  // namespace

void saveCheckpoint(const std::string& path, const Trainer& trainer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");

  writeBytes(os, kMagic, sizeof(kMagic));
  writePod<std::uint32_t>(os, kVersion);
  writeString(os, archName(trainer.policy().arch));
  writePod<std::int32_t>(os, trainer.policy().n);
  writePod<std::int32_t>(os, trainer.policy().hidden);
  writePod<std::int64_t>(os, trainer.episodesRun());
  writePod<std::int64_t>(os, trainer.updates());

  const AdamState<float>& adam = trainer.adam();
  writePod<std::int64_t>(os, adam.step);
  writePod<double>(os, adam.learning_rate);
  writePod<double>(os, adam.beta1);
  writePod<double>(os, adam.beta2);
  writePod<double>(os, adam.epsilon);

  writeNetwork(os, trainer.policy());
  writeNetwork(os, trainer.target());
  writeNetwork(os, adam.m);
  writeNetwork(os, adam.v);

  const RngStreams& st = const_cast<Trainer&>(trainer).streams();
  writeString(os, rngToString(st.weight_init));
  writeString(os, rngToString(st.exploration));
  writeString(os, rngToString(st.batch_sample));
  writeString(os, rngToString(st.tie_break));

  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

TrainerCheckpoint loadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");

  char magic[8];
  readBytes(is, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  }
  const std::uint32_t version = readPod<std::uint32_t>(is);
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }

  TrainerCheckpoint ck;
  ck.arch = archFromName(readString(is));
  ck.n = readPod<std::int32_t>(is);
  const std::int32_t hidden = readPod<std::int32_t>(is);
  ck.episodes_run = readPod<std::int64_t>(is);
  ck.updates = readPod<std::int64_t>(is);

  // Shapes come from the architecture; a throwaway stream builds the frame.
  Rng scratch(0);
  ck.policy = makeNetwork<float>(ck.arch, ck.n, scratch);
  if (ck.policy.hidden != hidden) throw std::runtime_error("checkpoint: hidden size mismatch");
  ck.target = ck.policy;
  ck.adam = makeAdamState(ck.policy);
  ck.adam.step = readPod<std::int64_t>(is);
  ck.adam.learning_rate = readPod<double>(is);
  ck.adam.beta1 = readPod<double>(is);
  ck.adam.beta2 = readPod<double>(is);
  ck.adam.epsilon = readPod<double>(is);

  readNetworkInto(is, ck.policy);
  readNetworkInto(is, ck.target);
  readNetworkInto(is, ck.adam.m);
  readNetworkInto(is, ck.adam.v);

  ck.streams.weight_init = rngFromString(readString(is));
  ck.streams.exploration = rngFromString(readString(is));
  ck.streams.batch_sample = rngFromString(readString(is));
  ck.streams.tie_break = rngFromString(readString(is));
  return ck;
}

void restoreTrainer(Trainer& trainer, const TrainerCheckpoint& ck) {
  if (trainer.sequence().size() != ck.n) {
    throw std::runtime_error("checkpoint: built for N = " + std::to_string(ck.n) +
                             ", trainer sequence has N = " +
                             std::to_string(trainer.sequence().size()));
  }
  trainer.restore(ck.policy, ck.target, ck.adam, ck.streams, ck.episodes_run, ck.updates);
}

}  // namespace hpfold
