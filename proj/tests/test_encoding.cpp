#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "brute_force.hpp"
#include "hpfold/encoding.hpp"
#include "hpfold/lattice.hpp"

using namespace hpfold;

TEST_CASE("8mer with L,R,R,F placed encodes row by row") {
  HPSequence seq = HPSequence::parse("HHPPHPHH");
  ReplayOutcome out = replayActions(seq, "LRRF");
  REQUIRE(out.ok);
  EncodedState enc = encode(out.state, seq);

  const std::vector<std::uint8_t> want_move = {kMoveNone, kMoveNone,  kMoveLeft,    kMoveRight,
                                               kMoveRight, kMoveForward, kMoveNone, kMoveNone};
  const std::vector<std::uint8_t> want_mono = {0, 0, 1, 1, 0, 1, 0, 0};  // H H P P H P H H
  CHECK(enc.movement == want_move);
  CHECK(enc.monomer == want_mono);

  MatD m = enc.oneHot<double>();
  REQUIRE(m.rows() == 8);
  REQUIRE(m.cols() == 6);
  // row 2: movement L (column 1) and monomer P (column 5)
  CHECK(m(2, 1) == 1.0);
  CHECK(m(2, 5) == 1.0);
  CHECK(m.row(2).sum() == 2.0);
}

TEST_CASE("fresh state has only '-' movement codes") {
  HPSequence seq = HPSequence::parse("HPPHPH");
  EncodedState enc = encode(reset(seq), seq);
  for (std::uint8_t mv : enc.movement) CHECK(mv == kMoveNone);
}

TEST_CASE("complete 4mer carries no '-' beyond the prefix") {
  HPSequence seq = HPSequence::parse("HPPH");
  ReplayOutcome out = replayActions(seq, "LL");
  REQUIRE(out.ok);
  EncodedState enc = encode(out.state, seq);
  CHECK(enc.movement == std::vector<std::uint8_t>{kMoveNone, kMoveNone, kMoveLeft, kMoveLeft});
}

TEST_CASE("every row one-hots exactly one movement and one monomer") {
  HPSequence seq = HPSequence::parse("HPPHHPPH");
  ReplayOutcome out = replayActions(seq, "LFR");
  REQUIRE(out.ok);
  EncodedState enc = encode(out.state, seq);
  MatD m = enc.oneHot<double>();
  for (int i = 0; i < m.rows(); ++i) {
    CHECK(m.row(i).segment(0, 4).sum() == 1.0);
    CHECK(m.row(i).segment(4, 2).sum() == 1.0);
  }
  // H-column plus P-column sums over rows equal N
  CHECK(m.col(4).sum() + m.col(5).sum() == static_cast<double>(seq.size()));

  auto bits = enc.flatBits();
  REQUIRE(bits.size() == static_cast<std::size_t>(seq.size()) * 6);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(static_cast<double>(bits[static_cast<std::size_t>(i * 6 + j)]) == m(i, j));
}

TEST_CASE("encoding is injective over action prefixes of a sequence") {
  HPSequence seq = HPSequence::parse("HPPHPHP");
  // Walk every prefix of every complete walk plus the trapped ones by DFS
  // over the valid-action tree, collecting each encoded state.
  std::map<std::vector<std::uint8_t>, std::string> seen;
  long states = 0;

  struct Frame {
    WalkState state;
    std::string actions;
  };
  std::vector<Frame> stack{{reset(seq), ""}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    ++states;
    EncodedState enc = encode(f.state, seq);
    auto [it, inserted] = seen.emplace(enc.movement, f.actions);
    if (!inserted) CHECK(it->second == f.actions);
    CHECK(inserted);
    if (f.state.stepIndex() == seq.size()) continue;
    ActionMask mask = validActions(f.state);
    for (Action a : kActions) {
      if (!mask[static_cast<std::size_t>(a)]) continue;
      StepResult res = step(f.state, seq, a);
      stack.push_back({std::move(res.state), f.actions + actionChar(a)});
    }
  }
  CHECK(states == static_cast<long>(seen.size()));
}

TEST_CASE("encode is pure") {
  HPSequence seq = HPSequence::parse("HPPH");
  CHECK(encode(reset(seq), seq) == encode(reset(seq), seq));
}
