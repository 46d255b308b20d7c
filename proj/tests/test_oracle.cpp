#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

#include "brute_force.hpp"
#include "hpfold/oracle.hpp"

using namespace hpfold;

namespace {

std::vector<nlohmann::json> readJsonl(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("oracle_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("tiny walk counts by hand") {
  CHECK(enumerateWalks(HPSequence::parse("HPH")).complete_count == 2);
  CHECK(enumerateWalks(HPSequence::parse("HPPH")).complete_count == 5);
  CHECK(enumerateWalks(HPSequence::parse("HPPH")).trapped_count == 0);
}

TEST_CASE("complete counts are sequence-independent; energies are not") {
  EnumerationReport a = enumerateWalks(HPSequence::parse("HHHHHH"));
  EnumerationReport b = enumerateWalks(HPSequence::parse("PPPPPP"));
  EnumerationReport c = enumerateWalks(HPSequence::parse("HPPHPH"));
  CHECK(a.complete_count == b.complete_count);
  CHECK(a.complete_count == c.complete_count);
  CHECK(a.trapped_count == c.trapped_count);
  CHECK(*b.min_energy == 0);
  CHECK(*c.min_energy == -2);
}

TEST_CASE("HPPH census and unique optimum") {
  EnumerateOptions opts;
  opts.collect_optimal = true;
  EnumerationReport r = enumerateWalks(HPSequence::parse("HPPH"), opts);
  CHECK(r.complete_count == 5);
  CHECK(*r.min_energy == -1);
  CHECK(r.degeneracy == 1);
  REQUIRE(r.optimal_actions.size() == 1);
  CHECK(r.optimal_actions[0] == "LL");
}

TEST_CASE("optimal energies of the figure sequences") {
  CHECK(optimalEnergy(HPSequence::parse("HPPHPH")) == -2);
  CHECK(optimalEnergy(HPSequence::parse("HPPHHPPH")) == -3);
  CHECK(optimalEnergy(HPSequence::parse("HPPHPHPHHPPHH"), 2) == -6);
}

TEST_CASE("enumeration agrees with the test-local brute force") {
  for (const char* text : {"HPPHPH", "HPPHHPPH", "PHPHPHP"}) {
    HPSequence seq = HPSequence::parse(text);
    auto brute = hpfold::testonly::bruteEnumerate(seq);
    EnumerationReport r = enumerateWalks(seq);
    CHECK(r.complete_count == brute.complete.size());
    CHECK(r.trapped_count == static_cast<std::uint64_t>(brute.trapped));
    int best = 0;
    std::uint64_t degeneracy = 0;
    for (const auto& w : brute.complete) best = std::max(best, w.contacts);
    for (const auto& w : brute.complete) degeneracy += (w.contacts == best);
    CHECK(*r.min_energy == -best);
    CHECK(r.degeneracy == degeneracy);
  }
}

TEST_CASE("every enumerated optimal action string replays through the environment") {
  for (const char* text : {"HPPHHPPH", "HPHPPHPHPH"}) {
    HPSequence seq = HPSequence::parse(text);
    EnumerateOptions opts;
    opts.collect_optimal = true;
    opts.cap = 100000;
    EnumerationReport r = enumerateWalks(seq, opts);
    CHECK_FALSE(r.optimal_truncated);
    REQUIRE(r.optimal_actions.size() == r.degeneracy);
    for (const std::string& actions : r.optimal_actions) {
      ReplayOutcome out = replayActions(seq, actions);
      REQUIRE(out.ok);
      CHECK(out.status == EpisodeStatus::CompleteTerminal);
      CHECK(out.energy == *r.min_energy);
    }
  }
}

TEST_CASE("subtree workers do not change the report") {
  HPSequence seq = HPSequence::parse("HPPHPHPHHPPHHP");
  EnumerateOptions serial;
  serial.collect_optimal = true;
  EnumerateOptions parallel = serial;
  parallel.workers = 3;
  EnumerationReport a = enumerateWalks(seq, serial);
  EnumerationReport b = enumerateWalks(seq, parallel);
  CHECK(a.complete_count == b.complete_count);
  CHECK(a.trapped_count == b.trapped_count);
  CHECK(*a.min_energy == *b.min_energy);
  CHECK(a.degeneracy == b.degeneracy);
  CHECK(a.optimal_actions == b.optimal_actions);
}

TEST_CASE("feasibility guard") {
  HPSequence big = HPSequence::parse(std::string(23, 'P'));
  CHECK_THROWS_AS(enumerateWalks(big), std::invalid_argument);
  EnumerateOptions opts;
  opts.max_feasible_n = 23;
  CHECK_NOTHROW(enumerateWalks(HPSequence::parse(std::string(10, 'P')), opts));
}

TEST_CASE("landscape export lists every complete walk with its score") {
  TempFile file("land_hpph.jsonl");
  landscapeExport(HPSequence::parse("HPPH"), file.path);
  auto records = readJsonl(file.path);
  REQUIRE(records.size() == 5);
  std::map<int, int> by_score;
  for (const auto& r : records) {
    ++by_score[r.at("score").get<int>()];
    CHECK(r.at("actions").get<std::string>().size() == 2);
    CHECK(r.at("coords").size() == 4);
  }
  CHECK(by_score[1] == 1);
  CHECK(by_score[0] == 4);

  TempFile allp("land_pppp.jsonl");
  landscapeExport(HPSequence::parse("PPPP"), allp.path);
  for (const auto& r : readJsonl(allp.path)) CHECK(r.at("score").get<int>() == 0);

  TempFile sixmer("land_6mer.jsonl");
  landscapeExport(HPSequence::parse("HPPHPH"), sixmer.path);
  int max_score = 0;
  for (const auto& r : readJsonl(sixmer.path)) {
    max_score = std::max(max_score, r.at("score").get<int>());
  }
  CHECK(max_score == 2);

  CHECK_THROWS_AS(landscapeExport(HPSequence::parse(std::string(15, 'P')), "x.jsonl"),
                  std::invalid_argument);
}

TEST_CASE("landscape records replay to their stored coordinates and scores") {
  HPSequence seq = HPSequence::parse("HPPHHPPH");
  TempFile file("land_replay.jsonl");
  landscapeExport(seq, file.path);
  auto records = readJsonl(file.path);
  EnumerationReport r = enumerateWalks(seq);
  REQUIRE(records.size() == r.complete_count);
  for (const auto& j : records) {
    ReplayOutcome out = replayActions(seq, j.at("actions").get<std::string>());
    REQUIRE(out.ok);
    CHECK(out.status == EpisodeStatus::CompleteTerminal);
    CHECK(-out.energy == j.at("score").get<int>());
    const auto& coords = j.at("coords");
    REQUIRE(coords.size() == out.state.placed.size());
    for (std::size_t i = 0; i < out.state.placed.size(); ++i) {
      CHECK(out.state.placed[i].x == coords[i][0].get<int>());
      CHECK(out.state.placed[i].y == coords[i][1].get<int>());
    }
  }
}

TEST_CASE("count verification covers the fast cases") {
  auto checks = verifyCounts(false, 2);
  REQUIRE(checks.size() == 2);
  CHECK(checks[0].n == 4);
  CHECK(checks[0].match);
  CHECK(checks[1].n == 20);
  CHECK(checks[1].expected == 41889578ull);
  CHECK(checks[1].match);
}
