#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hpfold/lattice.hpp"

namespace hpfold {

// One deduplicated conformation: a complete walk of a sequence together
// with where it was first seen.
struct ConformationRecord {
  std::string sequence;  // H/P string
  std::string actions;   // length N-2 over {L,F,R}
  int energy = 0;
  std::int64_t first_episode = -1;
  std::string trial_id;
};

// Under the fixed prefix and first-turn-Left constraint, the action string
// itself identifies a conformation modulo rigid motions and reflection.
inline std::string canonicalKey(const ConformationRecord& r) { return r.actions; }

struct LevelStats {
  int energy = 0;
  std::uint64_t distinct = 0;                     // union over trials
  std::map<std::string, std::uint64_t> by_trial;  // per-trial distinct counts
};

struct SequenceStats {
  std::string sequence;
  std::optional<int> best_energy;  // lowest energy present
  std::vector<LevelStats> levels;  // every energy level, ascending
};

struct DatabaseStats {
  std::vector<SequenceStats> sequences;
};

// Deduplicated store of replay-verified conformations, grouped by
// (sequence, energy). Single-writer; readers take const refs.
class ConformationDb {
 public:
  // Inserts iff the action string is unseen for (sequence, energy);
  // per-trial stats update either way. Records failing replay verification
  // (incomplete walk, wrong energy, bad actions) throw std::invalid_argument.
  bool add(const ConformationRecord& record);

  std::uint64_t size() const { return total_; }

  // Distinct count at one (sequence, energy) level.
  std::uint64_t distinctCount(const std::string& sequence, int energy) const;

  DatabaseStats stats() const;

  std::vector<ConformationRecord> records() const;  // deterministic order

  // records.jsonl (one conformation per line, with derived coordinates)
  // plus stats.json next to it.
  void exportFiles(const std::string& records_path, const std::string& stats_path) const;

  static ConformationDb importRecords(const std::string& records_path);

  bool operator==(const ConformationDb& other) const { return entries_ == other.entries_; }

 private:
  struct Entry {
    std::int64_t first_episode = -1;
    std::set<std::string> trials;
    friend bool operator==(const Entry& a, const Entry& b) {
      return a.first_episode == b.first_episode && a.trials == b.trials;
    }
  };
  // sequence -> energy -> action string -> entry
  std::map<std::string, std::map<int, std::map<std::string, Entry>>> entries_;
  std::uint64_t total_ = 0;
};

// Lattice drawing of one conformation (backbone polyline, H filled, P open,
// H-H contacts dashed) as a standalone SVG file.
void drawConformationSvg(const HPSequence& seq, const std::vector<Coord>& coords,
                         const std::string& path);

}  // namespace hpfold
