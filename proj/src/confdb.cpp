#include "hpfold/confdb.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hpfold {

using nlohmann::json;

bool ConformationDb::add(const ConformationRecord& record) {
  const HPSequence seq = HPSequence::parse(record.sequence);
  const ReplayOutcome replay = replayActions(seq, record.actions);
  if (!replay.ok) {
    throw std::invalid_argument("confdb: record rejected (" + replay.error + ")");
  }
  if (replay.status != EpisodeStatus::CompleteTerminal) {
    throw std::invalid_argument("confdb: record rejected (actions do not complete the walk)");
  }
  if (replay.energy != record.energy) {
    throw std::invalid_argument("confdb: record rejected (stored energy " +
                                std::to_string(record.energy) + " but replay gives " +
                                std::to_string(replay.energy) + ")");
  }

  Entry& entry = entries_[record.sequence][record.energy][canonicalKey(record)];
  const bool inserted = entry.trials.empty();
  if (inserted) {
    entry.first_episode = record.first_episode;
    ++total_;
  }
  entry.trials.insert(record.trial_id);
  return inserted;
}

std::uint64_t ConformationDb::distinctCount(const std::string& sequence, int energy) const {
  auto seq_it = entries_.find(sequence);
  if (seq_it == entries_.end()) return 0;
  auto level_it = seq_it->second.find(energy);
  if (level_it == seq_it->second.end()) return 0;
  return level_it->second.size();
}

DatabaseStats ConformationDb::stats() const {
  DatabaseStats out;
  for (const auto& [sequence, levels] : entries_) {
    SequenceStats ss;
    ss.sequence = sequence;
    for (const auto& [energy, keys] : levels) {
      if (!ss.best_energy || energy < *ss.best_energy) ss.best_energy = energy;
      LevelStats ls;
      ls.energy = energy;
      ls.distinct = keys.size();
      for (const auto& [key, entry] : keys) {
        for (const std::string& trial : entry.trials) ++ls.by_trial[trial];
      }
      ss.levels.push_back(std::move(ls));
    }
    out.sequences.push_back(std::move(ss));
  }
  return out;
}

std::vector<ConformationRecord> ConformationDb::records() const {
  std::vector<ConformationRecord> out;
  for (const auto& [sequence, levels] : entries_) {
    for (const auto& [energy, keys] : levels) {
      for (const auto& [actions, entry] : keys) {
        ConformationRecord r;
        r.sequence = sequence;
        r.actions = actions;
        r.energy = energy;
        r.first_episode = entry.first_episode;
        r.trial_id = entry.trials.empty() ? "" : *entry.trials.begin();
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

void ConformationDb::exportFiles(const std::string& records_path,
                                 const std::string& stats_path) const {
  std::ofstream os(records_path);
  if (!os) throw std::runtime_error("confdb: cannot open '" + records_path + "'");
  for (const auto& [sequence, levels] : entries_) {
    const HPSequence seq = HPSequence::parse(sequence);
    for (const auto& [energy, keys] : levels) {
      for (const auto& [actions, entry] : keys) {
        const ReplayOutcome replay = replayActions(seq, actions);
        json j;
        j["sequence"] = sequence;
        j["energy"] = energy;
        j["actions"] = actions;
        auto arr = json::array();
        for (Coord c : replay.state.placed) arr.push_back({c.x, c.y});
        j["coords"] = std::move(arr);
        j["first_episode"] = entry.first_episode;
        auto trials = json::array();
        for (const std::string& t : entry.trials) trials.push_back(t);
        j["trials"] = std::move(trials);
        os << j.dump() << "\n";
      }
    }
  }
  if (!os) throw std::runtime_error("confdb: write failed for '" + records_path + "'");

  std::ofstream ss(stats_path);
  if (!ss) throw std::runtime_error("confdb: cannot open '" + stats_path + "'");
  const DatabaseStats st = stats();
  json j;
  j["sequences"] = json::array();
  for (const SequenceStats& s : st.sequences) {
    json seq_json;
    seq_json["sequence"] = s.sequence;
    seq_json["best_energy"] = s.best_energy ? json(*s.best_energy) : json();
    seq_json["levels"] = json::array();
    for (const LevelStats& level : s.levels) {
      json lv;
      lv["energy"] = level.energy;
      lv["distinct"] = level.distinct;
      lv["by_trial"] = level.by_trial;
      seq_json["levels"].push_back(std::move(lv));
    }
    j["sequences"].push_back(std::move(seq_json));
  }
  ss << j.dump(2) << "\n";
}

ConformationDb ConformationDb::importRecords(const std::string& records_path) {
  std::ifstream is(records_path);
  if (!is) throw std::runtime_error("confdb: cannot open '" + records_path + "'");
  ConformationDb db;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ConformationRecord r;
    r.sequence = j.at("sequence").get<std::string>();
    r.actions = j.at("actions").get<std::string>();
    r.energy = j.at("energy").get<int>();
    r.first_episode = j.value("first_episode", static_cast<std::int64_t>(-1));
    if (j.contains("trials")) {
      for (const auto& t : j["trials"]) {
        r.trial_id = t.get<std::string>();
        db.add(r);
      }
    } else {
      r.trial_id = j.value("trial", "");
      db.add(r);
    }
  }
  return db;
}

void drawConformationSvg(const HPSequence& seq, const std::vector<Coord>& coords,
                         const std::string& path) {
  if (coords.empty()) throw std::invalid_argument("draw: empty conformation");
  const int cell = 28, margin = 24, radius = 7;
  int min_x = coords[0].x, max_x = coords[0].x, min_y = coords[0].y, max_y = coords[0].y;
  for (Coord c : coords) {
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  const int width = (max_x - min_x) * cell + 2 * margin;
  const int height = (max_y - min_y) * cell + 2 * margin;
  auto px = [&](Coord c) { return margin + (c.x - min_x) * cell; };
  auto py = [&](Coord c) { return margin + (max_y - c.y) * cell; };  // y up

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  // H-H contact links, dashed
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 2; j < coords.size(); ++j) {
      if (seq[static_cast<int>(i)] != Monomer::H || seq[static_cast<int>(j)] != Monomer::H)
        continue;
      const int dist = std::abs(coords[i].x - coords[j].x) + std::abs(coords[i].y - coords[j].y);
      if (dist != 1) continue;
      svg << "  <line x1=\"" << px(coords[i]) << "\" y1=\"" << py(coords[i]) << "\" x2=\""
          << px(coords[j]) << "\" y2=\"" << py(coords[j])
          << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"4 3\"/>\n";
    }
  }
  // backbone
  svg << "  <polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) svg << ' ';
    svg << px(coords[i]) << ',' << py(coords[i]);
  }
  svg << "\"/>\n";
  // monomers: H filled, P open
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const bool isH = seq[static_cast<int>(i)] == Monomer::H;
    svg << "  <circle cx=\"" << px(coords[i]) << "\" cy=\"" << py(coords[i]) << "\" r=\""
        << radius << "\" fill=\"" << (isH ? "#1f1f1f" : "#ffffff")
        << "\" stroke=\"#1f1f1f\" stroke-width=\"2\"/>\n";
  }
  svg << "</svg>\n";

  std::ofstream os(path);
  if (!os) throw std::runtime_error("draw: cannot open '" + path + "'");
  os << svg.str();
  if (!os) throw std::runtime_error("draw: write failed for '" + path + "'");
}

}  // namespace hpfold
