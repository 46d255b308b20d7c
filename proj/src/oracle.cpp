#include "hpfold/oracle.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace hpfold {

namespace {

constexpr std::uint8_t kEmpty = 0, kCellH = 1, kCellP = 2;

// Flat-grid walker: the environment's exact action tree (fixed prefix,
// first-turn-Left, self-avoidance, action order L, F, R) on an occupancy
// grid with incremental contact counting.
class Enumerator {
 public:
  using LeafFn = std::function<void(const std::string& actions,
                                    const std::vector<Coord>& coords, int contacts)>;

  explicit Enumerator(const HPSequence& seq) : n_(seq.size()), side_(2 * n_ + 1) {
    code_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) code_[static_cast<std::size_t>(i)] =
        seq[i] == Monomer::H ? kCellH : kCellP;
    grid_.assign(static_cast<std::size_t>(side_) * side_, kEmpty);
    // fixed prefix
    cellAt(0, 0) = code_[0];
    cellAt(0, 1) = code_[1];
    coords_ = {{0, 0}, {0, 1}};
    actions_.reserve(static_cast<std::size_t>(n_));
    coords_.reserve(static_cast<std::size_t>(n_));
  }

  // Applies a previously recorded action prefix (no leaf accounting).
  void applyPrefix(const std::string& prefix) {
    for (char ch : prefix) {
      const Action a = actionFromChar(ch);
      const Coord d = headingVec(turn(heading_, a));
      const int nx = x_ + d.x, ny = y_ + d.y;
      const int depth = static_cast<int>(coords_.size());
      if (cellAt(nx, ny) != kEmpty) throw std::logic_error("enumerate: bad prefix");
      contacts_ += contactDelta(nx, ny, depth);
      cellAt(nx, ny) = code_[static_cast<std::size_t>(depth)];
      coords_.push_back({nx, ny});
      actions_.push_back(ch);
      heading_ = turn(heading_, a);
      x_ = nx;
      y_ = ny;
      turned_ = turned_ || a != Action::Forward;
    }
  }

  void run(EnumerationReport& report, const EnumerateOptions& opts, const LeafFn& leaf_fn) {
    explore(report, opts, leaf_fn, x_, y_, heading_, turned_);
  }

  // Serial expansion of the tree down to `depth` decisions, returning the
  // live prefixes; shallower dead ends are accounted into `report`.
  std::vector<std::string> prefixesAtDepth(int depth, EnumerationReport& report) {
    std::vector<std::string> out;
    expandPrefix(depth, report, out, x_, y_, heading_, turned_);
    return out;
  }

 private:
  std::uint8_t& cellAt(int x, int y) {
    return grid_[static_cast<std::size_t>(y + n_) * static_cast<std::size_t>(side_) +
                 static_cast<std::size_t>(x + n_)];
  }

  // New H-H contacts created by placing monomer `depth` at (x, y); the
  // backbone bond to the predecessor never counts.
  int contactDelta(int x, int y, int depth) const {
    if (code_[static_cast<std::size_t>(depth)] != kCellH) return 0;
    const std::size_t base = static_cast<std::size_t>(y + n_) * static_cast<std::size_t>(side_) +
                             static_cast<std::size_t>(x + n_);
    int h = (grid_[base + 1] == kCellH) + (grid_[base - 1] == kCellH) +
            (grid_[base + static_cast<std::size_t>(side_)] == kCellH) +
            (grid_[base - static_cast<std::size_t>(side_)] == kCellH);
    return h - (code_[static_cast<std::size_t>(depth - 1)] == kCellH ? 1 : 0);
  }

  void recordComplete(EnumerationReport& report, const EnumerateOptions& opts,
                      const LeafFn& leaf_fn, int contacts) {
    ++report.complete_count;
    const int energy = -contacts;
    if (!report.min_energy || energy < *report.min_energy) {
      report.min_energy = energy;
      report.degeneracy = 1;
      report.optimal_actions.clear();
      report.optimal_truncated = false;
      if (opts.collect_optimal) report.optimal_actions.push_back(actions_);
    } else if (energy == *report.min_energy) {
      ++report.degeneracy;
      if (opts.collect_optimal) {
        if (report.optimal_actions.size() < opts.cap) {
          report.optimal_actions.push_back(actions_);
        } else {
          report.optimal_truncated = true;
        }
      }
    }
    if (leaf_fn) leaf_fn(actions_, coords_, contacts);
  }

  void explore(EnumerationReport& report, const EnumerateOptions& opts, const LeafFn& leaf_fn,
               int x, int y, Heading heading, bool turned) {
    const int depth = static_cast<int>(coords_.size());
    bool any = false;
    for (Action a : kActions) {
      if (a == Action::Right && !turned) continue;
      const Heading nh = turn(heading, a);
      const Coord d = headingVec(nh);
      const int nx = x + d.x, ny = y + d.y;
      std::uint8_t& cell = cellAt(nx, ny);
      if (cell != kEmpty) continue;
      any = true;
      const int delta = contactDelta(nx, ny, depth);
      contacts_ += delta;
      cell = code_[static_cast<std::size_t>(depth)];
      coords_.push_back({nx, ny});
      actions_.push_back(actionChar(a));
      if (depth + 1 == n_) {
        recordComplete(report, opts, leaf_fn, contacts_);
      } else {
        explore(report, opts, leaf_fn, nx, ny, nh, turned || a != Action::Forward);
      }
      actions_.pop_back();
      coords_.pop_back();
      cell = kEmpty;
      contacts_ -= delta;
    }
    if (!any) ++report.trapped_count;
  }

  void expandPrefix(int target_depth, EnumerationReport& report, std::vector<std::string>& out,
                    int x, int y, Heading heading, bool turned) {
    const int depth = static_cast<int>(coords_.size());
    if (depth - 2 == target_depth) {
      out.push_back(actions_);
      return;
    }
    bool any = false;
    for (Action a : kActions) {
      if (a == Action::Right && !turned) continue;
      const Heading nh = turn(heading, a);
      const Coord d = headingVec(nh);
      const int nx = x + d.x, ny = y + d.y;
      std::uint8_t& cell = cellAt(nx, ny);
      if (cell != kEmpty) continue;
      any = true;
      const int delta = contactDelta(nx, ny, depth);
      contacts_ += delta;
      cell = code_[static_cast<std::size_t>(depth)];
      coords_.push_back({nx, ny});
      actions_.push_back(actionChar(a));
      if (depth + 1 == n_) {
        recordComplete(report, EnumerateOptions{}, nullptr, contacts_);
      } else {
        expandPrefix(target_depth, report, out, nx, ny, nh, turned || a != Action::Forward);
      }
      actions_.pop_back();
      coords_.pop_back();
      cell = kEmpty;
      contacts_ -= delta;
    }
    if (!any) ++report.trapped_count;
  }

  int n_;
  int side_;
  std::vector<std::uint8_t> code_;
  std::vector<std::uint8_t> grid_;
  std::vector<Coord> coords_;
  std::string actions_;
  int contacts_ = 0;
  int x_ = 0, y_ = 1;
  Heading heading_ = Heading::Up;
  bool turned_ = false;
};

// Folds `part` into `total`, keeping DFS (task) ordering of the collected
// optimal strings.
void mergeReports(EnumerationReport& total, const EnumerationReport& part,
                  const EnumerateOptions& opts) {
  total.complete_count += part.complete_count;
  total.trapped_count += part.trapped_count;
  if (!part.min_energy) return;
  if (!total.min_energy || *part.min_energy < *total.min_energy) {
    total.min_energy = part.min_energy;
    total.degeneracy = part.degeneracy;
    total.optimal_actions = part.optimal_actions;
    total.optimal_truncated = part.optimal_truncated;
  } else if (*part.min_energy == *total.min_energy) {
    total.degeneracy += part.degeneracy;
    total.optimal_truncated = total.optimal_truncated || part.optimal_truncated;
    for (const std::string& s : part.optimal_actions) {
      if (total.optimal_actions.size() < opts.cap) {
        total.optimal_actions.push_back(s);
      } else {
        total.optimal_truncated = true;
        break;
      }
    }
  }
}

}  // namespace

EnumerationReport enumerateWalks(const HPSequence& seq, const EnumerateOptions& opts) {
  if (seq.size() > opts.max_feasible_n && !opts.override_feasibility) {
    throw std::invalid_argument(
        "enumerate: N = " + std::to_string(seq.size()) + " exceeds the feasibility bound " +
        std::to_string(opts.max_feasible_n) + " (pass the override to run anyway)");
  }
  EnumerationReport report;
  report.n = seq.size();

  const int workers = std::max(1, opts.workers);
  if (workers == 1 || seq.size() < 10) {
    Enumerator en(seq);
    en.run(report, opts, nullptr);
    return report;
  }

  // Split work at a fixed shallow depth; totals are independent of the
  // worker count because per-task results merge in task order.
  int split_depth = 4;
  while (split_depth < seq.size() - 3 && split_depth < 9) ++split_depth;
  split_depth = std::min(split_depth, seq.size() - 3);

  Enumerator root(seq);
  std::vector<std::string> prefixes = root.prefixesAtDepth(split_depth, report);

  std::vector<EnumerationReport> parts(prefixes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= prefixes.size()) return;
      Enumerator en(seq);
      en.applyPrefix(prefixes[i]);
      parts[i].n = seq.size();
      en.run(parts[i], opts, nullptr);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  for (const EnumerationReport& part : parts) mergeReports(report, part, opts);
  return report;
}

int optimalEnergy(const HPSequence& seq, int workers) {
  EnumerateOptions opts;
  opts.workers = workers;
  const EnumerationReport report = enumerateWalks(seq, opts);
  if (!report.min_energy) throw std::logic_error("optimalEnergy: no complete walks");
  return *report.min_energy;
}

void landscapeExport(const HPSequence& seq, const std::string& path, int max_n) {
  if (seq.size() > max_n) {
    throw std::invalid_argument("landscape: N = " + std::to_string(seq.size()) +
                                " exceeds the storage bound " + std::to_string(max_n));
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("landscape: cannot open '" + path + "'");
  EnumerationReport report;
  report.n = seq.size();
  EnumerateOptions opts;
  Enumerator en(seq);
  en.run(report, opts, [&](const std::string& actions, const std::vector<Coord>& coords,
                           int contacts) {
    nlohmann::json j;
    j["actions"] = actions;
    auto arr = nlohmann::json::array();
    for (Coord c : coords) arr.push_back({c.x, c.y});
    j["coords"] = std::move(arr);
    j["score"] = contacts;
    os << j.dump() << "\n";
  });
  os.flush();
  if (!os) throw std::runtime_error("landscape: write failed for '" + path + "'");
}

std::vector<CountCheck> verifyCounts(bool include_n24, int workers) {
  auto sequenceOf = [](int n) {
    // counts are sequence-independent; any H/P string of the length works
    return HPSequence::parse(std::string(static_cast<std::size_t>(n), 'P'));
  };
  std::vector<CountCheck> checks;
  const std::vector<std::pair<int, std::uint64_t>> cases =
      include_n24 ? std::vector<std::pair<int, std::uint64_t>>{{4, 5}, {20, 41889578ull},
                                                               {24, 2158326727ull}}
                  : std::vector<std::pair<int, std::uint64_t>>{{4, 5}, {20, 41889578ull}};
  for (auto [n, expected] : cases) {
    EnumerateOptions opts;
    opts.workers = workers;
    opts.max_feasible_n = 24;
    const EnumerationReport report = enumerateWalks(sequenceOf(n), opts);
    checks.push_back({n, expected, report.complete_count, report.complete_count == expected});
  }
  return checks;
}

}  // namespace hpfold
