#include "prism/grouping.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prism/errors.hpp"
#include "prism/util.hpp"

namespace prism::grouping {

using nlohmann::json;

const char* pattern_name(LabelPattern p) {
  switch (p) {
    case LabelPattern::unanimous: return "unanimous";
    case LabelPattern::three_one: return "3:1";
    case LabelPattern::two_two: return "2:2";
    case LabelPattern::two_one_one: return "2:1:1";
    case LabelPattern::four_distinct: return "4-distinct";
    case LabelPattern::partial: return "partial";
  }
  return "partial";
}

LabelPattern parse_pattern(const std::string& name) {
  if (name == "unanimous") return LabelPattern::unanimous;
  if (name == "3:1") return LabelPattern::three_one;
  if (name == "2:2") return LabelPattern::two_two;
  if (name == "2:1:1") return LabelPattern::two_one_one;
  if (name == "4-distinct") return LabelPattern::four_distinct;
  if (name == "partial") return LabelPattern::partial;
  throw InvalidInputError("unknown label pattern: " + name);
}

namespace {

// Distinct labels of a window in first-appearance order with their counts.
struct LabelCounts {
  std::vector<std::string> labels;
  std::vector<int> counts;
  int max_count = 0;
  int distinct() const { return static_cast<int>(labels.size()); }
};

LabelCounts count_labels(std::span<const WindowInput> members) {
  LabelCounts out;
  for (const auto& m : members) {
    auto it = std::find(out.labels.begin(), out.labels.end(), m.label);
    if (it == out.labels.end()) {
      out.labels.push_back(m.label);
      out.counts.push_back(1);
    } else {
      ++out.counts[static_cast<std::size_t>(it - out.labels.begin())];
    }
  }
  for (int c : out.counts) out.max_count = std::max(out.max_count, c);
  return out;
}

LabelPattern classify_full(const LabelCounts& counts) {
  switch (counts.distinct()) {
    case 1: return LabelPattern::unanimous;
    case 2: return counts.max_count == 3 ? LabelPattern::three_one : LabelPattern::two_two;
    case 3: return LabelPattern::two_one_one;
    default: return LabelPattern::four_distinct;
  }
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += " + ";
    out += l;
  }
  return out;
}

std::string plurality_label(const LabelCounts& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.counts.size(); ++i) {
    if (counts.counts[i] > counts.counts[best]) best = i;
  }
  return counts.labels[best];
}

std::string main_label_for(std::span<const WindowInput> members, const LabelCounts& counts) {
  int n = static_cast<int>(members.size());
  if (counts.distinct() == 1) return counts.labels[0];
  if (counts.distinct() == n) return join_labels(counts.labels);  // all differ
  if (n == 4 && counts.distinct() == 2 && counts.max_count == 2) {
    return join_labels(counts.labels);  // 2:2 uses both
  }
  return plurality_label(counts);
}

}  // namespace

std::map<int, double> window_weights(std::span<const WindowInput> members) {
  if (members.empty()) throw InvalidInputError("window_weights: empty window");
  LabelCounts counts = count_labels(members);
  int n = static_cast<int>(members.size());

  // Weight for a member whose label occurs `c` times. The full-window table:
  // unanimous/all-distinct 0.25 each, 3:1 -> 0.75/0.25, 2:2 -> 0.5 each,
  // 2:1:1 -> 0.5/0.25. Partial windows reuse the rule that fits their split.
  auto weight_of = [&](int c) -> double {
    if (counts.distinct() == 1) return 0.25;                      // unanimous
    if (counts.distinct() == 2 && counts.max_count * 2 == n) return 0.5;  // even split (2:2)
    if (counts.distinct() == n) return 0.25;                      // all distinct
    if (counts.max_count * 2 > n) return c == counts.max_count ? 0.75 : 0.25;  // majority
    return c == counts.max_count ? 0.5 : 0.25;                    // plurality (2:1:1)
  };

  std::map<int, double> out;
  for (const auto& m : members) {
    auto it = std::find(counts.labels.begin(), counts.labels.end(), m.label);
    int c = counts.counts[static_cast<std::size_t>(it - counts.labels.begin())];
    out[m.frame_index] = weight_of(c);
  }
  return out;
}

std::vector<Window> make_windows(std::span<const WindowInput> anchored) {
  for (std::size_t i = 1; i < anchored.size(); ++i) {
    if (anchored[i].frame_index <= anchored[i - 1].frame_index) {
      throw InvalidInputError("make_windows: frames must be strictly ascending");
    }
  }
  std::vector<Window> out;
  for (std::size_t start = 0; start < anchored.size(); start += 4) {
    std::size_t len = std::min<std::size_t>(4, anchored.size() - start);
    std::span<const WindowInput> members = anchored.subspan(start, len);
    Window w;
    w.window_id = static_cast<int>(out.size());
    for (const auto& m : members) w.frame_indices.push_back(m.frame_index);
    LabelCounts counts = count_labels(members);
    w.pattern = len == 4 ? classify_full(counts) : LabelPattern::partial;
    w.main_label = main_label_for(members, counts);
    w.per_frame_weight = window_weights(members);
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

// Highest score slot a frame keeps given where it was dropped; later slots
// are forced to zero ("+0 for every stage after that").
int retained_slots(const FrameRecord& frame) {
  if (!frame.dropped()) return 4;
  const std::string& at = *frame.dropped_at;
  if (at == stage::kDiff) return 1;
  if (at == stage::kAdaptive || at == stage::kCaption) return 2;
  if (at == stage::kAnchor) return 3;
  return 4;
}

}  // namespace

std::vector<ImportanceScore> importance_scores(std::span<const FrameRecord> frames) {
  std::vector<ImportanceScore> out;
  out.reserve(frames.size());
  for (const auto& frame : frames) {
    ImportanceScore s;
    s.frame_index = frame.index;
    int keep = retained_slots(frame);
    s.s1 = frame.score(stage::kDiff);
    s.s2 = keep >= 2 ? frame.score(stage::kAdaptive) : 0.0;
    s.s3 = keep >= 3 ? frame.score(stage::kSimilarity) : 0.0;
    s.s4 = keep >= 4 ? frame.score(stage::kWindow) : 0.0;
    s.final_score = (s.s1 + s.s2 + s.s3 + s.s4) / 4.0;
    out.push_back(s);
  }
  return out;
}

void write_windows_json(const std::string& path, std::span<const Window> windows) {
  json arr = json::array();
  for (const auto& w : windows) {
    json weights = json::array();
    for (const auto& [frame, weight] : w.per_frame_weight) {
      weights.push_back({{"frame", frame}, {"weight", weight}});
    }
    arr.push_back({{"window_id", w.window_id},
                   {"frames", w.frame_indices},
                   {"pattern", pattern_name(w.pattern)},
                   {"main_label", w.main_label},
                   {"weights", weights}});
  }
  json doc = {{"windows", arr}};
  util::atomic_write_file(path, doc.dump(2) + "\n");
}

std::vector<Window> read_windows_json(const std::string& path) {
  json doc = json::parse(util::read_file(path));
  std::vector<Window> out;
  for (const auto& item : doc.at("windows")) {
    Window w;
    w.window_id = item.at("window_id").get<int>();
    w.frame_indices = item.at("frames").get<std::vector<int>>();
    w.pattern = parse_pattern(item.at("pattern").get<std::string>());
    w.main_label = item.at("main_label").get<std::string>();
    for (const auto& entry : item.at("weights")) {
      w.per_frame_weight[entry.at("frame").get<int>()] = entry.at("weight").get<double>();
    }
    out.push_back(std::move(w));
  }
  return out;
}

void write_scores_csv(const std::string& path, std::span<const FrameRecord> frames,
                      std::span<const ImportanceScore> scores) {
  if (frames.size() != scores.size()) {
    throw InvalidInputError("write_scores_csv: frames and scores differ in length");
  }
  std::string out = "frame_index,timestamp_s,s1,s2,s3,s4,final\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& s = scores[i];
    out += std::to_string(s.frame_index) + "," + util::fmt_double(frames[i].timestamp_s) + "," +
           util::fmt_double(s.s1) + "," + util::fmt_double(s.s2) + "," + util::fmt_double(s.s3) +
           "," + util::fmt_double(s.s4) + "," + util::fmt_double(s.final_score) + "\n";
  }
  util::atomic_write_file(path, out);
}

std::vector<double> read_scores_csv_final(const std::string& path) {
  std::istringstream in(util::read_file(path));
  std::string line;
  std::vector<double> out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (util::trim(line).empty()) continue;
    auto pos = line.rfind(',');
    if (pos == std::string::npos) throw ParseError("malformed scores.csv row: " + line, 0);
    out.push_back(std::stod(line.substr(pos + 1)));
  }
  return out;
}

}  // namespace prism::grouping
