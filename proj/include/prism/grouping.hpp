#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "prism/types.hpp"

namespace prism::grouping {

enum class LabelPattern { unanimous, three_one, two_two, two_one_one, four_distinct, partial };

const char* pattern_name(LabelPattern p);
LabelPattern parse_pattern(const std::string& name);

// An anchored frame entering Stage 3: its index plus the label it anchored to.
struct WindowInput {
  int frame_index = -1;
  std::string label;
};

struct Window {
  int window_id = -1;
  std::vector<int> frame_indices;  // ascending, at most 4
  std::string main_label;
  LabelPattern pattern = LabelPattern::partial;
  std::map<int, double> per_frame_weight;  // exact quarters: 0.25 / 0.5 / 0.75
};

// Label-distribution weights for the members of one window. Weights come from
// a fixed table keyed by the count pattern; partial windows apply the same
// rules restricted to the present frames.
std::map<int, double> window_weights(std::span<const WindowInput> members);

// Tiles the anchored frames into consecutive non-overlapping groups of 4 (a
// trailing partial window of 1-3 frames is allowed) and derives each window's
// main label: plurality label normally, both labels joined by " + " on a 2:2
// split, all four joined when all differ.
std::vector<Window> make_windows(std::span<const WindowInput> anchored);

struct ImportanceScore {
  int frame_index = -1;
  double s1 = 0.0;  // globally normalized consecutive embedding diff
  double s2 = 0.0;  // within-batch renormalized diff
  double s3 = 0.0;  // best joint-space similarity, clamped to [0,1]
  double s4 = 0.0;  // window label weight
  double final_score = 0.0;
};

// Layered per-frame score: mean of the four stage components, where a frame
// dropped at stage k contributes exactly 0 for every stage after k. Reads
// stage_scores/dropped_at off the records, so stages must have run (or been
// reconstructed from manifests) first.
std::vector<ImportanceScore> importance_scores(std::span<const FrameRecord> frames);

void write_windows_json(const std::string& path, std::span<const Window> windows);
std::vector<Window> read_windows_json(const std::string& path);

void write_scores_csv(const std::string& path, std::span<const FrameRecord> frames,
                      std::span<const ImportanceScore> scores);
// Returns the `final` column of scores.csv in frame order.
std::vector<double> read_scores_csv_final(const std::string& path);

}  // namespace prism::grouping
