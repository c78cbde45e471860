#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prism {

// Stage identifiers used in FrameRecord::stage_scores and dropped_at.
namespace stage {
inline constexpr const char* kDiff = "s1";          // consecutive-difference filter
inline constexpr const char* kAdaptive = "s2";      // adaptive density sampling
inline constexpr const char* kCaption = "s2-caption";
inline constexpr const char* kAnchor = "s2-anchor";
inline constexpr const char* kSimilarity = "s3";    // joint-space best similarity
inline constexpr const char* kWindow = "s4";        // window label weight
}  // namespace stage

// One sampled frame of the fixed-rate sequence.
struct FrameRecord {
  int index = 0;
  double timestamp_s = 0.0;
  std::string image_ref;
  std::map<std::string, double> stage_scores;
  std::optional<std::string> dropped_at;

  bool dropped() const { return dropped_at.has_value(); }
  // Marks the frame dropped at `stage_id`; a frame is only ever dropped once.
  void drop(const std::string& stage_id) {
    if (!dropped_at) dropped_at = stage_id;
  }
  double score(const std::string& stage_id) const {
    auto it = stage_scores.find(stage_id);
    return it == stage_scores.end() ? 0.0 : it->second;
  }
};

struct TranscriptSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

struct Transcript {
  std::vector<TranscriptSegment> segments;
  std::string full_text;

  bool empty() const { return segments.empty(); }
};

}  // namespace prism
