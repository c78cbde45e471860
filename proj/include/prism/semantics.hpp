#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prism/chat.hpp"
#include "prism/embedding.hpp"
#include "prism/types.hpp"

namespace prism::semantics {

struct SemanticsConfig {
  double tau = 0.9;  // label-to-frame cosine threshold
  std::string dataset_description;
  bool near_dup_merge = false;
  double near_dup_cosine = 0.95;
  int max_inflight = 4;
  std::size_t max_label_chars = 120;
};

struct Caption {
  int frame_index = -1;
  std::string text;
  std::string backend_id;
  std::string prompt_hash;
};

// One label proposal before deduplication; verdict is "1", "0" or
// "unavailable" when validation could not be obtained.
struct LabelCandidate {
  std::string text;
  int source_frame = -1;
  bool validated = false;
  std::string verdict;
};

struct LabelAnchor {
  int label_id = -1;
  std::string text;
  std::vector<int> source_frames;
  bool validated = true;
  embedding::EmbeddingVector embedding;  // joint space
};

struct Assignment {
  int frame_index = -1;
  std::optional<int> best_label;
  double best_score = 0.0;
  // (label_id, score) for every anchor scoring >= tau, descending by score.
  std::vector<std::pair<int, double>> all_matches;
};

// Captions the frame with the frame-description template. Backend failure
// after retries drops the frame at "s2-caption" and returns nullopt; the
// pipeline carries on.
std::optional<Caption> caption_frame(chat::ChatBackend& backend, FrameRecord& frame,
                                     const std::string& dataset_description);

// Condenses a caption into a short candidate label.
std::string generate_label(chat::ChatBackend& backend, const Caption& caption);

// True iff the validator replies with the single token "1" (surrounding
// whitespace ignored, anything else is a rejection). Throws
// ValidationUnavailableError when the backend cannot answer at all.
bool validate_label(chat::ChatBackend& backend, const std::string& label);

// Deduplicates validated candidates (case-insensitive exact match, source
// frames unioned; optional near-duplicate merge by joint-space cosine) and
// embeds each anchor once.
std::vector<LabelAnchor> build_anchor_set(embedding::Backend& joint_backend,
                                          std::span<const LabelCandidate> candidates,
                                          const SemanticsConfig& config);

struct AssignResult {
  std::vector<Assignment> assignments;
  bool empty_anchors = false;
};

// Anchors each frame to its best-scoring label; frames whose best score is
// below tau are dropped at "s2-anchor". Writes stage_scores["s3"] (best score
// clamped to [0,1]) on every assigned frame. joint_embeddings runs parallel
// to frame_indices.
AssignResult assign_labels(std::vector<FrameRecord>& frames,
                           const std::vector<int>& frame_indices,
                           std::span<const embedding::EmbeddingVector> joint_embeddings,
                           std::span<const LabelAnchor> anchors, double tau);

void write_labels_json(const std::string& path, std::span<const LabelCandidate> candidates,
                       std::span<const LabelAnchor> anchors);
std::vector<LabelAnchor> read_labels_json(const std::string& path);

void write_assignments_json(const std::string& path, std::span<const Assignment> assignments,
                            bool empty_anchors);
struct AssignmentsFile {
  std::vector<Assignment> assignments;
  bool empty_anchors = false;
};
AssignmentsFile read_assignments_json(const std::string& path);

}  // namespace prism::semantics
