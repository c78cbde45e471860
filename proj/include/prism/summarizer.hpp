#pragma once

#include <span>
#include <string>
#include <vector>

#include "prism/chat.hpp"
#include "prism/grouping.hpp"
#include "prism/types.hpp"

namespace prism::summarizer {

struct SummarizerConfig {
  int context_tokens = 8000;
  int tile_size = 512;
  int jpeg_quality = 90;
  int max_inflight = 4;
};

struct SummaryNode {
  int node_id = -1;
  int level = 0;  // 0 = leaf
  std::string text;
  int token_estimate = 0;
  std::vector<int> children;  // node ids, empty for leaves
  // Source window span [window_begin, window_end); an internal node's span is
  // the concatenation of its children's spans in order.
  int window_begin = 0;
  int window_end = 0;
};

struct SummaryTree {
  std::vector<SummaryNode> nodes;  // indexed by node_id
  int root_id = -1;

  const SummaryNode& root() const { return nodes.at(static_cast<std::size_t>(root_id)); }
};

// ceil(bytes / 4); the conservative model-agnostic context estimate.
int token_estimate(const std::string& text);

// Renders the window's frames into a 2x2 quadrant composite (top-left =
// frame 1, top-right = frame 2, bottom-left = frame 3, bottom-right =
// frame 4; absent frames become black quadrants) and returns out_path.
std::string compose_window_image(const grouping::Window& window,
                                 std::span<const FrameRecord> all_frames,
                                 const std::string& out_path, int tile_size = 512,
                                 int jpeg_quality = 90);

// Describes one composite through the chat backend. Backend failure after
// retries yields a placeholder leaf "[window N unavailable]" so the run can
// continue.
SummaryNode describe_window(chat::ChatBackend& backend, const grouping::Window& window,
                            const std::string& composite_path,
                            const std::string& dataset_description);

// Packs consecutive nodes into groups whose combined token estimate fits the
// budget, merges each group through the recursive-summarization template, and
// recurses level by level until a single root remains. A single leaf is
// returned unchanged with zero backend calls; the backend is invoked exactly
// once per internal node.
SummaryTree merge_tree(chat::ChatBackend& backend, std::vector<SummaryNode> leaves,
                       int context_budget_tokens, const std::string& dataset_description,
                       int max_inflight = 4);

struct FinalSummary {
  std::string text;
  std::string modality;  // "V" or "V+T"
};

// V+T mode folds the transcript in through the final-integration template;
// with an empty transcript the integration step is skipped and the root gets
// one more recursive-merge pass instead.
FinalSummary integrate_transcript(chat::ChatBackend& backend, const SummaryNode& root,
                                  const Transcript& transcript,
                                  const std::string& dataset_description);

void write_tree_json(const std::string& path, const SummaryTree& tree);
SummaryTree read_tree_json(const std::string& path);

}  // namespace prism::summarizer
