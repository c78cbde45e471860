#include "prism/summarizer.hpp"

#include <algorithm>
#include <iostream>

#include <nlohmann/json.hpp>

#include "prism/errors.hpp"
#include "prism/hash.hpp"
#include "prism/image.hpp"
#include "prism/prompts.hpp"
#include "prism/util.hpp"

namespace prism::summarizer {

using nlohmann::json;

int token_estimate(const std::string& text) {
  return static_cast<int>((text.size() + 3) / 4);
}

namespace {

const FrameRecord& find_frame(std::span<const FrameRecord> frames, int index) {
  if (index >= 0 && index < static_cast<int>(frames.size()) &&
      frames[static_cast<std::size_t>(index)].index == index) {
    return frames[static_cast<std::size_t>(index)];
  }
  for (const auto& f : frames) {
    if (f.index == index) return f;
  }
  throw InvalidInputError("window references unknown frame " + std::to_string(index));
}

}  // namespace

std::string compose_window_image(const grouping::Window& window,
                                 std::span<const FrameRecord> all_frames,
                                 const std::string& out_path, int tile_size, int jpeg_quality) {
  if (window.frame_indices.empty()) {
    throw InvalidInputError("compose_window_image: empty window");
  }
  std::vector<std::string> tiles(4);
  for (std::size_t i = 0; i < window.frame_indices.size() && i < 4; ++i) {
    tiles[i] = find_frame(all_frames, window.frame_indices[i]).image_ref;
  }
  image::compose_quadrants(tiles, out_path, tile_size, jpeg_quality);
  return out_path;
}

SummaryNode describe_window(chat::ChatBackend& backend, const grouping::Window& window,
                            const std::string& composite_path,
                            const std::string& dataset_description) {
  SummaryNode leaf;
  leaf.level = 0;
  leaf.window_begin = window.window_id;
  leaf.window_end = window.window_id + 1;

  chat::ChatRequest request;
  request.purpose = "window";
  request.prompt = prompts::render_window_description(window.main_label, dataset_description);
  request.image_paths = {composite_path};
  request.key_hint = hash::sha256_hex(util::read_file_bytes(composite_path));
  try {
    leaf.text = util::trim(backend.complete(request));
  } catch (const BackendError& e) {
    std::cerr << "[prism] window " << window.window_id << " description failed: " << e.what()
              << "\n";
    leaf.text = "[window " + std::to_string(window.window_id) + " unavailable]";
  }
  leaf.token_estimate = token_estimate(leaf.text);
  return leaf;
}

namespace {

void truncate_to_budget(SummaryNode& node, int budget_tokens) {
  if (node.token_estimate <= budget_tokens) return;
  std::cerr << "[prism] node " << node.node_id << " exceeds the context budget ("
            << node.token_estimate << " > " << budget_tokens << "); truncating\n";
  node.text.resize(static_cast<std::size_t>(budget_tokens) * 4);
  node.token_estimate = token_estimate(node.text);
}

}  // namespace

SummaryTree merge_tree(chat::ChatBackend& backend, std::vector<SummaryNode> leaves,
                       int context_budget_tokens, const std::string& dataset_description,
                       int max_inflight) {
  if (leaves.empty()) throw InvalidInputError("merge_tree: need at least one leaf");
  if (context_budget_tokens < 1) throw ConfigError("context budget must be positive");

  SummaryTree tree;
  tree.nodes.reserve(leaves.size() * 2);
  std::vector<int> current;
  for (auto& leaf : leaves) {
    leaf.node_id = static_cast<int>(tree.nodes.size());
    leaf.level = 0;
    truncate_to_budget(leaf, context_budget_tokens);
    current.push_back(leaf.node_id);
    tree.nodes.push_back(std::move(leaf));
  }

  int level = 1;
  while (current.size() > 1) {
    // Greedy left-to-right packing of consecutive nodes under the budget.
    std::vector<std::vector<int>> groups;
    std::vector<int> group;
    int group_tokens = 0;
    for (int id : current) {
      int tokens = tree.nodes[static_cast<std::size_t>(id)].token_estimate;
      if (!group.empty() && group_tokens + tokens > context_budget_tokens) {
        groups.push_back(group);
        group.clear();
        group_tokens = 0;
      }
      group.push_back(id);
      group_tokens += tokens;
    }
    if (!group.empty()) groups.push_back(group);

    bool any_merge = std::any_of(groups.begin(), groups.end(),
                                 [](const auto& g) { return g.size() > 1; });
    if (!any_merge) {
      // No adjacent pair fits the budget; pair anyway so the recursion
      // terminates, accepting oversized merge prompts.
      std::cerr << "[prism] merge level " << level
                << ": no adjacent nodes fit the budget together; forcing pairs\n";
      groups.clear();
      for (std::size_t i = 0; i < current.size(); i += 2) {
        std::vector<int> forced;
        forced.push_back(current[i]);
        if (i + 1 < current.size()) forced.push_back(current[i + 1]);
        groups.push_back(std::move(forced));
      }
    }

    // Reserve ids and spans first so merges of one level can run concurrently.
    std::vector<int> next;
    std::vector<int> merge_jobs;
    for (const auto& g : groups) {
      if (g.size() == 1) {
        next.push_back(g[0]);  // passes through unchanged, no backend call
        continue;
      }
      SummaryNode node;
      node.node_id = static_cast<int>(tree.nodes.size());
      node.level = level;
      node.children = g;
      node.window_begin = tree.nodes[static_cast<std::size_t>(g.front())].window_begin;
      node.window_end = tree.nodes[static_cast<std::size_t>(g.back())].window_end;
      next.push_back(node.node_id);
      merge_jobs.push_back(node.node_id);
      tree.nodes.push_back(std::move(node));
    }

    util::parallel_for(merge_jobs.size(), max_inflight, [&](std::size_t j) {
      SummaryNode& node = tree.nodes[static_cast<std::size_t>(merge_jobs[j])];
      std::string chunk;
      for (int child : node.children) {
        if (!chunk.empty()) chunk += "\n\n";
        chunk += tree.nodes[static_cast<std::size_t>(child)].text;
      }
      chat::ChatRequest request;
      request.purpose = "merge";
      request.prompt = prompts::render_recursive_merge(chunk, dataset_description);
      std::string text;
      try {
        text = util::trim(backend.complete(request));
      } catch (const BackendError& e) {
        std::cerr << "[prism] merge node " << node.node_id << " failed: " << e.what() << "\n";
        text = chunk;  // degrade to pass-through text
      }
      node.text = std::move(text);
      node.token_estimate = token_estimate(node.text);
    });
    for (int id : merge_jobs) {
      truncate_to_budget(tree.nodes[static_cast<std::size_t>(id)], context_budget_tokens);
    }
    current = std::move(next);
    ++level;
  }
  tree.root_id = current.front();
  return tree;
}

FinalSummary integrate_transcript(chat::ChatBackend& backend, const SummaryNode& root,
                                  const Transcript& transcript,
                                  const std::string& dataset_description) {
  FinalSummary out;
  chat::ChatRequest request;
  request.purpose = "final";
  if (transcript.empty()) {
    out.modality = "V";
    request.prompt = prompts::render_recursive_merge(root.text, dataset_description);
  } else {
    out.modality = "V+T";
    request.prompt = prompts::render_final_integration(root.text, transcript.full_text,
                                                       dataset_description);
  }
  try {
    out.text = util::trim(backend.complete(request));
  } catch (const BackendError& e) {
    std::cerr << "[prism] final integration failed, keeping merged summary: " << e.what() << "\n";
    out.text = root.text;
  }
  return out;
}

void write_tree_json(const std::string& path, const SummaryTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"level", n.level},
                     {"text", n.text},
                     {"token_estimate", n.token_estimate},
                     {"children", n.children},
                     {"window_begin", n.window_begin},
                     {"window_end", n.window_end}});
  }
  json doc = {{"nodes", nodes}, {"root_id", tree.root_id}};
  util::atomic_write_file(path, doc.dump(2) + "\n");
}

SummaryTree read_tree_json(const std::string& path) {
  json doc = json::parse(util::read_file(path));
  SummaryTree tree;
  tree.root_id = doc.at("root_id").get<int>();
  for (const auto& item : doc.at("nodes")) {
    SummaryNode n;
    n.node_id = item.at("node_id").get<int>();
    n.level = item.at("level").get<int>();
    n.text = item.at("text").get<std::string>();
    n.token_estimate = item.at("token_estimate").get<int>();
    n.children = item.at("children").get<std::vector<int>>();
    n.window_begin = item.at("window_begin").get<int>();
    n.window_end = item.at("window_end").get<int>();
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

}  // namespace prism::summarizer
