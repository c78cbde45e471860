#include "prism/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "prism/errors.hpp"
#include "prism/hash.hpp"
#include "prism/prompts.hpp"
#include "prism/util.hpp"

namespace prism::semantics {

using nlohmann::json;

std::optional<Caption> caption_frame(chat::ChatBackend& backend, FrameRecord& frame,
                                     const std::string& dataset_description) {
  std::string prompt = prompts::render_frame_description(dataset_description);
  chat::ChatRequest request;
  request.purpose = "caption";
  request.prompt = prompt;
  request.image_paths = {frame.image_ref};
  request.key_hint = hash::sha256_hex(util::read_file_bytes(frame.image_ref));
  try {
    std::string text = util::trim(backend.complete(request));
    if (text.empty()) throw BackendError("empty caption", /*retryable=*/false);
    Caption caption;
    caption.frame_index = frame.index;
    caption.text = text;
    caption.backend_id = backend.id();
    caption.prompt_hash = chat::prompt_hash(prompt);
    return caption;
  } catch (const BackendError& e) {
    std::cerr << "[prism] caption failed for frame " << frame.index << ": " << e.what() << "\n";
    frame.drop(stage::kCaption);
    return std::nullopt;
  }
}

std::string generate_label(chat::ChatBackend& backend, const Caption& caption) {
  if (caption.text.empty()) throw InvalidInputError("generate_label: empty caption");
  chat::ChatRequest request;
  request.purpose = "label";
  request.prompt = prompts::render_label_generation(caption.text);
  request.key_hint = caption.text;
  return util::trim(backend.complete(request));
}

bool validate_label(chat::ChatBackend& backend, const std::string& label) {
  if (label.empty()) throw InvalidInputError("validate_label: empty label");
  chat::ChatRequest request;
  request.purpose = "validate";
  request.prompt = prompts::render_label_validation(label);
  request.key_hint = label;
  std::string reply;
  try {
    reply = backend.complete(request);
  } catch (const BackendError& e) {
    throw ValidationUnavailableError(std::string("label validation unavailable: ") + e.what());
  }
  // Strict parse: exactly "1" once surrounding whitespace is stripped. "1.",
  // "yes", etc. all count as rejections.
  return util::trim(reply) == "1";
}

std::vector<LabelAnchor> build_anchor_set(embedding::Backend& joint_backend,
                                          std::span<const LabelCandidate> candidates,
                                          const SemanticsConfig& config) {
  std::vector<LabelAnchor> anchors;
  std::map<std::string, std::size_t> by_folded_text;
  for (const auto& candidate : candidates) {
    if (!candidate.validated) continue;
    std::string text = util::trim(candidate.text);
    if (text.empty()) continue;
    if (text.size() > config.max_label_chars) text = text.substr(0, config.max_label_chars);
    std::string folded = util::to_lower(text);
    auto it = by_folded_text.find(folded);
    if (it != by_folded_text.end()) {
      anchors[it->second].source_frames.push_back(candidate.source_frame);
      continue;
    }
    LabelAnchor anchor;
    anchor.text = text;
    anchor.source_frames = {candidate.source_frame};
    by_folded_text.emplace(folded, anchors.size());
    anchors.push_back(std::move(anchor));
  }

  for (auto& anchor : anchors) {
    anchor.embedding = embedding::embed_text(joint_backend, anchor.text);
  }

  if (config.near_dup_merge && anchors.size() > 1) {
    std::vector<LabelAnchor> merged;
    for (auto& anchor : anchors) {
      bool absorbed = false;
      for (auto& kept : merged) {
        if (embedding::cosine_similarity(kept.embedding, anchor.embedding) >=
            config.near_dup_cosine) {
          kept.source_frames.insert(kept.source_frames.end(), anchor.source_frames.begin(),
                                    anchor.source_frames.end());
          absorbed = true;
          break;
        }
      }
      if (!absorbed) merged.push_back(std::move(anchor));
    }
    anchors = std::move(merged);
  }

  for (std::size_t i = 0; i < anchors.size(); ++i) {
    anchors[i].label_id = static_cast<int>(i);
    std::sort(anchors[i].source_frames.begin(), anchors[i].source_frames.end());
    anchors[i].source_frames.erase(
        std::unique(anchors[i].source_frames.begin(), anchors[i].source_frames.end()),
        anchors[i].source_frames.end());
  }
  return anchors;
}

AssignResult assign_labels(std::vector<FrameRecord>& frames,
                           const std::vector<int>& frame_indices,
                           std::span<const embedding::EmbeddingVector> joint_embeddings,
                           std::span<const LabelAnchor> anchors, double tau) {
  if (frame_indices.size() != joint_embeddings.size()) {
    throw InvalidInputError("assign_labels: embeddings do not align with frames");
  }
  AssignResult result;
  result.empty_anchors = anchors.empty();
  for (std::size_t i = 0; i < frame_indices.size(); ++i) {
    FrameRecord& frame = frames[static_cast<std::size_t>(frame_indices[i])];
    Assignment assignment;
    assignment.frame_index = frame.index;
    if (anchors.empty()) {
      frame.stage_scores[stage::kSimilarity] = 0.0;
      frame.drop(stage::kAnchor);
      result.assignments.push_back(std::move(assignment));
      continue;
    }
    // Best score over all anchors, independent of tau; ties keep the lower id.
    double best = -2.0;
    int best_id = -1;
    for (const auto& anchor : anchors) {
      double score = embedding::cosine_similarity(joint_embeddings[i], anchor.embedding);
      if (score > best) {
        best = score;
        best_id = anchor.label_id;
      }
      if (score >= tau) assignment.all_matches.emplace_back(anchor.label_id, score);
    }
    assignment.best_score = best;
    std::sort(assignment.all_matches.begin(), assignment.all_matches.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    frame.stage_scores[stage::kSimilarity] = std::clamp(best, 0.0, 1.0);
    if (best >= tau) {
      assignment.best_label = best_id;
    } else {
      frame.drop(stage::kAnchor);
    }
    result.assignments.push_back(std::move(assignment));
  }
  return result;
}

void write_labels_json(const std::string& path, std::span<const LabelCandidate> candidates,
                       std::span<const LabelAnchor> anchors) {
  json candidate_arr = json::array();
  for (const auto& c : candidates) {
    candidate_arr.push_back({{"text", c.text},
                             {"source_frame", c.source_frame},
                             {"validated", c.validated},
                             {"verdict", c.verdict}});
  }
  json anchor_arr = json::array();
  for (const auto& a : anchors) {
    anchor_arr.push_back({{"label_id", a.label_id},
                          {"text", a.text},
                          {"source_frames", a.source_frames},
                          {"validated", a.validated}});
  }
  json doc = {{"candidates", candidate_arr}, {"anchors", anchor_arr}};
  util::atomic_write_file(path, doc.dump(2) + "\n");
}

std::vector<LabelAnchor> read_labels_json(const std::string& path) {
  json doc = json::parse(util::read_file(path));
  std::vector<LabelAnchor> out;
  for (const auto& item : doc.at("anchors")) {
    LabelAnchor anchor;
    anchor.label_id = item.at("label_id").get<int>();
    anchor.text = item.at("text").get<std::string>();
    anchor.source_frames = item.at("source_frames").get<std::vector<int>>();
    anchor.validated = item.at("validated").get<bool>();
    out.push_back(std::move(anchor));
  }
  return out;
}

void write_assignments_json(const std::string& path, std::span<const Assignment> assignments,
                            bool empty_anchors) {
  json arr = json::array();
  for (const auto& a : assignments) {
    json matches = json::array();
    for (const auto& [id, score] : a.all_matches) {
      matches.push_back({{"label_id", id}, {"score", score}});
    }
    json entry = {{"frame_index", a.frame_index},
                  {"best_score", a.best_score},
                  {"matches", matches}};
    if (a.best_label.has_value()) {
      entry["best_label"] = *a.best_label;
    } else {
      entry["best_label"] = nullptr;
    }
    arr.push_back(entry);
  }
  json doc = {{"assignments", arr}, {"status", empty_anchors ? "EmptyAnchors" : "ok"}};
  util::atomic_write_file(path, doc.dump(2) + "\n");
}

AssignmentsFile read_assignments_json(const std::string& path) {
  json doc = json::parse(util::read_file(path));
  AssignmentsFile out;
  out.empty_anchors = doc.at("status").get<std::string>() == "EmptyAnchors";
  for (const auto& item : doc.at("assignments")) {
    Assignment a;
    a.frame_index = item.at("frame_index").get<int>();
    a.best_score = item.at("best_score").get<double>();
    if (!item.at("best_label").is_null()) a.best_label = item.at("best_label").get<int>();
    for (const auto& m : item.at("matches")) {
      a.all_matches.emplace_back(m.at("label_id").get<int>(), m.at("score").get<double>());
    }
    out.assignments.push_back(std::move(a));
  }
  return out;
}

}  // namespace prism::semantics
