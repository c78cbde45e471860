#pragma once

#include <map>
#include <optional>
#include <string>

#include "prism/chat.hpp"
#include "prism/embedding.hpp"
#include "prism/ingest.hpp"
#include "prism/sampler.hpp"
#include "prism/semantics.hpp"
#include "prism/summarizer.hpp"

namespace prism::config {

// Flat key/value view of a TOML document: "section.sub.key" -> raw value.
// Supports the subset the pipeline uses: [table] headers (dotted allowed),
// string / number / boolean values, and # comments.
std::map<std::string, std::string> parse_toml(const std::string& content);

struct PipelineConfig {
  struct Ingest {
    double fps = 1.0;
    int resize = 0;
    int jpeg_quality = 90;
    std::string decoder_cmd;  // empty keeps the ingest default
  } ingest;

  sampler::SamplerConfig sampler;  // diff_threshold 30, batch_size 10, delta 0.30

  struct Changepoint {
    double penalty = 0.0;  // 0 = derive the default from the signal
  } changepoint;

  semantics::SemanticsConfig semantics;  // tau 0.9

  summarizer::SummarizerConfig summarizer;  // context_tokens 8000

  embedding::BackendConfig frame_embed;  // 512-d frame-feature space
  embedding::BackendConfig joint_embed;  // shared image/text space
  chat::ChatBackendConfig chat;

  struct Eval {
    std::string annotations;
    std::string references;
    std::string external_scores;
    bool judge = false;
  } eval;

  std::string cache_dir;  // empty = <run_dir>/cache
};

// Loads defaults, then the optional TOML file, then an optional backend
// profile ([profiles.<name>] replaces the [backends] tables), then
// PRISM_<SECTION>_<KEY> environment overrides.
PipelineConfig load_config(const std::string& toml_path, const std::string& backend_profile);

// Canonical JSON snapshot used in run manifests and for run ids.
std::string config_snapshot_json(const PipelineConfig& config);

}  // namespace prism::config
