#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prism/calllog.hpp"
#include "prism/types.hpp"

namespace prism::embedding {

// The pipeline keeps two disjoint vector spaces: a frame-feature space for
// motion analysis and a joint image/text space for label anchoring.
enum class Space { frame, joint };

const char* space_name(Space s);

struct EmbeddingVector {
  std::vector<float> values;
  double norm = 0.0;  // cached L2 norm of values
  Space space = Space::frame;

  std::size_t dim() const { return values.size(); }
};

// Validates finiteness and caches the norm.
EmbeddingVector make_vector(std::vector<float> values, Space space);

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b);

// .vec file layout: u32 little-endian dim, then dim float32 little-endian.
void write_vec_file(const std::string& path, const EmbeddingVector& v);
EmbeddingVector read_vec_file(const std::string& path, Space space);

struct BackendConfig {
  enum class Kind { http_service, local_model, mock };
  Kind kind = Kind::mock;
  std::string endpoint;       // http-service only
  std::string model_id = "mock";
  int dim = 512;
  std::uint64_t seed = 0;     // mock only
  std::string model_path;     // local-model only
  std::string alias_path;     // mock only: JSON {sha256-hex: token} grouping inputs
  int max_inflight = 8;
  int retry_attempts = 3;
  int retry_backoff_ms = 1000;
};

BackendConfig::Kind parse_backend_kind(const std::string& name);

class Backend {
 public:
  virtual ~Backend() = default;
  // Stable identifier used as the cache directory name.
  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual Space space() const = 0;
  virtual EmbeddingVector embed_bytes(const std::vector<std::uint8_t>& content) = 0;
  virtual EmbeddingVector embed_text(const std::string& text) = 0;
  virtual CallLog* call_log() { return nullptr; }
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config, Space space,
                                      CallLog* log = nullptr);

// Wraps a backend with an on-disk cache keyed by content hash:
//   <cache_dir>/emb/<backend-id>/<sha256>.vec
class CachedBackend : public Backend {
 public:
  CachedBackend(std::unique_ptr<Backend> inner, std::string cache_dir);

  std::string id() const override;
  int dim() const override;
  Space space() const override;
  EmbeddingVector embed_bytes(const std::vector<std::uint8_t>& content) override;
  EmbeddingVector embed_text(const std::string& text) override;
  CallLog* call_log() override;

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  EmbeddingVector cached(const std::string& key, const std::function<EmbeddingVector()>& compute);

  std::unique_ptr<Backend> inner_;
  std::string cache_dir_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

// Frame-space encoding of a frame still (reads image_ref).
EmbeddingVector embed_frame(Backend& frame_backend, const FrameRecord& frame);
// Joint-space encoding of label text.
EmbeddingVector embed_text(Backend& joint_backend, const std::string& text);
// Joint-space encoding of a frame still.
EmbeddingVector embed_image_joint(Backend& joint_backend, const FrameRecord& frame);

// Order-preserving batch embedding with bounded parallelism.
std::vector<EmbeddingVector> embed_frames(Backend& backend, std::span<const FrameRecord> frames,
                                          int max_inflight);

// Helper for deterministic mock vectors outside a backend instance (used by
// the python bindings and by tests).
EmbeddingVector mock_vector(std::uint64_t seed, int dim, Space space, const std::string& token);

// Writes a random linear-projection model usable by the local-model backend.
// feature_kind: 0 = 32x32 grayscale image features, 1 = hashed text features,
// 2 = both (joint space).
void write_random_linear_model(const std::string& path, std::uint64_t seed, int feature_kind,
                               int out_dim);

}  // namespace prism::embedding
