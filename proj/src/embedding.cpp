#include "prism/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "prism/errors.hpp"
#include "prism/hash.hpp"
#include "prism/http.hpp"
#include "prism/util.hpp"

namespace prism::embedding {

namespace fs = std::filesystem;
using nlohmann::json;

const char* space_name(Space s) { return s == Space::frame ? "frame" : "joint"; }

EmbeddingVector make_vector(std::vector<float> values, Space space) {
  if (values.empty()) throw InvalidInputError("embedding vector must be non-empty");
  double sq = 0.0;
  for (float v : values) {
    if (!std::isfinite(v)) throw InvalidInputError("embedding vector contains non-finite value");
    sq += static_cast<double>(v) * static_cast<double>(v);
  }
  EmbeddingVector out;
  out.values = std::move(values);
  out.norm = std::sqrt(sq);
  out.space = space;
  return out;
}

static void check_compatible(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.space != b.space) {
    throw ConfigError(std::string("embedding space mismatch: ") + space_name(a.space) + " vs " +
                      space_name(b.space));
  }
  if (a.dim() != b.dim()) {
    throw ConfigError("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_compatible(a, b);
  if (a.norm <= 0.0 || b.norm <= 0.0) throw DegenerateVectorError("cosine of zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += static_cast<double>(a.values[i]) * static_cast<double>(b.values[i]);
  }
  return dot / (a.norm * b.norm);
}

double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_compatible(a, b);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

void write_vec_file(const std::string& path, const EmbeddingVector& v) {
  std::string payload;
  std::uint32_t dim = static_cast<std::uint32_t>(v.dim());
  payload.resize(4 + v.dim() * 4);
  std::memcpy(payload.data(), &dim, 4);
  std::memcpy(payload.data() + 4, v.values.data(), v.dim() * 4);
  util::atomic_write_file(path, payload);
}

EmbeddingVector read_vec_file(const std::string& path, Space space) {
  std::string payload = util::read_file(path);
  if (payload.size() < 4) throw IoError("truncated vec file: " + path);
  std::uint32_t dim = 0;
  std::memcpy(&dim, payload.data(), 4);
  if (payload.size() != 4 + static_cast<std::size_t>(dim) * 4) {
    throw IoError("vec file size mismatch: " + path);
  }
  std::vector<float> values(dim);
  std::memcpy(values.data(), payload.data() + 4, static_cast<std::size_t>(dim) * 4);
  return make_vector(std::move(values), space);
}

BackendConfig::Kind parse_backend_kind(const std::string& name) {
  if (name == "http-service" || name == "http") return BackendConfig::Kind::http_service;
  if (name == "local-model" || name == "local") return BackendConfig::Kind::local_model;
  if (name == "mock") return BackendConfig::Kind::mock;
  throw ConfigError("unknown embedding backend kind: " + name);
}

// ---------------------------------------------------------------------------
// Deterministic mock: hash the input into a pseudo-random unit vector. The
// construction uses only integer ops plus one normalization pass, so repeated
// runs across processes and platforms produce byte-identical float32 vectors.

EmbeddingVector mock_vector(std::uint64_t seed, int dim, Space space, const std::string& token) {
  std::string stream = "prism-mock\0";
  for (int i = 0; i < 8; ++i) stream.push_back(static_cast<char>((seed >> (8 * i)) & 0xff));
  stream.push_back(space == Space::frame ? 'F' : 'J');
  stream += token;
  hash::Digest base = hash::sha256(stream);

  std::vector<double> raw(static_cast<std::size_t>(dim));
  std::size_t produced = 0;
  std::uint32_t counter = 0;
  while (produced < raw.size()) {
    std::string block(reinterpret_cast<const char*>(base.data()), base.size());
    for (int i = 0; i < 4; ++i) block.push_back(static_cast<char>((counter >> (8 * i)) & 0xff));
    hash::Digest h = hash::sha256(block);
    for (int w = 0; w < 4 && produced < raw.size(); ++w) {
      std::uint64_t u = 0;
      for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(h[w * 8 + b]) << (8 * b);
      double unit = static_cast<double>(u >> 11) * (1.0 / 4503599627370496.0);  // [0,1)
      raw[produced++] = 2.0 * unit - 1.0;
    }
    ++counter;
  }
  double sq = 0.0;
  for (double v : raw) sq += v * v;
  double norm = std::sqrt(sq);
  if (norm == 0.0) {
    raw[0] = 1.0;
    norm = 1.0;
  }
  std::vector<float> values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = static_cast<float>(raw[i] / norm);
  return make_vector(std::move(values), space);
}

namespace {

std::string sanitize_id(std::string s) {
  for (char& c : s) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return s;
}

class MockBackend : public Backend {
 public:
  MockBackend(const BackendConfig& config, Space space, CallLog* log)
      : config_(config), space_(space), log_(log) {
    if (!config.alias_path.empty()) {
      json j = json::parse(util::read_file(config.alias_path));
      for (auto& [k, v] : j.items()) aliases_[k] = v.get<std::string>();
    }
    id_ = sanitize_id("mock-" + config.model_id + "-d" + std::to_string(config.dim) + "-s" +
                      std::to_string(config.seed));
  }

  std::string id() const override { return id_; }
  int dim() const override { return config_.dim; }
  Space space() const override { return space_; }
  CallLog* call_log() override { return log_; }

  EmbeddingVector embed_bytes(const std::vector<std::uint8_t>& content) override {
    return from_token(hash::sha256_hex(content));
  }

  EmbeddingVector embed_text(const std::string& text) override {
    return from_token(hash::sha256_hex(text));
  }

 private:
  EmbeddingVector from_token(const std::string& content_hash) {
    auto it = aliases_.find(content_hash);
    const std::string& token = it == aliases_.end() ? content_hash : it->second;
    EmbeddingVector v = mock_vector(config_.seed, config_.dim, space_, token);
    if (log_ != nullptr) {
      log_->record(std::string("embed-") + space_name(space_), content_hash,
                   hash::sha256_hex(token));
    }
    return v;
  }

  BackendConfig config_;
  Space space_;
  CallLog* log_;
  std::string id_;
  std::map<std::string, std::string> aliases_;
};

class HttpBackend : public Backend {
 public:
  HttpBackend(const BackendConfig& config, Space space, CallLog* log)
      : config_(config), space_(space), log_(log) {
    if (config.endpoint.empty()) throw ConfigError("http-service embedding backend needs endpoint");
    id_ = sanitize_id("http-" + config.model_id + "-d" + std::to_string(config.dim));
  }

  std::string id() const override { return id_; }
  int dim() const override { return config_.dim; }
  Space space() const override { return space_; }
  CallLog* call_log() override { return log_; }

  EmbeddingVector embed_bytes(const std::vector<std::uint8_t>& content) override {
    return request(util::base64_encode(content.data(), content.size()), "image");
  }

  EmbeddingVector embed_text(const std::string& text) override { return request(text, "text"); }

 private:
  EmbeddingVector request(const std::string& input, const std::string& modality) {
    json body = {{"model", config_.model_id}, {"input", json::array({input})}, {"modality", modality}};
    std::string payload = body.dump();
    std::string response = http::post_json_with_retry(config_.endpoint, payload,
                                                      config_.retry_attempts,
                                                      config_.retry_backoff_ms);
    if (log_ != nullptr) {
      log_->record(std::string("embed-") + space_name(space_), hash::sha256_hex(payload),
                   hash::sha256_hex(response));
    }
    json j = json::parse(response, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || !j["data"].is_array() || j["data"].empty()) {
      throw BackendError("malformed embedding response from " + config_.endpoint,
                         /*retryable=*/false);
    }
    std::vector<float> values;
    for (const auto& x : j["data"][0]["embedding"]) values.push_back(x.get<float>());
    if (static_cast<int>(values.size()) != config_.dim) {
      throw ConfigError("embedding backend returned dim " + std::to_string(values.size()) +
                        ", expected " + std::to_string(config_.dim));
    }
    return make_vector(std::move(values), space_);
  }

  BackendConfig config_;
  Space space_;
  CallLog* log_;
  std::string id_;
};

// Linear projection model: featurize the input to a fixed-width vector, then
// multiply by a weight matrix loaded from disk and L2-normalize.
constexpr std::uint32_t kLinearInputDim = 1025;  // 1024 features + bias

class LocalModelBackend : public Backend {
 public:
  LocalModelBackend(const BackendConfig& config, Space space, CallLog* log)
      : config_(config), space_(space), log_(log) {
    if (config.model_path.empty()) throw ConfigError("local-model backend needs model_path");
    load(config.model_path);
    if (out_dim_ != static_cast<std::uint32_t>(config.dim)) {
      throw ConfigError("local model dim " + std::to_string(out_dim_) + " != configured dim " +
                        std::to_string(config.dim));
    }
    id_ = sanitize_id("local-" + config_.model_id + "-d" + std::to_string(config.dim));
  }

  std::string id() const override { return id_; }
  int dim() const override { return static_cast<int>(out_dim_); }
  Space space() const override { return space_; }
  CallLog* call_log() override { return log_; }

  EmbeddingVector embed_bytes(const std::vector<std::uint8_t>& content) override {
    if (feature_kind_ == 1) throw ConfigError("text-only local model cannot embed images");
    cv::Mat raw(1, static_cast<int>(content.size()), CV_8UC1,
                const_cast<std::uint8_t*>(content.data()));
    cv::Mat img = cv::imdecode(raw, cv::IMREAD_GRAYSCALE);
    if (img.empty()) throw InvalidInputError("local model: undecodable image bytes");
    cv::Mat small;
    cv::resize(img, small, cv::Size(32, 32), 0, 0, cv::INTER_AREA);
    std::vector<double> x(kLinearInputDim, 0.0);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) x[r * 32 + c] = small.at<std::uint8_t>(r, c) / 255.0;
    }
    x[kLinearInputDim - 1] = 1.0;
    return project(x, hash::sha256_hex(content));
  }

  EmbeddingVector embed_text(const std::string& text) override {
    if (feature_kind_ == 0) throw ConfigError("image-only local model cannot embed text");
    std::vector<double> x(kLinearInputDim, 0.0);
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
      std::uint32_t h = 2166136261u;
      for (std::size_t k = i; k < i + 3; ++k) {
        h ^= static_cast<std::uint8_t>(text[k]);
        h *= 16777619u;
      }
      x[h % 1024] += 1.0;
    }
    x[kLinearInputDim - 1] = 1.0;
    return project(x, hash::sha256_hex(text));
  }

 private:
  void load(const std::string& path) {
    std::string bytes = util::read_file(path);
    if (bytes.size() < 18 || bytes.compare(0, 4, "PRLM") != 0) {
      throw ConfigError("not a linear model file: " + path);
    }
    std::uint32_t version;
    std::memcpy(&version, bytes.data() + 4, 4);
    if (version != 1) throw ConfigError("unsupported linear model version");
    feature_kind_ = static_cast<std::uint8_t>(bytes[8]);
    std::uint32_t in_dim;
    std::memcpy(&in_dim, bytes.data() + 9, 4);
    std::memcpy(&out_dim_, bytes.data() + 13, 4);
    if (in_dim != kLinearInputDim) throw ConfigError("unexpected linear model input dim");
    std::size_t need = 17 + static_cast<std::size_t>(in_dim) * out_dim_ * 4;
    if (bytes.size() != need) throw ConfigError("linear model file size mismatch");
    weights_.resize(static_cast<std::size_t>(in_dim) * out_dim_);
    std::memcpy(weights_.data(), bytes.data() + 17, weights_.size() * 4);
  }

  EmbeddingVector project(const std::vector<double>& x, const std::string& content_hash) {
    std::vector<double> y(out_dim_, 0.0);
    for (std::uint32_t r = 0; r < out_dim_; ++r) {
      const float* row = weights_.data() + static_cast<std::size_t>(r) * kLinearInputDim;
      double acc = 0.0;
      for (std::uint32_t c = 0; c < kLinearInputDim; ++c) acc += row[c] * x[c];
      y[r] = acc;
    }
    double sq = 0.0;
    for (double v : y) sq += v * v;
    double norm = std::sqrt(sq);
    if (norm == 0.0) throw DegenerateVectorError("local model produced a zero vector");
    std::vector<float> values(out_dim_);
    for (std::uint32_t i = 0; i < out_dim_; ++i) values[i] = static_cast<float>(y[i] / norm);
    if (log_ != nullptr) {
      log_->record(std::string("embed-") + space_name(space_), content_hash, "local");
    }
    return make_vector(std::move(values), space_);
  }

  BackendConfig config_;
  Space space_;
  CallLog* log_;
  std::string id_;
  std::uint8_t feature_kind_ = 2;
  std::uint32_t out_dim_ = 0;
  std::vector<float> weights_;
};

}  // namespace

void write_random_linear_model(const std::string& path, std::uint64_t seed, int feature_kind,
                               int out_dim) {
  std::string payload = "PRLM";
  std::uint32_t version = 1;
  payload.append(reinterpret_cast<const char*>(&version), 4);
  payload.push_back(static_cast<char>(feature_kind));
  std::uint32_t in_dim = kLinearInputDim;
  std::uint32_t od = static_cast<std::uint32_t>(out_dim);
  payload.append(reinterpret_cast<const char*>(&in_dim), 4);
  payload.append(reinterpret_cast<const char*>(&od), 4);
  // Reuse the mock generator for deterministic weight rows.
  for (int r = 0; r < out_dim; ++r) {
    EmbeddingVector row = mock_vector(seed, static_cast<int>(kLinearInputDim), Space::frame,
                                      "w" + std::to_string(r));
    payload.append(reinterpret_cast<const char*>(row.values.data()), kLinearInputDim * 4);
  }
  util::atomic_write_file(path, payload);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, Space space, CallLog* log) {
  if (config.dim <= 0) throw ConfigError("embedding dim must be positive");
  switch (config.kind) {
    case BackendConfig::Kind::mock:
      return std::make_unique<MockBackend>(config, space, log);
    case BackendConfig::Kind::http_service:
      return std::make_unique<HttpBackend>(config, space, log);
    case BackendConfig::Kind::local_model:
      return std::make_unique<LocalModelBackend>(config, space, log);
  }
  throw ConfigError("unreachable backend kind");
}

CachedBackend::CachedBackend(std::unique_ptr<Backend> inner, std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {}

std::string CachedBackend::id() const { return inner_->id(); }
int CachedBackend::dim() const { return inner_->dim(); }
Space CachedBackend::space() const { return inner_->space(); }
CallLog* CachedBackend::call_log() { return inner_->call_log(); }

EmbeddingVector CachedBackend::cached(const std::string& key,
                                      const std::function<EmbeddingVector()>& compute) {
  fs::path dir = fs::path(cache_dir_) / "emb" / inner_->id();
  fs::path file = dir / (key + ".vec");
  if (fs::exists(file)) {
    ++hits_;
    return read_vec_file(file.string(), inner_->space());
  }
  EmbeddingVector v = compute();
  ++misses_;
  write_vec_file(file.string(), v);
  return v;
}

EmbeddingVector CachedBackend::embed_bytes(const std::vector<std::uint8_t>& content) {
  return cached(hash::sha256_hex(content), [&] { return inner_->embed_bytes(content); });
}

EmbeddingVector CachedBackend::embed_text(const std::string& text) {
  return cached(hash::sha256_hex("txt\n" + text), [&] { return inner_->embed_text(text); });
}

EmbeddingVector embed_frame(Backend& frame_backend, const FrameRecord& frame) {
  if (frame_backend.space() != Space::frame) {
    throw ConfigError("embed_frame requires a frame-space backend");
  }
  return frame_backend.embed_bytes(util::read_file_bytes(frame.image_ref));
}

EmbeddingVector embed_text(Backend& joint_backend, const std::string& text) {
  if (joint_backend.space() != Space::joint) {
    throw ConfigError("embed_text requires a joint-space backend");
  }
  if (text.empty()) throw InvalidInputError("embed_text: empty text");
  return joint_backend.embed_text(text);
}

EmbeddingVector embed_image_joint(Backend& joint_backend, const FrameRecord& frame) {
  if (joint_backend.space() != Space::joint) {
    throw ConfigError("embed_image_joint requires a joint-space backend");
  }
  return joint_backend.embed_bytes(util::read_file_bytes(frame.image_ref));
}

std::vector<EmbeddingVector> embed_frames(Backend& backend, std::span<const FrameRecord> frames,
                                          int max_inflight) {
  std::vector<EmbeddingVector> out(frames.size());
  util::parallel_for(frames.size(), max_inflight, [&](std::size_t i) {
    out[i] = backend.embed_bytes(util::read_file_bytes(frames[i].image_ref));
  });
  return out;
}

}  // namespace prism::embedding
