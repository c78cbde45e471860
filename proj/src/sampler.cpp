#include "prism/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prism/errors.hpp"

namespace prism::sampler {

using embedding::EmbeddingVector;
using embedding::l2_distance;

void validate(const SamplerConfig& config) {
  if (config.delta <= 0.0) throw ConfigError("sampler.delta must be > 0");
  if (config.batch_size < 2) throw ConfigError("sampler.batch_size must be >= 2");
  if (config.diff_threshold < 0.0 || config.diff_threshold > 100.0) {
    throw ConfigError("sampler.diff_threshold must be in [0, 100]");
  }
}

DiffFilterResult diff_filter_core(std::span<const EmbeddingVector> embeddings,
                                  double diff_threshold) {
  if (embeddings.empty()) throw InvalidInputError("diff_filter: empty frame sequence");
  std::size_t n = embeddings.size();
  std::vector<double> diffs(n, 0.0);
  double max_diff = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    diffs[i] = l2_distance(embeddings[i], embeddings[i - 1]);
    max_diff = std::max(max_diff, diffs[i]);
  }
  DiffFilterResult out;
  out.scores.assign(n, 0.0);
  out.survivors.push_back(0);
  for (std::size_t i = 1; i < n; ++i) {
    double normalized = max_diff > 0.0 ? diffs[i] / max_diff : 0.0;
    out.scores[i] = normalized;
    // max_diff == 0 means every d_i is zero: nothing beyond frame 0 survives.
    if (max_diff > 0.0 && 100.0 * normalized >= diff_threshold) {
      out.survivors.push_back(static_cast<int>(i));
    }
  }
  return out;
}

DiffFilterResult diff_filter(std::vector<FrameRecord>& frames,
                             std::span<const EmbeddingVector> embeddings, double diff_threshold) {
  if (frames.size() != embeddings.size()) {
    throw InvalidInputError("diff_filter: frames and embeddings length mismatch");
  }
  DiffFilterResult result = diff_filter_core(embeddings, diff_threshold);
  std::vector<bool> keep(frames.size(), false);
  for (int i : result.survivors) keep[static_cast<std::size_t>(i)] = true;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].stage_scores[stage::kDiff] = result.scores[i];
    if (!keep[i]) frames[i].drop(stage::kDiff);
  }
  return result;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t m = values.size();
  return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

// Medoid: minimizer of summed distance to the other members, lower index on
// ties. Positions are into `members`.
std::size_t medoid_position(std::span<const EmbeddingVector> embeddings,
                            const std::vector<int>& members) {
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      sum += l2_distance(embeddings[static_cast<std::size_t>(members[i])],
                         embeddings[static_cast<std::size_t>(members[j])]);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

}  // namespace

AdaptiveResult adaptive_sample_core(std::span<const EmbeddingVector> embeddings,
                                    const std::vector<int>& survivors,
                                    const std::vector<int>& changepoints,
                                    const SamplerConfig& config) {
  validate(config);
  std::size_t n = embeddings.size();
  for (int t : changepoints) {
    if (t <= 0 || t >= static_cast<int>(n)) {
      throw InvalidInputError("change point outside (0, n)");
    }
  }
  AdaptiveResult out;
  out.scores.assign(n, 0.0);

  // Global consecutive diffs; s2 re-normalizes these within each batch.
  std::vector<double> diffs(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) diffs[i] = l2_distance(embeddings[i], embeddings[i - 1]);

  // Split survivors at change points, then chunk into batches of <= s.
  std::size_t cp = 0;
  std::vector<std::pair<int, std::vector<int>>> chunks;  // (segment ordinal, members)
  std::vector<int> current;
  int segment = 0;
  auto flush = [&]() {
    if (!current.empty()) chunks.emplace_back(segment, current);
    current.clear();
  };
  for (int idx : survivors) {
    while (cp < changepoints.size() && idx >= changepoints[cp]) {
      flush();
      ++segment;
      ++cp;
    }
    current.push_back(idx);
    if (static_cast<int>(current.size()) == config.batch_size) flush();
  }
  flush();

  int batch_id = 0;
  for (auto& [seg, members] : chunks) {
    (void)batch_id;
    SegmentBatch batch;
    batch.segment = seg;
    batch.frame_indices = members;

    std::vector<double> pairwise;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        pairwise.push_back(l2_distance(embeddings[static_cast<std::size_t>(members[i])],
                                       embeddings[static_cast<std::size_t>(members[j])]));
      }
    }
    batch.median_distance = median(std::move(pairwise));

    std::size_t medoid = medoid_position(embeddings, members);
    batch.retained.push_back(members[medoid]);
    if (members.size() > 1 && batch.median_distance >= config.delta) {
      std::size_t farthest = medoid == 0 ? 1 : 0;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i == medoid) continue;
        double d = l2_distance(embeddings[static_cast<std::size_t>(members[i])],
                               embeddings[static_cast<std::size_t>(members[medoid])]);
        if (d > far_dist) {
          far_dist = d;
          farthest = i;
        }
      }
      batch.retained.push_back(members[farthest]);
      std::sort(batch.retained.begin(), batch.retained.end());
    }

    double batch_max = 0.0;
    for (int idx : members) batch_max = std::max(batch_max, diffs[static_cast<std::size_t>(idx)]);
    for (int idx : members) {
      out.scores[static_cast<std::size_t>(idx)] =
          batch_max > 0.0 ? diffs[static_cast<std::size_t>(idx)] / batch_max : 1.0;
    }

    out.retained.insert(out.retained.end(), batch.retained.begin(), batch.retained.end());
    out.batches.push_back(std::move(batch));
    ++batch_id;
  }
  std::sort(out.retained.begin(), out.retained.end());
  return out;
}

AdaptiveResult adaptive_sample(std::vector<FrameRecord>& frames,
                               std::span<const EmbeddingVector> embeddings,
                               const std::vector<int>& survivors,
                               const std::vector<int>& changepoints, const SamplerConfig& config) {
  AdaptiveResult result = adaptive_sample_core(embeddings, survivors, changepoints, config);
  std::vector<bool> kept(frames.size(), false);
  for (int idx : result.retained) kept[static_cast<std::size_t>(idx)] = true;
  for (int idx : survivors) {
    auto& frame = frames[static_cast<std::size_t>(idx)];
    frame.stage_scores[stage::kAdaptive] = result.scores[static_cast<std::size_t>(idx)];
    if (!kept[static_cast<std::size_t>(idx)]) frame.drop(stage::kAdaptive);
  }
  return result;
}

double reduction_report(int before, int after) {
  if (before <= 0) throw InvalidInputError("reduction_report: before must be positive");
  if (after < 0 || after > before) {
    throw InvalidInputError("reduction_report: need before >= after >= 0");
  }
  return static_cast<double>(after) / static_cast<double>(before);
}

}  // namespace prism::sampler
