#pragma once

#include <span>
#include <vector>

#include "prism/embedding.hpp"
#include "prism/types.hpp"

namespace prism::sampler {

struct SamplerConfig {
  double diff_threshold = 30.0;  // on the normalized 0-100 difference scale
  int batch_size = 10;
  double delta = 0.30;
};

void validate(const SamplerConfig& config);

struct DiffFilterResult {
  std::vector<int> survivors;   // ascending frame indices; frame 0 always present
  std::vector<double> scores;   // per-frame normalized diff in [0,1]; frame 0 gets 0
};

// Pure core: consecutive-difference pre-filter over the embedding sequence.
// Frame i > 0 survives iff 100 * d_i / max_j d_j >= diff_threshold with
// d_i = ||e_i - e_{i-1}||. When every d_i is zero only frame 0 survives.
DiffFilterResult diff_filter_core(std::span<const embedding::EmbeddingVector> embeddings,
                                  double diff_threshold);

// FrameRecord-mutating wrapper: writes stage_scores["s1"] on every frame and
// marks non-survivors dropped_at="s1".
DiffFilterResult diff_filter(std::vector<FrameRecord>& frames,
                             std::span<const embedding::EmbeddingVector> embeddings,
                             double diff_threshold);

struct SegmentBatch {
  int segment = 0;                  // change-point segment ordinal
  std::vector<int> frame_indices;   // consecutive survivors, <= batch_size
  double median_distance = 0.0;     // med_s over all pairwise distances
  std::vector<int> retained;        // 1 or 2 of frame_indices
};

struct AdaptiveResult {
  std::vector<SegmentBatch> batches;
  std::vector<int> retained;            // ascending frame indices
  std::vector<double> scores;           // per-frame s2 (0 for non-survivors)
};

// Pure core: survivors are partitioned into change-point segments, chunked
// into consecutive batches of <= batch_size, and each batch keeps its medoid
// (med_s < delta) or medoid plus the frame farthest from it (med_s >= delta).
// Ties break toward the lower frame index. scores holds the within-batch
// max-renormalized consecutive diff; a batch whose diffs are all zero scores
// 1.0 for every member (which also covers singleton batches).
AdaptiveResult adaptive_sample_core(std::span<const embedding::EmbeddingVector> embeddings,
                                    const std::vector<int>& survivors,
                                    const std::vector<int>& changepoints,
                                    const SamplerConfig& config);

// Wrapper: writes stage_scores["s2"] on survivors and drops non-retained
// survivors at "s2".
AdaptiveResult adaptive_sample(std::vector<FrameRecord>& frames,
                               std::span<const embedding::EmbeddingVector> embeddings,
                               const std::vector<int>& survivors,
                               const std::vector<int>& changepoints, const SamplerConfig& config);

double reduction_report(int before, int after);

}  // namespace prism::sampler
