#include "prism/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prism/errors.hpp"

namespace prism::changepoint {

Signal Signal::from_embeddings(std::span<const embedding::EmbeddingVector> points) {
  Signal s;
  s.n = points.size();
  s.dim = points.empty() ? 0 : points[0].dim();
  s.data.reserve(s.n * s.dim);
  for (const auto& p : points) {
    if (p.dim() != s.dim) throw InvalidInputError("signal points must share dimension");
    for (float v : p.values) s.data.push_back(static_cast<double>(v));
  }
  return s;
}

Signal Signal::from_rows(const std::vector<std::vector<double>>& rows) {
  Signal s;
  s.n = rows.size();
  s.dim = rows.empty() ? 0 : rows[0].size();
  s.data.reserve(s.n * s.dim);
  for (const auto& r : rows) {
    if (r.size() != s.dim) throw InvalidInputError("signal rows must share dimension");
    s.data.insert(s.data.end(), r.begin(), r.end());
  }
  return s;
}

SegmentCostTable::SegmentCostTable(const Signal& signal) : n_(signal.n), dim_(signal.dim) {
  prefix_.assign((n_ + 1) * dim_, 0.0);
  prefix_sq_.assign(n_ + 1, 0.0);
  std::vector<double> comp(dim_, 0.0);  // Kahan compensation per dimension
  double comp_sq = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* x = signal.row(i);
    double* prev = prefix_.data() + i * dim_;
    double* cur = prefix_.data() + (i + 1) * dim_;
    for (std::size_t d = 0; d < dim_; ++d) {
      double y = x[d] - comp[d];
      double t = prev[d] + y;
      comp[d] = (t - prev[d]) - y;
      cur[d] = t;
    }
    double sq = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) sq += x[d] * x[d];
    double y = sq - comp_sq;
    double t = prefix_sq_[i] + y;
    comp_sq = (t - prefix_sq_[i]) - y;
    prefix_sq_[i + 1] = t;
  }
}

double SegmentCostTable::cost(int a, int b) const {
  if (a < 0 || b > static_cast<int>(n_) || a >= b) {
    throw InvalidRangeError("segment_cost range [" + std::to_string(a) + ", " + std::to_string(b) +
                            ") invalid for n=" + std::to_string(n_));
  }
  double len = static_cast<double>(b - a);
  const double* pa = prefix_.data() + static_cast<std::size_t>(a) * dim_;
  const double* pb = prefix_.data() + static_cast<std::size_t>(b) * dim_;
  double sum_norm_sq = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double s = pb[d] - pa[d];
    sum_norm_sq += s * s;
  }
  double cost = (prefix_sq_[b] - prefix_sq_[a]) - sum_norm_sq / len;
  return cost < 0.0 ? 0.0 : cost;  // clamp the tiny negatives cancellation can leave
}

double segment_cost(const Signal& signal, int a, int b) {
  return SegmentCostTable(signal).cost(a, b);
}

namespace {

// Slack applied to the pruning inequality so borderline floating-point cases
// keep their candidates; exactness against the oracle matters more than
// pruning a few extra states.
constexpr double kPruneSlack = 1e-9;

ChangePointSet backtrack(const std::vector<int>& last_change, std::size_t n, double penalty,
                         const SegmentCostTable& table) {
  ChangePointSet out;
  out.penalty = penalty;
  int t = static_cast<int>(n);
  while (t > 0) {
    int s = last_change[static_cast<std::size_t>(t)];
    if (s > 0) out.indices.push_back(s);
    t = s;
  }
  std::reverse(out.indices.begin(), out.indices.end());
  double total = static_cast<double>(out.indices.size()) * penalty;
  int prev = 0;
  for (int idx : out.indices) {
    total += table.cost(prev, idx);
    prev = idx;
  }
  total += table.cost(prev, static_cast<int>(n));
  out.cost_total = total;
  return out;
}

}  // namespace

ChangePointSet pelt(const Signal& signal, double penalty) {
  if (penalty <= 0.0) throw InvalidPenaltyError("penalty must be positive");
  std::size_t n = signal.n;
  if (n <= 1) return {.indices = {}, .penalty = penalty, .cost_total = 0.0};
  SegmentCostTable table(signal);

  std::vector<double> best(n + 1, std::numeric_limits<double>::infinity());
  std::vector<int> last_change(n + 1, 0);
  best[0] = -penalty;

  std::vector<int> candidates;
  candidates.reserve(64);
  candidates.push_back(0);
  std::vector<int> survivors;

  for (int t = 1; t <= static_cast<int>(n); ++t) {
    double best_t = std::numeric_limits<double>::infinity();
    int best_s = 0;
    for (int s : candidates) {
      double v = best[static_cast<std::size_t>(s)] + table.cost(s, t) + penalty;
      if (v < best_t) {
        best_t = v;
        best_s = s;
      }
    }
    best[static_cast<std::size_t>(t)] = best_t;
    last_change[static_cast<std::size_t>(t)] = best_s;

    survivors.clear();
    for (int s : candidates) {
      if (best[static_cast<std::size_t>(s)] + table.cost(s, t) <= best_t + kPruneSlack) {
        survivors.push_back(s);
      }
    }
    survivors.push_back(t);
    candidates.swap(survivors);
  }
  return backtrack(last_change, n, penalty, table);
}

ChangePointSet brute_force_segment(const Signal& signal, double penalty) {
  if (penalty <= 0.0) throw InvalidPenaltyError("penalty must be positive");
  std::size_t n = signal.n;
  if (n > 200) throw OracleLimitError("brute_force_segment limited to n <= 200");
  if (n <= 1) return {.indices = {}, .penalty = penalty, .cost_total = 0.0};
  SegmentCostTable table(signal);

  std::vector<double> best(n + 1, std::numeric_limits<double>::infinity());
  std::vector<int> last_change(n + 1, 0);
  best[0] = -penalty;
  for (int t = 1; t <= static_cast<int>(n); ++t) {
    for (int s = 0; s < t; ++s) {
      double v = best[static_cast<std::size_t>(s)] + table.cost(s, t) + penalty;
      if (v < best[static_cast<std::size_t>(t)]) {
        best[static_cast<std::size_t>(t)] = v;
        last_change[static_cast<std::size_t>(t)] = s;
      }
    }
  }
  return backtrack(last_change, n, penalty, table);
}

double default_penalty(const Signal& signal) {
  std::size_t n = signal.n;
  if (n < 3 || signal.dim == 0) return 1.0;
  std::vector<double> variances(signal.dim, 0.0);
  std::size_t m = n - 1;
  for (std::size_t d = 0; d < signal.dim; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) mean += signal.row(i + 1)[d] - signal.row(i)[d];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double diff = (signal.row(i + 1)[d] - signal.row(i)[d]) - mean;
      var += diff * diff;
    }
    variances[d] = var / static_cast<double>(m);
  }
  std::sort(variances.begin(), variances.end());
  double median = variances.size() % 2 == 1
                      ? variances[variances.size() / 2]
                      : 0.5 * (variances[variances.size() / 2 - 1] + variances[variances.size() / 2]);
  double beta = 2.0 * median * std::log(static_cast<double>(n));
  return beta > 1e-8 ? beta : 1e-8;
}

}  // namespace prism::changepoint
