#pragma once

#include <span>
#include <vector>

#include "prism/embedding.hpp"

namespace prism::changepoint {

// Multivariate signal, n points of equal dimension, row-major doubles.
struct Signal {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  static Signal from_embeddings(std::span<const embedding::EmbeddingVector> points);
  static Signal from_rows(const std::vector<std::vector<double>>& rows);

  const double* row(std::size_t i) const { return data.data() + i * dim; }
};

struct ChangePointSet {
  std::vector<int> indices;  // strictly increasing, each in (0, n)
  double penalty = 0.0;
  double cost_total = 0.0;
};

// Within-segment sum of squared L2 deviations from the segment mean over
// [a, b). Zero iff all points in the segment are identical. This cost is
// superadditive (cost(a,c) >= cost(a,b) + cost(b,c)), which is what licenses
// PELT's pruning rule.
double segment_cost(const Signal& signal, int a, int b);

// Prefix-sum table so repeated segment costs are O(dim). Sums are accumulated
// with Kahan compensation to keep cost_total reproducible across traversal
// orders.
class SegmentCostTable {
 public:
  explicit SegmentCostTable(const Signal& signal);
  double cost(int a, int b) const;
  std::size_t n() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> prefix_;     // (n+1) x dim
  std::vector<double> prefix_sq_;  // n+1
};

// Exact penalized segmentation via PELT: minimizes
//   sum of segment costs + penalty * (number of change points).
ChangePointSet pelt(const Signal& signal, double penalty);

// Unpruned O(n^2) dynamic program; testing oracle for pelt. Guarded to
// n <= 200 because it exists only to cross-check small instances.
ChangePointSet brute_force_segment(const Signal& signal, double penalty);

// BIC-style default: 2 * sigma^2 * log(n), where sigma^2 is the median over
// dimensions of the per-dimension variance of first differences.
double default_penalty(const Signal& signal);

}  // namespace prism::changepoint
