#pragma once

#include <span>
#include <string>
#include <vector>

#include "prism/chat.hpp"

namespace prism::evaluate {

// Rank correlations return NaN with defined=false when either input is
// constant (the coefficient is undefined there).
struct CorrelationResult {
  double value = 0.0;
  bool defined = true;
};

// Kendall's tau-b (tie corrected) via sort + merge-sort inversion counting.
CorrelationResult kendall_tau(std::span<const double> pred, std::span<const double> truth);

// Spearman's rho: Pearson correlation of average ranks (ties share the mean
// rank).
CorrelationResult spearman_rho(std::span<const double> pred, std::span<const double> truth);

// Lowercases, strips punctuation, splits on whitespace.
std::vector<std::string> tokenize(const std::string& text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

// Corpus-style BLEU for a single candidate against one or more references:
// geometric mean of modified n-gram precisions (orders with no candidate
// n-grams are skipped) times the brevity penalty. smooth=true applies add-1
// to zero match counts.
double bleu(std::span<const std::string> candidate,
            const std::vector<std::vector<std::string>>& references, int max_n = 4,
            bool smooth = true);

struct JudgeScores {
  int factual_accuracy = 0;
  int detail = 0;
  int specificity = 0;
  int completeness = 0;
  int repetition = 0;
};

// (2*factual + detail + specificity + completeness + repetition) / 30.
double llm_judge_score(const JudgeScores& scores);

// Asks a chat backend to rate candidate vs reference with the judge rubric;
// expects a strict five-key JSON object of integers in 1..5.
JudgeScores judge_with_backend(chat::ChatBackend& backend, const std::string& candidate,
                               const std::string& reference);

struct AnnotationMatrix {
  std::size_t n_users = 0;
  std::size_t n_frames = 0;
  std::vector<std::vector<double>> rows;  // one row per user
};

// TSV (`frame<TAB>user1..userK`, optional header) or a JSON array of per-user
// rows.
AnnotationMatrix load_annotations(const std::string& path);

struct UserCorrelation {
  CorrelationResult tau;
  CorrelationResult rho;
};

struct RankingReport {
  std::vector<UserCorrelation> per_user;
  double mean_tau = 0.0;
  double mean_rho = 0.0;
  // Pred vs the per-frame mean annotation, the pooled variant.
  CorrelationResult pooled_tau;
  CorrelationResult pooled_rho;
  std::size_t frames_used = 0;
  bool truncated = false;
};

// Per-user tau/rho of predicted finals against each annotation row plus their
// means; mismatched lengths are truncated to the shorter with a warning.
RankingReport evaluate_ranking(std::span<const double> predicted,
                               const AnnotationMatrix& annotations);

}  // namespace prism::evaluate
