#include "prism/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prism/errors.hpp"
#include "prism/prompts.hpp"
#include "prism/util.hpp"

namespace prism::evaluate {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pairs tied within a sorted range, summed per group: sum t*(t-1)/2.
template <typename It, typename Eq>
long long tied_pairs(It begin, It end, Eq eq) {
  long long total = 0;
  It group = begin;
  for (It it = begin; it != end; ++it) {
    if (it != group && !eq(*group, *it)) {
      long long t = it - group;
      total += t * (t - 1) / 2;
      group = it;
    }
  }
  long long t = end - group;
  total += t * (t - 1) / 2;
  return total;
}

// Counts strict inversions (left > right) while merge-sorting values.
long long count_inversions(std::vector<double>& values) {
  std::vector<double> buffer(values.size());
  long long swaps = 0;
  for (std::size_t width = 1; width < values.size(); width *= 2) {
    for (std::size_t lo = 0; lo + width < values.size(); lo += 2 * width) {
      std::size_t mid = lo + width;
      std::size_t hi = std::min(lo + 2 * width, values.size());
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          swaps += static_cast<long long>(mid - i);
          buffer[k++] = values[j++];
        } else {
          buffer[k++] = values[i++];
        }
      }
      while (i < mid) buffer[k++] = values[i++];
      while (j < hi) buffer[k++] = values[j++];
      std::copy(buffer.begin() + static_cast<long>(lo), buffer.begin() + static_cast<long>(hi),
                values.begin() + static_cast<long>(lo));
    }
  }
  return swaps;
}

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw InvalidInputError("rank correlation inputs differ in length");
  }
  if (pred.size() < 2) throw InvalidInputError("rank correlation needs at least 2 points");
}

}  // namespace

CorrelationResult kendall_tau(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  std::size_t n = pred.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pred[a] != pred[b]) return pred[a] < pred[b];
    return truth[a] < truth[b];
  });

  std::vector<std::pair<double, double>> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = {pred[order[i]], truth[order[i]]};

  long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  long long n1 = tied_pairs(sorted.begin(), sorted.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; });
  long long n3 = tied_pairs(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first == b.first && a.second == b.second;
  });
  std::vector<double> y_sorted(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted[i] = truth[i];
  std::sort(y_sorted.begin(), y_sorted.end());
  long long n2 =
      tied_pairs(y_sorted.begin(), y_sorted.end(), [](double a, double b) { return a == b; });

  if (n0 == n1 || n0 == n2) return {kNaN, false};  // one input constant

  std::vector<double> y_in_x_order(n);
  for (std::size_t i = 0; i < n; ++i) y_in_x_order[i] = sorted[i].second;
  long long discordant = count_inversions(y_in_x_order);

  long long con_minus_dis = n0 - n1 - n2 + n3 - 2 * discordant;
  double denom = std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
  return {static_cast<double>(con_minus_dis) / denom, true};
}

namespace {

// Average ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b, bool* defined) {
  std::size_t n = a.size();
  double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - mean_a;
    double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    *defined = false;
    return kNaN;
  }
  *defined = true;
  return cov / (std::sqrt(var_a) * std::sqrt(var_b));
}

}  // namespace

CorrelationResult spearman_rho(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  std::vector<double> ra = average_ranks(pred);
  std::vector<double> rb = average_ranks(truth);
  bool defined = false;
  double value = pearson(ra, rb, &defined);
  return {value, defined};
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (unsigned char c : text) {
    bool keep = std::isalnum(c) != 0 || c >= 0x80;
    if (keep) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else if (!token.empty()) {
      out.push_back(token);
      token.clear();
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  std::size_t n = candidate.size();
  std::size_t m = reference.size();
  std::vector<std::size_t> prev(m + 1, 0);
  std::vector<std::size_t> cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1
                                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[m]);
  RougeScore out;
  out.precision = lcs / static_cast<double>(n);
  out.recall = lcs / static_cast<double>(m);
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace {

std::map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k > 0) key.push_back('\x1f');
      key += tokens[i + static_cast<std::size_t>(k)];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu(std::span<const std::string> candidate,
            const std::vector<std::vector<std::string>>& references, int max_n, bool smooth) {
  if (references.empty()) throw InvalidInputError("bleu needs at least one reference");
  if (candidate.empty()) return 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto cand_counts = ngram_counts(candidate, n);
    if (cand_counts.empty()) continue;  // candidate shorter than n
    std::map<std::string, int> max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, count] : ngram_counts(ref, n)) {
        max_ref[gram] = std::max(max_ref[gram], count);
      }
    }
    long long matches = 0;
    long long total = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matches += std::min(count, it->second);
    }
    double p;
    if (matches == 0) {
      if (!smooth) return 0.0;
      p = 1.0 / (static_cast<double>(total) + 1.0);  // add-1 on zero counts
    } else {
      p = static_cast<double>(matches) / static_cast<double>(total);
    }
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  double geo_mean = std::exp(log_sum / static_cast<double>(orders));

  // Brevity penalty with the closest reference length (ties pick the shorter).
  long long c = static_cast<long long>(candidate.size());
  long long r = static_cast<long long>(references[0].size());
  for (const auto& ref : references) {
    long long len = static_cast<long long>(ref.size());
    if (std::llabs(len - c) < std::llabs(r - c) || (std::llabs(len - c) == std::llabs(r - c) && len < r)) {
      r = len;
    }
  }
  double bp = c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * geo_mean;
}

double llm_judge_score(const JudgeScores& scores) {
  auto check = [](int v, const char* name) {
    if (v < 1 || v > 5) {
      throw InvalidInputError(std::string("judge score ") + name + " must be in 1..5");
    }
  };
  check(scores.factual_accuracy, "factual_accuracy");
  check(scores.detail, "detail");
  check(scores.specificity, "specificity");
  check(scores.completeness, "completeness");
  check(scores.repetition, "repetition");
  int weighted = 2 * scores.factual_accuracy + scores.detail + scores.specificity +
                 scores.completeness + scores.repetition;
  return static_cast<double>(weighted) / 30.0;
}

JudgeScores judge_with_backend(chat::ChatBackend& backend, const std::string& candidate,
                               const std::string& reference) {
  chat::ChatRequest request;
  request.purpose = "judge";
  request.prompt = prompts::render_judge_rubric(candidate, reference);
  request.key_hint = candidate;
  std::string reply;
  try {
    reply = backend.complete(request);
  } catch (const BackendError& e) {
    throw ValidationUnavailableError(std::string("judge unavailable: ") + e.what());
  }
  json j = json::parse(util::trim(reply), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationUnavailableError("judge reply is not a JSON object: " + reply);
  }
  auto field = [&](const char* name) {
    if (!j.contains(name) || !j[name].is_number_integer()) {
      throw ValidationUnavailableError(std::string("judge reply missing integer field ") + name);
    }
    return j[name].get<int>();
  };
  JudgeScores out;
  out.factual_accuracy = field("factual_accuracy");
  out.detail = field("detail");
  out.specificity = field("specificity");
  out.completeness = field("completeness");
  out.repetition = field("repetition");
  llm_judge_score(out);  // range check
  return out;
}

AnnotationMatrix load_annotations(const std::string& path) {
  std::string content = util::read_file(path);
  AnnotationMatrix out;
  std::string trimmed = util::trim(content);
  if (!trimmed.empty() && (trimmed[0] == '[' || trimmed[0] == '{')) {
    json j = json::parse(trimmed);
    const json& rows = j.is_object() ? j.at("scores") : j;
    for (const auto& row : rows) {
      out.rows.push_back(row.get<std::vector<double>>());
    }
  } else {
    // TSV: frame <TAB> user1 .. userK, one line per frame, optional header.
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    std::vector<std::vector<double>> by_frame;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = util::trim(line);
      if (t.empty()) continue;
      std::istringstream fields(t);
      std::vector<std::string> cells;
      std::string cell;
      while (std::getline(fields, cell, '\t')) cells.push_back(util::trim(cell));
      if (cells.size() < 2) throw ParseError("annotation row needs frame + scores", line_no);
      char* end = nullptr;
      std::strtod(cells[0].c_str(), &end);
      if (*end != '\0') continue;  // header line
      std::vector<double> values;
      for (std::size_t i = 1; i < cells.size(); ++i) {
        double v = std::strtod(cells[i].c_str(), &end);
        if (end == cells[i].c_str() || *end != '\0') {
          throw ParseError("bad annotation value '" + cells[i] + "'", line_no);
        }
        values.push_back(v);
      }
      if (!by_frame.empty() && values.size() != by_frame.back().size()) {
        throw ParseError("inconsistent user count", line_no);
      }
      by_frame.push_back(std::move(values));
    }
    if (!by_frame.empty()) {
      out.rows.assign(by_frame[0].size(), std::vector<double>(by_frame.size(), 0.0));
      for (std::size_t f = 0; f < by_frame.size(); ++f) {
        for (std::size_t u = 0; u < by_frame[f].size(); ++u) out.rows[u][f] = by_frame[f][u];
      }
    }
  }
  out.n_users = out.rows.size();
  out.n_frames = out.rows.empty() ? 0 : out.rows[0].size();
  for (const auto& row : out.rows) {
    if (row.size() != out.n_frames) throw InvalidInputError("annotation rows differ in length");
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidInputError("annotation values must be finite");
    }
  }
  return out;
}

RankingReport evaluate_ranking(std::span<const double> predicted,
                               const AnnotationMatrix& annotations) {
  RankingReport report;
  if (annotations.n_users == 0) throw InvalidInputError("annotation matrix has no users");
  std::size_t n = std::min(predicted.size(), annotations.n_frames);
  if (n < predicted.size() || n < annotations.n_frames) {
    std::cerr << "[prism] aligning scores (" << predicted.size() << ") with annotations ("
              << annotations.n_frames << "): truncating to " << n << " frames\n";
    report.truncated = true;
  }
  report.frames_used = n;
  std::span<const double> pred = predicted.subspan(0, n);

  double tau_sum = 0.0;
  double rho_sum = 0.0;
  std::size_t tau_count = 0;
  std::size_t rho_count = 0;
  for (const auto& row : annotations.rows) {
    std::span<const double> truth(row.data(), n);
    UserCorrelation uc{kendall_tau(pred, truth), spearman_rho(pred, truth)};
    if (uc.tau.defined) {
      tau_sum += uc.tau.value;
      ++tau_count;
    }
    if (uc.rho.defined) {
      rho_sum += uc.rho.value;
      ++rho_count;
    }
    report.per_user.push_back(uc);
  }
  report.mean_tau = tau_count > 0 ? tau_sum / static_cast<double>(tau_count) : kNaN;
  report.mean_rho = rho_count > 0 ? rho_sum / static_cast<double>(rho_count) : kNaN;

  std::vector<double> pooled(n, 0.0);
  for (std::size_t f = 0; f < n; ++f) {
    double sum = 0.0;
    for (const auto& row : annotations.rows) sum += row[f];
    pooled[f] = sum / static_cast<double>(annotations.n_users);
  }
  report.pooled_tau = kendall_tau(pred, pooled);
  report.pooled_rho = spearman_rho(pred, pooled);
  return report;
}

}  // namespace prism::evaluate
