#pragma once

// Walk-forward evaluation of the prediction model over a draw history.
//
// For every draw t past the warmup, alpha is fitted on the draws before t,
// the predictive mean of the next row is ranked into a playable
// combination, and the combination is scored against draw t. Column sums
// (and MLE log sums) come from prefix arrays, so a step costs O(K) for the
// moment and likelihood estimators regardless of how much history precedes
// it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdm/dm_core.hpp"
#include "cdm/error.hpp"
#include "cdm/estimators.hpp"
#include "cdm/ingest.hpp"

namespace cdm {

// An estimator or model failure at a particular draw.
class BacktestError : public Error {
 public:
  BacktestError(std::int64_t draw_index, const std::string& what)
      : Error("draw " + std::to_string(draw_index) + ": " + what), draw_index_(draw_index) {}
  std::int64_t draw_index() const noexcept { return draw_index_; }

 private:
  std::int64_t draw_index_;
};

struct BacktestConfig {
  EstimatorKind estimator;
  std::optional<std::size_t> window;  // empty = all prior draws
  std::optional<std::size_t> warmup;  // empty = max(K, 10, window)
  int hit_threshold = 1;
  unsigned threads = 1;

  std::size_t effective_warmup(const GameSpec& spec) const {
    if (warmup) return *warmup;
    return std::max({static_cast<std::size_t>(spec.pool), std::size_t{10}, window.value_or(0)});
  }

  void validate(const GameSpec& spec) const {
    estimator.validate();
    if (hit_threshold < 1 || hit_threshold > spec.picks) {
      throw ValidationError("hit threshold " + std::to_string(hit_threshold) + " must lie in [1, " +
                            std::to_string(spec.picks) + "]");
    }
    if (window && *window < 1) throw ValidationError("window must be positive");
    const std::size_t w = effective_warmup(spec);
    if (w < 1) throw ValidationError("warmup must be positive");
    if (estimator.method == Estimator::main_diagonal && w < static_cast<std::size_t>(spec.pool)) {
      throw ValidationError("main-diagonal estimator needs warmup >= pool size " + std::to_string(spec.pool));
    }
    if (window && w < *window) {
      throw ValidationError("warmup " + std::to_string(w) + " is shorter than the window " +
                            std::to_string(*window));
    }
    if (threads < 1) throw ValidationError("threads must be positive");
  }
};

struct PredictedCombination {
  std::vector<int> numbers;
  std::vector<std::vector<double>> scores;  // one vector per count matrix

  friend bool operator==(const PredictedCombination&, const PredictedCombination&) = default;
};

// Top-M categories by score (set draws, ascending output) or per-position
// argmax (positional games). Ties go to the smaller category.
inline PredictedCombination select_combination(std::vector<std::vector<double>> scores, const GameSpec& spec) {
  PredictedCombination out;
  if (spec.positional()) {
    if (scores.size() != static_cast<std::size_t>(spec.picks)) {
      throw DimensionError("select_combination: need one score vector per position");
    }
    for (const auto& s : scores) {
      if (s.size() != 10) throw DimensionError("select_combination: positional scores need 10 entries");
      int best = -1;
      for (std::size_t d = 0; d < s.size(); ++d) {
        if (!std::isfinite(s[d])) continue;
        if (best < 0 || s[d] > s[static_cast<std::size_t>(best)]) best = static_cast<int>(d);
      }
      if (best < 0) throw DomainError("select_combination: no finite score for a position");
      out.numbers.push_back(best);
    }
  } else {
    if (scores.size() != 1 || scores.front().size() != static_cast<std::size_t>(spec.pool)) {
      throw DimensionError("select_combination: need one score vector of length K");
    }
    const auto& s = scores.front();
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (std::isfinite(s[j])) idx.push_back(j);
    }
    if (idx.size() < static_cast<std::size_t>(spec.picks)) {
      throw DomainError("select_combination: fewer than M finite scores");
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    for (int i = 0; i < spec.picks; ++i) out.numbers.push_back(static_cast<int>(idx[static_cast<std::size_t>(i)]) + 1);
    std::sort(out.numbers.begin(), out.numbers.end());
  }
  out.scores = std::move(scores);
  return out;
}

inline int match_count(const std::vector<int>& prediction, const DrawRecord& actual, const GameSpec& spec) {
  if (auto rule = check_record(spec, actual); !rule.empty()) {
    throw ValidationError("match_count: actual draw violates game: " + rule);
  }
  if (auto rule = check_record(spec, DrawRecord{0, {}, prediction}); !rule.empty()) {
    throw ValidationError("match_count: prediction violates game: " + rule);
  }
  int matches = 0;
  if (spec.positional()) {
    for (std::size_t i = 0; i < prediction.size(); ++i) matches += prediction[i] == actual.numbers[i];
  } else {
    for (int v : prediction) {
      matches += std::find(actual.numbers.begin(), actual.numbers.end(), v) != actual.numbers.end();
    }
  }
  return matches;
}

inline int match_count(const PredictedCombination& prediction, const DrawRecord& actual, const GameSpec& spec) {
  return match_count(prediction.numbers, actual, spec);
}

struct GapSummary {
  std::vector<std::int64_t> gaps;
  std::optional<double> average;  // absent with fewer than two hits
  std::optional<std::int64_t> max;
  std::size_t hit_count = 0;
};

inline GapSummary gap_stats(const std::vector<std::int64_t>& hit_indices) {
  GapSummary out;
  out.hit_count = hit_indices.size();
  for (std::size_t i = 1; i < hit_indices.size(); ++i) {
    const auto g = hit_indices[i] - hit_indices[i - 1];
    if (g <= 0) throw PreconditionError("gap_stats: hit indices must be strictly increasing");
    out.gaps.push_back(g);
  }
  if (!out.gaps.empty()) {
    const auto sum = std::accumulate(out.gaps.begin(), out.gaps.end(), std::int64_t{0});
    out.average = static_cast<double>(sum) / static_cast<double>(out.gaps.size());
    out.max = *std::max_element(out.gaps.begin(), out.gaps.end());
  }
  return out;
}

struct StretchReport {
  std::vector<char> labels;  // 'S' (short) or 'L' (long)
  std::size_t changes = 0;   // adjacent label pairs that differ
  std::size_t pairs = 0;
  std::optional<double> alternation;  // changes / pairs, absent with no pairs
};

inline constexpr std::int64_t kDefaultStretchCutoff = 500;

inline StretchReport classify_stretches(const std::vector<std::int64_t>& gaps,
                                        std::int64_t cutoff = kDefaultStretchCutoff) {
  StretchReport out;
  for (auto g : gaps) out.labels.push_back(g >= cutoff ? 'L' : 'S');
  if (out.labels.size() >= 2) {
    out.pairs = out.labels.size() - 1;
    for (std::size_t i = 1; i < out.labels.size(); ++i) out.changes += out.labels[i] != out.labels[i - 1];
    out.alternation = static_cast<double>(out.changes) / static_cast<double>(out.pairs);
  }
  return out;
}

// Least-squares fit of ln(gap) against match count, evaluated at `targets`.
// The results are projections, not observations.
inline std::map<int, double> extrapolate_gaps(const std::map<int, double>& observed, const std::vector<int>& targets) {
  if (observed.size() < 2) throw PreconditionError("extrapolate_gaps: need at least two observed match counts");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [m, gap] : observed) {
    if (!(gap > 0.0)) throw DomainError("extrapolate_gaps: gaps must be positive");
    const double x = m;
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(observed.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  std::map<int, double> out;
  for (int m : targets) out[m] = std::exp(intercept + slope * m);
  return out;
}

// Lines of the form "11 19 27 37 39 45 [MD]", predictions first, then the
// actual draw tagged [AC].
inline std::vector<std::string> render_comparison(const std::vector<std::pair<std::string, std::vector<int>>>& predictions,
                                                  const std::optional<DrawRecord>& actual) {
  auto line = [](const std::vector<int>& nums, const std::string& label) {
    std::string s;
    for (int v : nums) s += std::to_string(v) + ' ';
    return s + '[' + label + ']';
  };
  std::vector<std::string> out;
  for (const auto& [label, nums] : predictions) out.push_back(line(nums, label));
  if (actual) out.push_back(line(actual->numbers, "AC"));
  return out;
}

struct DrawOutcome {
  std::int64_t draw_index = 0;
  std::vector<int> prediction;
  std::vector<int> actual;
  int match_count = 0;

  friend bool operator==(const DrawOutcome&, const DrawOutcome&) = default;
};

struct BacktestResult {
  std::vector<DrawOutcome> draws;
  std::vector<std::int64_t> hit_indices;
  GapSummary summary;
  std::vector<std::size_t> tier_histogram;  // [m] = draws with exactly m matches
  std::map<int, GapSummary> tier_gaps;       // [m] = gaps between draws with >= m matches
};

namespace detail {

// Prefix sums over one count matrix, row t holding totals of rows [0, t).
class PrefixColumns {
 public:
  PrefixColumns(const CountMatrix& x, const EstimatorKind& kind)
      : k_(x.cols()), sums_((x.rows() + 1) * k_, 0) {
    const bool mle = kind.method == Estimator::mle;
    if (mle) {
      logs_.assign((x.rows() + 1) * k_, 0.0);
      zeros_.assign((x.rows() + 1) * k_, 0);
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < k_; ++j) {
        const Count v = x(i, j);
        sums_[(i + 1) * k_ + j] = sums_[i * k_ + j] + v;
        if (mle) {
          const double s = static_cast<double>(v) + kind.mle_smoothing;
          logs_[(i + 1) * k_ + j] = logs_[i * k_ + j] + (s > 0.0 ? std::log(s) : 0.0);
          zeros_[(i + 1) * k_ + j] = zeros_[i * k_ + j] + (s > 0.0 ? 0 : 1);
        }
      }
    }
  }

  CountVector counts(std::size_t lo, std::size_t hi) const {
    std::vector<Count> c(k_);
    for (std::size_t j = 0; j < k_; ++j) c[j] = sums_[hi * k_ + j] - sums_[lo * k_ + j];
    return CountVector(std::move(c));
  }

  MleSummary mle_summary(std::size_t lo, std::size_t hi, double smoothing) const {
    MleSummary s{hi - lo, std::vector<double>(k_), std::vector<double>(k_)};
    const double rows = static_cast<double>(hi - lo);
    for (std::size_t j = 0; j < k_; ++j) {
      if (zeros_[hi * k_ + j] != zeros_[lo * k_ + j]) {
        throw ZeroEntryError("estimate_mle: column " + std::to_string(j) + " has a zero entry after smoothing");
      }
      s.col_sums[j] = static_cast<double>(sums_[hi * k_ + j] - sums_[lo * k_ + j]) + rows * smoothing;
      s.log_sums[j] = logs_[hi * k_ + j] - logs_[lo * k_ + j];
    }
    return s;
  }

 private:
  std::size_t k_;
  std::vector<Count> sums_;
  std::vector<double> logs_;
  std::vector<Count> zeros_;
};

}  // namespace detail

// Fits alpha on rows [lo, hi) of `x` and returns the predictive mean of the
// next row with total m. The main-diagonal estimator always reads the K
// rows ending at hi; the counts still come from the configured window.
inline std::vector<double> window_prediction(const CountMatrix& x, const detail::PrefixColumns& prefix,
                                             std::size_t lo, std::size_t hi, const EstimatorKind& kind, Count m) {
  const CountVector counts = prefix.counts(lo, hi);
  AlphaVector alpha;
  switch (kind.method) {
    case Estimator::mom: alpha = estimate_mom(hi - lo, counts); break;
    case Estimator::mle: alpha = estimate_mle(prefix.mle_summary(lo, hi, kind.mle_smoothing)); break;
    case Estimator::main_diagonal: alpha = estimate_main_diagonal(slice_window(x, hi, x.cols())); break;
  }
  return predictive_expectation(apply_floor(alpha, kind.positivity_floor), counts, m);
}

// Prediction for the draw that follows the first `end` draws of `matrices`.
inline PredictedCombination predict_after(const std::vector<CountMatrix>& matrices,
                                          const std::vector<detail::PrefixColumns>& prefixes, std::size_t end,
                                          const GameSpec& spec, const BacktestConfig& config) {
  const std::size_t lo = config.window ? end - std::min(*config.window, end) : 0;
  const Count m = spec.positional() ? 1 : spec.picks;
  std::vector<std::vector<double>> scores;
  scores.reserve(matrices.size());
  for (std::size_t p = 0; p < matrices.size(); ++p) {
    scores.push_back(window_prediction(matrices[p], prefixes[p], lo, end, config.estimator, m));
  }
  return select_combination(std::move(scores), spec);
}

// Predicts the draw following the whole history.
inline PredictedCombination predict_next(const DrawHistory& history, const BacktestConfig& config) {
  config.validate(history.spec());
  const auto matrices = build_count_matrices(history);
  if (config.window && *config.window > history.size()) {
    throw PreconditionError("window " + std::to_string(*config.window) + " exceeds history length " +
                            std::to_string(history.size()));
  }
  std::vector<detail::PrefixColumns> prefixes;
  for (const auto& x : matrices) prefixes.emplace_back(x, config.estimator);
  return predict_after(matrices, prefixes, history.size(), history.spec(), config);
}

inline BacktestResult run_backtest(const DrawHistory& history, const BacktestConfig& config) {
  const GameSpec& spec = history.spec();
  config.validate(spec);
  const std::size_t warmup = config.effective_warmup(spec);
  if (history.size() <= warmup) {
    throw PreconditionError("history of " + std::to_string(history.size()) + " draws is not longer than warmup " +
                            std::to_string(warmup));
  }
  const auto matrices = build_count_matrices(history);
  std::vector<detail::PrefixColumns> prefixes;
  for (const auto& x : matrices) prefixes.emplace_back(x, config.estimator);

  const std::size_t n = history.size();
  BacktestResult result;
  result.draws.resize(n - warmup);

  // Each chunk stops at its first failure; the earliest failing draw wins so
  // the error matches a sequential run.
  struct ChunkError {
    std::size_t t;
    std::exception_ptr error;
  };
  auto run_chunk = [&](std::size_t begin, std::size_t end) -> std::optional<ChunkError> {
    for (std::size_t t = begin; t < end; ++t) {
      try {
        const auto pred = predict_after(matrices, prefixes, t, spec, config);
        auto& slot = result.draws[t - warmup];
        slot.draw_index = history[t].draw_index;
        slot.actual = history[t].numbers;
        slot.match_count = match_count(pred, history[t], spec);
        slot.prediction = pred.numbers;
      } catch (...) {
        return ChunkError{t, std::current_exception()};
      }
    }
    return std::nullopt;
  };

  std::optional<ChunkError> failure;
  const std::size_t total = n - warmup;
  const std::size_t workers = std::min<std::size_t>(config.threads, total);
  if (workers <= 1) {
    failure = run_chunk(warmup, n);
  } else {
    std::vector<std::future<std::optional<ChunkError>>> jobs;
    const std::size_t step = (total + workers - 1) / workers;
    for (std::size_t b = warmup; b < n; b += step) {
      jobs.push_back(std::async(std::launch::async, run_chunk, b, std::min(n, b + step)));
    }
    for (auto& j : jobs) {
      auto e = j.get();
      if (e && (!failure || e->t < failure->t)) failure = std::move(e);
    }
  }
  if (failure) {
    try {
      std::rethrow_exception(failure->error);
    } catch (const std::exception& e) {
      throw BacktestError(history[failure->t].draw_index, e.what());
    }
  }

  result.tier_histogram.assign(static_cast<std::size_t>(spec.picks) + 1, 0);
  std::map<int, std::vector<std::int64_t>> tier_hits;
  for (const auto& d : result.draws) {
    ++result.tier_histogram[static_cast<std::size_t>(d.match_count)];
    if (d.match_count >= config.hit_threshold) result.hit_indices.push_back(d.draw_index);
    for (int m = 1; m <= d.match_count; ++m) tier_hits[m].push_back(d.draw_index);
  }
  for (int m = 1; m <= spec.picks; ++m) result.tier_gaps[m] = gap_stats(tier_hits[m]);
  result.summary = gap_stats(result.hit_indices);
  return result;
}

}  // namespace cdm
