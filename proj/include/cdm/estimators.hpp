#pragma once

// Alpha estimators for the prediction model: closed-form maximum likelihood,
// method of moments and the main-diagonal rule.
//
// MoM and MLE only need per-column summaries of the data, so both have an
// overload taking a summary. The backtest feeds those from prefix sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdm/dm_core.hpp"
#include "cdm/error.hpp"

namespace cdm {

// Euler-Mascheroni constant, truncated to the 11 digits the closed-form
// estimate is specified with.
inline constexpr double kEulerGamma = 0.57721566490;

enum class Estimator { mle, mom, main_diagonal };

struct EstimatorKind {
  Estimator method = Estimator::mom;
  double mle_smoothing = 0.0;     // added to every entry before the MLE
  double positivity_floor = 0.0;  // 0 = leave zero entries alone

  void validate() const {
    if (!(mle_smoothing >= 0.0)) throw ValidationError("estimator: smoothing must be >= 0");
    if (!(positivity_floor >= 0.0)) throw ValidationError("estimator: positivity floor must be >= 0");
  }
};

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::mle: return "mle";
    case Estimator::mom: return "mm";
    case Estimator::main_diagonal: return "md";
  }
  return "?";
}

// Bracketed label used in prediction reports.
inline std::string_view report_label(Estimator e) {
  switch (e) {
    case Estimator::mle: return "ML";
    case Estimator::mom: return "MM";
    case Estimator::main_diagonal: return "MD";
  }
  return "?";
}

inline Estimator parse_estimator(std::string_view s) {
  if (s == "mm" || s == "mom") return Estimator::mom;
  if (s == "md" || s == "main-diagonal") return Estimator::main_diagonal;
  if (s == "mle" || s == "ml") return Estimator::mle;
  throw ValidationError("unknown estimator '" + std::string(s) + "'");
}

// alpha_j = n_j / n, the column mean.
inline AlphaVector estimate_mom(std::size_t rows, const CountVector& col_sums) {
  if (rows < 1) throw InsufficientRowsError("estimate_mom: need at least one row");
  std::vector<double> alpha(col_sums.size());
  const double n = static_cast<double>(rows);
  for (std::size_t j = 0; j < alpha.size(); ++j) alpha[j] = static_cast<double>(col_sums[j]) / n;
  return AlphaVector(std::move(alpha));
}

inline AlphaVector estimate_mom(const CountMatrix& x) { return estimate_mom(x.rows(), x.col_sums()); }

// Column summaries of a smoothed matrix x~ = x + eps, as the MLE needs them.
struct MleSummary {
  std::size_t rows = 0;
  std::vector<double> col_sums;  // sum_i x~_ij
  std::vector<double> log_sums;  // sum_i ln x~_ij
};

inline MleSummary summarize_for_mle(const CountMatrix& x, double smoothing) {
  if (!(smoothing >= 0.0)) throw ValidationError("estimate_mle: smoothing must be >= 0");
  MleSummary s{x.rows(), std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = static_cast<double>(x(i, j)) + smoothing;
      if (!(v > 0.0)) {
        throw ZeroEntryError("estimate_mle: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") is zero after smoothing");
      }
      s.log_sums[j] += std::log(v);
    }
  }
  // Integer totals plus n eps: equal columns stay exactly equal.
  const auto sums = x.col_sums();
  const double shift = static_cast<double>(x.rows()) * smoothing;
  for (std::size_t j = 0; j < x.cols(); ++j) s.col_sums[j] = static_cast<double>(sums[j]) + shift;
  return s;
}

// alpha_j = alpha0 f_j with f_j = sum_i x~_ij / n and
//   alpha0 = n (K - 1) gamma / (n sum_j f_j ln f_j - sum_j f_j sum_i ln x~_ij).
inline AlphaVector estimate_mle(const MleSummary& s) {
  const std::size_t k = s.col_sums.size();
  if (s.rows < 1) throw InsufficientRowsError("estimate_mle: need at least one row");
  if (k < 2 || s.log_sums.size() != k) throw DimensionError("estimate_mle: malformed summary");
  const double n = static_cast<double>(s.rows);

  std::vector<double> f(k);
  double entropy_term = 0.0;
  double log_term = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    f[j] = s.col_sums[j] / n;
    const double flf = f[j] > 0.0 ? f[j] * std::log(f[j]) : 0.0;  // 0 ln 0 = 0
    entropy_term += flf;
    log_term += f[j] * s.log_sums[j];
    scale += n * std::fabs(flf) + std::fabs(f[j] * s.log_sums[j]);
  }
  const double denominator = n * entropy_term - log_term;
  // Anything at rounding level of the two terms is treated as an exact zero.
  if (denominator == 0.0 || std::fabs(denominator) <= 1e-12 * scale) {
    throw DegenerateDataError("estimate_mle: denominator vanishes");
  }
  const double alpha0 = n * static_cast<double>(k - 1) * kEulerGamma / denominator;
  if (!(alpha0 > 0.0) || std::isinf(alpha0)) {
    throw NonPositiveAlphaError("estimate_mle: alpha0 = " + std::to_string(alpha0) + " is not positive");
  }
  std::vector<double> alpha(k);
  for (std::size_t j = 0; j < k; ++j) alpha[j] = alpha0 * f[j];
  return AlphaVector(std::move(alpha));
}

inline AlphaVector estimate_mle(const CountMatrix& x, double smoothing) {
  return estimate_mle(summarize_for_mle(x, smoothing));
}

// Main diagonal of the trailing K x K window: alpha_j = x[n - K + j][j].
// `entries` is row-major n x K; rows need not share a total here.
inline AlphaVector estimate_main_diagonal(std::span<const Count> entries, std::size_t n, std::size_t k) {
  if (entries.size() != n * k) throw DimensionError("estimate_main_diagonal: entries do not match n x K");
  if (n < k) {
    throw InsufficientRowsError("estimate_main_diagonal: need " + std::to_string(k) + " rows, have " +
                                std::to_string(n));
  }
  std::vector<double> alpha(k);
  for (std::size_t j = 0; j < k; ++j) alpha[j] = static_cast<double>(entries[(n - k + j) * k + j]);
  return AlphaVector(std::move(alpha));
}

inline AlphaVector estimate_main_diagonal(const CountMatrix& x) {
  return estimate_main_diagonal(x.entries(), x.rows(), x.cols());
}

// Raises every entry below `floor` to `floor`. A zero floor is a no-op.
inline AlphaVector apply_floor(const AlphaVector& alpha, double floor) {
  if (!(floor > 0.0)) return alpha;
  std::vector<double> out(alpha.values().begin(), alpha.values().end());
  for (double& v : out) v = std::max(v, floor);
  return AlphaVector(std::move(out));
}

inline AlphaVector estimate(const CountMatrix& x, const EstimatorKind& kind) {
  kind.validate();
  AlphaVector alpha;
  switch (kind.method) {
    case Estimator::mle: alpha = estimate_mle(x, kind.mle_smoothing); break;
    case Estimator::mom: alpha = estimate_mom(x); break;
    case Estimator::main_diagonal: alpha = estimate_main_diagonal(x); break;
  }
  return apply_floor(alpha, kind.positivity_floor);
}

}  // namespace cdm
