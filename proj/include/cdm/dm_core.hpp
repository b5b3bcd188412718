#pragma once

// Multinomial, Dirichlet and compound Dirichlet-multinomial densities.
//
// Every density is returned in log space. Factorials are evaluated as
// ln Γ(k + 1) so totals in the tens of thousands stay finite.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdm/error.hpp"
#include "cdm/special.hpp"

namespace cdm {

using Count = std::int64_t;

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

// Point on the probability simplex.
class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw DomainError("ProbabilityVector: empty");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0) || v > 1.0) throw DomainError("ProbabilityVector: entry outside [0, 1]");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance) {
      throw DomainError("ProbabilityVector: entries do not sum to 1");
    }
  }
  ProbabilityVector(std::initializer_list<double> p) : ProbabilityVector(std::vector<double>(p)) {}

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t j) const { return p_[j]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

// Nonnegative category counts. The total is always recomputed from entries.
class CountVector {
 public:
  CountVector() = default;
  explicit CountVector(std::vector<Count> x) : x_(std::move(x)) {
    for (Count v : x_) {
      if (v < 0) throw DomainError("CountVector: negative count");
      total_ += v;
    }
  }
  CountVector(std::initializer_list<Count> x) : CountVector(std::vector<Count>(x)) {}

  // All-zero vector of length k.
  static CountVector zeros(std::size_t k) { return CountVector(std::vector<Count>(k, 0)); }

  std::size_t size() const noexcept { return x_.size(); }
  Count operator[](std::size_t j) const { return x_[j]; }
  Count total() const noexcept { return total_; }
  std::span<const Count> values() const noexcept { return x_; }

  friend bool operator==(const CountVector&, const CountVector&) = default;

 private:
  std::vector<Count> x_;
  Count total_ = 0;
};

// Dirichlet concentration parameters. Zero entries are legal here; density
// operations reject them, the predictive mean does not.
class AlphaVector {
 public:
  AlphaVector() = default;
  explicit AlphaVector(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    for (double v : alpha_) {
      if (!(v >= 0.0) || std::isinf(v)) throw DomainError("AlphaVector: entry must be finite and >= 0");
      alpha0_ += v;
    }
  }
  AlphaVector(std::initializer_list<double> alpha) : AlphaVector(std::vector<double>(alpha)) {}

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t j) const { return alpha_[j]; }
  double alpha0() const noexcept { return alpha0_; }
  std::span<const double> values() const noexcept { return alpha_; }

  bool strictly_positive() const noexcept {
    for (double v : alpha_) {
      if (!(v > 0.0)) return false;
    }
    return !alpha_.empty();
  }

 private:
  std::vector<double> alpha_;
  double alpha0_ = 0.0;
};

// n x K matrix of per-draw category counts, row-major. Every row has the
// same total M.
class CountMatrix {
 public:
  CountMatrix(std::size_t rows, std::size_t cols, std::vector<Count> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)), col_sums_(cols, 0) {
    if (rows_ < 1) throw DomainError("CountMatrix: need at least one row");
    if (cols_ < 2) throw DomainError("CountMatrix: need at least two columns");
    detail::require_same_size(entries_.size(), rows_ * cols_, "CountMatrix");
    for (std::size_t i = 0; i < rows_; ++i) {
      Count row_sum = 0;
      for (std::size_t j = 0; j < cols_; ++j) {
        const Count v = entries_[i * cols_ + j];
        if (v < 0) throw DomainError("CountMatrix: negative entry");
        row_sum += v;
        col_sums_[j] += v;
      }
      if (i == 0) {
        row_total_ = row_sum;
      } else if (row_sum != row_total_) {
        throw DomainError("CountMatrix: row " + std::to_string(i) + " sums to " +
                          std::to_string(row_sum) + ", expected " + std::to_string(row_total_));
      }
    }
  }

  static CountMatrix from_rows(const std::vector<std::vector<Count>>& rows) {
    if (rows.empty()) throw DomainError("CountMatrix: need at least one row");
    const std::size_t k = rows.front().size();
    std::vector<Count> flat;
    flat.reserve(rows.size() * k);
    for (const auto& r : rows) {
      detail::require_same_size(r.size(), k, "CountMatrix::from_rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return CountMatrix(rows.size(), k, std::move(flat));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Count row_total() const noexcept { return row_total_; }
  Count operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const Count> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
  std::span<const Count> entries() const noexcept { return entries_; }
  CountVector col_sums() const { return CountVector(col_sums_); }

  friend bool operator==(const CountMatrix& a, const CountMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Count> entries_;
  std::vector<Count> col_sums_;
  Count row_total_ = 0;
};

// ln of the multinomial pmf. A zero-probability category with a positive
// count yields -infinity.
inline double multinomial_log_pmf(const CountVector& x, const ProbabilityVector& p) {
  detail::require_same_size(x.size(), p.size(), "multinomial_log_pmf");
  double acc = log_factorial(x.total());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0) continue;
    if (p[j] == 0.0) return -std::numeric_limits<double>::infinity();
    acc += static_cast<double>(x[j]) * std::log(p[j]) - log_factorial(x[j]);
  }
  return acc;
}

inline double dirichlet_log_pdf(const ProbabilityVector& p, const AlphaVector& alpha) {
  detail::require_same_size(p.size(), alpha.size(), "dirichlet_log_pdf");
  if (!alpha.strictly_positive()) throw DomainError("dirichlet_log_pdf: every alpha must be > 0");
  double acc = log_gamma(alpha.alpha0());
  bool zero_density = false;
  for (std::size_t j = 0; j < p.size(); ++j) {
    acc -= log_gamma(alpha[j]);
    if (alpha[j] == 1.0) continue;
    if (p[j] == 0.0) {
      if (alpha[j] < 1.0) throw DomainError("dirichlet_log_pdf: density unbounded on the boundary");
      zero_density = true;
      continue;
    }
    acc += (alpha[j] - 1.0) * std::log(p[j]);
  }
  return zero_density ? -std::numeric_limits<double>::infinity() : acc;
}

// Conjugate update: Dir(alpha) prior plus multinomial counts x.
inline AlphaVector dirichlet_posterior(const AlphaVector& alpha, const CountVector& x) {
  detail::require_same_size(alpha.size(), x.size(), "dirichlet_posterior");
  std::vector<double> out(alpha.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = alpha[j] + static_cast<double>(x[j]);
  return AlphaVector(std::move(out));
}

// ln of the compound Dirichlet-multinomial pmf with total n = x.total().
//
// Applied to the column sums of a count matrix this is the matrix form with
// the leading factorial taken over the grand total, which keeps the pmf
// normalized.
inline double cdm_log_pmf(const CountVector& x, const AlphaVector& alpha) {
  detail::require_same_size(x.size(), alpha.size(), "cdm_log_pmf");
  if (!alpha.strictly_positive()) throw DomainError("cdm_log_pmf: every alpha must be > 0");
  const double n = static_cast<double>(x.total());
  double acc = log_factorial(x.total()) + log_gamma(alpha.alpha0()) - log_gamma(n + alpha.alpha0());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0) continue;
    acc += log_gamma(static_cast<double>(x[j]) + alpha[j]) - log_gamma(alpha[j]) - log_factorial(x[j]);
  }
  return acc;
}

// E[x_j] = total * alpha_j / alpha0.
inline std::vector<double> cdm_expectation(const AlphaVector& alpha, Count total) {
  if (!(alpha.alpha0() > 0.0)) throw DomainError("cdm_expectation: alpha0 must be > 0");
  if (total < 0) throw DomainError("cdm_expectation: negative total");
  std::vector<double> out(alpha.size());
  const double t = static_cast<double>(total);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = t * alpha[j] / alpha.alpha0();
  return out;
}

// Probability of a future count vector z after observing `counts`.
inline double posterior_predictive_log_pmf(const CountVector& z, const AlphaVector& alpha,
                                           const CountVector& counts) {
  return cdm_log_pmf(z, dirichlet_posterior(alpha, counts));
}

// Expected next-row counts: m (alpha_j + n_j) / sum_j (alpha_j + n_j).
inline std::vector<double> predictive_expectation(const AlphaVector& alpha, const CountVector& counts,
                                                  Count m) {
  if (m < 1) throw DomainError("predictive_expectation: m must be positive");
  const AlphaVector post = dirichlet_posterior(alpha, counts);
  if (!(post.alpha0() > 0.0)) throw DomainError("predictive_expectation: alpha + counts is all zero");
  return cdm_expectation(post, m);
}

// Density of P given s successes in n Bernoulli trials under a uniform prior.
inline double beta_bernoulli_posterior_pdf(double p, Count s, Count n) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("beta_bernoulli_posterior_pdf: p must lie in (0, 1)");
  if (s < 0 || n < s) throw DomainError("beta_bernoulli_posterior_pdf: need 0 <= s <= n");
  const double sd = static_cast<double>(s);
  const double fd = static_cast<double>(n - s);
  // B(s + 1, n - s + 1) = s! (n - s)! / (n + 1)!
  const double log_beta = log_factorial(s) + log_factorial(n - s) - log_factorial(n + 1);
  return std::exp(sd * std::log(p) + fd * std::log1p(-p) - log_beta);
}

}  // namespace cdm
