#pragma once

// Draw history files and the count matrices built from them.
//
// File format, one draw per line:
//
//     draw_index,date,numbers
//     0,2022-07-09,6 24 29 35 41 44
//
// `date` may be empty and is carried through untouched. A first line whose
// leading field is not a number is a header. Blank lines and lines starting
// with '#' are ignored. File order is chronological order, oldest first.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdm/dm_core.hpp"
#include "cdm/error.hpp"

namespace cdm {

enum class GameKind {
  set_draw,           // M distinct numbers from 1..K, order irrelevant
  positional_digits,  // M digits 0..9, order significant, repeats allowed
};

struct GameSpec {
  GameKind kind = GameKind::set_draw;
  int pool = 52;  // K; always 10 for positional games
  int picks = 6;  // M
  std::string label;

  static GameSpec set_draw(int pool, int picks, std::string label = {}) {
    return {GameKind::set_draw, pool, picks, std::move(label)};
  }
  static GameSpec pick(int digits, std::string label = {}) {
    return {GameKind::positional_digits, 10, digits, std::move(label)};
  }

  bool positional() const noexcept { return kind == GameKind::positional_digits; }

  void validate() const {
    if (kind == GameKind::set_draw) {
      if (picks < 2 || picks >= pool) {
        throw ValidationError("set-draw game needs 2 <= picks < pool (got picks=" + std::to_string(picks) +
                              ", pool=" + std::to_string(pool) + ")");
      }
    } else {
      if (pool != 10) throw ValidationError("positional game must have pool 10");
      if (picks < 1 || picks > 6) throw ValidationError("positional game needs 1 <= picks <= 6");
    }
  }

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

struct DrawRecord {
  std::int64_t draw_index = 0;
  std::string date;
  std::vector<int> numbers;

  friend bool operator==(const DrawRecord&, const DrawRecord&) = default;
};

// Returns an empty string when the record satisfies the spec, otherwise the
// violated rule.
inline std::string check_record(const GameSpec& spec, const DrawRecord& r) {
  if (r.numbers.size() != static_cast<std::size_t>(spec.picks)) {
    return "arity " + std::to_string(r.numbers.size()) + " != " + std::to_string(spec.picks);
  }
  if (spec.positional()) {
    for (int d : r.numbers) {
      if (d < 0 || d > 9) return "digit " + std::to_string(d) + " outside [0, 9]";
    }
    return {};
  }
  std::vector<int> sorted = r.numbers;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 1 || sorted[i] > spec.pool) {
      return "number " + std::to_string(sorted[i]) + " outside [1, " + std::to_string(spec.pool) + "]";
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) return "duplicate number " + std::to_string(sorted[i]);
  }
  return {};
}

// Validated, chronologically ordered draws of one game. Indices increase by
// exactly one from record to record; the first index is whatever the source
// starts at (0 for a complete history).
class DrawHistory {
 public:
  DrawHistory(GameSpec spec, std::vector<DrawRecord> records)
      : spec_(std::move(spec)), records_(std::move(records)) {
    spec_.validate();
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (auto rule = check_record(spec_, records_[i]); !rule.empty()) {
        throw ValidationError("draw " + std::to_string(records_[i].draw_index) + ": " + rule);
      }
      if (i == 0 && records_[i].draw_index < 0) throw ValidationError("negative draw index");
      if (i > 0 && records_[i].draw_index != records_[i - 1].draw_index + 1) {
        throw ValidationError("draw index " + std::to_string(records_[i].draw_index) + " does not follow " +
                              std::to_string(records_[i - 1].draw_index));
      }
    }
  }

  const GameSpec& spec() const noexcept { return spec_; }
  const std::vector<DrawRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const DrawRecord& operator[](std::size_t i) const { return records_[i]; }

  friend bool operator==(const DrawHistory&, const DrawHistory&) = default;

 private:
  GameSpec spec_;
  std::vector<DrawRecord> records_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

inline DrawHistory parse_history(std::istream& in, const GameSpec& spec) {
  spec.validate();
  std::vector<DrawRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_content = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    const auto first_field = detail::trim(line.substr(0, c1));
    const bool numeric_first = detail::parse_int<std::int64_t>(first_field).has_value();
    if (!seen_content && !numeric_first) {
      seen_content = true;  // header
      continue;
    }
    seen_content = true;

    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 comma-separated fields");
    }
    DrawRecord rec;
    if (auto idx = detail::parse_int<std::int64_t>(first_field)) {
      rec.draw_index = *idx;
    } else {
      throw ParseError(line_no, "draw index '" + std::string(first_field) + "' is not an integer");
    }
    rec.date = std::string(detail::trim(line.substr(c1 + 1, c2 - c1 - 1)));

    std::string_view nums = line.substr(c2 + 1);
    while (true) {
      const auto start = nums.find_first_not_of(" \t");
      if (start == std::string_view::npos) break;
      nums.remove_prefix(start);
      const auto stop = std::min(nums.find_first_of(" \t"), nums.size());
      const auto tok = nums.substr(0, stop);
      auto v = detail::parse_int<int>(tok);
      if (!v) throw ParseError(line_no, "'" + std::string(tok) + "' is not an integer");
      rec.numbers.push_back(*v);
      nums.remove_prefix(stop);
    }

    if (auto rule = check_record(spec, rec); !rule.empty()) throw ValidationError(line_no, rule);
    if (!records.empty() && rec.draw_index != records.back().draw_index + 1) {
      throw ValidationError(line_no, "draw index " + std::to_string(rec.draw_index) + " does not follow " +
                                         std::to_string(records.back().draw_index));
    }
    if (records.empty() && rec.draw_index < 0) throw ValidationError(line_no, "negative draw index");
    records.push_back(std::move(rec));
  }
  return DrawHistory(spec, std::move(records));
}

inline DrawHistory parse_history(std::string_view text, const GameSpec& spec) {
  std::istringstream in{std::string(text)};
  return parse_history(in, spec);
}

inline void write_history(std::ostream& out, const DrawHistory& history) {
  out << "draw_index,date,numbers\n";
  for (const auto& r : history.records()) {
    out << r.draw_index << ',' << r.date << ',';
    for (std::size_t i = 0; i < r.numbers.size(); ++i) out << (i ? " " : "") << r.numbers[i];
    out << '\n';
  }
}

inline std::string to_csv(const DrawHistory& history) {
  std::ostringstream out;
  write_history(out, history);
  return out.str();
}

// Indicator matrices. Set-draw games give one n x K matrix whose column j
// stands for number j + 1. Positional games give one n x 10 one-hot matrix
// per position, column d standing for digit d.
inline std::vector<CountMatrix> build_count_matrices(const DrawHistory& history) {
  if (history.empty()) throw PreconditionError("build_count_matrices: empty history");
  const GameSpec& spec = history.spec();
  const std::size_t n = history.size();
  std::vector<CountMatrix> out;
  if (!spec.positional()) {
    const auto k = static_cast<std::size_t>(spec.pool);
    std::vector<Count> flat(n * k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int v : history[i].numbers) flat[i * k + static_cast<std::size_t>(v - 1)] = 1;
    }
    out.emplace_back(n, k, std::move(flat));
    return out;
  }
  for (int pos = 0; pos < spec.picks; ++pos) {
    std::vector<Count> flat(n * 10, 0);
    for (std::size_t i = 0; i < n; ++i) {
      flat[i * 10 + static_cast<std::size_t>(history[i].numbers[static_cast<std::size_t>(pos)])] = 1;
    }
    out.emplace_back(n, 10, std::move(flat));
  }
  return out;
}

// Rows [end - width, end), or [0, end) when width is empty ("all").
inline CountMatrix slice_window(const CountMatrix& x, std::size_t end, std::optional<std::size_t> width) {
  if (end < 1 || end > x.rows()) {
    throw PreconditionError("slice_window: end " + std::to_string(end) + " outside [1, " +
                            std::to_string(x.rows()) + "]");
  }
  const std::size_t w = width.value_or(end);
  if (w < 1 || w > end) {
    throw PreconditionError("slice_window: width " + std::to_string(w) + " needs 1 <= width <= end (" +
                            std::to_string(end) + ")");
  }
  const auto all = x.entries();
  const std::size_t k = x.cols();
  std::vector<Count> flat(all.begin() + static_cast<std::ptrdiff_t>((end - w) * k),
                          all.begin() + static_cast<std::ptrdiff_t>(end * k));
  return CountMatrix(w, k, std::move(flat));
}

}  // namespace cdm
