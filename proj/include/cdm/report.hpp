#pragma once

// JSON documents and plain-text tables for backtests and staking ledgers.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdm/backtest.hpp"
#include "cdm/strategy.hpp"

namespace cdm {

using json = nlohmann::ordered_json;

namespace detail {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace detail

inline json to_json(const GapSummary& g) {
  return json{{"gaps", g.gaps},
              {"average_gap", detail::optional_json(g.average)},
              {"max_gap", detail::optional_json(g.max)},
              {"hit_count", g.hit_count}};
}

inline json to_json(const StretchReport& s) {
  return json{{"labels", std::string(s.labels.begin(), s.labels.end())},
              {"changes", s.changes},
              {"pairs", s.pairs},
              {"alternation", detail::optional_json(s.alternation)}};
}

inline json to_json(const BacktestResult& r) {
  json draws = json::array();
  for (const auto& d : r.draws) {
    draws.push_back({{"draw_index", d.draw_index},
                     {"prediction", d.prediction},
                     {"actual", d.actual},
                     {"match_count", d.match_count}});
  }
  json tiers = json::object();
  for (const auto& [m, g] : r.tier_gaps) tiers[std::to_string(m)] = to_json(g);
  return json{{"draws", std::move(draws)},
              {"hit_indices", r.hit_indices},
              {"gaps", r.summary.gaps},
              {"average_gap", detail::optional_json(r.summary.average)},
              {"max_gap", detail::optional_json(r.summary.max)},
              {"hit_count", r.summary.hit_count},
              {"tier_histogram", r.tier_histogram},
              {"tier_gaps", std::move(tiers)}};
}

// Gap list of a backtest (or gap-summary) document.
inline std::vector<std::int64_t> gaps_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("gaps") || !doc["gaps"].is_array()) {
    throw ValidationError("JSON document has no \"gaps\" array");
  }
  std::vector<std::int64_t> gaps;
  for (const auto& g : doc["gaps"]) {
    if (!g.is_number_integer()) throw ValidationError("\"gaps\" entries must be integers");
    gaps.push_back(g.get<std::int64_t>());
  }
  return gaps;
}

inline json to_json(const QuarterRecord& q) {
  return json{{"quarter", q.quarter},
              {"players", q.players},
              {"days_played", q.days_played},
              {"spend_cents", q.spend.value},
              {"payout_cents", q.payout.value},
              {"win_payout_cents", q.win_payout.value},
              {"net_cents", q.net.value},
              {"cumulative_loss_cents", q.cumulative_loss.value},
              {"outcome", to_string(q.outcome)}};
}

inline json to_json(const StreamLedger& s) {
  json quarters = json::array();
  for (const auto& q : s.quarters) quarters.push_back(to_json(q));
  return json{{"outcome", s.won() ? "won" : "open"},
              {"win_day", detail::optional_json(s.win_day)},
              {"quarters", std::move(quarters)},
              {"total_spend_cents", s.total_spend.value},
              {"total_payout_cents", s.total_payout.value},
              {"profit_cents", s.profit.value},
              {"drawdown_cents", s.drawdown.value}};
}

inline json to_json(const StreamsSummary& s) {
  json streams = json::array();
  for (std::size_t i = 0; i < s.streams.size(); ++i) {
    json j = to_json(s.streams[i]);
    j["gap_draws"] = s.gaps[i];
    streams.push_back(std::move(j));
  }
  return json{{"streams", std::move(streams)},
              {"aggregate",
               {{"streams", s.streams.size()},
                {"total_spend_cents", s.total_spend.value},
                {"total_payout_cents", s.total_payout.value},
                {"profit_cents", s.profit.value},
                {"max_drawdown_cents", s.max_drawdown.value},
                {"max_quarters", s.max_quarters}}}};
}

inline std::string render_ledger_text(const StreamLedger& s) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "quarter" << std::setw(9) << "players" << std::setw(6) << "days"
      << std::setw(12) << "spend" << std::setw(12) << "payout" << std::setw(12) << "net if won" << std::setw(12)
      << "prior loss"
      << "outcome\n";
  for (const auto& q : s.quarters) {
    out << std::setw(8) << q.quarter << std::setw(9) << q.players << std::setw(6) << q.days_played << std::setw(12)
        << format_money(q.spend) << std::setw(12) << format_money(q.payout) << std::setw(12) << format_money(q.net)
        << std::setw(12) << format_money(q.cumulative_loss) << to_string(q.outcome) << '\n';
  }
  out << (s.won() ? "won on day " + std::to_string(*s.win_day + 1) : std::string("open position")) << ": spent "
      << format_money(s.total_spend) << ", paid " << format_money(s.total_payout) << ", profit "
      << format_money(s.profit) << ", drawdown " << format_money(s.drawdown) << '\n';
  return out.str();
}

inline std::string render_gap_text(const GapSummary& g) {
  std::ostringstream out;
  out << "hits: " << g.hit_count << '\n';
  out << "gaps:";
  for (auto v : g.gaps) out << ' ' << v;
  out << '\n';
  if (g.average) {
    out << "average gap: " << detail::fixed(*g.average, 2) << " (rounded " << std::llround(*g.average) << ")\n";
    out << "max gap: " << *g.max << '\n';
  } else {
    out << "average gap: n/a\nmax gap: n/a\n";
  }
  return out.str();
}

}  // namespace cdm
