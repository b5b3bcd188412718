#pragma once

// Quarterly escalation staking plan ("3-strategy").
//
// A stream plays the predicted pick-3 combination every draw. Play is split
// into quarters of `quarter_days`; each quarter uses more players (each
// buying the same ticket) so that a win recovers everything spent so far.
// The first quarters follow a fixed schedule, later ones an extension rule.
// All money is integer cents.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdm/error.hpp"

namespace cdm {

struct Cents {
  std::int64_t value = 0;

  constexpr Cents& operator+=(Cents o) {
    value += o.value;
    return *this;
  }
  constexpr Cents& operator-=(Cents o) {
    value -= o.value;
    return *this;
  }
  friend constexpr Cents operator+(Cents a, Cents b) { return {a.value + b.value}; }
  friend constexpr Cents operator-(Cents a, Cents b) { return {a.value - b.value}; }
  friend constexpr Cents operator*(Cents a, std::int64_t k) { return {a.value * k}; }
  friend constexpr Cents operator*(std::int64_t k, Cents a) { return {a.value * k}; }
  friend constexpr auto operator<=>(Cents, Cents) = default;
};

constexpr Cents dollars(std::int64_t d) { return {d * 100}; }

// "$380", "-$1,200.50"
inline std::string format_money(Cents c) {
  const bool neg = c.value < 0;
  const std::int64_t abs = neg ? -c.value : c.value;
  std::string whole = std::to_string(abs / 100);
  for (int i = static_cast<int>(whole.size()) - 3; i > 0; i -= 3) whole.insert(static_cast<std::size_t>(i), ",");
  std::string out = (neg ? "-$" : "$") + whole;
  if (const auto frac = abs % 100; frac != 0) out += (frac < 10 ? ".0" : ".") + std::to_string(frac);
  return out;
}

enum class Accounting {
  paper_quarter,  // a quarter is charged in full, even when won mid-quarter
  exact_day,      // only days actually played are charged
};

struct ExtensionRule {
  enum class Kind {
    min_recover,  // fewest players whose win recovers losses and beats the previous quarter's win
    fixed_ratio,  // ceil(ratio * previous players)
  };
  Kind kind = Kind::min_recover;
  double ratio = 2.0;
};

struct StrategyConfig {
  Cents ticket_price = dollars(1);
  std::int64_t draws_per_day = 2;
  Cents payout_per_ticket = dollars(500);
  std::int64_t quarter_days = 60;
  std::vector<std::int64_t> schedule{1, 2, 5, 12};
  ExtensionRule extension;
  Accounting accounting = Accounting::paper_quarter;
  std::int64_t player_cap = 1'000'000;

  void validate() const {
    if (ticket_price.value <= 0 || payout_per_ticket.value <= 0) throw ValidationError("prices must be positive");
    if (draws_per_day <= 0 || quarter_days <= 0) throw ValidationError("draws per day and quarter days must be positive");
    if (schedule.empty()) throw ValidationError("schedule must not be empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (schedule[i] <= 0) throw ValidationError("schedule entries must be positive");
      if (i > 0 && schedule[i] < schedule[i - 1]) throw ValidationError("schedule must be nondecreasing");
    }
    if (extension.kind == ExtensionRule::Kind::fixed_ratio && !(extension.ratio >= 1.0)) {
      throw ValidationError("extension ratio must be >= 1");
    }
    if (player_cap <= 0) throw ValidationError("player cap must be positive");
  }

  Cents day_spend(std::int64_t players) const { return ticket_price * draws_per_day * players; }
  Cents quarter_spend(std::int64_t players) const { return day_spend(players) * quarter_days; }
};

// Player count for the quarter after the schedule runs out.
inline std::int64_t next_player_count(Cents cumulative_loss, Cents previous_net, std::int64_t previous_players,
                                      const StrategyConfig& config) {
  std::int64_t players = 1;
  if (config.extension.kind == ExtensionRule::Kind::fixed_ratio) {
    // The slack absorbs representation error, e.g. 2.4 * 5.
    players = static_cast<std::int64_t>(std::ceil(config.extension.ratio * static_cast<double>(previous_players) - 1e-9));
    players = std::max<std::int64_t>(players, 1);
  } else {
    // payout * p - quarter_spend(p) - loss >= previous_net
    const Cents margin = config.payout_per_ticket - config.quarter_spend(1);
    const Cents need = cumulative_loss + previous_net;
    if (need.value > 0) {
      if (margin.value <= 0) throw CapExceededError("no player count recovers losses: a quarter costs more than it pays");
      players = std::max<std::int64_t>(1, (need.value + margin.value - 1) / margin.value);
    }
  }
  if (players > config.player_cap) {
    throw CapExceededError("needs " + std::to_string(players) + " players, cap is " + std::to_string(config.player_cap));
  }
  return players;
}

enum class QuarterOutcome { lost, won, open };

inline const char* to_string(QuarterOutcome o) {
  switch (o) {
    case QuarterOutcome::lost: return "lost";
    case QuarterOutcome::won: return "won";
    case QuarterOutcome::open: return "open";
  }
  return "?";
}

struct QuarterRecord {
  std::int64_t quarter = 0;  // 1-based
  std::int64_t players = 0;
  std::int64_t days_played = 0;
  Cents spend;            // charged for this quarter
  Cents payout;           // actually received (zero unless won)
  Cents win_payout;       // what a win in this quarter pays
  Cents net;              // profit of the stream if it is won in this quarter
  Cents cumulative_loss;  // spend of all earlier quarters
  QuarterOutcome outcome = QuarterOutcome::lost;
};

// Full-quarter figures for quarters 1..count, assuming no earlier win.
inline std::vector<QuarterRecord> plan_quarters(std::int64_t count, const StrategyConfig& config) {
  config.validate();
  std::vector<QuarterRecord> out;
  Cents loss{};
  for (std::int64_t q = 1; q <= count; ++q) {
    QuarterRecord r;
    r.quarter = q;
    if (static_cast<std::size_t>(q) <= config.schedule.size()) {
      r.players = config.schedule[static_cast<std::size_t>(q - 1)];
    } else {
      const auto& prev = out.back();
      r.players = next_player_count(loss, prev.net, prev.players, config);
    }
    if (r.players > config.player_cap) {
      throw CapExceededError("quarter " + std::to_string(q) + " needs more players than the cap");
    }
    r.days_played = config.quarter_days;
    r.spend = config.quarter_spend(r.players);
    r.win_payout = config.payout_per_ticket * r.players;
    r.cumulative_loss = loss;
    r.net = r.win_payout - r.spend - loss;
    loss += r.spend;
    out.push_back(r);
  }
  return out;
}

// Profit if the stream is won in quarter `quarter` (full-quarter charging).
inline Cents quarter_net(std::int64_t quarter, const StrategyConfig& config) {
  if (quarter < 1) throw PreconditionError("quarter_net: quarters are 1-based");
  return plan_quarters(quarter, config).back().net;
}

struct StreamLedger {
  std::vector<QuarterRecord> quarters;
  std::optional<std::int64_t> win_day;  // 0-based day of the win, empty if open
  Cents total_spend;
  Cents total_payout;
  Cents profit;
  Cents drawdown;  // spend committed before the winning quarter (all spend if open)

  bool won() const noexcept { return win_day.has_value(); }
};

// Day offset (0-based) of a win that arrives `gap_draws` draws after play
// starts, the first draw being draw 1.
inline std::int64_t gap_to_win_day(std::int64_t gap_draws, const StrategyConfig& config) {
  if (gap_draws < 1) throw PreconditionError("gap must be at least one draw");
  return (gap_draws + config.draws_per_day - 1) / config.draws_per_day - 1;
}

// Plays one stream until the win on day `win_day`, or, when there is no
// win, through `horizon_days` days.
inline StreamLedger simulate_stream(std::optional<std::int64_t> win_day, const StrategyConfig& config,
                                    std::int64_t horizon_days = 0) {
  config.validate();
  if (win_day && *win_day < 0) throw PreconditionError("simulate_stream: win day must be >= 0");
  if (!win_day && horizon_days < 0) throw PreconditionError("simulate_stream: negative horizon");

  const std::int64_t last_day = win_day ? *win_day : horizon_days - 1;  // inclusive
  const std::int64_t quarters = last_day < 0 ? 0 : last_day / config.quarter_days + 1;

  StreamLedger ledger;
  ledger.win_day = win_day;
  ledger.quarters = plan_quarters(quarters, config);
  for (auto& r : ledger.quarters) {
    const bool final_quarter = r.quarter == quarters;
    if (final_quarter) {
      if (config.accounting == Accounting::exact_day) {
        r.days_played = last_day - (r.quarter - 1) * config.quarter_days + 1;
        r.spend = config.day_spend(r.players) * r.days_played;
      }
      if (win_day) {
        r.outcome = QuarterOutcome::won;
        r.payout = r.win_payout;
        r.net = r.payout - r.spend - r.cumulative_loss;
        ledger.drawdown = r.cumulative_loss;
      } else {
        r.outcome = QuarterOutcome::open;
      }
    }
    ledger.total_spend += r.spend;
    ledger.total_payout += r.payout;
  }
  if (!win_day) ledger.drawdown = ledger.total_spend;
  ledger.profit = ledger.total_payout - ledger.total_spend;
  return ledger;
}

struct StreamsSummary {
  std::vector<std::int64_t> gaps;
  std::vector<StreamLedger> streams;
  Cents total_spend;
  Cents total_payout;
  Cents profit;
  Cents max_drawdown;
  std::int64_t max_quarters = 0;
};

// One stream per gap (in draws); totals add, drawdown is the worst stream.
inline StreamsSummary simulate_streams(const std::vector<std::int64_t>& gaps, const StrategyConfig& config) {
  StreamsSummary out;
  out.gaps = gaps;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    try {
      out.streams.push_back(simulate_stream(gap_to_win_day(gaps[i], config), config));
    } catch (const CapExceededError& e) {
      throw CapExceededError("stream " + std::to_string(i + 1) + " (gap " + std::to_string(gaps[i]) + "): " + e.what());
    }
    const auto& s = out.streams.back();
    out.total_spend += s.total_spend;
    out.total_payout += s.total_payout;
    out.max_drawdown = std::max(out.max_drawdown, s.drawdown);
    out.max_quarters = std::max<std::int64_t>(out.max_quarters, static_cast<std::int64_t>(s.quarters.size()));
  }
  out.profit = out.total_payout - out.total_spend;
  return out;
}

// Cash needed to carry a stream whose win arrives after `max_gap_draws`
// draws, charging full quarters.
inline Cents required_budget(std::int64_t max_gap_draws, StrategyConfig config) {
  config.accounting = Accounting::paper_quarter;
  return simulate_stream(gap_to_win_day(max_gap_draws, config), config).total_spend;
}

}  // namespace cdm
