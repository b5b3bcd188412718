#include "cli_app.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdm/cdm.hpp"
#include "cdm/report.hpp"

namespace cdm::cli {
namespace {

// Missing or unreadable input file (a usage error).
class InputFileError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  // game
  std::string game = "set";
  int pool = 52;
  int picks = 6;
  std::string label;
  // data
  std::string input;
  std::string output;
  std::string hits_file;
  std::size_t draws = 100;
  std::uint64_t seed = 0;
  // model
  std::vector<std::string> estimators;
  double smoothing = 0.0;
  double floor = 0.0;
  std::string window = "all";
  std::optional<std::size_t> warmup;
  std::optional<int> threshold;
  unsigned threads = 1;
  std::int64_t cutoff = kDefaultStretchCutoff;
  double reference_alternation = 0.6;
  std::string format = "text";
  // strategy
  std::vector<std::int64_t> gaps;
  std::string gaps_file;
  std::optional<std::int64_t> no_win_horizon;
  std::string ticket_price = "1";
  std::string payout = "500";
  std::int64_t draws_per_day = 2;
  std::int64_t quarter_days = 60;
  std::vector<std::int64_t> schedule{1, 2, 5, 12};
  std::string extension = "min-recover";
  std::string accounting = "paper";
  std::int64_t player_cap = 1'000'000;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFileError("cannot open input file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// "12", "1.5", "0.05" dollars -> cents
Cents parse_money(const std::string& text) {
  std::size_t pos = 0;
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool any = false;
  const std::string s = text.starts_with('$') ? text.substr(1) : text;
  for (; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos, any = true) {
    whole = whole * 10 + (s[pos] - '0');
  }
  if (pos < s.size() && s[pos] == '.') {
    for (++pos; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos, any = true) {
      if (++frac_digits > 2) throw ValidationError("amount '" + text + "' has more than two decimals");
      frac = frac * 10 + (s[pos] - '0');
    }
  }
  if (!any || pos != s.size()) throw ValidationError("'" + text + "' is not a dollar amount");
  if (frac_digits == 1) frac *= 10;
  return Cents{whole * 100 + frac};
}

GameSpec game_spec(const RunConfig& c) {
  GameSpec spec;
  if (c.game == "set") {
    spec = GameSpec::set_draw(c.pool, c.picks, c.label);
  } else if (c.game == "pick") {
    spec = GameSpec::pick(c.picks, c.label);
  } else {
    throw ValidationError("--game must be 'set' or 'pick'");
  }
  spec.validate();
  return spec;
}

std::optional<std::size_t> parse_window(const std::string& w) {
  if (w == "all") return std::nullopt;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(w, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != w.size() || v < 1) throw ValidationError("--window must be a positive integer or 'all'");
  return static_cast<std::size_t>(v);
}

BacktestConfig backtest_config(const RunConfig& c, const GameSpec& spec, Estimator method) {
  BacktestConfig cfg;
  cfg.estimator = {method, c.smoothing, c.floor};
  cfg.window = parse_window(c.window);
  cfg.warmup = c.warmup;
  cfg.hit_threshold = c.threshold.value_or(spec.picks);
  cfg.threads = c.threads;
  cfg.validate(spec);
  return cfg;
}

StrategyConfig strategy_config(const RunConfig& c) {
  StrategyConfig s;
  s.ticket_price = parse_money(c.ticket_price);
  s.payout_per_ticket = parse_money(c.payout);
  s.draws_per_day = c.draws_per_day;
  s.quarter_days = c.quarter_days;
  s.schedule = c.schedule;
  s.player_cap = c.player_cap;
  if (c.extension == "min-recover") {
    s.extension.kind = ExtensionRule::Kind::min_recover;
  } else if (c.extension.starts_with("ratio:")) {
    s.extension.kind = ExtensionRule::Kind::fixed_ratio;
    try {
      s.extension.ratio = std::stod(c.extension.substr(6));
    } catch (const std::exception&) {
      throw ValidationError("--extension ratio:R needs a number");
    }
  } else {
    throw ValidationError("--extension must be 'min-recover' or 'ratio:R'");
  }
  if (c.accounting == "paper") {
    s.accounting = Accounting::paper_quarter;
  } else if (c.accounting == "exact") {
    s.accounting = Accounting::exact_day;
  } else {
    throw ValidationError("--accounting must be 'paper' or 'exact'");
  }
  s.validate();
  return s;
}

json game_json(const GameSpec& spec) {
  return json{{"game", spec.positional() ? "pick" : "set"},
              {"pool", spec.pool},
              {"picks", spec.picks},
              {"label", spec.label}};
}

json model_json(const RunConfig& c, const BacktestConfig& cfg, const GameSpec& spec) {
  return json{{"estimator", std::string(to_string(cfg.estimator.method))},
              {"smoothing", cfg.estimator.mle_smoothing},
              {"positivity_floor", cfg.estimator.positivity_floor},
              {"window", c.window},
              {"warmup", cfg.effective_warmup(spec)},
              {"threshold", cfg.hit_threshold}};
}

json strategy_json(const StrategyConfig& s) {
  return json{{"ticket_price_cents", s.ticket_price.value},
              {"payout_cents", s.payout_per_ticket.value},
              {"draws_per_day", s.draws_per_day},
              {"quarter_days", s.quarter_days},
              {"schedule", s.schedule},
              {"extension", s.extension.kind == ExtensionRule::Kind::min_recover
                                ? std::string("min-recover")
                                : "ratio:" + detail::fixed(s.extension.ratio, 6)},
              {"accounting", s.accounting == Accounting::paper_quarter ? "paper" : "exact"},
              {"player_cap", s.player_cap}};
}

json generator_json(const RunConfig& c) {
  return json{{"algorithm", std::string(kGeneratorName)}, {"seed", c.seed}, {"draws", c.draws}};
}

DrawHistory load_history(const RunConfig& c, const GameSpec& spec) {
  if (c.input.empty()) throw ValidationError("--input is required");
  return parse_history(read_file(c.input), spec);
}

// ---- synth --------------------------------------------------------------

void cmd_synth(const RunConfig& c, std::ostream& out) {
  const GameSpec spec = game_spec(c);
  const DrawHistory h = synthesize_history(spec, c.draws, c.seed);
  out << "# generator=" << kGeneratorName << " seed=" << c.seed << " game=" << c.game << " pool=" << spec.pool
      << " picks=" << spec.picks << '\n';
  write_history(out, h);
}

// ---- predict ------------------------------------------------------------

void cmd_predict(const RunConfig& c, std::ostream& out) {
  const GameSpec spec = game_spec(c);
  const DrawHistory h = load_history(c, spec);
  std::vector<std::string> names = c.estimators.empty() ? std::vector<std::string>{"md", "mm"} : c.estimators;

  std::vector<std::pair<std::string, std::vector<int>>> lines;
  json predictions = json::array();
  for (const auto& name : names) {
    const Estimator method = parse_estimator(name);
    const BacktestConfig cfg = backtest_config(c, spec, method);
    const PredictedCombination p = predict_next(h, cfg);
    lines.emplace_back(std::string(report_label(method)), p.numbers);
    predictions.push_back({{"estimator", std::string(to_string(method))},
                           {"label", std::string(report_label(method))},
                           {"numbers", p.numbers},
                           {"scores", p.scores}});
  }
  if (c.format == "json") {
    json doc{{"config", {{"game", game_json(spec)}, {"input", c.input}, {"window", c.window},
                         {"smoothing", c.smoothing}, {"positivity_floor", c.floor}}},
             {"history_draws", h.size()},
             {"predictions", std::move(predictions)}};
    out << doc.dump(2) << '\n';
    return;
  }
  for (const auto& l : render_comparison(lines, std::nullopt)) out << l << '\n';
}

// ---- backtest -----------------------------------------------------------

std::vector<std::int64_t> parse_integer_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::string token;
  std::istringstream in(text);
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream words(line);
    while (words >> token) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(token, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != token.size()) throw ParseError(line_no, "'" + token + "' is not an integer");
      out.push_back(v);
    }
  }
  return out;
}

// Integer list from a JSON document field or a plain comma/whitespace list.
std::vector<std::int64_t> read_index_file(const std::string& path, const char* field) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError(path + ": " + e.what());
    }
    if (doc.is_array()) return doc.get<std::vector<std::int64_t>>();
    if (!doc.contains(field)) throw ValidationError(path + ": no \"" + field + "\" field");
    return doc[field].get<std::vector<std::int64_t>>();
  }
  return parse_integer_list(text);
}

json stretch_json(const StretchReport& s, const RunConfig& c) {
  json j = to_json(s);
  j["cutoff"] = c.cutoff;
  j["reference_alternation"] = c.reference_alternation;
  j["reference_reproduced"] =
      s.alternation.has_value() && std::fabs(*s.alternation - c.reference_alternation) < 0.005;
  return j;
}

void stretch_text(const StretchReport& s, const RunConfig& c, std::ostream& out) {
  out << "stretches (long >= " << c.cutoff << "):";
  for (char l : s.labels) out << ' ' << l;
  out << '\n';
  if (!s.alternation) {
    out << "alternation: n/a\n";
    return;
  }
  out << "alternation: " << s.changes << '/' << s.pairs << " = " << detail::fixed(*s.alternation, 3) << '\n';
  const bool reproduced = std::fabs(*s.alternation - c.reference_alternation) < 0.005;
  out << "reference alternation " << detail::fixed(c.reference_alternation * 100.0, 0) << "%: "
      << (reproduced ? "reproduced" : "NOT reproduced") << '\n';
}

void cmd_hit_replay(const RunConfig& c, std::ostream& out) {
  const auto hits = read_index_file(c.hits_file, "hit_indices");
  const GapSummary g = gap_stats(hits);
  const StretchReport s = classify_stretches(g.gaps, c.cutoff);
  if (c.format == "json") {
    json doc{{"config", {{"hits_file", c.hits_file}}},
             {"hit_indices", hits},
             {"gaps", g.gaps},
             {"average_gap", detail::optional_json(g.average)},
             {"max_gap", detail::optional_json(g.max)},
             {"hit_count", g.hit_count},
             {"stretches", stretch_json(s, c)}};
    out << doc.dump(2) << '\n';
    return;
  }
  out << "hit indices:";
  for (auto h : hits) out << ' ' << h;
  out << '\n' << render_gap_text(g);
  stretch_text(s, c, out);
}

void cmd_backtest(const RunConfig& c, std::ostream& out) {
  if (!c.hits_file.empty()) {
    cmd_hit_replay(c, out);
    return;
  }
  if (c.estimators.size() > 1) throw ValidationError("backtest takes a single --estimator");
  const GameSpec spec = game_spec(c);
  const Estimator method = parse_estimator(c.estimators.empty() ? "mm" : c.estimators.front());
  const BacktestConfig cfg = backtest_config(c, spec, method);
  const bool synthetic = c.input.empty();
  const DrawHistory h = synthetic ? synthesize_history(spec, c.draws, c.seed) : load_history(c, spec);
  const BacktestResult r = run_backtest(h, cfg);
  const StretchReport s = classify_stretches(r.summary.gaps, c.cutoff);

  // Project the gap for tiers too rare to observe, from the observed ones.
  std::map<int, double> observed;
  std::vector<int> missing;
  for (const auto& [m, g] : r.tier_gaps) {
    if (g.average) {
      observed[m] = *g.average;
    } else {
      missing.push_back(m);
    }
  }
  std::map<int, double> projected;
  if (observed.size() >= 2 && !missing.empty()) projected = extrapolate_gaps(observed, missing);

  if (c.format == "json") {
    json config{{"game", game_json(spec)}, {"model", model_json(c, cfg, spec)}};
    if (synthetic) {
      config["generator"] = generator_json(c);
    } else {
      config["input"] = c.input;
    }
    json doc{{"config", std::move(config)}};
    doc.update(to_json(r));
    doc["stretches"] = stretch_json(s, c);
    json proj = json::object();
    for (const auto& [m, v] : projected) proj[std::to_string(m)] = {{"projected_gap", v}, {"kind", "PROJECTION"}};
    doc["projections"] = std::move(proj);
    out << doc.dump(2) << '\n';
    return;
  }

  out << "game: " << c.game << " pool=" << spec.pool << " picks=" << spec.picks << '\n';
  out << "estimator: " << to_string(method) << " window=" << c.window << " warmup=" << cfg.effective_warmup(spec)
      << " threshold=" << cfg.hit_threshold << '\n';
  if (synthetic) out << "history: synthetic " << kGeneratorName << " seed=" << c.seed << '\n';
  out << "draws evaluated: " << r.draws.size() << '\n';
  out << "exact-tier histogram:";
  for (std::size_t m = 0; m < r.tier_histogram.size(); ++m) out << ' ' << m << ':' << r.tier_histogram[m];
  out << '\n';
  out << "hit indices (>= " << cfg.hit_threshold << " matches):";
  for (auto i : r.hit_indices) out << ' ' << i;
  out << '\n' << render_gap_text(r.summary);
  stretch_text(s, c, out);
  out << "average gap by tier (>= m matches):\n";
  for (const auto& [m, g] : r.tier_gaps) {
    out << "  " << m << ": ";
    if (g.average) {
      out << detail::fixed(*g.average, 2) << " draws (" << g.hit_count << " hits)\n";
    } else if (auto it = projected.find(m); it != projected.end()) {
      out << detail::fixed(it->second, 2) << " draws PROJECTION\n";
    } else {
      out << "n/a (" << g.hit_count << " hits)\n";
    }
  }
}

// ---- simulate -----------------------------------------------------------

void cmd_simulate(const RunConfig& c, std::ostream& out) {
  const StrategyConfig s = strategy_config(c);
  const int sources = (!c.gaps.empty()) + (!c.gaps_file.empty()) + c.no_win_horizon.has_value();
  if (sources != 1) throw ValidationError("simulate needs exactly one of --gaps, --gaps-file, --no-win-horizon");

  if (c.no_win_horizon) {
    const StreamLedger ledger = simulate_stream(std::nullopt, s, *c.no_win_horizon);
    if (c.format == "json") {
      json doc{{"config", strategy_json(s)}, {"horizon_days", *c.no_win_horizon}, {"stream", to_json(ledger)}};
      out << doc.dump(2) << '\n';
    } else {
      out << "no win through " << *c.no_win_horizon << " days\n" << render_ledger_text(ledger);
    }
    return;
  }

  const std::vector<std::int64_t> gaps = c.gaps.empty() ? read_index_file(c.gaps_file, "gaps") : c.gaps;
  const StreamsSummary summary = simulate_streams(gaps, s);
  std::optional<Cents> budget;
  if (!gaps.empty()) budget = required_budget(*std::max_element(gaps.begin(), gaps.end()), s);

  if (c.format == "json") {
    json doc{{"config", strategy_json(s)}};
    doc.update(to_json(summary));
    doc["required_budget_cents"] = budget ? json(budget->value) : json(nullptr);
    out << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < summary.streams.size(); ++i) {
    out << "stream " << i + 1 << ": gap " << gaps[i] << " draws (win on day "
        << *summary.streams[i].win_day + 1 << ")\n"
        << render_ledger_text(summary.streams[i]) << '\n';
  }
  out << "aggregate over " << summary.streams.size() << " streams: spent " << format_money(summary.total_spend)
      << ", paid " << format_money(summary.total_payout) << ", profit " << format_money(summary.profit)
      << ", max drawdown " << format_money(summary.max_drawdown) << '\n';
  if (budget) out << "budget for the longest gap: " << format_money(*budget) << '\n';
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--game", c.game, "set | pick")->check(CLI::IsMember({"set", "pick"}));
  app.add_option("--pool", c.pool, "pool size K (set-draw games)");
  app.add_option("--picks", c.picks, "numbers per draw M (digits for pick games)");
  app.add_option("--label", c.label, "free-text game label");
  app.add_option("--input", c.input, "draw history CSV");
  app.add_option("--output", c.output, "write output here instead of stdout");
  app.add_option("--estimator", c.estimators, "md | mm | mle (repeat or comma-separate for predict)")
      ->delimiter(',');
  app.add_option("--smoothing", c.smoothing, "additive smoothing before the MLE");
  app.add_option("--floor", c.floor, "raise alpha entries below this value");
  app.add_option("--window", c.window, "rows per fit: N or all");
  app.add_option("--warmup", c.warmup, "draws before the first prediction");
  app.add_option("--threshold", c.threshold, "minimum matches that count as a hit");
  app.add_option("--threads", c.threads, "backtest worker threads");
  app.add_option("--cutoff", c.cutoff, "long-stretch cutoff in draws");
  app.add_option("--reference-alternation", c.reference_alternation, "alternation fraction to compare against");
  app.add_option("--format", c.format, "text | json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", c.seed, "generator seed");
  app.add_option("--draws", c.draws, "number of synthetic draws");
  app.add_option("--hits-file", c.hits_file, "replay gap statistics from a hit-index list");
  app.add_option("--gaps", c.gaps, "gap list in draws")->delimiter(',');
  app.add_option("--gaps-file", c.gaps_file, "gap list file or backtest JSON");
  app.add_option("--no-win-horizon", c.no_win_horizon, "simulate a stream with no win for this many days");
  app.add_option("--ticket-price", c.ticket_price, "dollars per combination");
  app.add_option("--payout", c.payout, "dollars paid per winning ticket");
  app.add_option("--draws-per-day", c.draws_per_day);
  app.add_option("--quarter-days", c.quarter_days);
  app.add_option("--schedule", c.schedule, "players per quarter")->delimiter(',');
  app.add_option("--extension", c.extension, "min-recover | ratio:R");
  app.add_option("--accounting", c.accounting, "paper | exact")->check(CLI::IsMember({"paper", "exact"}));
  app.add_option("--player-cap", c.player_cap);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compound Dirichlet-multinomial lottery prediction, backtesting and staking simulation",
               "cdm"};
  app.set_config("--config", "", "key = value configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  add_options(app, c);
  auto* synth = app.add_subcommand("synth", "write a uniform random draw history");
  auto* predict = app.add_subcommand("predict", "predict the draw after the history");
  auto* backtest = app.add_subcommand("backtest", "walk-forward evaluation over the history");
  auto* simulate = app.add_subcommand("simulate", "staking plan over a list of hit gaps");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  // Pick games default to three digits over the fixed pool 0..9.
  if (c.game == "pick") {
    if (app.get_option("--picks")->count() == 0) c.picks = 3;
    c.pool = 10;
  }

  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!c.output.empty()) {
      file.open(c.output, std::ios::binary);
      if (!file) throw InputFileError("cannot open output file '" + c.output + "'");
      sink = &file;
    }
    if (synth->parsed()) {
      cmd_synth(c, *sink);
    } else if (predict->parsed()) {
      cmd_predict(c, *sink);
    } else if (backtest->parsed()) {
      cmd_backtest(c, *sink);
    } else if (simulate->parsed()) {
      cmd_simulate(c, *sink);
    }
    sink->flush();
    return kOk;
  } catch (const InputFileError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cdm::cli
