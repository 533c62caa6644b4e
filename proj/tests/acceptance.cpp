#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kdom/harness.hpp"
#include "kdom/http.hpp"
#include "kdom/wire.hpp"
#include "test_util.hpp"

using namespace kdom;
using namespace kdom::harness;

namespace {

// Tolerances and scales. Each criterion's report line restates what it used.
constexpr double kDrawsSeconds = 1.0;

constexpr int kTableOneGames = 500;
constexpr double kGprdWinRate = 0.794, kGprdTolerance = 0.05;
constexpr double kFgWinRate = 0.977, kFgTolerance = 0.03;
constexpr double kTrWinDrawRate = 0.252, kTrTolerance = 0.04;

constexpr int kProgressionGames = 500;

constexpr int kTableTwoGames = 100;
constexpr double kTableTwoSeconds = 0.5;
constexpr double kRelativeOverFg = 2.0;

constexpr int kFgRowGames = 200;
constexpr double kFgRowMargin = -9.0, kFgRowTolerance = 2.0;
constexpr int kMceRowGames = 200;
constexpr double kMceRowSeconds = 0.1;
constexpr double kMceRowMargin = -8.5, kMceRowTolerance = 6.0;

constexpr int kCrossoverFastGames = 200;
constexpr double kCrossoverFastSeconds = 0.1;
constexpr int kCrossoverSlowGames = 100;
constexpr double kCrossoverSlowSeconds = 2.0;

constexpr int kFrequencyGames = 50;
constexpr double kFrequencySeconds = 0.1;
constexpr double kEpsilonPgSpread = 0.25;

constexpr int kOracleKingdoms = 1000;
constexpr int kOracleStates = 1000;
constexpr int kEndgameTrials = 100;
constexpr std::size_t kEndgames = 20;
constexpr double kEndgameHitRate = 0.95;
constexpr long kMcePlayoutsPerChild = 200;
constexpr long kUctPlayouts = 10000;

constexpr double kUcbExpected = 0.9072, kUcbTolerance = 1e-4;

constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

AgentConfig agent(const std::string& spec, double seconds = 1.0) {
  AgentConfig defaults;
  defaults.budget = SearchBudget::seconds(seconds);
  return parse_agent(spec, defaults);
}

SeriesStats series(const std::string& player, const std::string& opponent, int games, double seconds = 1.0) {
  SeriesConfig c;
  c.player = agent(player, seconds);
  c.opponents = {agent(opponent), agent(opponent), agent(opponent)};
  c.games = games;
  c.base_seed = kSeed;
  return run_series(c).stats;
}

double rate(int n, int games) { return static_cast<double>(n) / games; }

// Interval of the mean victory margin.
std::pair<double, double> margin_interval(const SeriesStats& s) {
  const double h = s.ci95_half_width.value_or(0.0);
  return {s.mean_victory_margin - h, s.mean_victory_margin + h};
}

Verdict draw_count() {
  const auto t0 = std::chrono::steady_clock::now();
  const BigInt n = count_deck_draws();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Independent product of binomials.
  BigInt expected = 1;
  for (int i = 0; i < 12; ++i) {
    const int m = 48 - 4 * i;
    expected *= BigInt(m) * (m - 1) * (m - 2) * (m - 3) / 24;
  }
  const std::string sci = scientific(n, 2);
  return {n == expected && sci == "3.4e44" && seconds < kDrawsSeconds,
          fmt("%s = %s, %.4f s (limit %.0f s)", n.str().c_str(), sci.c_str(), seconds, kDrawsSeconds)};
}

Verdict table_one() {
  const auto gprd = series("GPRD", "TR", kTableOneGames);
  const auto fg = series("FG", "TR", kTableOneGames);
  const auto tr = series("TR", "TR", kTableOneGames);
  const double g = rate(gprd.wins, gprd.games), f = rate(fg.wins, fg.games), t = rate(tr.wins + tr.draws, tr.games);
  const bool ok = std::abs(g - kGprdWinRate) <= kGprdTolerance && std::abs(f - kFgWinRate) <= kFgTolerance &&
                  std::abs(t - kTrWinDrawRate) <= kTrTolerance;
  return {ok, fmt("%d games: GPRD wins %.1f%% (79.4 +/- 5), FG wins %.1f%% (97.7 +/- 3), TR wins+draws %.1f%% "
                  "(25.2 +/- 4)",
                  kTableOneGames, 100 * g, 100 * f, 100 * t)};
}

Verdict score_progression() {
  const auto tr = series("TR", "TR", kProgressionGames);
  const auto gprd = series("GPRD", "TR", kProgressionGames);
  const auto fg = series("FG", "TR", kProgressionGames);
  const bool start = tr.per_round_mean_scores[0] == 10.0 && gprd.per_round_mean_scores[0] == 10.0 &&
                     fg.per_round_mean_scores[0] == 10.0;
  const bool order = tr.mean_score < gprd.mean_score && gprd.mean_score < fg.mean_score;
  const auto& s = tr.per_round_mean_scores;
  const double dip = std::min({s[4], s[5], s[6]});
  std::ostringstream rounds;
  for (std::size_t r = 0; r < kRounds; ++r) rounds << (r ? " " : "") << fmt("%.2f", s[r]);
  return {start && order && dip < s[3],
          fmt("%d games vs 3xTR: round-1 means %.1f/%.1f/%.1f; finals TR %.2f < GPRD %.2f < FG %.2f; TR round 4 "
              "%.2f, min rounds 5-7 %.2f; TR by round: %s",
              kProgressionGames, tr.per_round_mean_scores[0], gprd.per_round_mean_scores[0],
              fg.per_round_mean_scores[0], tr.mean_score, gprd.mean_score, fg.mean_score, s[3], dip,
              rounds.str().c_str())};
}

Verdict table_two() {
  const auto p = series("MCE-TR/P", "FG", kTableTwoGames, kTableTwoSeconds);
  const auto r = series("MCE-TR/R", "FG", kTableTwoGames, kTableTwoSeconds);
  const auto w = series("MCE-TR/WDL", "FG", kTableTwoGames, kTableTwoSeconds);
  const auto fg = series("FG", "FG", kTableTwoGames);
  // P and R are "about equal" when their difference lies inside the 95% CI of the difference.
  const double spread = std::hypot(p.score_ci95.value_or(0.0), r.score_ci95.value_or(0.0));
  const bool close = std::abs(p.mean_score - r.mean_score) <= spread;
  const bool ok = close && p.mean_score > w.mean_score && r.mean_score > w.mean_score && w.mean_score > fg.mean_score &&
                  r.mean_score - fg.mean_score >= kRelativeOverFg;
  return {ok, fmt("%d games at %.1f s/ply vs 3xFG: P %.2f, R %.2f (|P-R| %.2f, limit %.2f), WDL %.2f, FG %.2f; "
                  "R-FG %.2f (>= %.0f); overruns %d/%d/%d",
                  kTableTwoGames, kTableTwoSeconds, p.mean_score, r.mean_score, std::abs(p.mean_score - r.mean_score),
                  spread, w.mean_score, fg.mean_score, r.mean_score - fg.mean_score, kRelativeOverFg,
                  p.budget_violations, r.budget_violations, w.budget_violations)};
}

Verdict table_three() {
  const auto fg = series("FG", "FG", kFgRowGames);
  const auto mce = series("MCE-TR/R", "FG", kMceRowGames, kMceRowSeconds);
  const bool ok = std::abs(fg.mean_victory_margin - kFgRowMargin) <= kFgRowTolerance &&
                  std::abs(mce.mean_victory_margin - kMceRowMargin) <= kMceRowTolerance;
  return {ok, fmt("FG vs 3xFG, %d games: margin %.2f +/- %.2f (target -9.0 +/- 2.0); MCE-TR/R at %.1f s, %d games: "
                  "margin %.2f +/- %.2f (target -8.5 +/- 6.0)",
                  kFgRowGames, fg.mean_victory_margin, fg.ci95_half_width.value_or(0.0), kMceRowSeconds,
                  kMceRowGames, mce.mean_victory_margin, mce.ci95_half_width.value_or(0.0))};
}

Verdict crossover() {
  const auto tr_fast = series("MCE-TR/R", "FG", kCrossoverFastGames, kCrossoverFastSeconds);
  const auto fg_fast = series("MCE-FG/R", "FG", kCrossoverFastGames, kCrossoverFastSeconds);
  const auto tr_slow = series("MCE-TR/R", "FG", kCrossoverSlowGames, kCrossoverSlowSeconds);
  const auto fg_slow = series("MCE-FG/R", "FG", kCrossoverSlowGames, kCrossoverSlowSeconds);
  const auto [tf_lo, tf_hi] = margin_interval(tr_fast);
  const auto [ff_lo, ff_hi] = margin_interval(fg_fast);
  const auto [ts_lo, ts_hi] = margin_interval(tr_slow);
  const auto [fs_lo, fs_hi] = margin_interval(fg_slow);
  const bool ok = tf_lo > ff_hi && fs_lo > ts_hi;
  return {ok, fmt("%.1f s (%d games): MCE-TR/R [%.2f, %.2f] vs MCE-FG/R [%.2f, %.2f]; %.1f s (%d games): MCE-FG/R "
                  "[%.2f, %.2f] vs MCE-TR/R [%.2f, %.2f]; playouts/s TR %.0f, FG %.0f",
                  kCrossoverFastSeconds, kCrossoverFastGames, tf_lo, tf_hi, ff_lo, ff_hi, kCrossoverSlowSeconds,
                  kCrossoverSlowGames, fs_lo, fs_hi, ts_lo, ts_hi, tr_fast.mean_playouts_per_second,
                  fg_fast.mean_playouts_per_second)};
}

Verdict playout_frequency() {
  const auto tr = series("MCE-TR/R", "FG", kFrequencyGames, kFrequencySeconds).mean_playouts_per_second;
  const auto eg = series("MCE-eG/R", "FG", kFrequencyGames, kFrequencySeconds).mean_playouts_per_second;
  const auto pg = series("MCE-PG/R", "FG", kFrequencyGames, kFrequencySeconds).mean_playouts_per_second;
  const auto fg = series("MCE-FG/R", "FG", kFrequencyGames, kFrequencySeconds).mean_playouts_per_second;
  const double spread = std::abs(eg - pg) / std::min(eg, pg);
  const bool ok = tr > eg && tr > pg && eg > fg && pg > fg && spread <= kEpsilonPgSpread;
  return {ok, fmt("playouts/s: TR %.0f > eG(0.75) %.0f ~ PG %.0f (spread %.1f%%, limit %.0f%%) > FG %.0f", tr, eg, pg,
                  100 * spread, 100 * kEpsilonPgSpread, fg)};
}

Verdict oracle_equivalence() {
  // Kingdoms from random play at every stage, scored mid-game and at the end.
  int kingdoms = 0, kingdom_mismatches = 0;
  for (std::uint64_t seed = 1; kingdoms < kOracleKingdoms; ++seed) {
    const GameState s = testing::random_midgame(seed);
    for (const auto& k : s.kingdoms) {
      const auto layout = oracle::layout_of(k);
      const auto b = score_kingdom(k, false);
      const bool ok = b.area == oracle::flood_fill_area(layout) && b.total == oracle::rescored_total(layout) &&
                      score_kingdom(k, true).total == oracle::final_total(layout, k.discard_count());
      kingdom_mismatches += ok ? 0 : 1;
      ++kingdoms;
    }
  }

  int states = 0, state_mismatches = 0;
  for (std::uint64_t seed = 1; states < kOracleStates; ++seed) {
    const GameState s = testing::random_midgame(seed * 31 + 7);
    if (s.finished) continue;
    std::set<oracle::MoveKey> engine;
    const auto moves = legal_moves(s);
    for (const auto& m : moves) engine.insert(oracle::key_of_move(s, m));
    state_mismatches += engine.size() == moves.size() && engine == oracle::brute_force_moves(s) ? 0 : 1;
    ++states;
  }

  const auto endgames = testing::crafted_endgames(kEndgames);
  int mce_hits = 0, uct_hits = 0;
  const std::array<ScoringFunction, 3> fns = {ScoringFunction::WinDrawLoss, ScoringFunction::Relative,
                                              ScoringFunction::Player};
  for (int t = 0; t < kEndgameTrials; ++t) {
    const auto& e = endgames[static_cast<std::size_t>(t) % endgames.size()];
    const long children = static_cast<long>(legal_moves(e.state).size());
    Rng mce_rng(derive_seed(kSeed, static_cast<std::uint64_t>(t)));
    const auto m = mce_search(e.state, PlayoutPolicy::true_random(), fns[static_cast<std::size_t>(t) % fns.size()],
                              SearchBudget::playouts(children * kMcePlayoutsPerChild), mce_rng);
    mce_hits += testing::endgame_index(e, m.move) == e.dominant ? 1 : 0;
    Rng uct_rng(derive_seed(kSeed + 1, static_cast<std::uint64_t>(t)));
    const auto u = uct_search(e.state, PlayoutPolicy::true_random(), kDefaultExploration, BiasMode::none(),
                              SearchBudget::playouts(kUctPlayouts), uct_rng);
    uct_hits += testing::endgame_index(e, u.move) == e.dominant ? 1 : 0;
  }
  const bool ok = endgames.size() == kEndgames && kingdom_mismatches == 0 && state_mismatches == 0 &&
                  mce_hits >= kEndgameHitRate * kEndgameTrials && uct_hits >= kEndgameHitRate * kEndgameTrials;
  return {ok, fmt("scoring %d/%d kingdoms exact; legal_moves %d/%d states exact; endgames (%zu positions): MCE %d/%d, "
                  "UCT %d/%d (need %.0f%%)",
                  kingdoms - kingdom_mismatches, kingdoms, states - state_mismatches, states, endgames.size(), mce_hits,
                  kEndgameTrials, uct_hits, kEndgameTrials, 100 * kEndgameHitRate)};
}

Verdict formulas() {
  const double ucb = ucb_value(0.5, 100, 10, 0.6);
  const double bias = bias_term(BiasMode::progressive_win(0.1), 5, 10, 0.6);
  // Reference values worked by hand.
  struct Example {
    std::array<int, kPlayers> scores;
    int player;
    ScoringFunction fn;
    double expected;
  };
  const std::array<Example, 7> examples = {{
      {{40, 30, 30, 30}, 0, ScoringFunction::WinDrawLoss, 1.0},
      {{40, 40, 30, 30}, 0, ScoringFunction::WinDrawLoss, 0.5},
      {{30, 40, 30, 30}, 0, ScoringFunction::WinDrawLoss, 0.0},
      {{60, 40, 20, 10}, 0, ScoringFunction::Relative, 0.6},
      {{10, 40, 30, 30}, 1, ScoringFunction::Relative, 40.0 / 70.0},
      {{0, 0, 0, 0}, 2, ScoringFunction::Relative, 0.5},
      {{12, 40, 30, 30}, 0, ScoringFunction::Player, 12.0},
  }};
  int passed = 0;
  for (const auto& e : examples) passed += std::abs(score_playout(e.scores, e.player, e.fn) - e.expected) < 1e-12;
  const bool ok = std::abs(ucb - kUcbExpected) <= kUcbTolerance && bias == 0.1 && passed == static_cast<int>(examples.size());
  return {ok, fmt("ucb_value(0.5,100,10,0.6) = %.6f (0.9072 +/- 1e-4); bias_term(ProgressiveWin 0.1, 5, 10, 0.6) = "
                  "%.17g; score_playout %d/%zu",
                  ucb, bias, passed, examples.size())};
}

Verdict protocol_integrity() {
  server::GameService service;
  server::HttpServer http(service);
  const int port = http.bind("127.0.0.1", 0);
  http.start();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);

  AgentConfig searcher;
  searcher.budget = SearchBudget::playouts(100);
  const std::array<AgentConfig, kPlayers> agents = {parse_agent("MCE-TR/R", searcher), parse_agent("FG"),
                                                    parse_agent("UCT-TR", searcher), parse_agent("GPRD")};
  const auto result = run_game(agents, 2024, {true, url});

  // Declared after the server so it disconnects before the server shuts down.
  server::Client client(url);
  const std::string id = client.list_games().body.at("games").at(0).at("gameId");
  auto doc = client.state(id).body;
  GameState replayed = new_game(doc.at("seed").get<std::uint64_t>());
  std::size_t plies = 0;
  bool same_history = doc.at("history").size() == result.history.size();
  for (const auto& h : doc.at("history")) {
    const Move m = wire::move_from_json(h.at("move"));
    same_history = same_history && plies < result.history.size() && result.history[plies].move == m &&
                   result.history[plies].player == h.at("player").get<int>();
    replayed = apply_move(replayed, m);
    ++plies;
  }
  const auto snapshot = service.inspect(id);
  const bool exact = snapshot && snapshot->first == replayed;
  auto served = doc;
  served.erase("seed");
  served.erase("history");
  served.erase("players");
  const bool same_doc = served == wire::state_document(id, wire::Status::Finished, replayed);

  // Error classes on a fresh game.
  const std::string fresh = client.create_game(7).body.at("gameId");
  std::array<std::string, kPlayers> tokens;
  for (int p = 0; p < kPlayers; ++p) {
    const auto j = client.join(fresh).body;
    tokens[static_cast<std::size_t>(j.at("player").get<int>())] = j.at("token");
  }
  const auto before = client.state(fresh).body;
  const int current = before.at("currentPlayer");
  const Move legal = wire::move_from_json(before.at("possibleMoves").at(0));
  const auto bad_token = client.post_move(fresh, std::string(32, '0'), legal);
  const auto wrong_turn = client.post_move(fresh, tokens[static_cast<std::size_t>((current + 1) % kPlayers)], legal);
  // Round 1 has nothing to place or discard.
  const auto illegal = client.post_move(fresh, tokens[static_cast<std::size_t>(current)], Move::discard(legal.selection));
  const bool unchanged = client.state(fresh).body == before;
  const bool errors = bad_token.status == 403 && wrong_turn.status == 409 &&
                      wrong_turn.body.value("error", "") == "not_your_turn" && illegal.status == 422 &&
                      illegal.body.value("error", "") == "illegal_move" && unchanged;
  return {exact && same_doc && same_history && errors && replayed.finished,
          fmt("%zu plies over HTTP; replay %s engine state, %s state document; errors: bad token %d, wrong turn %d, "
              "illegal %d, state %s",
              plies, exact ? "equals" : "DIFFERS FROM", same_doc ? "equals" : "DIFFERS FROM", bad_token.status,
              wrong_turn.status, illegal.status, unchanged ? "unchanged" : "CHANGED")};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string report;
  app.add_option("--criterion", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--report", report, "Also append each result line to this file");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "draw count", draw_count},
      {2, "win rates vs three random players", table_one},
      {3, "score progression", score_progression},
      {4, "scoring function ordering", table_two},
      {5, "victory margins vs three greedy players", table_three},
      {6, "playout policy crossover", crossover},
      {7, "playout frequency ordering", playout_frequency},
      {8, "oracle equivalence", oracle_equivalence},
      {9, "formulas", formulas},
      {10, "protocol integrity", protocol_integrity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string line =
        std::string(v.pass ? "PASS" : "FAIL") + ' ' + std::to_string(c.id) + ' ' + c.title + ": " + v.detail +
        fmt(" [%.1f s]", seconds);
    std::cout << line << std::endl;
    if (!report.empty()) std::ofstream(report, std::ios::app) << line << '\n';
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
