#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kdom/agent.hpp"
#include "kdom/game.hpp"

namespace kdom::harness {

/// Player's total minus the best opponent total.
int victory_margin(const std::array<int, kPlayers>& final_scores, int player);

enum class Outcome { Win, Draw, Loss };
/// Win: sole top score. Draw: top score shared.
Outcome outcome_for(const std::array<int, kPlayers>& final_scores, int player);

struct GameOptions {
  bool server_mode = false;
  /// Server to play through in server mode; empty starts a private
  /// in-process server on a loopback port for the duration of the game.
  std::string server_url;
};

struct Ply {
  int player;
  Move move;
};

struct GameResult {
  std::uint64_t seed = 0;
  std::array<int, kPlayers> final_scores{};
  /// Running totals after each round (round 13 uses final scoring).
  std::array<std::array<int, kPlayers>, kRounds> round_scores{};
  /// |legal moves| at each player's decision in each round.
  std::array<std::array<int, kPlayers>, kRounds> branching{};
  /// As branching, but both orientations of a domino with two identical
  /// tiles count as separate moves.
  std::array<std::array<int, kPlayers>, kRounds> oriented_branching{};
  std::array<long, kPlayers> playouts{};
  std::array<double, kPlayers> think_seconds{};
  std::array<int, kPlayers> budget_violations{};  // decisions over 1.5x the time budget
  std::vector<Ply> history;
};

/// Agent seeds are derive_seed(seed, seat). Agents see only public views;
/// time is measured from handing over the state to receiving the move.
GameResult run_game(const std::array<AgentConfig, kPlayers>& agents, std::uint64_t seed, const GameOptions& options = {});

struct SeriesConfig {
  AgentConfig player;
  std::array<AgentConfig, kPlayers - 1> opponents;
  int games = 200;
  std::uint64_t base_seed = 1;
  /// Games run concurrently. Timed budgets assume one game per core; more
  /// games than cores distort playout counts.
  int parallelism = 1;
  GameOptions game_options;
};

/// One game of a series from the evaluated player's point of view.
struct SeriesGame {
  std::uint64_t seed = 0;
  int seat = 0;
  int score = 0;
  int margin = 0;
  Outcome outcome = Outcome::Loss;
  std::array<int, kRounds> round_scores{};
  std::array<int, kRounds> branching{};
  long playouts = 0;
  double think_seconds = 0.0;
  int budget_violations = 0;
};

struct SeriesStats {
  int games = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  double mean_score = 0.0;
  std::optional<double> score_ci95;  // absent for a single game
  double mean_victory_margin = 0.0;
  std::optional<double> ci95_half_width;  // of the victory margin; absent for a single game
  std::array<double, kRounds> per_round_mean_scores{};
  std::array<double, kRounds> per_round_mean_branching{};
  double mean_playouts_per_second = 0.0;  // total playouts / total thinking time
  int budget_violations = 0;

  friend bool operator==(const SeriesStats&, const SeriesStats&) = default;
};

/// 1.96 * sample standard deviation / sqrt(n); absent when n < 2.
std::optional<double> ci95(const std::vector<double>& xs);

SeriesStats summarize(const std::vector<SeriesGame>& games);

struct SeriesRun {
  SeriesStats stats;
  std::vector<SeriesGame> games;
};

/// Game i uses seed base_seed + i with the player in seat i % 4 and the
/// opponents filling the remaining seats in order.
SeriesRun run_series(const SeriesConfig& config);

struct BranchingResult {
  std::array<double, kRounds> mean{};  // designated player
  std::array<double, kRounds> ci95{};
  /// Mean branching per seat and round over all games.
  std::array<std::array<double, kRounds>, kPlayers> seat_means{};
  std::array<std::array<double, kRounds>, kPlayers> oriented_seat_means{};
};

/// 4 x TR self-play. The designated player is seat i % 4 in game i.
BranchingResult branching_experiment(int games, std::uint64_t seed, int parallelism = 1);

struct TreeSizeEstimate {
  double game_tree = 0.0;     // product of the per-seat, per-round mean branching factors
  double all_shuffles = 0.0;  // game_tree * count_deck_draws()
};

TreeSizeEstimate game_tree_size_estimate(const std::array<std::array<double, kRounds>, kPlayers>& seat_means);

/// One CSV row: an evaluated configuration and its series statistics.
struct SeriesRow {
  std::string experiment;
  std::string agent;
  std::string opponents;
  double time_per_ply = 0.0;  // seconds; 0 when the budget is a playout count or unused
  long max_playouts = 0;
  double c = 0.0;
  double w = 0.0;
  SeriesStats stats;

  friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

SeriesRow make_row(const std::string& experiment, const SeriesConfig& config, const SeriesStats& stats);

void write_csv(std::ostream& out, const std::vector<SeriesRow>& rows);
/// Throws std::runtime_error on a malformed file.
std::vector<SeriesRow> read_csv(std::istream& in);

/// Per-game log for a series.
void write_games_csv(std::ostream& out, const std::vector<SeriesGame>& games);

struct SweepSpec {
  std::vector<std::string> agents;  // evaluated against three FG opponents
  std::vector<double> times;        // seconds per ply; c and w sweeps use the first
  std::vector<double> cs;           // c_sweep grid
  std::vector<double> ws;           // w_sweep grid
  int games = 200;
  std::uint64_t seed = 1;
  int parallelism = 1;
};

enum class Experiment { TimeSweep, CSweep, WSweep, GrandTable };
std::string to_string(Experiment e);

/// Runs every grid point of `spec` and returns one row per point. Rows are
/// also passed to `on_row` as they complete when it is set.
std::vector<SeriesRow> sweep(Experiment e, const SweepSpec& spec,
                             const std::function<void(const SeriesRow&)>& on_row = nullptr);

}  // namespace kdom::harness
