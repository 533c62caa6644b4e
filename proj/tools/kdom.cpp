#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "kdom/harness.hpp"

using namespace kdom;
using namespace kdom::harness;

namespace {

struct Common {
  std::string agent = "FG";
  std::string opponents = "FG";
  int games = 200;
  double time_per_ply = 1.0;
  long max_playouts = 0;
  std::uint64_t seed = 1;
  std::string out;
  int parallelism = 1;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

AgentConfig make_agent(const std::string& name, const Common& c) {
  AgentConfig defaults;
  defaults.budget = c.max_playouts > 0 ? SearchBudget::playouts(c.max_playouts) : SearchBudget::seconds(c.time_per_ply);
  return parse_agent(name, defaults);
}

// One name fills all three seats.
std::array<AgentConfig, kPlayers - 1> make_opponents(const Common& c) {
  const auto names = split_list(c.opponents);
  if (names.size() != 1 && names.size() != kPlayers - 1) {
    throw CLI::ValidationError("--opponents", "give one agent or three, comma-separated");
  }
  std::array<AgentConfig, kPlayers - 1> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = make_agent(names[names.size() == 1 ? 0 : i], c);
  return out;
}

void warn_parallelism(int parallelism, bool timed) {
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  if (timed && parallelism > static_cast<int>(cores)) {
    std::cerr << "warning: " << parallelism << " concurrent games on " << cores
              << " cores; timed agents will complete fewer playouts per ply than on a dedicated core\n";
  }
}

// Writes to --out when given, otherwise stdout.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write(f);
}

void add_common(CLI::App* cmd, Common& c, bool agents = true) {
  if (agents) {
    cmd->add_option("--agent", c.agent, "Evaluated agent, e.g. MCE-PG/R or UCT_W-FG")->capture_default_str();
    cmd->add_option("--opponents", c.opponents, "One agent for all seats or three, comma-separated")
        ->capture_default_str();
  }
  cmd->add_option("--games", c.games, "Games per data point")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--time-per-ply", c.time_per_ply, "Search time per decision in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-playouts", c.max_playouts, "Playout budget per decision; overrides --time-per-ply")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", c.seed, "Base seed; game i uses seed + i")->capture_default_str();
  cmd->add_option("--out", c.out, "Output CSV file (default stdout)");
  cmd->add_option("--parallelism", c.parallelism,
                  "Concurrent games. Timed budgets assume one game per core; more distorts playout counts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void print_summary(std::ostream& out, const std::string& name, const SeriesStats& s) {
  char line[256];
  std::snprintf(line, sizeof line, "%s: %d games, %d W / %d D / %d L, score %.2f, margin %.2f", name.c_str(), s.games,
                s.wins, s.draws, s.losses, s.mean_score, s.mean_victory_margin);
  out << line;
  if (s.ci95_half_width) out << " +/- " << *s.ci95_half_width;
  out << ", " << static_cast<long>(s.mean_playouts_per_second) << " playouts/s";
  if (s.budget_violations > 0) out << ", " << s.budget_violations << " budget overruns";
  out << '\n';
}

int play(const Common& c, const std::string& agents, const std::string& server) {
  auto names = split_list(agents);
  if (names.size() == 1) names.assign(kPlayers, names.front());
  if (names.size() != kPlayers) throw CLI::ValidationError("--agents", "give one agent or four, comma-separated");
  std::array<AgentConfig, kPlayers> configs;
  for (std::size_t p = 0; p < kPlayers; ++p) configs[p] = make_agent(names[p], c);
  GameOptions options;
  options.server_mode = !server.empty();
  options.server_url = server;
  const auto r = run_game(configs, c.seed, options);
  for (const auto& ply : r.history) std::cout << "player " << ply.player << ": " << to_string(ply.move) << '\n';
  for (std::size_t p = 0; p < kPlayers; ++p) {
    std::cout << "seat " << p << " " << names[p] << ": " << r.final_scores[p];
    if (r.playouts[p] > 0) std::cout << " (" << r.playouts[p] << " playouts)";
    std::cout << '\n';
  }
  return 0;
}

int series(const Common& c, const std::string& games_out) {
  SeriesConfig config;
  config.player = make_agent(c.agent, c);
  config.opponents = make_opponents(c);
  config.games = c.games;
  config.base_seed = c.seed;
  config.parallelism = c.parallelism;
  warn_parallelism(c.parallelism, c.max_playouts == 0);
  const auto run = run_series(config);
  print_summary(std::cerr, c.agent, run.stats);
  emit(c.out, [&](std::ostream& o) { write_csv(o, {make_row("series", config, run.stats)}); });
  if (!games_out.empty()) emit(games_out, [&](std::ostream& o) { write_games_csv(o, run.games); });
  return 0;
}

int branching(const Common& c) {
  const auto b = branching_experiment(c.games, c.seed, c.parallelism);
  emit(c.out, [&](std::ostream& o) {
    o << "round,mean,ci95";
    for (int p = 0; p < kPlayers; ++p) o << ",seat" << p;
    for (int p = 0; p < kPlayers; ++p) o << ",oriented_seat" << p;
    o << '\n';
    for (std::size_t r = 0; r < kRounds; ++r) {
      o << r + 1 << ',' << b.mean[r] << ',' << b.ci95[r];
      for (std::size_t p = 0; p < kPlayers; ++p) o << ',' << b.seat_means[p][r];
      for (std::size_t p = 0; p < kPlayers; ++p) o << ',' << b.oriented_seat_means[p][r];
      o << '\n';
    }
  });
  const auto merged = game_tree_size_estimate(b.seat_means);
  const auto oriented = game_tree_size_estimate(b.oriented_seat_means);
  std::cerr << "game tree size: " << merged.game_tree << " (all shuffles " << merged.all_shuffles << ")\n"
            << "counting both orientations of identical-tile dominoes: " << oriented.game_tree << " (all shuffles "
            << oriented.all_shuffles << ")\n";
  return 0;
}

int run_sweep(Experiment e, const Common& c, const std::vector<std::string>& agents, const std::vector<double>& times,
              const std::vector<double>& cs, const std::vector<double>& ws) {
  SweepSpec spec;
  for (const auto& a : agents) {
    for (auto& name : split_list(a)) spec.agents.push_back(name);
  }
  spec.times = times.empty() ? std::vector<double>{c.time_per_ply} : times;
  spec.cs = cs;
  spec.ws = ws;
  spec.games = c.games;
  spec.seed = c.seed;
  spec.parallelism = c.parallelism;
  warn_parallelism(c.parallelism, true);
  std::vector<SeriesRow> rows;
  sweep(e, spec, [&](const SeriesRow& row) {
    std::ostringstream label;
    label << row.agent << " t=" << row.time_per_ply << " c=" << row.c << " w=" << row.w;
    print_summary(std::cerr, label.str(), row.stats);
    rows.push_back(row);
    // Rewritten after every point so an interrupted sweep keeps its results.
    if (!c.out.empty()) emit(c.out, [&](std::ostream& o) { write_csv(o, rows); });
  });
  if (c.out.empty()) write_csv(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kingdomino engine, agents and experiment harness"};
  app.require_subcommand(1);

  Common c;
  std::string agents = "FG", server, games_out;
  auto* play_cmd = app.add_subcommand("play", "Play one game and print the moves and scores");
  add_common(play_cmd, c, false);
  play_cmd->add_option("--agents", agents, "One agent for all seats or four, comma-separated")->capture_default_str();
  play_cmd->add_option("--server", server, "Play through a running server, e.g. http://127.0.0.1:8080");

  auto* series_cmd = app.add_subcommand("series", "Evaluate one agent against three opponents");
  add_common(series_cmd, c);
  series_cmd->add_option("--games-out", games_out, "Per-game CSV log");

  auto* branching_cmd = app.add_subcommand("branching", "Branching factors and tree size from random self-play");
  add_common(branching_cmd, c, false);

  std::vector<std::string> sweep_agents;
  std::vector<double> times, cs, ws;
  struct SweepCommand {
    Experiment experiment;
    CLI::App* cmd;
  };
  std::vector<SweepCommand> sweeps;
  const std::array<std::tuple<Experiment, const char*, const char*>, 4> sweep_defs = {{
      {Experiment::TimeSweep, "sweep-time", "Victory margin against three FG opponents per time budget"},
      {Experiment::CSweep, "sweep-c", "Victory margin per UCT exploration constant"},
      {Experiment::WSweep, "sweep-w", "Victory margin per progressive bias weight"},
      {Experiment::GrandTable, "grand-table", "All agents against three FG opponents"},
  }};
  for (const auto& [e, name, help] : sweep_defs) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, c, false);
    cmd->add_option("--agent", sweep_agents, "Agents to evaluate; repeat or comma-separate")->required();
    cmd->add_option("--times", times, "Seconds per ply; defaults to --time-per-ply")->delimiter(',');
    if (e == Experiment::CSweep) cmd->add_option("--c", cs, "Exploration constants")->delimiter(',')->required();
    if (e == Experiment::WSweep) cmd->add_option("--w", ws, "Bias weights")->delimiter(',')->required();
    sweeps.push_back({e, cmd});
  }

  auto* draws_cmd = app.add_subcommand("count-draws", "Number of distinct draft sequences for the deck");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*play_cmd) return play(c, agents, server);
    if (*series_cmd) return series(c, games_out);
    if (*branching_cmd) return branching(c);
    if (*draws_cmd) {
      const auto n = count_deck_draws();
      std::cout << n << '\n' << scientific(n, 2) << '\n';
      return 0;
    }
    for (const auto& s : sweeps) {
      if (*s.cmd) return run_sweep(s.experiment, c, sweep_agents, times, cs, ws);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
