#include "kdom/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kdom/http.hpp"
#include "kdom/wire.hpp"

namespace kdom::harness {

int victory_margin(const std::array<int, kPlayers>& final_scores, int player) {
  int best = INT32_MIN;
  for (int p = 0; p < kPlayers; ++p) {
    if (p != player) best = std::max(best, final_scores[static_cast<std::size_t>(p)]);
  }
  return final_scores[static_cast<std::size_t>(player)] - best;
}

Outcome outcome_for(const std::array<int, kPlayers>& final_scores, int player) {
  const int m = victory_margin(final_scores, player);
  return m > 0 ? Outcome::Win : m == 0 ? Outcome::Draw : Outcome::Loss;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Seats {
  std::vector<Agent> agents;

  Seats(const std::array<AgentConfig, kPlayers>& configs, std::uint64_t seed) {
    for (int p = 0; p < kPlayers; ++p) {
      agents.emplace_back(configs[static_cast<std::size_t>(p)], derive_seed(seed, static_cast<std::uint64_t>(p)));
    }
  }

  // Times one decision and books it on `result`.
  Move decide(int player, const GameState& view, GameResult& result) {
    auto& agent = agents[static_cast<std::size_t>(player)];
    const auto t0 = Clock::now();
    const Decision d = agent.choose(view);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto p = static_cast<std::size_t>(player);
    result.playouts[p] += d.playouts;
    result.think_seconds[p] += seconds;
    const auto& budget = agent.config().budget;
    if (agent.config().searches() && budget.timed() &&
        seconds > 1.5 * std::chrono::duration<double>(budget.wall_time()).count()) {
      ++result.budget_violations[p];
    }
    return d.move;
  }
};

// Counts both orientations of a domino with two identical tiles, which
// legal_moves merges because they produce the same layout.
int oriented_branching(const GameState& view, const std::vector<Move>& moves) {
  const int d = view.domino_to_place();
  const bool doubled = d != 0 && domino(d).symmetric();
  int n = 0;
  for (const auto& m : moves) n += doubled && m.kind == PlacementKind::Place ? 2 : 1;
  return n;
}

void record_branching(GameResult& result, const GameState& view, const std::vector<Move>& moves) {
  const auto r = static_cast<std::size_t>(view.round - 1);
  const auto p = static_cast<std::size_t>(view.current_player());
  result.branching[r][p] = static_cast<int>(moves.size());
  result.oriented_branching[r][p] = oriented_branching(view, moves);
}

GameResult run_in_process(const std::array<AgentConfig, kPlayers>& configs, std::uint64_t seed) {
  GameResult result;
  result.seed = seed;
  Seats seats(configs, seed);
  GameState s = new_game(seed);
  while (!s.finished) {
    const int round = s.round;
    const int player = s.current_player();
    const GameState view = public_view(s);
    record_branching(result, view, legal_moves(view));
    const Move m = seats.decide(player, view, result);
    s = apply_move(s, m);
    result.history.push_back({player, m});
    if (s.finished || s.round != round) result.round_scores[static_cast<std::size_t>(round - 1)] = scores(s);
  }
  result.final_scores = scores(s);
  return result;
}

std::array<int, kPlayers> totals_of(const wire::json& doc) {
  std::array<int, kPlayers> out{};
  for (std::size_t p = 0; p < kPlayers; ++p) out[p] = doc.at("scores").at(p).at("total").get<int>();
  return out;
}

void expect(const server::Response& r, int status, const char* what) {
  if (r.status != status) throw std::runtime_error(std::string(what) + " failed: " + r.body.dump());
}

GameResult run_over_http(const std::array<AgentConfig, kPlayers>& configs, std::uint64_t seed, const std::string& url) {
  GameResult result;
  result.seed = seed;
  Seats seats(configs, seed);
  server::Client client(url);
  const auto created = client.create_game(seed);
  expect(created, 201, "create game");
  const std::string id = created.body.at("gameId");
  std::array<std::string, kPlayers> tokens;
  for (int p = 0; p < kPlayers; ++p) {
    const auto joined = client.join(id);
    expect(joined, 200, "join");
    tokens[static_cast<std::size_t>(joined.body.at("player").get<int>())] = joined.body.at("token");
  }

  auto state = client.state(id);
  expect(state, 200, "get state");
  wire::json doc = state.body;
  while (doc.at("status") != "finished") {
    const int round = doc.at("round");
    const int player = doc.at("currentPlayer");
    const GameState view = wire::state_from_document(doc);
    std::vector<Move> offered;
    for (const auto& m : doc.at("possibleMoves")) offered.push_back(wire::move_from_json(m));
    record_branching(result, view, offered);
    const Move m = seats.decide(player, view, result);
    const auto posted = client.post_move(id, tokens[static_cast<std::size_t>(player)], m);
    expect(posted, 200, "post move");
    doc = posted.body;
    result.history.push_back({player, m});
    if (doc.at("status") == "finished" || doc.at("round") != round) {
      result.round_scores[static_cast<std::size_t>(round - 1)] = totals_of(doc);
    }
  }
  result.final_scores = totals_of(doc);
  return result;
}

}  // namespace

GameResult run_game(const std::array<AgentConfig, kPlayers>& agents, std::uint64_t seed, const GameOptions& options) {
  if (!options.server_mode) return run_in_process(agents, seed);
  if (!options.server_url.empty()) return run_over_http(agents, seed, options.server_url);
  server::GameService service;
  server::HttpServer http(service);
  const int port = http.bind("127.0.0.1", 0);
  http.start();
  return run_over_http(agents, seed, "http://127.0.0.1:" + std::to_string(port));
}

std::optional<double> ci95(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nullopt;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
}

SeriesStats summarize(const std::vector<SeriesGame>& games) {
  SeriesStats s;
  s.games = static_cast<int>(games.size());
  if (games.empty()) return s;
  std::vector<double> scores, margins;
  long playouts = 0;
  double seconds = 0;
  for (const auto& g : games) {
    s.wins += g.outcome == Outcome::Win ? 1 : 0;
    s.draws += g.outcome == Outcome::Draw ? 1 : 0;
    s.losses += g.outcome == Outcome::Loss ? 1 : 0;
    scores.push_back(g.score);
    margins.push_back(g.margin);
    for (std::size_t r = 0; r < kRounds; ++r) {
      s.per_round_mean_scores[r] += g.round_scores[r];
      s.per_round_mean_branching[r] += g.branching[r];
    }
    playouts += g.playouts;
    seconds += g.think_seconds;
    s.budget_violations += g.budget_violations;
  }
  const auto n = static_cast<double>(games.size());
  for (double v : scores) s.mean_score += v;
  s.mean_score /= n;
  for (double v : margins) s.mean_victory_margin += v;
  s.mean_victory_margin /= n;
  for (std::size_t r = 0; r < kRounds; ++r) {
    s.per_round_mean_scores[r] /= n;
    s.per_round_mean_branching[r] /= n;
  }
  s.score_ci95 = ci95(scores);
  s.ci95_half_width = ci95(margins);
  s.mean_playouts_per_second = seconds > 0 ? static_cast<double>(playouts) / seconds : 0.0;
  return s;
}

namespace {

// Runs job(i) for i in [0, n) on `parallelism` threads.
void parallel_for(int n, int parallelism, const std::function<void(int)>& job) {
  const int workers = std::max(1, std::min(parallelism, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SeriesRun run_series(const SeriesConfig& config) {
  if (config.games < 1) throw std::invalid_argument("a series needs at least one game");
  SeriesRun run;
  run.games.resize(static_cast<std::size_t>(config.games));
  parallel_for(config.games, config.parallelism, [&](int i) {
    const int seat = i % kPlayers;
    std::array<AgentConfig, kPlayers> agents;
    for (int p = 0, o = 0; p < kPlayers; ++p) {
      agents[static_cast<std::size_t>(p)] = p == seat ? config.player : config.opponents[static_cast<std::size_t>(o++)];
    }
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
    const GameResult r = run_game(agents, seed, config.game_options);
    const auto s = static_cast<std::size_t>(seat);
    SeriesGame& g = run.games[static_cast<std::size_t>(i)];
    g.seed = seed;
    g.seat = seat;
    g.score = r.final_scores[s];
    g.margin = victory_margin(r.final_scores, seat);
    g.outcome = outcome_for(r.final_scores, seat);
    for (std::size_t round = 0; round < kRounds; ++round) {
      g.round_scores[round] = r.round_scores[round][s];
      g.branching[round] = r.branching[round][s];
    }
    g.playouts = r.playouts[s];
    g.think_seconds = r.think_seconds[s];
    g.budget_violations = r.budget_violations[s];
  });
  run.stats = summarize(run.games);
  return run;
}

BranchingResult branching_experiment(int games, std::uint64_t seed, int parallelism) {
  if (games < 1) throw std::invalid_argument("need at least one game");
  AgentConfig tr;
  tr.strategy = Strategy::TrueRandom;
  std::vector<GameResult> results(static_cast<std::size_t>(games));
  parallel_for(games, parallelism, [&](int i) {
    results[static_cast<std::size_t>(i)] = run_game({tr, tr, tr, tr}, seed + static_cast<std::uint64_t>(i));
  });

  BranchingResult out;
  for (std::size_t r = 0; r < kRounds; ++r) {
    std::vector<double> designated;
    for (std::size_t i = 0; i < results.size(); ++i) {
      designated.push_back(results[i].branching[r][i % kPlayers]);
      for (std::size_t p = 0; p < kPlayers; ++p) {
        out.seat_means[p][r] += results[i].branching[r][p];
        out.oriented_seat_means[p][r] += results[i].oriented_branching[r][p];
      }
    }
    double sum = 0;
    for (double b : designated) sum += b;
    out.mean[r] = sum / static_cast<double>(games);
    out.ci95[r] = ci95(designated).value_or(0.0);
    for (std::size_t p = 0; p < kPlayers; ++p) {
      out.seat_means[p][r] /= static_cast<double>(games);
      out.oriented_seat_means[p][r] /= static_cast<double>(games);
    }
  }
  return out;
}

TreeSizeEstimate game_tree_size_estimate(const std::array<std::array<double, kRounds>, kPlayers>& seat_means) {
  TreeSizeEstimate e;
  e.game_tree = 1.0;
  for (const auto& rounds : seat_means) {
    for (double b : rounds) e.game_tree *= b;
  }
  e.all_shuffles = e.game_tree * count_deck_draws().convert_to<double>();
  return e;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string optional_field(const std::optional<double>& v) { return v ? exact(*v) : std::string(); }

// Agent specs contain no commas; quoting is never needed.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::vector<std::string> header() {
  std::vector<std::string> h = {"experiment", "agent", "opponents", "time_per_ply", "max_playouts", "c", "w",
                                "games", "wins", "draws", "losses", "mean_score", "score_ci95",
                                "mean_victory_margin", "ci95_half_width", "mean_playouts_per_second",
                                "budget_violations"};
  for (int r = 1; r <= kRounds; ++r) h.push_back("score_r" + std::to_string(r));
  for (int r = 1; r <= kRounds; ++r) h.push_back("branching_r" + std::to_string(r));
  return h;
}

}  // namespace

SeriesRow make_row(const std::string& experiment, const SeriesConfig& config, const SeriesStats& stats) {
  SeriesRow row;
  row.experiment = experiment;
  row.agent = agent_name(config.player);
  for (std::size_t i = 0; i < config.opponents.size(); ++i) {
    row.opponents += (i ? "+" : "") + agent_name(config.opponents[i]);
  }
  if (config.player.searches()) {
    const auto& b = config.player.budget;
    if (b.timed()) {
      row.time_per_ply = std::chrono::duration<double>(b.wall_time()).count();
    } else {
      row.max_playouts = b.max_playouts();
    }
  }
  if (config.player.strategy == Strategy::Uct) {
    row.c = config.player.c;
    row.w = config.player.bias.weight;
  }
  row.stats = stats;
  return row;
}

void write_csv(std::ostream& out, const std::vector<SeriesRow>& rows) {
  const auto h = header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out << r.experiment << ',' << r.agent << ',' << r.opponents << ',' << exact(r.time_per_ply) << ','
        << r.max_playouts << ',' << exact(r.c) << ',' << exact(r.w) << ',' << s.games << ',' << s.wins << ','
        << s.draws << ',' << s.losses << ',' << exact(s.mean_score) << ',' << optional_field(s.score_ci95) << ','
        << exact(s.mean_victory_margin) << ',' << optional_field(s.ci95_half_width) << ','
        << exact(s.mean_playouts_per_second) << ',' << s.budget_violations;
    for (double v : s.per_round_mean_scores) out << ',' << exact(v);
    for (double v : s.per_round_mean_branching) out << ',' << exact(v);
    out << '\n';
  }
}

std::vector<SeriesRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split(line) != header()) throw std::runtime_error("unexpected CSV header");
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header().size()) throw std::runtime_error("wrong field count in CSV row: " + line);
    try {
      SeriesRow r;
      std::size_t i = 0;
      r.experiment = f[i++];
      r.agent = f[i++];
      r.opponents = f[i++];
      r.time_per_ply = number(f[i++]);
      r.max_playouts = std::stol(f[i++]);
      r.c = number(f[i++]);
      r.w = number(f[i++]);
      auto& s = r.stats;
      s.games = std::stoi(f[i++]);
      s.wins = std::stoi(f[i++]);
      s.draws = std::stoi(f[i++]);
      s.losses = std::stoi(f[i++]);
      s.mean_score = number(f[i++]);
      if (const auto& v = f[i++]; !v.empty()) s.score_ci95 = number(v);
      s.mean_victory_margin = number(f[i++]);
      if (const auto& v = f[i++]; !v.empty()) s.ci95_half_width = number(v);
      s.mean_playouts_per_second = number(f[i++]);
      s.budget_violations = std::stoi(f[i++]);
      for (auto& v : s.per_round_mean_scores) v = number(f[i++]);
      for (auto& v : s.per_round_mean_branching) v = number(f[i++]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw std::runtime_error("bad CSV row '" + line + "': " + e.what());
    }
  }
  return rows;
}

void write_games_csv(std::ostream& out, const std::vector<SeriesGame>& games) {
  out << "seed,seat,score,margin,outcome,playouts,think_seconds,budget_violations";
  for (int r = 1; r <= kRounds; ++r) out << ",score_r" << r;
  for (int r = 1; r <= kRounds; ++r) out << ",branching_r" << r;
  out << '\n';
  for (const auto& g : games) {
    const char* outcome = g.outcome == Outcome::Win ? "win" : g.outcome == Outcome::Draw ? "draw" : "loss";
    out << g.seed << ',' << g.seat << ',' << g.score << ',' << g.margin << ',' << outcome << ',' << g.playouts << ','
        << exact(g.think_seconds) << ',' << g.budget_violations;
    for (int v : g.round_scores) out << ',' << v;
    for (int v : g.branching) out << ',' << v;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::TimeSweep: return "time_sweep";
    case Experiment::CSweep: return "c_sweep";
    case Experiment::WSweep: return "w_sweep";
    case Experiment::GrandTable: return "grand_table";
  }
  return "?";
}

std::vector<SeriesRow> sweep(Experiment e, const SweepSpec& spec, const std::function<void(const SeriesRow&)>& on_row) {
  if (spec.agents.empty() || spec.times.empty()) throw std::invalid_argument("sweep needs agents and times");
  if (e == Experiment::CSweep && spec.cs.empty()) throw std::invalid_argument("c sweep needs c values");
  if (e == Experiment::WSweep && spec.ws.empty()) throw std::invalid_argument("w sweep needs w values");

  AgentConfig fg;
  fg.strategy = Strategy::FullGreedy;
  std::vector<SeriesRow> rows;
  auto run_point = [&](AgentConfig player) {
    SeriesConfig config;
    config.player = player;
    config.opponents = {fg, fg, fg};
    config.games = spec.games;
    config.base_seed = spec.seed;
    config.parallelism = spec.parallelism;
    rows.push_back(make_row(to_string(e), config, run_series(config).stats));
    if (on_row) on_row(rows.back());
  };

  for (const auto& name : spec.agents) {
    AgentConfig base = parse_agent(name);
    switch (e) {
      case Experiment::TimeSweep:
      case Experiment::GrandTable:
        for (double t : spec.times) {
          AgentConfig a = base;
          a.budget = SearchBudget::seconds(t);
          run_point(a);
        }
        break;
      case Experiment::CSweep:
        for (double c : spec.cs) {
          AgentConfig a = base;
          a.budget = SearchBudget::seconds(spec.times.front());
          a.c = c;
          run_point(a);
        }
        break;
      case Experiment::WSweep:
        for (double w : spec.ws) {
          AgentConfig a = base;
          a.budget = SearchBudget::seconds(spec.times.front());
          a.bias.weight = w;
          run_point(a);
        }
        break;
    }
  }
  return rows;
}

}  // namespace kdom::harness
