#include "kdom/mce.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "kdom/static_agents.hpp"

namespace kdom {

PlayoutPolicy PlayoutPolicy::epsilon_greedy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  return {Kind::EpsilonGreedy, eps};
}

SearchBudget SearchBudget::time(std::chrono::microseconds limit) {
  if (limit.count() <= 0) throw std::invalid_argument("time budget must be positive");
  SearchBudget b;
  b.wall_ = limit;
  return b;
}

SearchBudget SearchBudget::playouts(long n) {
  if (n <= 0) throw std::invalid_argument("playout budget must be positive");
  SearchBudget b;
  b.playouts_ = n;
  return b;
}

BudgetClock::BudgetClock(const SearchBudget& b) : budget_(b) {
  if (b.timed()) deadline_ = SearchBudget::Clock::now() + b.wall_time();
}

bool BudgetClock::exhausted(long playouts_done) const {
  // The clock is read after every playout: a read costs well under 1% of the
  // cheapest playout, and it keeps overshoot below one playout.
  if (budget_.timed()) return SearchBudget::Clock::now() >= deadline_;
  return playouts_done >= budget_.max_playouts();
}

double score_playout(const std::array<int, kPlayers>& final_scores, int player, ScoringFunction fn) {
  const int own = final_scores[static_cast<std::size_t>(player)];
  int best_other = 0;
  bool first = true;
  for (int p = 0; p < kPlayers; ++p) {
    if (p == player) continue;
    const int v = final_scores[static_cast<std::size_t>(p)];
    best_other = first ? v : std::max(best_other, v);
    first = false;
  }
  switch (fn) {
    case ScoringFunction::WinDrawLoss:
      if (own > best_other) return 1.0;
      return own == best_other ? 0.5 : 0.0;
    case ScoringFunction::Relative:
      if (own + best_other == 0) return 0.5;
      return static_cast<double>(own) / static_cast<double>(own + best_other);
    case ScoringFunction::Player:
      return own;
  }
  throw std::logic_error("unknown scoring function");
}

Move policy_move(const GameState& s, const PlayoutPolicy& policy, int root_player, Rng& rng) {
  switch (policy.kind) {
    case PlayoutPolicy::Kind::TrueRandom:
      return random_move(s, rng);
    case PlayoutPolicy::Kind::FullGreedy:
      return full_greedy_move(s, rng);
    case PlayoutPolicy::Kind::PlayerGreedy:
      return s.current_player() == root_player ? full_greedy_move(s, rng) : random_move(s, rng);
    case PlayoutPolicy::Kind::EpsilonGreedy:
      // The boundary values draw no coin, so eps = 1 and eps = 0 consume the
      // same random stream as TrueRandom and FullGreedy.
      if (policy.epsilon >= 1.0) return random_move(s, rng);
      if (policy.epsilon <= 0.0) return full_greedy_move(s, rng);
      return rng.uniform() < policy.epsilon ? random_move(s, rng) : full_greedy_move(s, rng);
  }
  throw std::logic_error("unknown playout policy");
}

std::array<int, kPlayers> playout(GameState s, const PlayoutPolicy& policy, int root_player, Rng& rng) {
  while (!s.finished) apply_move_unchecked(s, policy_move(s, policy, root_player, rng));
  return scores(s);
}

MceResult mce_search(const GameState& s, const PlayoutPolicy& policy, ScoringFunction fn,
                     const SearchBudget& budget, Rng& rng) {
  if (s.finished) throw GameError("mce: game is finished");
  const int player = s.current_player();
  MceResult result;
  for (const auto& m : legal_moves(s)) result.children.push_back({m, 0, 0.0});
  const auto n = static_cast<std::uint32_t>(result.children.size());

  const BudgetClock clock(budget);
  do {
    const std::uint32_t pick = result.playouts < n ? static_cast<std::uint32_t>(result.playouts) : rng.below(n);
    ChildStats& child = result.children[pick];
    GameState sim = s;
    determinize(sim, rng);
    apply_move_unchecked(sim, child.move);
    child.reward_sum += score_playout(playout(std::move(sim), policy, player, rng), player, fn);
    ++child.playouts;
    ++result.playouts;
  } while (n > 1 && !clock.exhausted(result.playouts));

  std::vector<std::uint32_t> best;
  double best_mean = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto mean = result.children[i].mean();
    if (!mean) continue;
    if (best.empty() || *mean > best_mean) {
      best_mean = *mean;
      best.clear();
    }
    if (*mean == best_mean) best.push_back(i);
  }
  result.move = result.children[best[best.size() == 1 ? 0 : rng.below(static_cast<std::uint32_t>(best.size()))]].move;
  return result;
}

std::string to_string(const PlayoutPolicy& p) {
  switch (p.kind) {
    case PlayoutPolicy::Kind::TrueRandom: return "TR";
    case PlayoutPolicy::Kind::PlayerGreedy: return "PG";
    case PlayoutPolicy::Kind::FullGreedy: return "FG";
    case PlayoutPolicy::Kind::EpsilonGreedy: {
      if (p.epsilon == 0.75) return "eG";
      std::ostringstream out;
      out << "eG" << p.epsilon;
      return out.str();
    }
  }
  return "?";
}

std::string to_string(ScoringFunction fn) {
  switch (fn) {
    case ScoringFunction::WinDrawLoss: return "WDL";
    case ScoringFunction::Relative: return "R";
    case ScoringFunction::Player: return "P";
  }
  return "?";
}

}  // namespace kdom
