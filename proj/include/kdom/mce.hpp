#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdom/game.hpp"
#include "kdom/rng.hpp"

namespace kdom {

struct PlayoutPolicy {
  enum class Kind { TrueRandom, EpsilonGreedy, PlayerGreedy, FullGreedy };

  Kind kind = Kind::TrueRandom;
  double epsilon = 0.75;  // EpsilonGreedy only: probability of a random move

  static PlayoutPolicy true_random() { return {Kind::TrueRandom, 0.0}; }
  static PlayoutPolicy epsilon_greedy(double eps);  // throws std::invalid_argument unless 0 <= eps <= 1
  static PlayoutPolicy player_greedy() { return {Kind::PlayerGreedy, 0.0}; }
  static PlayoutPolicy full_greedy() { return {Kind::FullGreedy, 0.0}; }

  friend bool operator==(const PlayoutPolicy&, const PlayoutPolicy&) = default;
};

enum class ScoringFunction { WinDrawLoss, Relative, Player };

/// Per-ply budget: a wall-clock limit or a playout count, never both.
class SearchBudget {
 public:
  using Clock = std::chrono::steady_clock;

  static SearchBudget time(std::chrono::microseconds limit);
  static SearchBudget seconds(double s) {
    return time(std::chrono::microseconds(static_cast<std::int64_t>(s * 1e6)));
  }
  static SearchBudget playouts(long n);

  bool timed() const { return wall_.has_value(); }
  std::chrono::microseconds wall_time() const { return *wall_; }
  long max_playouts() const { return *playouts_; }

  friend bool operator==(const SearchBudget&, const SearchBudget&) = default;

 private:
  std::optional<std::chrono::microseconds> wall_;
  std::optional<long> playouts_;
};

/// Tracks one search against its budget.
class BudgetClock {
 public:
  explicit BudgetClock(const SearchBudget& b);
  bool exhausted(long playouts_done) const;

 private:
  SearchBudget budget_;
  SearchBudget::Clock::time_point deadline_;
};

struct ChildStats {
  Move move;
  long playouts = 0;
  double reward_sum = 0.0;

  std::optional<double> mean() const {
    if (playouts == 0) return std::nullopt;
    return reward_sum / static_cast<double>(playouts);
  }
};

struct MceResult {
  Move move;
  std::vector<ChildStats> children;
  long playouts = 0;
};

/// Reward of one finished playout for `player`.
///   WinDrawLoss: 1 for a sole top score, 0.5 when sharing it, else 0.
///   Relative:    p / (p + q), q the best opponent score; 0.5 if both are 0.
///   Player:      p itself.
double score_playout(const std::array<int, kPlayers>& final_scores, int player, ScoringFunction fn);

/// Picks the next move inside a playout.
Move policy_move(const GameState& s, const PlayoutPolicy& policy, int root_player, Rng& rng);

/// Plays `s` to the end under `policy` and returns the final totals. The
/// face-down pile is used in its current order; determinize first when that
/// order must stay hidden.
std::array<int, kPlayers> playout(GameState s, const PlayoutPolicy& policy, int root_player, Rng& rng);

/// Flat Monte Carlo: every legal move gets one playout in turn, after which
/// moves are sampled uniformly. Each playout starts from a fresh
/// determinization of the face-down pile. Returns the move with the highest
/// mean reward (ties uniform).
MceResult mce_search(const GameState& s, const PlayoutPolicy& policy, ScoringFunction fn,
                     const SearchBudget& budget, Rng& rng);

inline Move mce_choose(const GameState& s, const PlayoutPolicy& policy, ScoringFunction fn,
                       const SearchBudget& budget, Rng& rng) {
  return mce_search(s, policy, fn, budget, rng).move;
}

std::string to_string(const PlayoutPolicy& p);
std::string to_string(ScoringFunction fn);

}  // namespace kdom
