#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "kdom/game.hpp"
#include "kdom/mce.hpp"
#include "kdom/rng.hpp"

namespace kdom {

struct BiasMode {
  enum class Kind { None, Progressive, ProgressiveWin };

  Kind kind = Kind::None;
  double weight = 0.0;  // W >= 0

  static BiasMode none() { return {}; }
  static BiasMode progressive(double w);
  static BiasMode progressive_win(double w);

  friend bool operator==(const BiasMode&, const BiasMode&) = default;
};

inline constexpr double kDefaultExploration = 0.6;
inline constexpr double kDefaultBiasWeight = 0.1;

/// mean + c * sqrt(ln(parent_visits) / child_visits); +infinity for an
/// unvisited child.
double ucb_value(double mean, long parent_visits, long child_visits, double c);

/// Heuristic bias added to the UCB value:
///   Progressive:    W * H / (T_i + 1)
///   ProgressiveWin: W * H / (T_i * (1 - mean) + 1), decaying with losses only.
double bias_term(const BiasMode& mode, double heuristic, long child_visits, double mean);

struct UctNode {
  Move move;                  // move leading here from the parent
  int actor = kNoPlayer;      // player who chose `move`
  long visits = 0;
  std::array<double, kPlayers> reward{};  // WDL sums, one per player
  double heuristic = 0.0;     // acting player's immediate score change from `move`
  std::vector<std::pair<std::uint32_t, int>> children;  // (move key, node index), sorted by key

  double mean(int player) const { return visits == 0 ? 0.0 : reward[static_cast<std::size_t>(player)] / static_cast<double>(visits); }
};

struct UctResult {
  Move move;
  long iterations = 0;
  std::vector<UctNode> tree;  // tree[0] is the root
};

/// UCT with max^n backups over WDL rewards.
///
/// Each iteration samples a fresh order for the face-down pile, descends the
/// tree choosing the child with the best UCB (+ bias) for the player to move,
/// ignoring children whose move is not legal under this sample, expands one
/// untried move, plays out with `policy` and backs up one WDL reward per
/// player. The root decision is the best mean WDL for the searching player;
/// ties go to the larger immediate score gain, then uniformly at random.
UctResult uct_search(const GameState& s, const PlayoutPolicy& policy, double c, const BiasMode& bias,
                     const SearchBudget& budget, Rng& rng);

inline Move uct_choose(const GameState& s, const PlayoutPolicy& policy, double c, const BiasMode& bias,
                       const SearchBudget& budget, Rng& rng) {
  return uct_search(s, policy, c, bias, budget, rng).move;
}

/// Acting player's score change (non-terminal scoring) caused by `m`.
int immediate_gain(const GameState& s, const Move& m);

}  // namespace kdom
