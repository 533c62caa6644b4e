#pragma once

#include <vector>

#include "kdom/game.hpp"
#include "kdom/rng.hpp"

namespace kdom {

struct GreedyConstraints {
  bool avoid_breaking_middle_kingdom = true;
  bool avoid_single_tile_holes = true;
};

enum class StaticStrategy { TrueRandom, GreedyPlacementRandomDraft, FullGreedy };

/// How greedy_best_moves values the draft choice.
enum class SelectionScoring {
  Ignore,  // every selection scores 0
  Greedy,  // best constrained placement of the selected domino in the post-placement kingdom
};

/// A single-tile hole is an empty cell inside the kingdom's still-feasible
/// 5x5 region whose four neighbours are all occupied or outside that region.
/// No domino can ever cover it.
int count_single_holes(const Kingdom& k);
bool creates_single_hole(const Kingdom& k, const Placement& p);
bool breaks_middle_kingdom(const Kingdom& k, const Placement& p);
bool satisfies(const Kingdom& k, const Placement& p, const GreedyConstraints& c);

/// Best score gain obtainable by placing `d` in `k`, preferring placements
/// that satisfy the constraints and falling back to all placements when none
/// do. Zero when the domino cannot be placed.
int greedy_placement_value(const Kingdom& k, const Domino& d, const GreedyConstraints& c);

/// All legal moves of `player` (the acting player) that maximise the greedy
/// value. Placements that break a constraint are only considered when no
/// placement satisfies them.
std::vector<Move> greedy_best_moves(const GameState& s, int player, const GreedyConstraints& c,
                                    SelectionScoring selection = SelectionScoring::Ignore);

/// Uniform over legal_moves(s), without materialising the list.
Move random_move(const GameState& s, Rng& rng);

/// Greedy placement, uniform selection.
Move placement_greedy_move(const GameState& s, Rng& rng, const GreedyConstraints& c = {});

/// Greedy placement and greedy selection; ties uniform.
Move full_greedy_move(const GameState& s, Rng& rng, const GreedyConstraints& c = {});

Move choose_static(StaticStrategy strategy, const GameState& s, Rng& rng);

}  // namespace kdom
