#include "kdom/static_agents.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>

namespace kdom {
namespace {

struct Window {
  int lo_x, hi_x, lo_y, hi_y;

  bool contains(Position p) const { return p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y; }
  friend bool operator==(const Window&, const Window&) = default;
};

Window feasible_window(const Kingdom& k) {
  return {k.max_x() - (kKingdomSide - 1), k.min_x() + (kKingdomSide - 1), k.max_y() - (kKingdomSide - 1),
          k.min_y() + (kKingdomSide - 1)};
}

Window feasible_window_after(const Kingdom& k, const Placement& p) {
  const int min_x = std::min({k.min_x(), int{p.a.x}, int{p.b.x}});
  const int max_x = std::max({k.max_x(), int{p.a.x}, int{p.b.x}});
  const int min_y = std::min({k.min_y(), int{p.a.y}, int{p.b.y}});
  const int max_y = std::max({k.max_y(), int{p.a.y}, int{p.b.y}});
  return {max_x - (kKingdomSide - 1), min_x + (kKingdomSide - 1), max_y - (kKingdomSide - 1),
          min_y + (kKingdomSide - 1)};
}

// Whether cell `idx` is a single-tile hole once cells fill_a/fill_b are taken.
bool hole_at(const Kingdom& k, int idx, const Window& w, int fill_a, int fill_b) {
  if (idx == fill_a || idx == fill_b || k.cell(idx) != Kingdom::kEmpty) return false;
  if (!w.contains(Kingdom::position(idx))) return false;
  for (int d : Kingdom::kNeighbours) {
    const int n = idx + d;
    const bool occupied = k.cell(n) != Kingdom::kEmpty || n == fill_a || n == fill_b;
    if (!occupied && w.contains(Kingdom::position(n))) return false;
  }
  return true;
}

template <class Fn>
void for_each_unclaimed(const GameState& s, Fn&& fn) {
  for (const auto& e : s.current) {
    if (e.claimed_by == kNoPlayer) fn(int{e.domino});
  }
}

int nth_unclaimed(const GameState& s, std::uint32_t n) {
  for (const auto& e : s.current) {
    if (e.claimed_by == kNoPlayer && n-- == 0) return e.domino;
  }
  return kNoSelection;
}

int pick_selection(const GameState& s, Rng& rng) {
  const int open = s.current.unclaimed();
  if (open == 0) return kNoSelection;
  return nth_unclaimed(s, rng.below(static_cast<std::uint32_t>(open)));
}

int best_gain(const Kingdom& k, const Regions& r, const Domino& d, const GreedyConstraints& c) {
  int best_ok = INT_MIN;
  int best_any = INT_MIN;
  for_each_placement(k, d, [&](const Placement& p) {
    const int g = placement_gain(k, r, d, p);
    best_any = std::max(best_any, g);
    // Constraint checks are the expensive part; only run them when they could matter.
    if (g > best_ok && satisfies(k, p, c)) best_ok = g;
  });
  if (best_ok != INT_MIN) return best_ok;
  if (best_any != INT_MIN) return best_any;
  return 0;
}

struct PricedPlacement {
  Placement placement;
  int gain;
};

// Placements of the acting player's domino that the greedy evaluators may
// consider: the constraint-satisfying ones, or all when none qualify.
std::vector<PricedPlacement> candidate_placements(const Kingdom& k, const Domino& d, const GreedyConstraints& c) {
  const Regions r = label_regions(k);
  std::vector<PricedPlacement> ok;
  std::vector<PricedPlacement> all;
  for_each_placement(k, d, [&](const Placement& p) {
    const PricedPlacement pp{p, placement_gain(k, r, d, p)};
    all.push_back(pp);
    if (satisfies(k, p, c)) ok.push_back(pp);
  });
  return ok.empty() ? all : ok;
}

template <class T, class Value>
std::vector<T> argmax_all(const std::vector<T>& items, Value value) {
  std::vector<T> best;
  int best_value = INT_MIN;
  for (const auto& item : items) {
    const int v = value(item);
    if (v > best_value) {
      best_value = v;
      best.clear();
    }
    if (v == best_value) best.push_back(item);
  }
  return best;
}

struct ScoredMove {
  Move move;
  int value;
};

// Every (placement, selection) pair valued as placement gain plus the greedy
// value of the selected domino against the post-placement kingdom.
std::vector<ScoredMove> full_greedy_candidates(const GameState& s, const GreedyConstraints& c) {
  std::vector<ScoredMove> out;
  const auto& kingdom = s.kingdoms[static_cast<std::size_t>(s.current_player())];

  if (s.round == 1) {
    const Regions r = label_regions(kingdom);
    for_each_unclaimed(s, [&](int sel) { out.push_back({Move::select(sel), best_gain(kingdom, r, domino(sel), c)}); });
    return out;
  }

  const Domino& d = domino(s.domino_to_place());
  const auto candidates = candidate_placements(kingdom, d, c);
  const bool selecting = !s.current.empty();

  if (candidates.empty()) {
    if (!selecting) {
      out.push_back({Move::discard(), 0});
      return out;
    }
    const Regions r = label_regions(kingdom);
    for_each_unclaimed(s, [&](int sel) { out.push_back({Move::discard(sel), best_gain(kingdom, r, domino(sel), c)}); });
    return out;
  }

  if (!selecting) {
    for (const auto& pp : candidates) out.push_back({Move::place(pp.placement), pp.gain});
    return out;
  }

  for (const auto& pp : candidates) {
    Kingdom after = kingdom;
    after.place(d, pp.placement);
    const Regions r = label_regions(after);
    for_each_unclaimed(s, [&](int sel) {
      out.push_back({Move::place(pp.placement, sel), pp.gain + best_gain(after, r, domino(sel), c)});
    });
  }
  return out;
}

}  // namespace

int count_single_holes(const Kingdom& k) {
  const Window w = feasible_window(k);
  int holes = 0;
  for (int idx = 0; idx < Kingdom::kCells; ++idx) holes += hole_at(k, idx, w, -1, -1) ? 1 : 0;
  return holes;
}

bool creates_single_hole(const Kingdom& k, const Placement& p) {
  const int ia = Kingdom::index(p.a);
  const int ib = Kingdom::index(p.b);
  const Window before = feasible_window(k);
  const Window after = feasible_window_after(k, p);
  if (after == before) {
    // Only cells next to the new tiles can change status.
    for (int centre : {ia, ib}) {
      for (int d : Kingdom::kNeighbours) {
        if (hole_at(k, centre + d, after, ia, ib)) return true;
      }
    }
    return false;
  }
  for (int y = after.lo_y; y <= after.hi_y; ++y) {
    for (int x = after.lo_x; x <= after.hi_x; ++x) {
      const int idx = Kingdom::index(x, y);
      if (hole_at(k, idx, after, ia, ib) && !hole_at(k, idx, before, -1, -1)) return true;
    }
  }
  return false;
}

bool breaks_middle_kingdom(const Kingdom& k, const Placement& p) {
  if (!k.castle_centered()) return false;
  return std::abs(p.a.x) > 2 || std::abs(p.a.y) > 2 || std::abs(p.b.x) > 2 || std::abs(p.b.y) > 2;
}

bool satisfies(const Kingdom& k, const Placement& p, const GreedyConstraints& c) {
  if (c.avoid_breaking_middle_kingdom && breaks_middle_kingdom(k, p)) return false;
  if (c.avoid_single_tile_holes && creates_single_hole(k, p)) return false;
  return true;
}

int greedy_placement_value(const Kingdom& k, const Domino& d, const GreedyConstraints& c) {
  return best_gain(k, label_regions(k), d, c);
}

std::vector<Move> greedy_best_moves(const GameState& s, int player, const GreedyConstraints& c,
                                    SelectionScoring selection) {
  if (s.finished) throw GameError("no moves in a finished game");
  if (player != s.current_player()) throw GameError("greedy_best_moves: player is not acting");

  if (selection == SelectionScoring::Greedy) {
    std::vector<Move> out;
    for (const auto& sm : argmax_all(full_greedy_candidates(s, c), [](const ScoredMove& m) { return m.value; })) {
      out.push_back(sm.move);
    }
    return out;
  }

  std::vector<Move> bases;
  if (s.round == 1) {
    bases.push_back(Move{});
  } else {
    const auto& kingdom = s.kingdoms[static_cast<std::size_t>(player)];
    const auto candidates = candidate_placements(kingdom, domino(s.domino_to_place()), c);
    if (candidates.empty()) {
      bases.push_back(Move::discard());
    } else {
      for (const auto& pp : argmax_all(candidates, [](const PricedPlacement& p) { return p.gain; })) {
        bases.push_back(Move::place(pp.placement));
      }
    }
  }
  std::vector<Move> out;
  for (const auto& base : bases) {
    if (s.current.empty()) {
      out.push_back(base);
      continue;
    }
    for_each_unclaimed(s, [&](int sel) {
      Move m = base;
      m.selection = static_cast<std::uint8_t>(sel);
      out.push_back(m);
    });
  }
  return out;
}

Move random_move(const GameState& s, Rng& rng) {
  if (s.finished) throw GameError("no moves in a finished game");
  if (s.round == 1) return Move::select(pick_selection(s, rng));

  const auto& kingdom = s.kingdoms[static_cast<std::size_t>(s.current_player())];
  std::array<Placement, Kingdom::kCells * 4> buffer;
  std::size_t n = 0;
  for_each_placement(kingdom, domino(s.domino_to_place()), [&](const Placement& p) { buffer[n++] = p; });
  Move m = n == 0 ? Move::discard() : Move::place(buffer[rng.below(static_cast<std::uint32_t>(n))]);
  m.selection = static_cast<std::uint8_t>(pick_selection(s, rng));
  return m;
}

Move placement_greedy_move(const GameState& s, Rng& rng, const GreedyConstraints& c) {
  if (s.finished) throw GameError("no moves in a finished game");
  Move m;
  if (s.round > 1) {
    const auto& kingdom = s.kingdoms[static_cast<std::size_t>(s.current_player())];
    const auto candidates = candidate_placements(kingdom, domino(s.domino_to_place()), c);
    if (candidates.empty()) {
      m = Move::discard();
    } else {
      const auto best = argmax_all(candidates, [](const PricedPlacement& p) { return p.gain; });
      m = Move::place(best[rng.below(static_cast<std::uint32_t>(best.size()))].placement);
    }
  }
  m.selection = static_cast<std::uint8_t>(pick_selection(s, rng));
  return m;
}

Move full_greedy_move(const GameState& s, Rng& rng, const GreedyConstraints& c) {
  if (s.finished) throw GameError("no moves in a finished game");
  const auto best = argmax_all(full_greedy_candidates(s, c), [](const ScoredMove& m) { return m.value; });
  return best[rng.below(static_cast<std::uint32_t>(best.size()))].move;
}

Move choose_static(StaticStrategy strategy, const GameState& s, Rng& rng) {
  switch (strategy) {
    case StaticStrategy::TrueRandom: return random_move(s, rng);
    case StaticStrategy::GreedyPlacementRandomDraft: return placement_greedy_move(s, rng);
    case StaticStrategy::FullGreedy: return full_greedy_move(s, rng);
  }
  throw GameError("unknown static strategy");
}

}  // namespace kdom
