#include "kdom/uct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kdom {

BiasMode BiasMode::progressive(double w) {
  if (w < 0) throw std::invalid_argument("bias weight must be non-negative");
  return {Kind::Progressive, w};
}

BiasMode BiasMode::progressive_win(double w) {
  if (w < 0) throw std::invalid_argument("bias weight must be non-negative");
  return {Kind::ProgressiveWin, w};
}

double ucb_value(double mean, long parent_visits, long child_visits, double c) {
  if (child_visits == 0) return std::numeric_limits<double>::infinity();
  if (c == 0.0) return mean;
  return mean + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / static_cast<double>(child_visits));
}

double bias_term(const BiasMode& mode, double heuristic, long child_visits, double mean) {
  const auto visits = static_cast<double>(child_visits);
  switch (mode.kind) {
    case BiasMode::Kind::None: return 0.0;
    case BiasMode::Kind::Progressive: return mode.weight * heuristic / (visits + 1.0);
    case BiasMode::Kind::ProgressiveWin: return mode.weight * heuristic / (visits * (1.0 - mean) + 1.0);
  }
  return 0.0;
}

int immediate_gain(const GameState& s, const Move& m) {
  if (m.kind != PlacementKind::Place) return 0;
  const auto& k = s.kingdoms[static_cast<std::size_t>(s.current_player())];
  return placement_gain(k, label_regions(k), domino(s.domino_to_place()), m.placement);
}

namespace {

int find_child(const UctNode& node, std::uint32_t key) {
  auto it = std::lower_bound(node.children.begin(), node.children.end(), std::make_pair(key, -1));
  return it != node.children.end() && it->first == key ? it->second : -1;
}

}  // namespace

UctResult uct_search(const GameState& s, const PlayoutPolicy& policy, double c, const BiasMode& bias,
                     const SearchBudget& budget, Rng& rng) {
  if (s.finished) throw GameError("uct: game is finished");
  const int root_player = s.current_player();
  UctResult result;
  result.tree.emplace_back();
  auto& tree = result.tree;

  const auto root_moves = legal_moves(s);
  if (root_moves.size() == 1) {
    result.move = root_moves.front();
    return result;
  }

  const BudgetClock clock(budget);
  std::vector<int> path;
  do {
    GameState sim = s;
    determinize(sim, rng);
    path.assign(1, 0);
    int node = 0;

    while (!sim.finished) {
      const auto moves = legal_moves(sim);
      const int actor = sim.current_player();

      const Move* untried = nullptr;
      for (const auto& m : moves) {
        if (find_child(tree[static_cast<std::size_t>(node)], m.key()) < 0) {
          untried = &m;
          break;
        }
      }
      if (untried != nullptr) {
        UctNode child;
        child.move = *untried;
        child.actor = actor;
        child.heuristic = immediate_gain(sim, *untried);
        const int index = static_cast<int>(tree.size());
        tree.push_back(std::move(child));
        auto& siblings = tree[static_cast<std::size_t>(node)].children;
        const auto entry = std::make_pair(untried->key(), index);
        siblings.insert(std::lower_bound(siblings.begin(), siblings.end(), entry), entry);
        apply_move_unchecked(sim, *untried);
        path.push_back(index);
        break;
      }

      const long parent_visits = tree[static_cast<std::size_t>(node)].visits;
      int best = -1;
      double best_value = -std::numeric_limits<double>::infinity();
      for (const auto& m : moves) {
        const int idx = find_child(tree[static_cast<std::size_t>(node)], m.key());
        const UctNode& child = tree[static_cast<std::size_t>(idx)];
        const double mean = child.mean(actor);
        const double value =
            ucb_value(mean, parent_visits, child.visits, c) + bias_term(bias, child.heuristic, child.visits, mean);
        if (value > best_value) {
          best_value = value;
          best = idx;
        }
      }
      apply_move_unchecked(sim, tree[static_cast<std::size_t>(best)].move);
      node = best;
      path.push_back(node);
    }

    const auto final_scores = playout(std::move(sim), policy, root_player, rng);
    std::array<double, kPlayers> rewards{};
    for (int p = 0; p < kPlayers; ++p) {
      rewards[static_cast<std::size_t>(p)] = score_playout(final_scores, p, ScoringFunction::WinDrawLoss);
    }
    for (int idx : path) {
      auto& n = tree[static_cast<std::size_t>(idx)];
      ++n.visits;
      for (std::size_t p = 0; p < kPlayers; ++p) n.reward[p] += rewards[p];
    }
    ++result.iterations;
  } while (!clock.exhausted(result.iterations));

  std::vector<int> best;
  for (const auto& [key, idx] : tree[0].children) {
    const UctNode& child = tree[static_cast<std::size_t>(idx)];
    if (child.visits == 0) continue;
    if (best.empty()) {
      best.push_back(idx);
      continue;
    }
    const UctNode& incumbent = tree[static_cast<std::size_t>(best.front())];
    const double a = child.mean(root_player);
    const double b = incumbent.mean(root_player);
    if (a > b || (a == b && child.heuristic > incumbent.heuristic)) {
      best.assign(1, idx);
    } else if (a == b && child.heuristic == incumbent.heuristic) {
      best.push_back(idx);
    }
  }
  // Children are stored by key; restore legal-move order before the random tie-break.
  std::sort(best.begin(), best.end());
  result.move = tree[static_cast<std::size_t>(best[best.size() == 1 ? 0 : rng.below(static_cast<std::uint32_t>(best.size()))])].move;
  return result;
}

}  // namespace kdom
