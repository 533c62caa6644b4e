#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kdom/game.hpp"
#include "kdom/mce.hpp"
#include "kdom/rng.hpp"
#include "kdom/uct.hpp"

namespace kdom {

enum class Strategy { TrueRandom, GreedyPlacementRandomDraft, FullGreedy, MonteCarlo, Uct };

/// Everything needed to build an agent. Monte Carlo agents ignore `c` and
/// `bias`; UCT ignores `scoring` (always WDL); static agents ignore all search
/// fields.
struct AgentConfig {
  Strategy strategy = Strategy::FullGreedy;
  PlayoutPolicy policy = PlayoutPolicy::true_random();
  ScoringFunction scoring = ScoringFunction::Relative;
  double c = kDefaultExploration;
  BiasMode bias = BiasMode::none();
  SearchBudget budget = SearchBudget::seconds(1.0);

  bool searches() const { return strategy == Strategy::MonteCarlo || strategy == Strategy::Uct; }

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

/// Parses agent names as used in experiment tables:
///   TR | GPRD | FG
///   MCE-<policy>/<scoring>     e.g. MCE-TR/R, MCE-PG/WDL, MCE-eG/P, MCE-eG0.5/R
///   UCT-<policy> | UCT_B-<policy> | UCT_W-<policy>
/// Policies: TR, FG, PG, eG (epsilon 0.75) or eG<eps>. Scoring: WDL, R, P.
/// Search parameters other than the name are taken from `defaults`.
AgentConfig parse_agent(std::string_view spec, const AgentConfig& defaults = {});

/// Inverse of parse_agent for the name part.
std::string agent_name(const AgentConfig& config);

struct Decision {
  Move move;
  long playouts = 0;
};

class Agent {
 public:
  Agent(AgentConfig config, std::uint64_t seed) : config_(config), rng_(seed) {}

  /// `s` should be a public_view; search agents determinize internally.
  Decision choose(const GameState& s);

  const AgentConfig& config() const { return config_; }

 private:
  AgentConfig config_;
  Rng rng_;
};

}  // namespace kdom
