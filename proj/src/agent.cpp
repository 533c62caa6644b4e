#include "kdom/agent.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "kdom/static_agents.hpp"

namespace kdom {
namespace {

[[noreturn]] void bad_spec(std::string_view spec, std::string_view why) {
  throw std::invalid_argument("bad agent spec '" + std::string(spec) + "': " + std::string(why));
}

PlayoutPolicy parse_policy(std::string_view spec, std::string_view text) {
  if (text == "TR") return PlayoutPolicy::true_random();
  if (text == "FG") return PlayoutPolicy::full_greedy();
  if (text == "PG") return PlayoutPolicy::player_greedy();
  if (text.starts_with("eG") || text.starts_with("EG")) {
    text.remove_prefix(2);
    if (text.empty()) return PlayoutPolicy::epsilon_greedy(0.75);
    double eps = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), eps);
    if (ec != std::errc{} || end != text.data() + text.size()) bad_spec(spec, "bad epsilon");
    try {
      return PlayoutPolicy::epsilon_greedy(eps);
    } catch (const std::invalid_argument& e) {
      bad_spec(spec, e.what());
    }
  }
  bad_spec(spec, "unknown playout policy '" + std::string(text) + "'");
}

ScoringFunction parse_scoring(std::string_view spec, std::string_view text) {
  if (text == "WDL") return ScoringFunction::WinDrawLoss;
  if (text == "R") return ScoringFunction::Relative;
  if (text == "P") return ScoringFunction::Player;
  bad_spec(spec, "unknown scoring function '" + std::string(text) + "'");
}

}  // namespace

AgentConfig parse_agent(std::string_view spec, const AgentConfig& defaults) {
  AgentConfig config = defaults;
  if (spec == "TR" || spec == "GPRD" || spec == "FG") {
    config.strategy = spec == "TR"     ? Strategy::TrueRandom
                      : spec == "GPRD" ? Strategy::GreedyPlacementRandomDraft
                                       : Strategy::FullGreedy;
    return config;
  }
  if (spec.starts_with("MCE-")) {
    const auto rest = spec.substr(4);
    const auto slash = rest.find('/');
    if (slash == std::string_view::npos) bad_spec(spec, "expected MCE-<policy>/<scoring>");
    config.strategy = Strategy::MonteCarlo;
    config.policy = parse_policy(spec, rest.substr(0, slash));
    config.scoring = parse_scoring(spec, rest.substr(slash + 1));
    return config;
  }
  for (const auto& [prefix, kind] : {std::pair{std::string_view("UCT-"), BiasMode::Kind::None},
                                     std::pair{std::string_view("UCT_B-"), BiasMode::Kind::Progressive},
                                     std::pair{std::string_view("UCT_W-"), BiasMode::Kind::ProgressiveWin}}) {
    if (!spec.starts_with(prefix)) continue;
    config.strategy = Strategy::Uct;
    config.scoring = ScoringFunction::WinDrawLoss;
    config.policy = parse_policy(spec, spec.substr(prefix.size()));
    const double w = kind == BiasMode::Kind::None ? 0.0
                     : defaults.bias.kind == BiasMode::Kind::None ? kDefaultBiasWeight
                                                                  : defaults.bias.weight;
    config.bias = BiasMode{kind, w};
    return config;
  }
  bad_spec(spec, "unknown strategy");
}

std::string agent_name(const AgentConfig& config) {
  switch (config.strategy) {
    case Strategy::TrueRandom: return "TR";
    case Strategy::GreedyPlacementRandomDraft: return "GPRD";
    case Strategy::FullGreedy: return "FG";
    case Strategy::MonteCarlo: return "MCE-" + to_string(config.policy) + "/" + to_string(config.scoring);
    case Strategy::Uct: {
      const char* prefix = config.bias.kind == BiasMode::Kind::None          ? "UCT-"
                           : config.bias.kind == BiasMode::Kind::Progressive ? "UCT_B-"
                                                                             : "UCT_W-";
      return prefix + to_string(config.policy);
    }
  }
  return "?";
}

Decision Agent::choose(const GameState& s) {
  switch (config_.strategy) {
    case Strategy::TrueRandom: return {choose_static(StaticStrategy::TrueRandom, s, rng_), 0};
    case Strategy::GreedyPlacementRandomDraft:
      return {choose_static(StaticStrategy::GreedyPlacementRandomDraft, s, rng_), 0};
    case Strategy::FullGreedy: return {choose_static(StaticStrategy::FullGreedy, s, rng_), 0};
    case Strategy::MonteCarlo: {
      const auto r = mce_search(s, config_.policy, config_.scoring, config_.budget, rng_);
      return {r.move, r.playouts};
    }
    case Strategy::Uct: {
      const auto r = uct_search(s, config_.policy, config_.c, config_.bias, config_.budget, rng_);
      return {r.move, r.iterations};
    }
  }
  throw std::logic_error("unknown strategy");
}

}  // namespace kdom
