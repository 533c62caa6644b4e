#include "kdom/wire.hpp"

#include <algorithm>

namespace kdom::wire {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw WireError(what); }

json tile_json(const Tile& t) { return {{"terrain", std::string(terrain_name(t.terrain))}, {"crowns", t.crowns}}; }

json draft_json(const Draft& d) {
  json out = json::array();
  for (const auto& e : d) {
    const Domino& dom = domino(e.domino);
    out.push_back({{"domino", e.domino},
                   {"tile1", tile_json(dom.a)},
                   {"tile2", tile_json(dom.b)},
                   {"claimedBy", e.claimed_by == kNoPlayer ? json(nullptr) : json(e.claimed_by)}});
  }
  return out;
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) malformed("expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

int integer(const json& v, const char* what, int lo, int hi) {
  if (!v.is_number_integer()) malformed(std::string(what) + " must be an integer");
  const auto n = v.get<long long>();
  if (n < lo || n > hi) malformed(std::string(what) + " out of range");
  return static_cast<int>(n);
}

Position position_from_json(const json& v) {
  // Anything beyond the int8 range is certainly off the board; reject it here
  // rather than letting it wrap.
  return {static_cast<std::int8_t>(integer(field(v, "x"), "x", -100, 100)),
          static_cast<std::int8_t>(integer(field(v, "y"), "y", -100, 100))};
}

Draft draft_from_json(const json& v) {
  if (!v.is_array() || v.size() > kPlayers) malformed("draft must be an array of at most 4 entries");
  Draft d;
  for (const auto& e : v) {
    const int number = integer(field(e, "domino"), "domino", 1, kDeckSize);
    const json& claim = field(e, "claimedBy");
    const int by = claim.is_null() ? kNoPlayer : integer(claim, "claimedBy", 0, kPlayers - 1);
    d.entries[d.size++] = {static_cast<std::uint8_t>(number), static_cast<std::int8_t>(by)};
  }
  if (!std::is_sorted(d.begin(), d.end(), [](const DraftEntry& a, const DraftEntry& b) { return a.domino < b.domino; })) {
    malformed("draft must be sorted by domino number");
  }
  return d;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Waiting: return "waiting";
    case Status::Running: return "running";
    case Status::Finished: return "finished";
  }
  return "?";
}

Status status_from_string(const std::string& s) {
  if (s == "waiting") return Status::Waiting;
  if (s == "running") return Status::Running;
  if (s == "finished") return Status::Finished;
  malformed("unknown status '" + s + "'");
}

json move_to_json(const Move& m) {
  json placement;
  switch (m.kind) {
    case PlacementKind::None: placement = nullptr; break;
    case PlacementKind::Discard: placement = "discard"; break;
    case PlacementKind::Place:
      placement = {{"tile1", {{"x", m.placement.a.x}, {"y", m.placement.a.y}}},
                   {"tile2", {{"x", m.placement.b.x}, {"y", m.placement.b.y}}}};
      break;
  }
  return {{"placement", placement}, {"selection", m.has_selection() ? json(m.selection) : json(nullptr)}};
}

Move move_from_json(const json& doc) {
  const json& placement = field(doc, "placement");
  const json& selection = field(doc, "selection");
  const int sel = selection.is_null() ? kNoSelection : integer(selection, "selection", 1, kDeckSize);
  if (placement.is_null()) return Move::select(sel);
  if (placement.is_string()) {
    if (placement.get<std::string>() != "discard") malformed("placement must be an object, \"discard\" or null");
    return Move::discard(sel);
  }
  return Move::place({position_from_json(field(placement, "tile1")), position_from_json(field(placement, "tile2"))}, sel);
}

json state_document(const std::string& game_id, Status status, const GameState& s) {
  const bool started = status != Status::Waiting;
  json kingdoms = json::array();
  json score_list = json::array();
  for (std::size_t p = 0; p < kPlayers; ++p) {
    const Kingdom& k = s.kingdoms[p];
    json tiles = json::array();
    for (const auto& [pos, t] : k.tiles()) {
      tiles.push_back({{"x", pos.x}, {"y", pos.y}, {"terrain", std::string(terrain_name(t.terrain))}, {"crowns", t.crowns}});
    }
    kingdoms.push_back({{"player", p}, {"tiles", tiles}, {"discarded", k.discard_count()}});
    const auto b = score_kingdom(k, s.finished);
    score_list.push_back(
        {{"area", b.area}, {"middleKingdom", b.middle_kingdom}, {"harmony", b.harmony}, {"total", b.total}});
  }

  json moves = json::array();
  if (status == Status::Running) {
    for (const auto& m : legal_moves(s)) moves.push_back(move_to_json(m));
  }
  json used = json::array();
  for (int n = 1; n <= kDeckSize; ++n) {
    if ((s.used >> (n - 1)) & 1) used.push_back(n);
  }

  return {{"gameId", game_id},
          {"status", to_string(status)},
          {"round", started ? s.round : 0},
          {"currentPlayer", status == Status::Running ? json(s.current_player()) : json(nullptr)},
          {"kingdoms", kingdoms},
          {"scores", score_list},
          {"previousDraft", started ? draft_json(s.previous) : json::array()},
          {"currentDraft", started ? draft_json(s.current) : json::array()},
          {"possibleMoves", moves},
          {"usedDominoes", used}};
}

GameState state_from_document(const json& doc) {
  try {
    const Status status = status_from_string(field(doc, "status").get<std::string>());
    if (status == Status::Waiting) malformed("game has not started");

    GameState s;
    s.finished = status == Status::Finished;
    s.round = static_cast<std::uint8_t>(integer(field(doc, "round"), "round", 1, kRounds));

    const json& kingdoms = field(doc, "kingdoms");
    if (!kingdoms.is_array() || kingdoms.size() != kPlayers) malformed("kingdoms must list 4 players");
    for (std::size_t p = 0; p < kPlayers; ++p) {
      std::vector<std::pair<Position, Tile>> tiles;
      for (const auto& t : field(kingdoms[p], "tiles")) {
        tiles.push_back({position_from_json(t),
                         Tile{terrain_from_name(field(t, "terrain").get<std::string>()),
                              static_cast<std::uint8_t>(integer(field(t, "crowns"), "crowns", 0, 3))}});
      }
      s.kingdoms[p] = Kingdom::from_tiles(tiles, integer(field(kingdoms[p], "discarded"), "discarded", 0, kRounds));
    }

    s.previous = draft_from_json(field(doc, "previousDraft"));
    s.current = draft_from_json(field(doc, "currentDraft"));
    for (const auto& v : field(doc, "usedDominoes")) {
      s.used |= std::uint64_t{1} << (integer(v, "usedDominoes entry", 1, kDeckSize) - 1);
    }

    if (!s.finished) {
      const int player = integer(field(doc, "currentPlayer"), "currentPlayer", 0, kPlayers - 1);
      if (s.round == 1) {
        s.turn = static_cast<std::uint8_t>(kPlayers - s.current.unclaimed());
      } else {
        const auto it = std::find_if(s.previous.begin(), s.previous.end(),
                                     [&](const DraftEntry& e) { return e.claimed_by == player; });
        if (it == s.previous.end()) malformed("current player holds no domino");
        s.turn = static_cast<std::uint8_t>(it - s.previous.begin());
      }
      if (s.current_player() != player) malformed("currentPlayer disagrees with the drafts");
    }

    // Face down: everything not used and not visible in either draft.
    std::uint64_t seen = s.used;
    for (const auto& e : s.current) seen |= std::uint64_t{1} << (e.domino - 1);
    for (const auto& e : s.previous) seen |= std::uint64_t{1} << (e.domino - 1);
    std::vector<std::uint8_t> hidden;
    for (int n = 1; n <= kDeckSize; ++n) {
      if (!((seen >> (n - 1)) & 1)) hidden.push_back(static_cast<std::uint8_t>(n));
    }
    s.pile_next = static_cast<std::uint8_t>(kDeckSize - hidden.size());
    std::copy(hidden.begin(), hidden.end(), s.pile.begin() + s.pile_next);
    check_invariants(s);
    return s;
  } catch (const WireError&) {
    throw;
  } catch (const std::exception& e) {
    throw WireError(std::string("inconsistent state document: ") + e.what());
  }
}

}  // namespace kdom::wire
