#pragma once

// JSON documents exchanged between the game server and remote agents.
//
// Move document:
//   {"placement": {"tile1": {"x": int, "y": int}, "tile2": {"x": int, "y": int}} | "discard" | null,
//    "selection": dominoNumber | null}
// tile1 holds the domino's first tile, tile2 its second.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdom/game.hpp"

namespace kdom::wire {

using nlohmann::json;

/// A document that does not follow the schema.
class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status { Waiting, Running, Finished };

std::string to_string(Status s);
Status status_from_string(const std::string& s);  // throws WireError

json move_to_json(const Move& m);
/// Throws WireError on a malformed document. Coordinates outside the board
/// window still parse; legality is the engine's call.
Move move_from_json(const json& doc);

/// Everything a stateless agent needs to move: kingdoms, scores, drafts,
/// the acting player, its legal moves and the dominoes already used. The
/// face-down pile order and the seed never appear.
json state_document(const std::string& game_id, Status status, const GameState& s);

/// Rebuilds public_view of the game from a running-game document. Throws
/// WireError when the document is malformed or inconsistent.
GameState state_from_document(const json& doc);

}  // namespace kdom::wire
