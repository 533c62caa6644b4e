#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kdom/kingdom.hpp"
#include "kdom/rng.hpp"

namespace kdom {

inline constexpr int kPlayers = 4;
inline constexpr int kRounds = 13;
inline constexpr int kNoPlayer = -1;

struct DraftEntry {
  std::uint8_t domino = 0;
  std::int8_t claimed_by = kNoPlayer;

  friend bool operator==(const DraftEntry&, const DraftEntry&) = default;
};

/// Up to four revealed dominoes, sorted by number.
struct Draft {
  std::array<DraftEntry, kPlayers> entries{};
  std::uint8_t size = 0;

  bool empty() const { return size == 0; }
  const DraftEntry* begin() const { return entries.data(); }
  const DraftEntry* end() const { return entries.data() + size; }
  int unclaimed() const;

  friend bool operator==(const Draft&, const Draft&) = default;
};

enum class PlacementKind : std::uint8_t { None, Place, Discard };

inline constexpr std::uint8_t kNoSelection = 0;

struct Move {
  PlacementKind kind = PlacementKind::None;
  Placement placement{};  // meaningful only when kind == Place
  std::uint8_t selection = kNoSelection;

  static Move select(int domino) { return {PlacementKind::None, {}, static_cast<std::uint8_t>(domino)}; }
  static Move place(Placement p, int selection = kNoSelection) {
    return {PlacementKind::Place, p, static_cast<std::uint8_t>(selection)};
  }
  static Move discard(int selection = kNoSelection) {
    return {PlacementKind::Discard, {}, static_cast<std::uint8_t>(selection)};
  }

  bool has_selection() const { return selection != kNoSelection; }

  /// Dense key, unique per move. Used for hashing and ordering.
  std::uint32_t key() const;

  friend bool operator==(const Move&, const Move&) = default;
};

std::string to_string(const Move& m);

class GameError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Complete game situation. A plain value: copy it to branch.
///
/// Round 1: players claim from the first draft in seat order. Rounds 2..12:
/// players act in the claim order of the previous draft, placing their
/// claimed domino and claiming one from the current draft. Round 13: place
/// only. The draw pile is hidden information; agents should only see
/// public_view() of a state.
struct GameState {
  std::array<Kingdom, kPlayers> kingdoms{};
  Draft current;
  Draft previous;
  std::array<std::uint8_t, kDeckSize> pile{};  // pile[pile_next..kDeckSize) is still face down
  std::uint8_t pile_next = 0;
  std::uint8_t round = 1;
  std::uint8_t turn = 0;  // index into this round's acting order
  bool finished = false;
  std::uint64_t used = 0;  // bit n-1 set once domino n is placed or discarded
  std::uint64_t seed = 0;

  int pile_size() const { return kDeckSize - pile_next; }
  int current_player() const;

  /// The domino the acting player must place this turn, or 0 in round 1.
  int domino_to_place() const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

GameState new_game(std::uint64_t seed, int num_players = kPlayers);

std::vector<Move> legal_moves(const GameState& s);
bool is_legal(const GameState& s, const Move& m);

/// Validates `m` against legal_moves and returns the successor.
GameState apply_move(const GameState& s, const Move& m);

/// In-place successor without validation, for search code that produced
/// `m` from legal_moves or the same generator rules.
void apply_move_unchecked(GameState& s, const Move& m);

/// Final (or current) totals for all players.
std::array<int, kPlayers> scores(const GameState& s);

/// Same state with the face-down pile reordered by domino number, the
/// already-drawn part of the pile and the seed cleared. Two states that
/// differ only in hidden information map to the same view.
GameState public_view(const GameState& s);

/// Replaces the face-down pile order with a fresh uniform shuffle.
void determinize(GameState& s, Rng& rng);

/// Throws GameError describing the first broken invariant, if any.
void check_invariants(const GameState& s);

using BigInt = boost::multiprecision::cpp_int;

/// Number of distinct draft sequences for a 48-domino deck:
/// product over i = 0..11 of C(48 - 4i, 4).
BigInt count_deck_draws();

/// Scientific notation with `digits` significant digits, e.g. "3.4e44".
std::string scientific(const BigInt& v, int digits);

}  // namespace kdom
