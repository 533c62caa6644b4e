#include "kdom/game.hpp"

#include <algorithm>
#include <bit>
#include <span>
#include <sstream>

namespace kdom {

int Draft::unclaimed() const {
  return static_cast<int>(std::count_if(begin(), end(), [](const DraftEntry& e) { return e.claimed_by == kNoPlayer; }));
}

std::uint32_t Move::key() const {
  auto coord = [](int v) { return static_cast<std::uint32_t>(v + Kingdom::kReach); };
  std::uint32_t k = static_cast<std::uint32_t>(kind);
  if (kind == PlacementKind::Place) {
    k |= (coord(placement.a.x) << 2) | (coord(placement.a.y) << 6) | (coord(placement.b.x) << 10) |
         (coord(placement.b.y) << 14);
  }
  return k | (static_cast<std::uint32_t>(selection) << 18);
}

std::string to_string(const Move& m) {
  std::ostringstream out;
  switch (m.kind) {
    case PlacementKind::None: out << "-"; break;
    case PlacementKind::Discard: out << "discard"; break;
    case PlacementKind::Place:
      out << "(" << int{m.placement.a.x} << "," << int{m.placement.a.y} << ")(" << int{m.placement.b.x} << ","
          << int{m.placement.b.y} << ")";
      break;
  }
  out << " / ";
  if (m.has_selection()) {
    out << int{m.selection};
  } else {
    out << "-";
  }
  return out.str();
}

int GameState::current_player() const {
  if (finished) return kNoPlayer;
  if (round == 1) return turn;
  return previous.entries[turn].claimed_by;
}

int GameState::domino_to_place() const {
  if (finished || round == 1) return 0;
  return previous.entries[turn].domino;
}

namespace {

void draw_draft(GameState& s) {
  s.current = Draft{};
  if (s.pile_size() < kPlayers) return;
  for (int i = 0; i < kPlayers; ++i) {
    s.current.entries[static_cast<std::size_t>(i)] = DraftEntry{s.pile[s.pile_next++], kNoPlayer};
  }
  s.current.size = kPlayers;
  std::sort(s.current.entries.begin(), s.current.entries.end(),
            [](const DraftEntry& a, const DraftEntry& b) { return a.domino < b.domino; });
}

template <class Fn>
void for_each_selection(const GameState& s, Fn&& fn) {
  for (const auto& e : s.current) {
    if (e.claimed_by == kNoPlayer) fn(int{e.domino});
  }
}

}  // namespace

GameState new_game(std::uint64_t seed, int num_players) {
  if (num_players != kPlayers) {
    throw std::invalid_argument("unsupported player count " + std::to_string(num_players) + " (only 4 supported)");
  }
  GameState s;
  s.seed = seed;
  for (int i = 0; i < kDeckSize; ++i) s.pile[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i + 1);
  Rng rng(seed);
  rng.shuffle(std::span<std::uint8_t>(s.pile));
  draw_draft(s);
  return s;
}

std::vector<Move> legal_moves(const GameState& s) {
  if (s.finished) throw GameError("no legal moves in a finished game");
  std::vector<Move> out;
  if (s.round == 1) {
    for_each_selection(s, [&](int sel) { out.push_back(Move::select(sel)); });
    return out;
  }
  const auto& kingdom = s.kingdoms[static_cast<std::size_t>(s.current_player())];
  const auto placements = placements_for(kingdom, domino(s.domino_to_place()));
  const bool selecting = !s.current.empty();
  auto emit = [&](const Move& base) {
    if (!selecting) {
      out.push_back(base);
      return;
    }
    for_each_selection(s, [&](int sel) {
      Move m = base;
      m.selection = static_cast<std::uint8_t>(sel);
      out.push_back(m);
    });
  };
  if (placements.empty()) {
    emit(Move::discard());
  } else {
    out.reserve(placements.size() * static_cast<std::size_t>(std::max(1, s.current.unclaimed())));
    for (const auto& p : placements) emit(Move::place(p));
  }
  return out;
}

bool is_legal(const GameState& s, const Move& m) {
  if (s.finished) return false;
  const auto moves = legal_moves(s);
  return std::find(moves.begin(), moves.end(), m) != moves.end();
}

void apply_move_unchecked(GameState& s, const Move& m) {
  const int player = s.current_player();
  auto& kingdom = s.kingdoms[static_cast<std::size_t>(player)];
  if (s.round > 1) {
    const int number = s.domino_to_place();
    if (m.kind == PlacementKind::Place) {
      kingdom.place(domino(number), m.placement);
    } else {
      kingdom.discard();
    }
    s.used |= std::uint64_t{1} << (number - 1);
  }
  if (m.has_selection()) {
    for (std::size_t i = 0; i < s.current.size; ++i) {
      if (s.current.entries[i].domino == m.selection) {
        s.current.entries[i].claimed_by = static_cast<std::int8_t>(player);
        break;
      }
    }
  }
  if (++s.turn < kPlayers) return;

  s.turn = 0;
  if (s.round == kRounds) {
    s.finished = true;
    return;
  }
  s.previous = s.current;
  draw_draft(s);
  ++s.round;
}

GameState apply_move(const GameState& s, const Move& m) {
  if (s.finished) throw GameError("game is finished");
  if (!is_legal(s, m)) throw GameError("illegal move " + to_string(m));
  GameState next = s;
  apply_move_unchecked(next, m);
  return next;
}

std::array<int, kPlayers> scores(const GameState& s) {
  std::array<int, kPlayers> out{};
  for (std::size_t p = 0; p < kPlayers; ++p) out[p] = score_kingdom(s.kingdoms[p], s.finished).total;
  return out;
}

GameState public_view(const GameState& s) {
  GameState v = s;
  std::fill(v.pile.begin(), v.pile.begin() + v.pile_next, std::uint8_t{0});
  std::sort(v.pile.begin() + v.pile_next, v.pile.end());
  v.seed = 0;
  return v;
}

void determinize(GameState& s, Rng& rng) {
  rng.shuffle(std::span<std::uint8_t>(s.pile.data() + s.pile_next, static_cast<std::size_t>(s.pile_size())));
}

void check_invariants(const GameState& s) {
  auto fail = [](const std::string& what) { throw GameError("invariant violated: " + what); };

  std::array<int, kDeckSize + 1> seen{};
  for (int i = s.pile_next; i < kDeckSize; ++i) ++seen[s.pile[static_cast<std::size_t>(i)]];
  for (const auto& e : s.current) ++seen[e.domino];
  // Entries of the previous draft before `turn` have already been placed.
  const int placed_this_round = s.round > 1 && !s.finished ? s.turn : (s.finished ? kPlayers : 0);
  for (int i = placed_this_round; i < s.previous.size; ++i) ++seen[s.previous.entries[static_cast<std::size_t>(i)].domino];
  for (int n = 1; n <= kDeckSize; ++n) {
    if ((s.used >> (n - 1)) & 1) ++seen[static_cast<std::size_t>(n)];
  }
  for (int n = 1; n <= kDeckSize; ++n) {
    if (seen[static_cast<std::size_t>(n)] != 1) fail("domino " + std::to_string(n) + " accounted " +
                                                     std::to_string(seen[static_cast<std::size_t>(n)]) + " times");
  }

  int handled = 0;
  for (const auto& k : s.kingdoms) {
    if (k.max_x() - k.min_x() >= kKingdomSide || k.max_y() - k.min_y() >= kKingdomSide) fail("kingdom exceeds 5x5");
    if (k.cell(Kingdom::index(0, 0)) != Kingdom::kCastle) fail("castle overwritten");
    int tiles = 0;
    for (int i = 0; i < Kingdom::kCells; ++i) tiles += Kingdom::is_tile(k.cell(i)) ? 1 : 0;
    if (tiles != k.tile_count()) fail("tile count mismatch");
    handled += k.dominoes_placed() + k.discard_count();
  }
  if (handled != std::popcount(s.used)) fail("placed + discarded does not match used dominoes");

  for (std::size_t i = 1; i < s.current.size; ++i) {
    if (s.current.entries[i - 1].domino >= s.current.entries[i].domino) fail("current draft not sorted");
  }
  if (s.round < 1 || s.round > kRounds) fail("round out of range");
}

BigInt count_deck_draws() {
  auto choose = [](int n, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  BigInt product = 1;
  for (int i = 0; i < 12; ++i) product *= choose(kDeckSize - 4 * i, 4);
  return product;
}

std::string scientific(const BigInt& v, int digits) {
  const std::string s = v.str();
  if (s.size() <= 1) return s + "e0";
  // Round half up on the decimal digit string.
  std::string mantissa = s.substr(0, static_cast<std::size_t>(digits));
  int exponent = static_cast<int>(s.size()) - 1;
  if (s.size() > static_cast<std::size_t>(digits) && s[static_cast<std::size_t>(digits)] >= '5') {
    int i = digits - 1;
    while (i >= 0 && mantissa[static_cast<std::size_t>(i)] == '9') mantissa[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) {
      mantissa.insert(mantissa.begin(), '1');
      mantissa.pop_back();
      ++exponent;
    } else {
      ++mantissa[static_cast<std::size_t>(i)];
    }
  }
  std::string out(1, mantissa[0]);
  if (mantissa.size() > 1) out += "." + mantissa.substr(1);
  return out + "e" + std::to_string(exponent);
}

}  // namespace kdom
