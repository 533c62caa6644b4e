#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kdom/domino.hpp"

namespace kdom {

struct Position {
  std::int8_t x = 0;
  std::int8_t y = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Cells covered by a domino: tile a of the domino goes to `a`, tile b to `b`.
struct Placement {
  Position a;
  Position b;

  friend bool operator==(const Placement&, const Placement&) = default;
  friend auto operator<=>(const Placement&, const Placement&) = default;
};

struct ScoreBreakdown {
  int area = 0;
  int middle_kingdom = 0;  // 0 or 10
  int harmony = 0;         // 0 or 5
  int total = 0;

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

inline constexpr int kMiddleKingdomBonus = 10;
inline constexpr int kHarmonyBonus = 5;
inline constexpr int kKingdomSide = 5;
inline constexpr int kDominoesPerKingdom = 12;

/// A player's territory: tiles around a castle fixed at (0, 0).
///
/// Storage is a padded 11x11 byte grid. Cells with |x| > 4 or |y| > 4 are
/// walls, so neighbour lookups never need bounds checks. The bounding box
/// always includes the castle and never exceeds 5x5.
class Kingdom {
 public:
  static constexpr int kReach = 4;
  static constexpr int kStride = 11;
  static constexpr int kCells = kStride * kStride;
  static constexpr std::array<int, 4> kNeighbours = {1, -1, kStride, -kStride};

  static constexpr std::uint8_t kEmpty = 0;
  static constexpr std::uint8_t kCastle = 0x20;
  static constexpr std::uint8_t kWall = 0x40;

  static constexpr int index(int x, int y) { return (y + kReach + 1) * kStride + (x + kReach + 1); }
  static constexpr int index(Position p) { return index(p.x, p.y); }
  static constexpr Position position(int idx) {
    return {static_cast<std::int8_t>(idx % kStride - kReach - 1),
            static_cast<std::int8_t>(idx / kStride - kReach - 1)};
  }
  static constexpr std::uint8_t code(Tile t) {
    return static_cast<std::uint8_t>(1 + static_cast<int>(t.terrain) * 4 + t.crowns);
  }
  static constexpr bool is_tile(std::uint8_t c) { return c >= 1 && c <= 24; }
  static constexpr Terrain terrain_of(std::uint8_t c) { return static_cast<Terrain>((c - 1) >> 2); }
  static constexpr int crowns_of(std::uint8_t c) { return (c - 1) & 3; }

  Kingdom();

  /// Rebuilds a kingdom from a tile listing (e.g. a wire document). Throws
  /// std::invalid_argument if the tiles overlap the castle, each other, or
  /// leave the 5x5 box.
  static Kingdom from_tiles(const std::vector<std::pair<Position, Tile>>& tiles, int discards);

  std::uint8_t cell(int idx) const { return cells_[static_cast<std::size_t>(idx)]; }
  std::optional<Tile> tile_at(Position p) const;
  bool is_free(Position p) const;

  int tile_count() const { return tiles_; }
  int dominoes_placed() const { return tiles_ / 2; }
  int discard_count() const { return discards_; }

  int min_x() const { return min_x_; }
  int max_x() const { return max_x_; }
  int min_y() const { return min_y_; }
  int max_y() const { return max_y_; }

  /// True while every tile lies within distance 2 of the castle on both axes,
  /// i.e. the castle can still end up in the centre of the 5x5 square.
  bool castle_centered() const { return min_x_ >= -2 && max_x_ <= 2 && min_y_ >= -2 && max_y_ <= 2; }

  /// Tiles in row-major order (y, then x).
  std::vector<std::pair<Position, Tile>> tiles() const;

  /// Places a domino. The caller is responsible for legality (see
  /// placements_for); only overlap and box violations are asserted.
  void place(const Domino& d, const Placement& p);
  void discard() { ++discards_; }

  friend bool operator==(const Kingdom&, const Kingdom&) = default;

 private:
  void put(Position p, Tile t);

  std::array<std::uint8_t, kCells> cells_{};
  std::int8_t min_x_ = 0;
  std::int8_t max_x_ = 0;
  std::int8_t min_y_ = 0;
  std::int8_t max_y_ = 0;
  std::uint8_t tiles_ = 0;
  std::uint8_t discards_ = 0;
};

namespace detail {

// Bit t is set when a cell connects to terrain t (castle connects to all).
inline constexpr std::array<std::uint8_t, 256> kConnectMask = [] {
  std::array<std::uint8_t, 256> m{};
  m[Kingdom::kCastle] = 0x3f;
  for (int c = 1; c <= 24; ++c) m[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(1u << ((c - 1) >> 2));
  return m;
}();

inline std::uint8_t connect_bits(const Kingdom& k, int idx) {
  std::uint8_t bits = 0;
  for (int d : Kingdom::kNeighbours) bits |= kConnectMask[k.cell(idx + d)];
  return bits;
}

}  // namespace detail

/// Calls fn(Placement) for every legal placement of `d` in `k`.
///
/// Both cells must be free, the 5x5 box (castle included) must still hold,
/// and at least one tile must touch the castle or a tile of its own terrain.
/// For a domino with two identical tiles only one orientation of each cell
/// pair is produced.
template <class Fn>
void for_each_placement(const Kingdom& k, const Domino& d, Fn&& fn) {
  const int lo_x = k.max_x() - (kKingdomSide - 1);
  const int hi_x = k.min_x() + (kKingdomSide - 1);
  const int lo_y = k.max_y() - (kKingdomSide - 1);
  const int hi_y = k.min_y() + (kKingdomSide - 1);
  const auto bit_a = static_cast<std::uint8_t>(1u << static_cast<int>(d.a.terrain));
  const auto bit_b = static_cast<std::uint8_t>(1u << static_cast<int>(d.b.terrain));
  const int dir_count = d.symmetric() ? 2 : 4;
  static constexpr std::array<std::array<int, 2>, 4> kSteps = {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

  for (int y = lo_y; y <= hi_y; ++y) {
    for (int x = lo_x; x <= hi_x; ++x) {
      const int ia = Kingdom::index(x, y);
      if (k.cell(ia) != Kingdom::kEmpty) continue;
      const bool a_connects = (detail::connect_bits(k, ia) & bit_a) != 0;
      for (int s = 0; s < dir_count; ++s) {
        const int bx = x + kSteps[static_cast<std::size_t>(s)][0];
        const int by = y + kSteps[static_cast<std::size_t>(s)][1];
        if (bx < lo_x || bx > hi_x || by < lo_y || by > hi_y) continue;
        const int ib = Kingdom::index(bx, by);
        if (k.cell(ib) != Kingdom::kEmpty) continue;
        if (!a_connects && (detail::connect_bits(k, ib) & bit_b) == 0) continue;
        fn(Placement{{static_cast<std::int8_t>(x), static_cast<std::int8_t>(y)},
                     {static_cast<std::int8_t>(bx), static_cast<std::int8_t>(by)}});
      }
    }
  }
}

std::vector<Placement> placements_for(const Kingdom& k, const Domino& d);
bool has_placement(const Kingdom& k, const Domino& d);

/// Sum over maximal 4-connected same-terrain areas of size x crowns.
int area_score(const Kingdom& k);
ScoreBreakdown score_kingdom(const Kingdom& k, bool terminal);

/// Connected-area labelling of a kingdom, used to price placements without
/// rescoring the whole kingdom.
struct Regions {
  std::array<std::uint8_t, Kingdom::kCells> id{};  // 0 = no tile
  std::array<std::uint8_t, 32> size{};
  std::array<std::uint8_t, 32> crowns{};
  int count = 0;
  int area = 0;
};

Regions label_regions(const Kingdom& k);

/// Non-terminal score change from placing `d` at `p`:
/// score_kingdom(k + p, false).total - score_kingdom(k, false).total.
int placement_gain(const Kingdom& k, const Regions& r, const Domino& d, const Placement& p);

}  // namespace kdom
