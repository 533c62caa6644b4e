#include "kdom/kingdom.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <stdexcept>

namespace kdom {

Kingdom::Kingdom() {
  cells_.fill(kWall);
  for (int y = -kReach; y <= kReach; ++y) {
    for (int x = -kReach; x <= kReach; ++x) cells_[static_cast<std::size_t>(index(x, y))] = kEmpty;
  }
  cells_[static_cast<std::size_t>(index(0, 0))] = kCastle;
}

Kingdom Kingdom::from_tiles(const std::vector<std::pair<Position, Tile>>& tiles, int discards) {
  Kingdom k;
  for (const auto& [pos, tile] : tiles) {
    if (std::abs(pos.x) > kReach || std::abs(pos.y) > kReach) {
      throw std::invalid_argument("tile outside the kingdom grid");
    }
    if (k.cell(index(pos)) != kEmpty) throw std::invalid_argument("overlapping tile");
    if (tile.crowns > kMaxCrowns) throw std::invalid_argument("crowns must be 0..3");
    k.put(pos, tile);
  }
  if (k.max_x_ - k.min_x_ >= kKingdomSide || k.max_y_ - k.min_y_ >= kKingdomSide) {
    throw std::invalid_argument("tiles exceed the 5x5 box");
  }
  if (tiles.size() % 2 != 0) throw std::invalid_argument("odd tile count");
  if (discards < 0 || discards > kDominoesPerKingdom) throw std::invalid_argument("bad discard count");
  k.discards_ = static_cast<std::uint8_t>(discards);
  return k;
}

std::optional<Tile> Kingdom::tile_at(Position p) const {
  if (std::abs(p.x) > kReach || std::abs(p.y) > kReach) return std::nullopt;
  const auto c = cell(index(p));
  if (!is_tile(c)) return std::nullopt;
  return Tile{terrain_of(c), static_cast<std::uint8_t>(crowns_of(c))};
}

bool Kingdom::is_free(Position p) const {
  if (std::abs(p.x) > kReach || std::abs(p.y) > kReach) return false;
  return cell(index(p)) == kEmpty;
}

std::vector<std::pair<Position, Tile>> Kingdom::tiles() const {
  std::vector<std::pair<Position, Tile>> out;
  out.reserve(tiles_);
  for (int idx = 0; idx < kCells; ++idx) {
    const auto c = cell(idx);
    if (is_tile(c)) out.emplace_back(position(idx), Tile{terrain_of(c), static_cast<std::uint8_t>(crowns_of(c))});
  }
  return out;
}

void Kingdom::put(Position p, Tile t) {
  cells_[static_cast<std::size_t>(index(p))] = code(t);
  min_x_ = std::min(min_x_, p.x);
  max_x_ = std::max(max_x_, p.x);
  min_y_ = std::min(min_y_, p.y);
  max_y_ = std::max(max_y_, p.y);
  ++tiles_;
}

void Kingdom::place(const Domino& d, const Placement& p) {
  assert(is_free(p.a) && is_free(p.b));
  put(p.a, d.a);
  put(p.b, d.b);
  assert(max_x_ - min_x_ < kKingdomSide && max_y_ - min_y_ < kKingdomSide);
}

std::vector<Placement> placements_for(const Kingdom& k, const Domino& d) {
  std::vector<Placement> out;
  for_each_placement(k, d, [&](const Placement& p) { out.push_back(p); });
  return out;
}

bool has_placement(const Kingdom& k, const Domino& d) {
  bool found = false;
  // for_each_placement has no early exit; the scan is cheap enough.
  for_each_placement(k, d, [&](const Placement&) { found = true; });
  return found;
}

Regions label_regions(const Kingdom& k) {
  Regions r;
  std::array<int, Kingdom::kCells> stack{};
  for (int start = 0; start < Kingdom::kCells; ++start) {
    const auto c = k.cell(start);
    if (!Kingdom::is_tile(c) || r.id[static_cast<std::size_t>(start)] != 0) continue;
    const auto terrain = Kingdom::terrain_of(c);
    const auto label = static_cast<std::uint8_t>(++r.count);
    int size = 0;
    int crowns = 0;
    int top = 0;
    stack[static_cast<std::size_t>(top++)] = start;
    r.id[static_cast<std::size_t>(start)] = label;
    while (top > 0) {
      const int cur = stack[static_cast<std::size_t>(--top)];
      ++size;
      crowns += Kingdom::crowns_of(k.cell(cur));
      for (int d : Kingdom::kNeighbours) {
        const int n = cur + d;
        const auto nc = k.cell(n);
        if (Kingdom::is_tile(nc) && Kingdom::terrain_of(nc) == terrain && r.id[static_cast<std::size_t>(n)] == 0) {
          r.id[static_cast<std::size_t>(n)] = label;
          stack[static_cast<std::size_t>(top++)] = n;
        }
      }
    }
    r.size[label] = static_cast<std::uint8_t>(size);
    r.crowns[label] = static_cast<std::uint8_t>(crowns);
    r.area += size * crowns;
  }
  return r;
}

int area_score(const Kingdom& k) { return label_regions(k).area; }

ScoreBreakdown score_kingdom(const Kingdom& k, bool terminal) {
  ScoreBreakdown s;
  s.area = area_score(k);
  s.middle_kingdom = k.castle_centered() ? kMiddleKingdomBonus : 0;
  s.harmony = terminal && k.dominoes_placed() == kDominoesPerKingdom && k.discard_count() == 0 ? kHarmonyBonus : 0;
  s.total = s.area + s.middle_kingdom + s.harmony;
  return s;
}

namespace {

// Distinct region labels of same-terrain tiles next to `idx`.
int adjacent_regions(const Kingdom& k, const Regions& r, int idx, Terrain t, std::array<std::uint8_t, 4>& out) {
  int n = 0;
  for (int d : Kingdom::kNeighbours) {
    const auto c = k.cell(idx + d);
    if (!Kingdom::is_tile(c) || Kingdom::terrain_of(c) != t) continue;
    const auto label = r.id[static_cast<std::size_t>(idx + d)];
    if (std::find(out.begin(), out.begin() + n, label) == out.begin() + n) out[static_cast<std::size_t>(n++)] = label;
  }
  return n;
}

}  // namespace

int placement_gain(const Kingdom& k, const Regions& r, const Domino& d, const Placement& p) {
  const int ia = Kingdom::index(p.a);
  const int ib = Kingdom::index(p.b);
  std::array<std::uint8_t, 4> near_a{};
  std::array<std::uint8_t, 4> near_b{};
  const int na = adjacent_regions(k, r, ia, d.a.terrain, near_a);
  const int nb = adjacent_regions(k, r, ib, d.b.terrain, near_b);

  int gain = 0;
  if (d.a.terrain == d.b.terrain) {
    int size = 2;
    int crowns = d.a.crowns + d.b.crowns;
    int old = 0;
    std::array<std::uint8_t, 8> merged{};
    int m = 0;
    for (int i = 0; i < na; ++i) merged[static_cast<std::size_t>(m++)] = near_a[static_cast<std::size_t>(i)];
    for (int i = 0; i < nb; ++i) {
      const auto label = near_b[static_cast<std::size_t>(i)];
      if (std::find(merged.begin(), merged.begin() + m, label) == merged.begin() + m) {
        merged[static_cast<std::size_t>(m++)] = label;
      }
    }
    for (int i = 0; i < m; ++i) {
      const auto label = merged[static_cast<std::size_t>(i)];
      size += r.size[label];
      crowns += r.crowns[label];
      old += r.size[label] * r.crowns[label];
    }
    gain = size * crowns - old;
  } else {
    auto grow = [&](const std::array<std::uint8_t, 4>& labels, int n, int crowns) {
      int size = 1;
      int old = 0;
      for (int i = 0; i < n; ++i) {
        const auto label = labels[static_cast<std::size_t>(i)];
        size += r.size[label];
        crowns += r.crowns[label];
        old += r.size[label] * r.crowns[label];
      }
      return size * crowns - old;
    };
    gain = grow(near_a, na, d.a.crowns) + grow(near_b, nb, d.b.crowns);
  }

  if (k.castle_centered()) {
    const bool inside = std::abs(p.a.x) <= 2 && std::abs(p.a.y) <= 2 && std::abs(p.b.x) <= 2 && std::abs(p.b.y) <= 2;
    if (!inside) gain -= kMiddleKingdomBonus;
  }
  return gain;
}

}  // namespace kdom
