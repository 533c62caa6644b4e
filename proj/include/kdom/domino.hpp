#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kdom {

// The castle is not a terrain; it connects to every terrain.
enum class Terrain : std::uint8_t { Wheat, Water, Forest, Grassland, Swamp, Mine };

inline constexpr int kTerrainCount = 6;
inline constexpr int kDeckSize = 48;
inline constexpr int kMaxCrowns = 3;

std::string_view terrain_name(Terrain t);
Terrain terrain_from_name(std::string_view name);  // throws std::invalid_argument

struct Tile {
  Terrain terrain = Terrain::Wheat;
  std::uint8_t crowns = 0;

  friend bool operator==(const Tile&, const Tile&) = default;
};

struct Domino {
  std::uint8_t number = 0;  // 1..48
  Tile a;
  Tile b;

  bool symmetric() const { return a == b; }
  friend bool operator==(const Domino&, const Domino&) = default;
};

class DeckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the line-oriented deck format: `number terrainA crownsA terrainB crownsB`.
/// Blank lines and lines starting with '#' are ignored. The result is indexed
/// by number (entry i holds domino i + 1) and must contain exactly 48 unique
/// dominoes.
std::array<Domino, kDeckSize> parse_deck(std::istream& in);

/// The embedded canonical deck (same content as data/deck.txt).
const std::array<Domino, kDeckSize>& canonical_deck();
std::string_view canonical_deck_text();

inline const Domino& domino(int number) { return canonical_deck()[static_cast<std::size_t>(number - 1)]; }

}  // namespace kdom
