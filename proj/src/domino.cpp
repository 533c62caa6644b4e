#include "kdom/domino.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace kdom {
namespace {

constexpr std::array<std::string_view, kTerrainCount> kTerrainNames = {
    "wheat", "water", "forest", "grassland", "swamp", "mine"};

// Keep in sync with data/deck.txt; a unit test compares the two.
constexpr std::string_view kDeckText = R"(# Kingdomino base deck, version 1.
# number terrainA crownsA terrainB crownsB
1 wheat 0 wheat 0
2 wheat 0 wheat 0
3 forest 0 forest 0
4 forest 0 forest 0
5 forest 0 forest 0
6 forest 0 forest 0
7 water 0 water 0
8 water 0 water 0
9 water 0 water 0
10 grassland 0 grassland 0
11 grassland 0 grassland 0
12 swamp 0 swamp 0
13 wheat 0 forest 0
14 wheat 0 water 0
15 wheat 0 grassland 0
16 wheat 0 swamp 0
17 forest 0 water 0
18 forest 0 grassland 0
19 wheat 1 forest 0
20 wheat 1 water 0
21 wheat 1 grassland 0
22 wheat 1 swamp 0
23 wheat 1 mine 0
24 forest 1 wheat 0
25 forest 1 wheat 0
26 forest 1 wheat 0
27 forest 1 wheat 0
28 forest 1 water 0
29 forest 1 grassland 0
30 water 1 wheat 0
31 water 1 wheat 0
32 water 1 forest 0
33 water 1 forest 0
34 water 1 forest 0
35 water 1 forest 0
36 wheat 0 grassland 1
37 water 0 grassland 1
38 wheat 0 swamp 1
39 grassland 0 swamp 1
40 mine 1 wheat 0
41 wheat 0 grassland 2
42 water 0 grassland 2
43 wheat 0 swamp 2
44 grassland 0 swamp 2
45 mine 2 wheat 0
46 swamp 0 mine 2
47 swamp 0 mine 2
48 wheat 0 mine 3
)";

}  // namespace

std::string_view terrain_name(Terrain t) { return kTerrainNames[static_cast<std::size_t>(t)]; }

Terrain terrain_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTerrainNames.size(); ++i) {
    if (kTerrainNames[i] == name) return static_cast<Terrain>(i);
  }
  throw std::invalid_argument("unknown terrain: " + std::string(name));
}

std::array<Domino, kDeckSize> parse_deck(std::istream& in) {
  std::array<Domino, kDeckSize> deck{};
  std::array<bool, kDeckSize> seen{};
  std::string line;
  int line_no = 0;
  int count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    int number = 0;
    std::string terrain_a, terrain_b;
    int crowns_a = -1, crowns_b = -1;
    if (!(fields >> number >> terrain_a >> crowns_a >> terrain_b >> crowns_b)) {
      throw DeckError("deck line " + std::to_string(line_no) + ": expected 5 fields");
    }
    if (number < 1 || number > kDeckSize) {
      throw DeckError("deck line " + std::to_string(line_no) + ": domino number out of range");
    }
    if (crowns_a < 0 || crowns_a > kMaxCrowns || crowns_b < 0 || crowns_b > kMaxCrowns) {
      throw DeckError("deck line " + std::to_string(line_no) + ": crowns must be 0..3");
    }
    auto& slot = seen[static_cast<std::size_t>(number - 1)];
    if (slot) throw DeckError("deck line " + std::to_string(line_no) + ": duplicate domino number");
    slot = true;
    try {
      deck[static_cast<std::size_t>(number - 1)] =
          Domino{static_cast<std::uint8_t>(number),
                 Tile{terrain_from_name(terrain_a), static_cast<std::uint8_t>(crowns_a)},
                 Tile{terrain_from_name(terrain_b), static_cast<std::uint8_t>(crowns_b)}};
    } catch (const std::invalid_argument& e) {
      throw DeckError("deck line " + std::to_string(line_no) + ": " + e.what());
    }
    ++count;
  }
  if (count != kDeckSize) throw DeckError("deck must list exactly 48 dominoes");
  return deck;
}

std::string_view canonical_deck_text() { return kDeckText; }

const std::array<Domino, kDeckSize>& canonical_deck() {
  static const std::array<Domino, kDeckSize> deck = [] {
    std::istringstream in{std::string(kDeckText)};
    return parse_deck(in);
  }();
  return deck;
}

}  // namespace kdom
