#pragma once

// Rhombic tilings, snakes and braid moves. Integer arithmetic only.
//
// Labels: permutations here use the renumbered line labels 1..T (lines
// sorted by increasing first coefficient), so the sector next to the z1 axis
// is the identity. Use to_renumbered() to convert time-indexed permutations.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hjm/arrangement.hpp"

namespace hjm {

using IVec2 = std::array<long long, 2>;

/// xi_j = (j - floor(T/2), 1), j = 1..T.
IVec2 xi(int j, int T);

struct TilingVertex {
  IVec2 position{};
  Spectrum spectrum;  // renumbered labels; bit j = 1 iff xi_j is in the sum
};

struct Snake {
  std::vector<IVec2> vertices;  // V_1 .. V_{T+1}, V_{T+1} = 0
  std::vector<int> permutation; // 1-based
  bool operator==(const Snake& o) const { return vertices == o.vertices; }
};

struct Rhombus {
  int letter = 0;
  std::array<IVec2, 4> vertices{};
};

struct RhombicTiling {
  int T = 0;
  std::vector<Snake> snakes;  // one per sector
  std::vector<Rhombus> rhombi;
  FormalWord word;

  /// Same set of rhombi (words related by commutations give equal tilings).
  bool same_tiles(const RhombicTiling& o) const;
  std::vector<TilingVertex> vertices() const;
};

Snake snake_of_permutation(std::span<const int> lambda, int T);

/// Sector permutations of a sweep, mapped to renumbered labels.
std::vector<std::vector<int>> renumbered_permutations(const SweepResult& sweep);

/// Maps a 1-based permutation of time indices to renumbered labels.
std::vector<int> to_renumbered(std::span<const int> lambda, std::span<const int> order);

RhombicTiling build_tiling(const SweepResult& sweep, int T);
RhombicTiling tiling_from_word(const FormalWord& word, int T);

struct OutputOrder {
  std::vector<int> lambda;  // 1-based, y strictly decreasing along lambda
  bool tie = false;
};

OutputOrder output_order(std::span<const double> y);

bool snake_in_tiling(const RhombicTiling& tiling, const Snake& snake);
bool snake_in_region(const RhombicTiling& tiling, const Snake& snake);

enum class MoveKind { commute, braid3 };

struct BraidMove {
  std::size_t position = 0;  // 0-based index of the first letter
  MoveKind kind = MoveKind::commute;
};

FormalWord apply_braid_move(const FormalWord& word, std::size_t position, MoveKind kind);

/// Permutation image of a word acting on positions, starting from the identity.
std::vector<int> word_image(const FormalWord& word, int T);

inline constexpr std::size_t kMaxBfsWord = 10;

struct Connection {
  bool connected = false;
  std::optional<std::vector<BraidMove>> moves;  // absent when the word is too long
};

Connection words_connected(const FormalWord& w1, const FormalWord& w2,
                           std::span<const int> sigma);

/// Interior vertices of hexagons that can be flipped.
std::vector<IVec2> flippable_vertices(const RhombicTiling& tiling);

RhombicTiling flip(const RhombicTiling& tiling, IVec2 hexagon_vertex);

}  // namespace hjm
