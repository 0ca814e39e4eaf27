#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hjm/error.hpp"
#include "hjm/moment.hpp"
#include "hjm/tiling.hpp"
#include "support/oracles.hpp"

using namespace hjm;

namespace {

FormalWord w(std::initializer_list<int> l) { return FormalWord{std::vector<int>(l)}; }

// V_k = sum of xi over lambda(k..T), written out directly
std::vector<IVec2> suffix_sums(const std::vector<int>& lambda) {
  const int T = static_cast<int>(lambda.size());
  std::vector<IVec2> v(T + 1, IVec2{0, 0});
  for (int k = T - 1; k >= 0; --k) {
    v[k] = v[k + 1];
    v[k][0] += lambda[k] - T / 2;
    v[k][1] += 1;
  }
  return v;
}

std::set<std::vector<IVec2>> tile_set(const RhombicTiling& t) {
  std::set<std::vector<IVec2>> s;
  for (const auto& r : t.rhombi) {
    std::vector<IVec2> v(r.vertices.begin(), r.vertices.end());
    std::sort(v.begin(), v.end());
    s.insert(v);
  }
  return s;
}

std::vector<TimeSeriesRecord> series_of(const std::vector<std::array<double, 2>>& p, const Vec& y) {
  std::vector<TimeSeriesRecord> s;
  for (std::size_t t = 0; t < p.size(); ++t) s.push_back({static_cast<int>(t + 1), y[t], 1.0, {p[t][0], p[t][1]}});
  return s;
}

}  // namespace

TEST_CASE("xi vectors") {
  CHECK(xi(1, 2) == IVec2{0, 1});
  CHECK(xi(2, 2) == IVec2{1, 1});
  CHECK(xi(1, 3) == IVec2{0, 1});
  CHECK(xi(3, 3) == IVec2{2, 1});
}

TEST_CASE("snake examples") {
  CHECK(snake_of_permutation(std::vector<int>{1, 2}, 2).vertices == std::vector<IVec2>{{1, 2}, {1, 1}, {0, 0}});
  CHECK(snake_of_permutation(std::vector<int>{2, 1}, 2).vertices == std::vector<IVec2>{{1, 2}, {0, 1}, {0, 0}});
  std::vector<int> p{1, 2, 3, 4};
  do {
    CHECK(snake_of_permutation(p, 4).vertices == suffix_sums(p));
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(snake_of_permutation(std::vector<int>{3, 1, 2}, 3).vertices == suffix_sums({3, 1, 2}));
}

TEST_CASE("tilings from words") {
  auto t = tiling_from_word(w({}), 2);
  CHECK(t.snakes.size() == 1);
  CHECK(t.rhombi.empty());

  t = tiling_from_word(w({1}), 2);
  CHECK(t.snakes.size() == 2);
  REQUIRE(t.rhombi.size() == 1);
  std::vector<IVec2> v(t.rhombi[0].vertices.begin(), t.rhombi[0].vertices.end());
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<IVec2>{{0, 0}, {0, 1}, {1, 1}, {1, 2}});

  const auto a = tiling_from_word(w({1, 2, 1}), 3);
  CHECK(a.rhombi.size() == 3);
  const auto fv = flippable_vertices(a);
  REQUIRE(fv.size() == 1);
  const auto b = flip(a, fv[0]);
  CHECK(b.word.str() == "s2 s1 s2");
  CHECK(b.snakes.front() == a.snakes.front());
  CHECK(b.snakes.back() == a.snakes.back());
  CHECK(flip(b, flippable_vertices(b).at(0)).same_tiles(a));
  CHECK(tile_set(flip(b, flippable_vertices(b).at(0))) == tile_set(a));
  CHECK(tile_set(b) != tile_set(a));
  CHECK_THROWS_AS(flip(tiling_from_word(w({1}), 2), IVec2{0, 1}), Error);

  // commuting letters give the same tiles
  CHECK(tiling_from_word(w({1, 3}), 4).same_tiles(tiling_from_word(w({3, 1}), 4)));
}

TEST_CASE("tiling structure from sweeps") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> R(0.2, 4.0);
  for (int rep = 0; rep < 80; ++rep) {
    const int T = 2 + rep % 6;
    const double rho = rep % 2 ? R(rng) : -R(rng) / 4.0;
    const auto fam = transform_coordinates(rho, NormalizedPrices{oracle::random_prices(rng, T)});
    const auto sw = sweep(fam);
    const auto t = build_tiling(sw, T);
    CHECK(t.rhombi.size() == sw.word.letters.size());
    CHECK(t.snakes.size() == sw.word.letters.size() + 1);
    std::vector<int> id(T);
    std::iota(id.begin(), id.end(), 1);
    CHECK(t.snakes.front() == snake_of_permutation(id, T));
    const auto sigma = sigma_order(fam);
    CHECK(t.snakes.back().permutation == word_image(sw.word, T));
    CHECK(t.snakes.back() == snake_of_permutation(sigma, T));
    for (std::size_t k = 0; k + 1 < t.snakes.size(); ++k) {
      int diff = 0;
      for (int i = 0; i <= T; ++i) diff += t.snakes[k].vertices[i] != t.snakes[k + 1].vertices[i];
      CHECK(diff == 1);
      for (int i = 0; i < T; ++i) CHECK(t.snakes[k].vertices[i][1] == T - i);
    }
    for (const auto& v : t.vertices()) {
      long long x = 0, h = 0;
      for (int j = 0; j < T; ++j)
        if (v.spectrum.bits[j]) {
          x += xi(j + 1, T)[0];
          ++h;
        }
      CHECK(v.position == IVec2{x, h});
    }
    // every flip keeps the boundary and moves one interior vertex
    for (const auto& hv : flippable_vertices(t)) {
      const auto f = flip(t, hv);
      CHECK(f.snakes.front() == t.snakes.front());
      CHECK(f.snakes.back() == t.snakes.back());
      CHECK(word_image(f.word, T) == word_image(t.word, T));
      std::set<IVec2> a, b;
      for (const auto& v : t.vertices()) a.insert(v.position);
      for (const auto& v : f.vertices()) b.insert(v.position);
      std::vector<IVec2> only_a, only_b;
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
      std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
      CHECK(only_a.size() == 1);
      CHECK(only_b.size() == 1);
    }
  }
}

TEST_CASE("output order") {
  auto o = output_order(std::vector<double>{3, 1, 2});
  CHECK(o.lambda == std::vector<int>{1, 3, 2});
  CHECK_FALSE(o.tie);
  CHECK(output_order(std::vector<double>{1, 2, 3}).lambda == std::vector<int>{3, 2, 1});
  o = output_order(std::vector<double>{2, 2});
  CHECK(o.lambda == std::vector<int>{1, 2});
  CHECK(o.tie);
}

TEST_CASE("snake membership examples") {
  const auto full = tiling_from_word(w({1, 2, 1}), 3);
  std::set<std::vector<int>> realized;
  for (const auto& s : full.snakes) {
    CHECK(snake_in_tiling(full, s));
    CHECK(snake_in_region(full, s));
    realized.insert(s.permutation);
  }
  CHECK(snake_in_tiling(full, snake_of_permutation(std::vector<int>{1, 2, 3}, 3)));
  std::vector<int> p{1, 2, 3};
  int missing = 0;
  do {
    const auto sn = snake_of_permutation(p, 3);
    CHECK(snake_in_region(full, sn));
    if (!realized.count(p)) {
      ++missing;
      CHECK_FALSE(snake_in_tiling(full, sn));
    }
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(missing == 2);

  const auto nested = tiling_from_word(w({}), 2);
  CHECK_FALSE(snake_in_region(nested, snake_of_permutation(std::vector<int>{2, 1}, 2)));
  const auto cross = tiling_from_word(w({1}), 2);
  CHECK(snake_in_tiling(cross, snake_of_permutation(std::vector<int>{2, 1}, 2)));

  Snake bad;
  bad.vertices = {{0, 3}, {0, 1}, {0, 0}};
  CHECK_THROWS_AS(snake_in_region(cross, bad), Error);
}

TEST_CASE("braid moves") {
  CHECK(apply_braid_move(w({1, 3}), 0, MoveKind::commute).str() == "s3 s1");
  CHECK(apply_braid_move(w({1, 2, 1}), 0, MoveKind::braid3).str() == "s2 s1 s2");
  CHECK(apply_braid_move(w({2, 1, 2}), 0, MoveKind::braid3).str() == "s1 s2 s1");
  CHECK_THROWS_AS(apply_braid_move(w({1, 2}), 0, MoveKind::commute), Error);
  CHECK_THROWS_AS(apply_braid_move(w({1, 3, 1}), 0, MoveKind::braid3), Error);

  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 300; ++rep) {
    FormalWord x;
    for (int k = 0; k < 8; ++k) x.letters.push_back(1 + static_cast<int>(rng() % 4));
    for (std::size_t pos = 0; pos + 1 < x.letters.size(); ++pos) {
      if (std::abs(x.letters[pos] - x.letters[pos + 1]) >= 2)
        CHECK(word_image(apply_braid_move(x, pos, MoveKind::commute), 5) == word_image(x, 5));
      if (pos + 2 < x.letters.size() && x.letters[pos] == x.letters[pos + 2] &&
          std::abs(x.letters[pos] - x.letters[pos + 1]) == 1)
        CHECK(word_image(apply_braid_move(x, pos, MoveKind::braid3), 5) == word_image(x, 5));
    }
  }
}

TEST_CASE("word connection") {
  const auto s = word_image(w({1, 2, 1}), 3);
  auto c = words_connected(w({1, 2, 1}), w({2, 1, 2}), s);
  CHECK(c.connected);
  REQUIRE(c.moves);
  CHECK(c.moves->size() == 1);
  c = words_connected(w({1, 2, 1}), w({1, 2, 1}), s);
  REQUIRE(c.moves);
  CHECK(c.moves->empty());
  const auto s4 = word_image(w({1, 3, 2}), 4);
  c = words_connected(w({1, 3, 2}), w({3, 1, 2}), s4);
  REQUIRE(c.moves);
  REQUIRE(c.moves->size() == 1);
  CHECK(c.moves->front().kind == MoveKind::commute);
  CHECK_THROWS_AS(words_connected(w({1, 2}), w({2, 1}), word_image(w({1, 2}), 3)), Error);

  // replaying the moves reaches the target
  const auto a = w({1, 2, 1, 3, 2, 1}), b = w({3, 2, 1, 3, 2, 3});
  REQUIRE(word_image(a, 4) == word_image(b, 4));
  c = words_connected(a, b, word_image(a, 4));
  REQUIRE(c.moves);
  auto cur = a;
  for (const auto& m : *c.moves) cur = apply_braid_move(cur, m.position, m.kind);
  CHECK(cur.letters == b.letters);
}

TEST_CASE("sweep words with the same sigma are connected") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> R(0.2, 6.0);
  int compared = 0;
  for (int rep = 0; rep < 300 && compared < 40; ++rep) {
    const int T = 3 + rep % 3;
    const NormalizedPrices ph{oracle::random_prices(rng, T)};
    const double r1 = R(rng), r2 = R(rng);
    std::vector<int> s1, s2;
    SweepResult a, b;
    try {
      const auto f1 = transform_coordinates(r1, ph), f2 = transform_coordinates(r2, ph);
      s1 = sigma_order(f1);
      s2 = sigma_order(f2);
      a = sweep(f1);
      b = sweep(f2);
    } catch (const Error&) {
      continue;
    }
    if (s1 != s2 || a.order != b.order || a.word.letters == b.word.letters) continue;
    ++compared;
    const auto c = words_connected(a.word, b.word, word_image(a.word, T));
    CHECK(c.connected);
    if (c.moves) {
      auto cur = a.word;
      for (const auto& m : *c.moves) cur = apply_braid_move(cur, m.position, m.kind);
      CHECK(cur.letters == b.word.letters);
    }
  }
  CHECK(compared > 5);
}

TEST_CASE("snake tests agree with cone membership") {
  std::mt19937_64 rng(58);
  std::uniform_real_distribution<double> R(0.2, 4.0), Y(0.0, 10.0);
  int inside = 0, outside = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const int T = 2 + rep % 5;
    const double rho = rep % 2 ? R(rng) : -R(rng) / 4.0;
    const auto ph = oracle::random_prices(rng, T);
    Vec y(T);
    for (auto& v : y) v = Y(rng);
    const auto s = series_of(ph, y);
    const auto fam = transform_coordinates(rho, NormalizedPrices{ph});
    const auto sw = sweep(fam);
    const auto tl = build_tiling(sw, T);
    const auto o = output_order(y);
    const auto sn = snake_of_permutation(to_renumbered(o.lambda, sw.order), T);
    const auto rep_m = moment_solvable(s, rho);
    if (snake_in_tiling(tl, sn)) {
      ++inside;
      CHECK(rep_m.solvable);
      if (rep_m.witness) CHECK(rep_m.witness_residual < 1e-9);
    }
    if (!snake_in_region(tl, sn)) {
      ++outside;
      CHECK_FALSE(rep_m.solvable);
    }
  }
  CHECK(inside > 20);
  CHECK(outside > 20);
}
