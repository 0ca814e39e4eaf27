#include "hjm/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace hjm {

IVec2 xi(int j, int T) { return {static_cast<long long>(j - T / 2), 1}; }

Snake snake_of_permutation(std::span<const int> lambda, int T) {
  require(static_cast<int>(lambda.size()) == T, "permutation length differs from T");
  std::vector<char> seen(T + 1, 0);
  for (int v : lambda) {
    require(v >= 1 && v <= T && !seen[v], "not a permutation of 1..T");
    seen[v] = 1;
  }
  Snake s;
  s.permutation.assign(lambda.begin(), lambda.end());
  s.vertices.assign(T + 1, IVec2{0, 0});
  for (int k = T - 1; k >= 0; --k) {
    const IVec2 x = xi(lambda[k], T);
    s.vertices[k] = {s.vertices[k + 1][0] + x[0], s.vertices[k + 1][1] + x[1]};
  }
  return s;
}

std::vector<int> to_renumbered(std::span<const int> lambda, std::span<const int> order) {
  require(lambda.size() == order.size(), "permutation length differs from the family");
  std::vector<int> rank(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = static_cast<int>(k) + 1;
  std::vector<int> out;
  for (int t : lambda) {
    require(t >= 1 && t <= static_cast<int>(order.size()), "label out of range");
    out.push_back(rank[t - 1]);
  }
  return out;
}

std::vector<std::vector<int>> renumbered_permutations(const SweepResult& sweep) {
  std::vector<std::vector<int>> out;
  for (const auto& perm : sweep.permutations) {
    std::vector<int> one(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) one[k] = perm[k] + 1;
    out.push_back(to_renumbered(one, sweep.order));
  }
  return out;
}

namespace {

std::vector<std::vector<int>> sectors_of_word(const FormalWord& word, int T) {
  std::vector<int> perm(T);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<int>> out{perm};
  for (int t : word.letters) {
    require(t >= 1 && t < T, "letter s" + std::to_string(t) + " out of range");
    std::swap(perm[t - 1], perm[t]);
    out.push_back(perm);
  }
  return out;
}

RhombicTiling tiling_from_sectors(const std::vector<std::vector<int>>& sectors,
                                  const FormalWord& word, int T) {
  RhombicTiling til;
  til.T = T;
  til.word = word;
  for (const auto& p : sectors) til.snakes.push_back(snake_of_permutation(p, T));
  for (std::size_t k = 0; k < word.letters.size(); ++k) {
    const int t = word.letters[k];
    const auto& a = til.snakes[k].vertices;
    const auto& b = til.snakes[k + 1].vertices;
    til.rhombi.push_back({t, {a[t - 1], a[t], a[t + 1], b[t]}});
  }
  return til;
}

std::vector<std::array<IVec2, 4>> tile_set(const RhombicTiling& t) {
  std::vector<std::array<IVec2, 4>> s;
  for (const auto& r : t.rhombi) {
    auto v = r.vertices;
    std::sort(v.begin(), v.end());
    s.push_back(v);
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

bool RhombicTiling::same_tiles(const RhombicTiling& o) const {
  return T == o.T && snakes.front() == o.snakes.front() && tile_set(*this) == tile_set(o);
}

std::vector<TilingVertex> RhombicTiling::vertices() const {
  std::map<IVec2, Spectrum> seen;
  for (const auto& s : snakes) {
    for (std::size_t k = 0; k < s.vertices.size(); ++k) {
      if (seen.count(s.vertices[k])) continue;
      Spectrum sp{std::vector<std::uint8_t>(T, 0)};
      for (std::size_t i = k; i < s.permutation.size(); ++i) sp.bits[s.permutation[i] - 1] = 1;
      seen.emplace(s.vertices[k], sp);
    }
  }
  std::vector<TilingVertex> out;
  for (auto& [pos, sp] : seen) out.push_back({pos, sp});
  return out;
}

RhombicTiling build_tiling(const SweepResult& sweep, int T) {
  require(static_cast<int>(sweep.order.size()) == T, "sweep size differs from T");
  return tiling_from_sectors(renumbered_permutations(sweep), sweep.word, T);
}

RhombicTiling tiling_from_word(const FormalWord& word, int T) {
  require(T >= 1, "T must be positive");
  return tiling_from_sectors(sectors_of_word(word, T), word, T);
}

OutputOrder output_order(std::span<const double> y) {
  for (double v : y) require(std::isfinite(v), "outputs must be finite");
  OutputOrder out;
  out.lambda.resize(y.size());
  std::iota(out.lambda.begin(), out.lambda.end(), 1);
  std::stable_sort(out.lambda.begin(), out.lambda.end(),
                   [&](int a, int b) { return y[a - 1] > y[b - 1]; });
  for (std::size_t k = 1; k < out.lambda.size(); ++k) {
    if (y[out.lambda[k - 1] - 1] == y[out.lambda[k] - 1]) out.tie = true;
  }
  return out;
}

bool snake_in_tiling(const RhombicTiling& tiling, const Snake& snake) {
  return std::any_of(tiling.snakes.begin(), tiling.snakes.end(),
                     [&](const Snake& s) { return s == snake; });
}

bool snake_in_region(const RhombicTiling& tiling, const Snake& snake) {
  const int T = tiling.T;
  require(static_cast<int>(snake.vertices.size()) == T + 1, "malformed snake: wrong length");
  std::vector<char> used(T + 1, 0);
  for (int k = 0; k < T; ++k) {
    require(snake.vertices[k][1] == T - k, "malformed snake: height profile is not T..0");
    const long long d = snake.vertices[k][0] - snake.vertices[k + 1][0];
    const long long j = d + T / 2;
    require(j >= 1 && j <= T && !used[j], "malformed snake: steps are not distinct xi vectors");
    used[j] = 1;
  }
  require(snake.vertices[T] == IVec2{0, 0}, "malformed snake: does not end at 0");
  const auto& lo_snake = tiling.snakes.back().vertices;  // Sn(Sigma)
  const auto& hi_snake = tiling.snakes.front().vertices; // Sn(id)
  for (int k = 0; k <= T; ++k) {
    const long long a = std::min(lo_snake[k][0], hi_snake[k][0]);
    const long long b = std::max(lo_snake[k][0], hi_snake[k][0]);
    if (snake.vertices[k][0] < a || snake.vertices[k][0] > b) return false;
  }
  return true;
}

FormalWord apply_braid_move(const FormalWord& word, std::size_t i, MoveKind kind) {
  const auto& w = word.letters;
  FormalWord out = word;
  if (kind == MoveKind::commute) {
    require(i + 1 < w.size(), "commute position out of range");
    require(std::abs(w[i] - w[i + 1]) >= 2, "commute needs letters at distance >= 2");
    std::swap(out.letters[i], out.letters[i + 1]);
    return out;
  }
  require(i + 2 < w.size(), "braid3 position out of range");
  require(w[i] == w[i + 2] && std::abs(w[i] - w[i + 1]) == 1,
          "braid3 needs the pattern s_t s_t+1 s_t or s_t+1 s_t s_t+1");
  out.letters[i] = w[i + 1];
  out.letters[i + 1] = w[i];
  out.letters[i + 2] = w[i + 1];
  return out;
}

std::vector<int> word_image(const FormalWord& word, int T) {
  return sectors_of_word(word, T).back();
}

namespace {

std::vector<std::pair<BraidMove, FormalWord>> neighbours(const FormalWord& w, bool with_braid) {
  std::vector<std::pair<BraidMove, FormalWord>> out;
  const auto& l = w.letters;
  for (std::size_t i = 0; i + 1 < l.size(); ++i) {
    if (std::abs(l[i] - l[i + 1]) >= 2) {
      out.push_back({{i, MoveKind::commute}, apply_braid_move(w, i, MoveKind::commute)});
    }
    if (with_braid && i + 2 < l.size() && l[i] == l[i + 2] && std::abs(l[i] - l[i + 1]) == 1) {
      out.push_back({{i, MoveKind::braid3}, apply_braid_move(w, i, MoveKind::braid3)});
    }
  }
  return out;
}

}  // namespace

Connection words_connected(const FormalWord& w1, const FormalWord& w2, std::span<const int> sigma) {
  int T = static_cast<int>(sigma.size());
  for (int t : w1.letters) T = std::max(T, t + 1);
  for (int t : w2.letters) T = std::max(T, t + 1);
  const auto i1 = word_image(w1, T), i2 = word_image(w2, T);
  if (i1 != i2) fail(ErrorKind::validation, "words have different permutation images; not comparable");
  if (!sigma.empty() && !std::equal(i1.begin(), i1.end(), sigma.begin(), sigma.end())) {
    fail(ErrorKind::validation, "words do not evaluate to the given permutation; not comparable");
  }
  Connection c;
  c.connected = true;
  if (w1.letters.size() != w2.letters.size()) {
    // Moves preserve length; reduced words of one permutation share it.
    c.connected = false;
    return c;
  }
  if (w1.letters.size() > kMaxBfsWord) return c;
  std::map<std::vector<int>, std::pair<std::vector<int>, BraidMove>> parent;
  std::deque<FormalWord> queue{w1};
  parent[w1.letters] = {{}, {}};
  while (!queue.empty()) {
    const FormalWord cur = queue.front();
    queue.pop_front();
    if (cur.letters == w2.letters) {
      std::vector<BraidMove> moves;
      std::vector<int> at = cur.letters;
      while (at != w1.letters) {
        const auto& [prev, mv] = parent[at];
        moves.push_back(mv);
        at = prev;
      }
      std::reverse(moves.begin(), moves.end());
      c.moves = std::move(moves);
      return c;
    }
    for (auto& [mv, nxt] : neighbours(cur, true)) {
      if (parent.count(nxt.letters)) continue;
      parent[nxt.letters] = {cur.letters, mv};
      queue.push_back(std::move(nxt));
    }
  }
  c.connected = false;
  return c;
}

namespace {

constexpr std::size_t kFlipSearchCap = 200000;

// Visits words reachable by commutations; calls fn(word, window, interior) for
// each braid3 window. Stops when fn returns true.
template <class Fn>
void for_each_hexagon(const RhombicTiling& tiling, Fn&& fn) {
  const int T = tiling.T;
  std::set<std::vector<int>> seen{tiling.word.letters};
  std::deque<FormalWord> queue{tiling.word};
  while (!queue.empty()) {
    const FormalWord w = queue.front();
    queue.pop_front();
    const auto& l = w.letters;
    const auto sectors = sectors_of_word(w, T);
    for (std::size_t i = 0; i + 2 < l.size(); ++i) {
      if (!(l[i] == l[i + 2] && std::abs(l[i] - l[i + 1]) == 1)) continue;
      const int t = std::min(l[i], l[i + 1]);
      const auto sn = snake_of_permutation(sectors[i + 1], T);
      // s_t s_t+1 s_t: interior V_{t+1}; s_t+1 s_t s_t+1: interior V_{t+2} (1-based).
      const IVec2 interior = l[i] == t ? sn.vertices[t] : sn.vertices[t + 1];
      if (fn(w, i, interior)) return;
    }
    for (auto& [mv, nxt] : neighbours(w, false)) {
      if (seen.size() >= kFlipSearchCap) break;
      if (seen.insert(nxt.letters).second) queue.push_back(std::move(nxt));
    }
  }
}

}  // namespace

std::vector<IVec2> flippable_vertices(const RhombicTiling& tiling) {
  std::set<IVec2> found;
  for_each_hexagon(tiling, [&](const FormalWord&, std::size_t, IVec2 v) {
    found.insert(v);
    return false;
  });
  return {found.begin(), found.end()};
}

RhombicTiling flip(const RhombicTiling& tiling, IVec2 v) {
  std::optional<FormalWord> result;
  for_each_hexagon(tiling, [&](const FormalWord& w, std::size_t i, IVec2 interior) {
    if (interior != v) return false;
    result = apply_braid_move(w, i, MoveKind::braid3);
    return true;
  });
  if (!result) {
    fail(ErrorKind::validation, "vertex (" + std::to_string(v[0]) + "," + std::to_string(v[1]) +
                                    ") is not the center of a hexagon in the tiling; not flippable");
  }
  return tiling_from_word(*result, tiling.T);
}

}  // namespace hjm
