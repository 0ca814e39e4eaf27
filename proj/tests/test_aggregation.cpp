#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hjm/aggregation.hpp"
#include "hjm/error.hpp"

using namespace hjm;

namespace {

double pos(double x) { return std::max(0.0, x); }
double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

// sum of mass (q - s.x)_+ over the atoms
double ind_profit(const std::vector<std::pair<Vec2, double>>& atoms, double q, Vec2 s) {
  double v = 0;
  for (const auto& [x, m] : atoms) v += m * pos(q - dot(s, x));
  return v;
}

std::vector<double> breakpoints(const std::vector<std::pair<Vec2, double>>& atoms, Vec2 s) {
  std::vector<double> b{0.0};
  for (const auto& a : atoms) b.push_back(dot(s, a.first));
  return b;
}

// Leontief demand: minimize the separable piecewise-linear sum subject to
// sum q = p0. Some optimum has every price but one at a breakpoint.
double leontief_oracle(const std::vector<std::vector<std::pair<Vec2, double>>>& inds, Vec2 s, double p0) {
  const std::size_t m = inds.size();
  double best = INFINITY;
  for (std::size_t freej = 0; freej < m; ++freej) {
    std::vector<std::vector<double>> B;
    for (std::size_t j = 0; j < m; ++j)
      if (j != freej) B.push_back(breakpoints(inds[j], s));
    std::vector<std::size_t> idx(B.size(), 0);
    for (;;) {
      double used = 0, val = 0;
      std::size_t b = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != freej) {
          used += B[b][idx[b]];
          val += ind_profit(inds[j], B[b][idx[b]], s);
          ++b;
        }
      if (used <= p0) best = std::min(best, val + ind_profit(inds[freej], p0 - used, s));
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == B[k].size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return best;
}

// CES demand with two goods: the optimum lies on q1^a + q2^a = p0^a, a = rho/(1+rho)
double ces_oracle(const std::vector<std::pair<Vec2, double>>& i1, const std::vector<std::pair<Vec2, double>>& i2,
                  double rho, Vec2 s, double p0) {
  const double a = rho / (1 + rho);
  const auto f = [&](double u) {
    return ind_profit(i1, p0 * std::pow(u, 1 / a), s) + ind_profit(i2, p0 * std::pow(1 - u, 1 / a), s);
  };
  const int N = 200000;
  double best = INFINITY, bu = 0.5;
  for (int k = 1; k < N; ++k) {
    const double v = f(static_cast<double>(k) / N);
    if (v < best) {
      best = v;
      bu = static_cast<double>(k) / N;
    }
  }
  double lo = std::max(1e-12, bu - 1.0 / N), hi = std::min(1 - 1e-12, bu + 1.0 / N);
  for (int k = 0; k < 200; ++k) {
    const double m1 = lo + (hi - lo) * 0.382, m2 = lo + (hi - lo) * 0.618;
    if (f(m1) < f(m2)) hi = m2; else lo = m1;
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

Industry industry(const std::string& id, const std::vector<std::pair<Vec2, double>>& atoms) {
  Industry ind{id, {}};
  for (const auto& [x, m] : atoms) ind.measure.atoms.push_back(Atom{{x[0], x[1]}, m, 0.0});
  return ind;
}

using Atoms = std::vector<std::pair<Vec2, double>>;

}  // namespace

TEST_CASE("complementary closed form") {
  const auto r = aggregate_profit_complementary(1, {1, 1}, 3, {2, 3}, 2, {1, 2}, {1, 1}, 10);
  CHECK(r.pi1 == 5.0);
  CHECK(r.pi2 == 3.0);
  CHECK(r.value == 5.0);
  CHECK(r.in_K1);
  CHECK_FALSE(r.in_K2);
  CHECK(aggregate_profit_complementary(1, {1, 1}, 3, {2, 3}, 2, {1, 2}, {1, 1}, 4).value == 0.0);
  CHECK(aggregate_profit_complementary(1, {1, 1}, 3, {2, 3}, 2, {1, 2}, {2, 2}, 20).value == 10.0);
  CHECK_THROWS_AS(aggregate_profit_complementary(3, {1, 1}, 1, {2, 3}, 1, {1, 2}, {1, 1}, 10), Error);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> K(0.1, 3), X(0.1, 3), S(0, 2), P(0, 15);
  for (int rep = 0; rep < 2000; ++rep) {
    const double k0 = K(rng), k1 = K(rng), k2 = K(rng);
    if (k1 + k2 <= k0) continue;
    const Vec2 z{X(rng), X(rng)}, y1{X(rng), X(rng)}, y2{X(rng), X(rng)}, s{S(rng), S(rng)};
    const double p0 = P(rng);
    const double ex = leontief_oracle({{{z, k0}}, {{y1, k1}, {y2, k2}}}, s, p0);
    CHECK(aggregate_profit_complementary(k0, z, k1, y1, k2, y2, s, p0).value == doctest::Approx(ex).epsilon(1e-12));
    const double lam = K(rng);
    CHECK(aggregate_profit_complementary(k0, z, k1, y1, k2, y2, {lam * s[0], lam * s[1]}, lam * p0).value ==
          doctest::Approx(lam * aggregate_profit_complementary(k0, z, k1, y1, k2, y2, s, p0).value).epsilon(1e-12));
  }
}

TEST_CASE("the two branches meet on the switching ray") {
  const Vec2 z{0.5, 1}, y1{3, 1}, y2{1, 2};
  // s.(y1 - y2) = 0 along s = t (1, 2)
  for (double t = 0.05; t < 3; t += 0.05) {
    const auto r = aggregate_profit_complementary(1.5, z, 1, y1, 2, y2, {t, 2 * t}, 9.0);
    CHECK(std::abs(r.pi1 - r.pi2) <= 1e-9 * std::max(1.0, r.value));
    CHECK(r.in_K1);
    CHECK(r.in_K2);
  }
}

TEST_CASE("ces demand closed form") {
  auto r = aggregate_profit_ces_demand(1, {0.2, 0.1}, 1, {0.1, 0.2}, 1, {0.05, 0.1}, 1.0, {1, 1}, 10);
  CHECK(r.kappa1 == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(r.kappa2 == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(r.closed_form);
  REQUIRE(r.aggregate_measure.atoms.size() == 3);
  CHECK(r.aggregate_measure.atoms[0].x[0] == doctest::Approx(2.25 * 0.2));
  CHECK(r.aggregate_measure.atoms[0].mass == doctest::Approx(1 / 2.25));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> K(0.3, 2), X(0.02, 0.3), R(0.2, 3);
  int closed = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const double k0 = K(rng), k1 = K(rng), k2 = K(rng);
    const double rho = rep % 3 == 0 ? -R(rng) / 3.5 : R(rng);
    const Vec2 z{X(rng), X(rng)}, y1{X(rng), X(rng)}, y2{X(rng), X(rng)}, s{1.0, K(rng)};
    const double p0 = rep % 2 ? 50.0 : 2.0;
    const auto c = aggregate_profit_ces_demand(k0, z, k1, y1, k2, y2, rho, s, p0);
    closed += c.closed_form;
    const double ex = ces_oracle({{z, k0}}, {{y1, k1}, {y2, k2}}, rho, s, p0);
    CHECK(c.value == doctest::Approx(ex).epsilon(1e-5));
    const auto h = aggregate_profit_ces_demand(k0, z, k1, y1, k2, y2, rho, {3 * s[0], 3 * s[1]}, 3 * p0);
    CHECK(h.value == doctest::Approx(3 * c.value).epsilon(1e-6));
  }
  CHECK(closed > 5);
}

TEST_CASE("numeric aggregate profit") {
  SUBCASE("one industry passes the price through") {
    const Atoms a{{{1, 2}, 1.5}, {{0.5, 0.5}, 2.0}};
    const auto r = aggregate_profit_numeric({industry("a", a)}, Demand::identity(), std::vector<double>{1, 1}, 4.0);
    CHECK(r.value == doctest::Approx(ind_profit(a, 4.0, {1, 1})).epsilon(1e-9));
  }
  SUBCASE("two complementary industries") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> K(0.1, 3), X(0.1, 3), S(0.1, 2), P(2, 15);
    for (int rep = 0; rep < 25; ++rep) {
      const double k0 = K(rng), k1 = K(rng), k2 = K(rng);
      if (k1 + k2 <= k0) continue;
      const Vec2 z{X(rng), X(rng)}, y1{X(rng), X(rng)}, y2{X(rng), X(rng)}, s{S(rng), S(rng)};
      const double p0 = P(rng);
      const auto r = aggregate_profit_numeric({industry("1", {{z, k0}}), industry("2", {{y1, k1}, {y2, k2}})},
                                              Demand::leontief(), std::vector<double>{s[0], s[1]}, p0);
      const double cf = aggregate_profit_complementary(k0, z, k1, y1, k2, y2, s, p0).value;
      CHECK(std::abs(r.value - cf) <= 1e-5 * std::max(1.0, cf));
      CHECK(r.constraint_gap >= -1e-9);
    }
  }
  SUBCASE("three industries") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> K(0.1, 3), X(0.1, 3), P(3, 20);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<Atoms> inds(3);
      std::vector<Industry> in;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 2; ++k) inds[j].push_back({{X(rng), X(rng)}, K(rng)});
        in.push_back(industry(std::to_string(j), inds[j]));
      }
      const double p0 = P(rng);
      const auto r = aggregate_profit_numeric(in, Demand::leontief(), std::vector<double>{1.0, 0.7}, p0);
      const double ex = leontief_oracle(inds, {1.0, 0.7}, p0);
      CHECK(std::abs(r.value - ex) <= 1e-5 * std::max(1.0, ex));
    }
    std::vector<Industry> four(4, industry("x", {{{1, 1}, 1.0}}));
    try {
      aggregate_profit_numeric(four, Demand::leontief(), std::vector<double>{1, 1}, 5.0);
      FAIL("expected a capability error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capability);
    }
  }
  SUBCASE("ces demand") {
    const Vec2 z{0.1, 0.2}, y1{0.2, 0.1}, y2{0.05, 0.1};
    for (double rho : {0.5, 1.0, 2.0}) {
      const auto c = aggregate_profit_ces_demand(1, z, 1.5, y1, 0.5, y2, rho, {1, 1}, 30);
      REQUIRE(c.closed_form);
      const auto r = aggregate_profit_numeric({industry("1", {{z, 1}}), industry("2", {{y1, 1.5}, {y2, 0.5}})},
                                              Demand::ces(rho), std::vector<double>{1, 1}, 30);
      CHECK(std::abs(r.value - c.value) <= 1e-4 * c.value);
    }
  }
}

TEST_CASE("k-stable examples") {
  const std::vector<Vec> K{{1, 0}, {0, 1}};
  const std::vector<Vec> X{{1, 1}, {2, 3}, {3, 1}};
  std::vector<std::size_t> id{0, 1, 2};
  CHECK(k_stable_check(X, X, id, K).stable);

  // z below y1 in every coordinate and images keep the order
  const std::vector<Vec> A{{1, 1}, {2, 2}}, B{{1, 2}, {2, 3}};
  CHECK(k_stable_check(A, B, std::vector<std::size_t>{0, 1}, K).stable);
  const auto rev = k_stable_check(A, B, std::vector<std::size_t>{1, 0}, K);
  CHECK_FALSE(rev.stable);
  CHECK(rev.criterion == 1);

  // incomparable pair sent to a non-proportional incomparable pair
  const std::vector<Vec> C{{1, 2}, {2, 1}}, D{{1, 3}, {2, 1}};
  const auto r = k_stable_check(C, D, std::vector<std::size_t>{0, 1}, K);
  CHECK_FALSE(r.stable);
  CHECK(r.criterion == 2);
  REQUIRE(r.violating);
  // proportional images are fine
  const std::vector<Vec> E{{1, 2}, {3, 0}};
  CHECK(k_stable_check(C, E, std::vector<std::size_t>{0, 1}, K).stable);
  CHECK(in_dual_cone(std::vector<double>{1, 0}, K));
  CHECK_FALSE(in_dual_cone(std::vector<double>{1, -0.1}, K));
}

TEST_CASE("k-stable verdict matches the definition on sampled prices") {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> I(0, 3);
  const std::vector<std::vector<Vec>> cones{{{1, 0}, {0, 1}}, {{1, 1}, {1, 2}}, {{2, 1}, {1, 0}}};
  int stable = 0, unstable = 0;
  for (int rep = 0; rep < 600; ++rep) {
    const auto& K = cones[rep % cones.size()];
    const std::size_t m = 2 + rep % 3;
    std::vector<Vec> X(m), Y(m);
    for (auto& v : X) v = {double(I(rng)), double(I(rng))};
    for (auto& v : Y) v = {double(I(rng)), double(I(rng))};
    std::vector<std::size_t> g(m);
    std::iota(g.begin(), g.end(), 0);
    std::shuffle(g.begin(), g.end(), rng);
    // definition: s.x_i < s.x_j implies s.y_g(i) <= s.y_g(j), for s in K
    bool def = true;
    for (int k = 0; k <= 2000 && def; ++k) {
      const double t = k / 2000.0;
      const Vec2 s{(1 - t) * K[0][0] + t * K[1][0], (1 - t) * K[0][1] + t * K[1][1]};
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double a = s[0] * X[i][0] + s[1] * X[i][1], b = s[0] * X[j][0] + s[1] * X[j][1];
          const double c = s[0] * Y[g[i]][0] + s[1] * Y[g[i]][1], d = s[0] * Y[g[j]][0] + s[1] * Y[g[j]][1];
          if (a < b - 1e-12 && c > d + 1e-12) def = false;
        }
    }
    const auto r = k_stable_check(X, Y, g, K);
    CHECK(r.stable == def);
    (r.stable ? stable : unstable)++;
    // listing order does not matter
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec> X2(m);
    std::vector<std::size_t> g2(m);
    for (std::size_t i = 0; i < m; ++i) {
      X2[i] = X[perm[i]];
      g2[i] = g[perm[i]];
    }
    CHECK(k_stable_check(X2, Y, g2, K).stable == r.stable);
  }
  CHECK(stable > 50);
  CHECK(unstable > 50);
}

TEST_CASE("equilibrium verification") {
  // complementary example at s = (1,1), p0 = 10: q = (7,3), y2 sits on its
  // break-even line and runs at half load
  EquilibriumInput in;
  in.industries = {industry("1", {{{1, 1}, 1.0}}), industry("2", {{{2, 3}, 3.0}, {{1, 2}, 2.0}})};
  in.demand = Demand::leontief();
  in.loads = {{1.0}, {0.0, 0.5}};
  in.q = {7, 3};
  in.s = {1, 1};
  in.p0 = 10;
  in.X0 = {1, 1};
  in.l = {2, 3};
  const auto ok = verify_equilibrium(in);
  CHECK(ok.all());
  CHECK(ok.violations.empty());

  auto bad = in;
  bad.loads = {{1.0}, {1.0, 0.5}};
  const auto r = verify_equilibrium(bad);
  CHECK_FALSE(r.profit_max);

  auto unbalanced = in;
  unbalanced.l = {3, 3};
  CHECK_FALSE(verify_equilibrium(unbalanced).resource_balance);

  auto cheap = in;
  cheap.q = {6, 3};
  CHECK_FALSE(verify_equilibrium(cheap).all());

  auto zero = in;
  zero.p0 = 0;
  zero.q = {0, 0};
  zero.s = {0, 0};
  CHECK_THROWS_AS(verify_equilibrium(zero), Error);
}
