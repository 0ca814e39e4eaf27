#include "hjm/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include "hjm/error.hpp"

namespace hjm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

void require_finite(std::span<const double> v, const std::string& what) {
  for (double x : v) require(std::isfinite(x), what + " must be finite");
}

}  // namespace

void Demand::validate() const {
  if (kind == Kind::ces) {
    require(std::isfinite(rho) && rho != 0.0 && rho >= -1.0, "demand rho must be nonzero and >= -1");
  }
}

double Demand::utility(std::span<const double> X) const {
  require(!X.empty(), "empty consumption vector");
  switch (kind) {
    case Kind::identity:
      require(X.size() == 1, "identity demand needs one product");
      return X[0];
    case Kind::leontief:
      return *std::min_element(X.begin(), X.end());
    case Kind::ces: {
      if (rho == -1.0) return std::accumulate(X.begin(), X.end(), 0.0);
      double sum = 0.0;
      for (double x : X) {
        if (x <= 0.0) {
          if (rho > 0.0) return 0.0;
          continue;
        }
        sum += std::pow(x, -rho);
      }
      return std::pow(sum, -1.0 / rho);
    }
  }
  return 0.0;
}

double Demand::q0(std::span<const double> q) const {
  require(!q.empty(), "empty price vector");
  switch (kind) {
    case Kind::identity:
      require(q.size() == 1, "identity demand needs one product");
      return q[0];
    case Kind::leontief:
      return std::accumulate(q.begin(), q.end(), 0.0);
    case Kind::ces: {
      if (rho == -1.0) return *std::min_element(q.begin(), q.end());
      const double a = rho / (1.0 + rho);
      double sum = 0.0;
      for (double v : q) {
        if (v <= 0.0) {
          if (a < 0.0) return 0.0;
          continue;
        }
        sum += std::pow(v, a);
      }
      return std::pow(sum, 1.0 / a);
    }
  }
  return 0.0;
}

std::string Demand::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::leontief: return "leontief";
    case Kind::ces: {
      std::ostringstream os;
      os << "ces(rho=" << rho << ")";
      return os.str();
    }
  }
  return "?";
}

double industry_profit(const Industry& ind, double q, std::span<const double> s) {
  if (!(q > 0.0)) return 0.0;
  const LoadResult load = gnp_load(ind.measure, s, q);
  double pi = 0.0;
  for (std::size_t k = 0; k < load.loaded.size(); ++k) {
    if (!load.loaded[k]) continue;
    const auto& a = ind.measure.atoms[k];
    pi += a.mass * pos(q - dot(s, a.x));
  }
  return pi;
}

ComplementaryResult aggregate_profit_complementary(double k0, Vec2 z, double k1, Vec2 y1, double k2,
                                                   Vec2 y2, Vec2 s, double p0) {
  for (double k : {k0, k1, k2}) require(std::isfinite(k) && k >= 0.0, "capacities must be nonnegative");
  require_finite(z, "z");
  require_finite(y1, "y1");
  require_finite(y2, "y2");
  require(s[0] >= 0.0 && s[1] >= 0.0, "resource prices must be nonnegative");
  require(std::isfinite(p0), "p0 must be finite");
  require(k1 + k2 > k0, "need k1 + k2 > k0");

  const double c1 = dot(s, z) + dot(s, y1);
  const double c2 = dot(s, z) + dot(s, y2);
  ComplementaryResult r;
  r.pi1 = pos(k0 - k2) * pos(p0 - c1) + std::min(k0, k2) * pos(p0 - c2);
  r.pi2 = std::min(k0, k1) * pos(p0 - c1) + pos(k0 - k1) * pos(p0 - c2);
  r.value = std::max(r.pi1, r.pi2);
  // on the switching ray the two costs agree up to rounding
  const double a = dot(s, y1), b = dot(s, y2), tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  r.in_K1 = b <= a + tol;
  r.in_K2 = a <= b + tol;
  return r;
}

CesDemandResult aggregate_profit_ces_demand(double k0, Vec2 z, double k1, Vec2 y1, double k2, Vec2 y2,
                                            double rho, Vec2 s, double p0) {
  for (double k : {k0, k1, k2}) require(std::isfinite(k) && k > 0.0, "capacities must be positive");
  require(std::isfinite(rho) && rho != 0.0 && rho >= -1.0, "rho must be nonzero and >= -1");
  require(s[0] >= 0.0 && s[1] >= 0.0, "resource prices must be nonnegative");
  require(std::isfinite(p0) && p0 > 0.0, "p0 must be positive");

  CesDemandResult r;
  const double K = k1 + k2;
  if (rho == -1.0) {
    r.kappa1 = r.kappa2 = 1.0;
  } else {
    const double e = (1.0 + rho) / rho;
    const double S = std::pow(k0, rho) + std::pow(K, rho);
    r.kappa1 = std::pow(S / std::pow(K, rho), e);
    r.kappa2 = std::pow(S / std::pow(k0, rho), e);
  }
  const double sz = dot(s, z), s1 = dot(s, y1), s2 = dot(s, y2);
  if (p0 > std::max(r.kappa1 * sz, r.kappa2 * std::max(s1, s2))) {
    r.closed_form = true;
    r.value = k0 / r.kappa1 * pos(p0 - r.kappa1 * sz) + k1 / r.kappa2 * pos(p0 - r.kappa2 * s1) +
              k2 / r.kappa2 * pos(p0 - r.kappa2 * s2);
    r.aggregate_measure.atoms = {
        Atom{{r.kappa1 * z[0], r.kappa1 * z[1]}, k0 / r.kappa1, 0.0},
        Atom{{r.kappa2 * y1[0], r.kappa2 * y1[1]}, k1 / r.kappa2, 0.0},
        Atom{{r.kappa2 * y2[0], r.kappa2 * y2[1]}, k2 / r.kappa2, 0.0},
    };
    return r;
  }
  std::vector<Industry> inds(2);
  inds[0].id = "1";
  inds[0].measure.atoms = {Atom{{z[0], z[1]}, k0, 0.0}};
  inds[1].id = "2";
  inds[1].measure.atoms = {Atom{{y1[0], y1[1]}, k1, 0.0}, Atom{{y2[0], y2[1]}, k2, 0.0}};
  r.value = aggregate_profit_numeric(inds, Demand::ces(rho), s, p0).value;
  return r;
}

namespace {

// Objective along the constraint surface: q = p0 d / q0(d), d on the simplex.
struct SimplexObjective {
  const std::vector<Industry>& inds;
  const Demand& demand;
  std::span<const double> s;
  double p0;

  Vec prices(const Vec& d) const {
    const double q0 = demand.q0(d);
    if (!(q0 > 0.0) || !std::isfinite(q0)) return {};
    Vec q(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) q[j] = p0 * d[j] / q0;
    return q;
  }

  double operator()(const Vec& d) const {
    for (double v : d)
      if (v < 0.0) return kInf;
    const Vec q = prices(d);
    if (q.empty()) return kInf;
    double f = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (!std::isfinite(q[j])) return kInf;
      f += industry_profit(inds[j], q[j], s);
    }
    return f;
  }
};

template <class F>
std::pair<double, double> golden(const F& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 300 && b - a > 1e-14; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

struct Candidate {
  Vec d;
  double value = kInf;
};

// Pairwise exchange directions e_i - e_j on the simplex.
std::vector<Vec> exchange_dirs(std::size_t m) {
  std::vector<Vec> dirs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      Vec v(m, 0.0);
      v[i] = 1.0;
      v[j] = -1.0;
      dirs.push_back(v);
    }
  if (m == 3) {
    // mixed directions help on ridges of piecewise-linear objectives
    for (auto [a, b, c] : {std::array{2.0, -1.0, -1.0}, std::array{-1.0, 2.0, -1.0},
                           std::array{-1.0, -1.0, 2.0}})
      dirs.push_back({a / 2.0, b / 2.0, c / 2.0});
  }
  return dirs;
}

// Feasible step interval [lo, hi] keeping d + t v on the simplex.
std::pair<double, double> step_range(const Vec& d, const Vec& v) {
  double lo = -kInf, hi = kInf;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (v[i] > 0.0) {
      lo = std::max(lo, -d[i] / v[i]);
    } else if (v[i] < 0.0) {
      hi = std::min(hi, -d[i] / v[i]);
    }
  }
  return {lo, hi};
}

Candidate descend(const SimplexObjective& f, Candidate c) {
  const auto dirs = exchange_dirs(c.d.size());
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = c.value;
    for (const auto& v : dirs) {
      auto [lo, hi] = step_range(c.d, v);
      if (!(hi > lo)) continue;
      auto line = [&](double t) {
        Vec d = c.d;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(0.0, d[i] + t * v[i]);
        return f(d);
      };
      // dense pre-scan so the golden search starts inside the right basin
      constexpr int kScan = 64;
      double best_t = 0.0, best_f = c.value;
      for (int k = 0; k <= kScan; ++k) {
        const double t = lo + (hi - lo) * k / kScan;
        const double ft = line(t);
        if (ft < best_f) {
          best_f = ft;
          best_t = t;
        }
      }
      const double w = (hi - lo) / kScan;
      auto [t, ft] = golden(line, std::max(lo, best_t - w), std::min(hi, best_t + w));
      if (ft < best_f) {
        best_f = ft;
        best_t = t;
      }
      if (best_f < c.value) {
        for (std::size_t i = 0; i < c.d.size(); ++i) c.d[i] = std::max(0.0, c.d[i] + best_t * v[i]);
        c.value = best_f;
      }
    }
    if (before - c.value <= 1e-15 * std::max(1.0, std::abs(before))) break;
  }
  return c;
}

double stationarity_residual(const SimplexObjective& f, const Candidate& c) {
  const double h = 1e-7;
  double worst = 0.0;
  for (const auto& v : exchange_dirs(c.d.size())) {
    for (double sgn : {1.0, -1.0}) {
      Vec d = c.d;
      bool ok = true;
      for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] += sgn * h * v[i];
        if (d[i] < 0.0) ok = false;
      }
      if (!ok) continue;
      const double slope = (c.value - f(d)) / h;
      worst = std::max(worst, slope);
    }
  }
  return worst / std::max(1.0, std::abs(c.value));
}

}  // namespace

AggregateResult aggregate_profit_numeric(const std::vector<Industry>& industries, const Demand& demand,
                                         std::span<const double> s, double p0) {
  const std::size_t m = industries.size();
  require(m >= 1, "no industries");
  if (m > kMaxIndustries) fail(ErrorKind::capability, "aggregate_profit_numeric supports at most 3 industries");
  demand.validate();
  require(demand.kind != Demand::Kind::identity || m == 1, "identity demand needs one industry");
  require(std::isfinite(p0) && p0 > 0.0, "p0 must be positive");
  require_finite(s, "resource prices");
  for (double v : s) require(v >= 0.0, "resource prices must be nonnegative");
  for (const auto& ind : industries) {
    ind.measure.validate();
    for (const auto& a : ind.measure.atoms)
      require(a.x.size() == s.size(), "technology dimension differs from resource prices");
  }

  SimplexObjective f{industries, demand, s, p0};
  AggregateResult out;
  if (m == 1) {
    const Vec d{1.0};
    out.q = f.prices(d);
    out.value = f(d);
    out.constraint_gap = demand.q0(out.q) - p0;
    out.starts = 1;
    return out;
  }

  // coarse scan of the simplex, then descent from the best few points
  std::vector<Candidate> grid;
  const int n = m == 2 ? 4000 : 80;
  if (m == 2) {
    for (int k = 0; k <= n; ++k) {
      const double t = double(k) / n;
      Vec d{t, 1.0 - t};
      grid.push_back({d, f(d)});
    }
  } else {
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) {
        Vec d{double(a) / n, double(b) / n, double(n - a - b) / n};
        grid.push_back({d, f(d)});
      }
  }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  require(std::isfinite(grid.front().value), "no price split satisfies the demand constraint");

  constexpr std::size_t kStarts = 4;
  std::vector<Candidate> starts;
  for (const auto& g : grid) {
    if (starts.size() == kStarts || !std::isfinite(g.value)) break;
    bool near = false;
    for (const auto& st : starts) {
      double dist = 0.0;
      for (std::size_t i = 0; i < m; ++i) dist = std::max(dist, std::abs(st.d[i] - g.d[i]));
      if (dist < 2.0 / n) near = true;
    }
    if (!near) starts.push_back(g);
  }

  std::vector<std::future<Candidate>> jobs;
  for (const auto& st : starts) jobs.push_back(std::async(std::launch::async, [&f, st] { return descend(f, st); }));
  std::vector<Candidate> results;
  for (auto& j : jobs) results.push_back(j.get());

  // best value, ties to the lowest start index
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value < results[best].value) best = i;
  const Candidate& c = results[best];

  out.value = c.value;
  out.q = f.prices(c.d);
  out.constraint_gap = demand.q0(out.q) - p0;
  out.starts = results.size();
  out.stationarity = stationarity_residual(f, c);
  out.converged = out.stationarity <= 1e-6;
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::ostringstream os;
    os.precision(12);
    os << "start " << i << ": " << results[i].value;
    out.notes.push_back(os.str());
  }
  if (!out.converged) out.notes.push_back("descent did not reach a stationary point; best value reported");
  return out;
}

bool in_dual_cone(std::span<const double> d, const std::vector<Vec>& K) {
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  for (const auto& g : K) {
    require(g.size() == d.size(), "cone generator dimension mismatch");
    double gs = 0.0;
    for (double v : g) gs = std::max(gs, std::abs(v));
    if (dot(d, g) < -1e-12 * std::max(1.0, scale * gs)) return false;
  }
  return true;
}

namespace {

// lambda u = mu v with lambda, mu >= 0 not both zero
bool nonneg_proportional(const Vec& u, const Vec& v) {
  const double nu = std::sqrt(dot(u, u)), nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) return true;
  const double c = dot(u, v);
  return c > 0.0 && nu * nv - c <= 1e-9 * nu * nv;
}

}  // namespace

KStableResult k_stable_check(const std::vector<Vec>& X, const std::vector<Vec>& Y,
                             std::span<const std::size_t> gamma, const std::vector<Vec>& K) {
  require(X.size() == Y.size(), "multisets must have equal cardinality");
  require(gamma.size() == X.size(), "gamma must be total");
  require(!K.empty(), "cone K needs generators");
  const std::size_t n = K.front().size();
  for (const auto& g : K) {
    require(g.size() == n, "cone generator dimension mismatch");
    require(std::any_of(g.begin(), g.end(), [](double v) { return v != 0.0; }), "zero cone generator");
  }
  std::vector<int> seen(Y.size(), 0);
  for (std::size_t i : gamma) {
    require(i < Y.size(), "gamma index out of range");
    require(!seen[i]++, "gamma is not a bijection");
  }
  for (const auto& x : X) require(x.size() == n, "technology dimension mismatch");
  for (const auto& y : Y) require(y.size() == n, "technology dimension mismatch");

  auto diff = [n](const Vec& a, const Vec& b) {
    Vec d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = a[k] - b[k];
    return d;
  };

  KStableResult r;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < X.size(); ++j) {
      if (i == j || X[i] == X[j]) continue;
      const Vec dx = diff(X[j], X[i]);
      const Vec dy = diff(Y[gamma[j]], Y[gamma[i]]);
      if (in_dual_cone(dx, K)) {
        if (!in_dual_cone(dy, K)) {
          r.stable = false;
          r.violating = {i, j};
          r.criterion = 1;
          return r;
        }
        continue;
      }
      if (i > j) continue;  // (ii) is symmetric in the pair
      const Vec mdx = diff(X[i], X[j]);
      if (in_dual_cone(mdx, K)) continue;
      if (!nonneg_proportional(dx, dy)) {
        r.stable = false;
        r.violating = {i, j};
        r.criterion = 2;
        return r;
      }
    }
  return r;
}

EquilibriumReport verify_equilibrium(const EquilibriumInput& in) {
  const std::size_t m = in.industries.size();
  require(m >= 1, "no industries");
  require(std::isfinite(in.p0) && in.p0 > 0.0, "p0 must be positive");
  require(in.q.size() == m && in.X0.size() == m && in.loads.size() == m,
          "q, X0 and loads need one entry per industry");
  require(in.l.size() == in.s.size(), "resource limits and prices differ in dimension");
  in.demand.validate();
  for (double v : in.q) require(std::isfinite(v) && v >= 0.0, "product prices must be nonnegative");
  for (double v : in.s) require(std::isfinite(v) && v >= 0.0, "resource prices must be nonnegative");

  EquilibriumReport rep;
  auto note = [&](bool& flag, const std::string& msg) {
    flag = false;
    rep.violations.push_back(msg);
  };
  const double tol = in.tol;
  Vec use(in.s.size(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& ind = in.industries[j];
    ind.measure.validate();
    require(in.loads[j].size() == ind.measure.atoms.size(), "load vector size differs from atom count");
    double output = 0.0;
    for (std::size_t k = 0; k < ind.measure.atoms.size(); ++k) {
      const auto& a = ind.measure.atoms[k];
      require(a.x.size() == in.s.size(), "technology dimension differs from resource prices");
      const double load = in.loads[j][k];
      require(load >= -tol && load <= 1.0 + tol, "loads must lie in [0, 1]");
      const double cost = dot(in.s, a.x);
      const double scale = std::max({1.0, std::abs(in.q[j]), std::abs(cost)});
      const double margin = (in.q[j] - cost) / scale;
      std::ostringstream os;
      os << "industry " << ind.id << " atom " << k;
      if (margin > tol && load < 1.0 - tol) note(rep.profit_max, os.str() + " is profitable but not fully loaded");
      if (margin < -tol && load > tol) note(rep.profit_max, os.str() + " is loaded at a loss");
      output += load * a.mass;
      for (std::size_t i = 0; i < use.size(); ++i) use[i] += load * a.mass * a.x[i];
    }
    const double sc = std::max(1.0, output);
    if (in.X0[j] > output + tol * sc)
      note(rep.product_balance, "industry " + ind.id + " output below final consumption");
    if (std::abs(in.q[j] * (output - in.X0[j])) > tol * sc * std::max(1.0, in.q[j]))
      note(rep.product_balance, "industry " + ind.id + " has priced surplus output");
  }
  for (std::size_t i = 0; i < use.size(); ++i) {
    const double sc = std::max(1.0, in.l[i]);
    if (use[i] > in.l[i] + tol * sc) note(rep.resource_balance, "resource " + std::to_string(i) + " overused");
    if (std::abs(in.s[i] * (in.l[i] - use[i])) > tol * sc * std::max(1.0, in.s[i]))
      note(rep.resource_balance, "resource " + std::to_string(i) + " has priced slack");
  }
  // p0 F0(X) - q.X is bounded above (by 0) iff q0(q) >= p0, and X0 attains it
  const double q0 = in.demand.q0(in.q);
  const double sc = std::max(1.0, in.p0);
  if (q0 < in.p0 - tol * sc) note(rep.demand_opt, "demand problem unbounded: q0(q) < p0");
  const double surplus = in.p0 * in.demand.utility(in.X0) - dot(in.q, in.X0);
  if (std::abs(surplus) > tol * std::max(1.0, dot(in.q, in.X0)))
    note(rep.demand_opt, "final consumption does not maximize p0 F0(X) - q.X");
  return rep;
}

}  // namespace hjm
