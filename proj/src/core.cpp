#include "hjm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hjm {

void TimeSeriesRecord::validate() const {
  std::ostringstream where;
  where << "record t=" << t << ": ";
  require(t >= 1, where.str() + "time index must be >= 1");
  require(std::isfinite(y) && y >= 0.0, where.str() + "output y must be finite and >= 0");
  require(std::isfinite(p0) && p0 > 0.0, where.str() + "output price p0 must be > 0");
  require(!p.empty(), where.str() + "no input prices");
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(std::isfinite(p[i]) && p[i] > 0.0,
            where.str() + "input price p" + std::to_string(i + 1) + " must be > 0");
  }
}

NormalizedPrices NormalizedPrices::from_series(std::span<const TimeSeriesRecord> series) {
  NormalizedPrices out;
  out.phat.reserve(series.size());
  for (const auto& r : series) {
    r.validate();
    require(r.p.size() == 2, "elasticity analysis needs exactly two input prices");
    out.phat.push_back({r.p[0] / r.p0, r.p[1] / r.p0});
  }
  return out;
}

Vec outputs_of(std::span<const TimeSeriesRecord> series) {
  Vec y;
  y.reserve(series.size());
  for (const auto& r : series) y.push_back(r.y);
  return y;
}

void CesParams::validate() const {
  require(std::isfinite(rho), "rho must be finite");
  require(rho != 0.0, "rho = 0 is not a valid CES exponent");
  require(rho >= -1.0, "rho must be >= -1");
  require(n >= 1, "CES dimension must be positive");
}

namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double ces_unit_cost(const CesParams& params, std::span<const double> p,
                     std::span<const double> x) {
  params.validate();
  require(p.size() == x.size() && !p.empty(), "price and technology dimensions differ");
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] > 0.0 && x[i] > 0.0, "prices and technologies must be positive");
  }
  const double rho = params.rho;
  if (rho == -1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * x[i];
    return s;
  }
  if (std::abs(rho) <= 8.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::pow(p[i] * x[i], -rho);
    const double h = std::pow(s, -1.0 / rho);
    if (std::isfinite(h) && h > 0.0) return h;
  }
  Vec terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    terms[i] = -rho * (std::log(p[i]) + std::log(x[i]));
  }
  const double h = std::exp(-log_sum_exp(terms) / rho);
  if (!std::isfinite(h) || h <= 0.0) {
    const auto worst = std::max_element(terms.begin(), terms.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    fail(ErrorKind::numeric, "CES unit cost out of range; offending component " +
                                 std::to_string(worst - terms.begin() + 1));
  }
  return h;
}

void DiscreteMeasure::validate() const {
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& a = atoms[k];
    const std::string tag = "atom " + std::to_string(k) + ": ";
    require(std::isfinite(a.mass) && a.mass >= 0.0, tag + "mass must be >= 0");
    require(std::isfinite(a.smoothing_radius) && a.smoothing_radius >= 0.0,
            tag + "smoothing radius must be >= 0");
    for (double xi : a.x) {
      require(std::isfinite(xi) && xi > 0.0, tag + "point must lie in the open orthant");
      require(xi > a.smoothing_radius, tag + "smoothing disk leaves the orthant");
    }
  }
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

LoadResult gnp_load(const DiscreteMeasure& measure, std::span<const double> p, double p0) {
  measure.validate();
  require(p0 > 0.0, "output price must be positive");
  LoadResult out;
  out.resource_use.assign(p.size(), 0.0);
  out.loaded.assign(measure.atoms.size(), 0);
  for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
    const auto& a = measure.atoms[k];
    require(a.x.size() == p.size(), "atom dimension differs from price dimension");
    const double cost = std::inner_product(p.begin(), p.end(), a.x.begin(), 0.0);
    const double margin = (p0 - cost) / p0;
    bool load = margin > 0.0;
    if (std::abs(margin) <= kBoundaryTol) {
      out.boundary.push_back(k);
      load = true;
    }
    if (!load) continue;
    out.loaded[k] = 1;
    out.total_output += a.mass;
    for (std::size_t i = 0; i < p.size(); ++i) out.resource_use[i] += a.mass * a.x[i];
  }
  return out;
}

Vec ces_demand(const CesParams& h, std::span<const double> p, std::span<const double> x) {
  const double cost = ces_unit_cost(h, p, x);
  Vec u(x.size());
  if (h.rho == -1.0) {
    std::copy(x.begin(), x.end(), u.begin());
    return u;
  }
  // u_i = x_i * dh/dc_i with c = p o x; dh/dc_i = (h / c_i)^(1 + rho).
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double log_ui =
        std::log(x[i]) + (1.0 + h.rho) * (std::log(cost) - std::log(p[i] * x[i]));
    u[i] = std::exp(log_ui);
  }
  return u;
}

GeneralizedLoadResult gnp_load_generalized(const DiscreteMeasure& measure, const CesParams& h,
                                           std::span<const double> p, double p0) {
  measure.validate();
  h.validate();
  require(p0 > 0.0, "output price must be positive");
  GeneralizedLoadResult out;
  out.resource_use.assign(p.size(), 0.0);
  out.loaded.assign(measure.atoms.size(), 0);
  out.demand.resize(measure.atoms.size());
  for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
    const auto& a = measure.atoms[k];
    const double cost = ces_unit_cost(h, p, a.x);
    const double margin = (p0 - cost) / p0;
    bool load = margin > 0.0;
    if (std::abs(margin) <= kBoundaryTol) {
      out.boundary.push_back(k);
      load = true;
    }
    out.demand[k] = ces_demand(h, p, a.x);
    if (!load) continue;
    out.loaded[k] = 1;
    out.total_output += a.mass;
    for (std::size_t i = 0; i < p.size(); ++i) out.resource_use[i] += a.mass * out.demand[k][i];
  }
  return out;
}

GridFunction GridFunction::sample(Vec xs, Vec ys, const std::function<double(double, double)>& f) {
  GridFunction g;
  g.xs = std::move(xs);
  g.ys = std::move(ys);
  g.values.resize(g.xs.size() * g.ys.size());
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    for (std::size_t j = 0; j < g.ys.size(); ++j) g.at(i, j) = f(g.xs[i], g.ys[j]);
  g.validate();
  return g;
}

void GridFunction::validate() const {
  require(!xs.empty() && !ys.empty(), "empty grid");
  require(values.size() == xs.size() * ys.size(), "grid value count mismatch");
  auto increasing = [](const Vec& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a[i] > 0.0) || !std::isfinite(a[i])) return false;
      if (i > 0 && !(a[i] > a[i - 1])) return false;
    }
    return true;
  };
  require(increasing(xs) && increasing(ys), "grid axes must be positive and strictly increasing");
  for (double v : values) require(std::isfinite(v), "grid values must be finite");
}

Vec geometric_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo && n >= 2, "bad geometric grid");
  Vec g(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

GridFunction young_transform(const GridFunction& f) {
  f.validate();
  // Reduce to the simplex cross-section v1 + v2 = 1: one (d, f(d)) per direction.
  struct Dir {
    double d1;
    double g;
  };
  std::vector<Dir> dirs;
  dirs.reserve(f.values.size());
  for (std::size_t i = 0; i < f.xs.size(); ++i) {
    for (std::size_t j = 0; j < f.ys.size(); ++j) {
      const double v = f.at(i, j);
      if (!(v > 0.0)) continue;
      const double s = f.xs[i] + f.ys[j];
      dirs.push_back({f.xs[i] / s, v / s});
    }
  }
  if (dirs.empty()) fail(ErrorKind::validation, "Young transform of a function vanishing on the grid");
  std::sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) { return a.d1 < b.d1; });
  std::vector<Dir> uniq;
  for (const auto& d : dirs) {
    if (!uniq.empty() && std::abs(uniq.back().d1 - d.d1) <= 1e-14) {
      uniq.back().g = std::max(uniq.back().g, d.g);
    } else {
      uniq.push_back(d);
    }
  }
  GridFunction h;
  h.xs = f.xs;
  h.ys = f.ys;
  h.values.resize(f.values.size());
  for (std::size_t i = 0; i < h.xs.size(); ++i) {
    for (std::size_t j = 0; j < h.ys.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& d : uniq) {
        best = std::min(best, (h.xs[i] * d.d1 + h.ys[j] * (1.0 - d.d1)) / d.g);
      }
      h.at(i, j) = best;
    }
  }
  return h;
}

FenchelResult fenchel_profit_from_production(const GridFunction& F, Vec2 p, double p0) {
  F.validate();
  require(p0 > 0.0 && p[0] >= 0.0 && p[1] >= 0.0, "prices must be nonnegative, p0 > 0");
  FenchelResult out;
  out.at_origin = true;
  for (std::size_t i = 0; i < F.xs.size(); ++i) {
    for (std::size_t j = 0; j < F.ys.size(); ++j) {
      const double v = p0 * F.at(i, j) - p[0] * F.xs[i] - p[1] * F.ys[j];
      if (v > out.value) {
        out.value = v;
        out.argmax = {i, j};
        out.at_origin = false;
      }
    }
  }
  if (!out.at_origin) {
    const auto [i, j] = out.argmax;
    out.boundary_truncated = i + 1 == F.xs.size() || j + 1 == F.ys.size() ||
                             (i == 0 && F.xs.front() > 0.0 && F.xs.size() > 1) ||
                             (j == 0 && F.ys.front() > 0.0 && F.ys.size() > 1);
  }
  return out;
}

PriceGrid PriceGrid::geometric(double lo, double hi, std::size_t n, bool with_zero) {
  PriceGrid g;
  g.p1 = geometric_grid(lo, hi, n);
  if (with_zero) g.p1.insert(g.p1.begin(), 0.0);
  g.p2 = g.p1;
  return g;
}

double fenchel_production_from_profit(const ProfitFn& Pi, Vec2 l, double p0, const PriceGrid& grid) {
  require(p0 > 0.0 && l[0] >= 0.0 && l[1] >= 0.0, "need l >= 0 and p0 > 0");
  require(!grid.p1.empty() && !grid.p2.empty(), "empty price grid");
  double best = std::numeric_limits<double>::infinity();
  for (double a : grid.p1) {
    for (double b : grid.p2) {
      const double pi = Pi({a, b}, p0);
      if (!std::isfinite(pi) || pi < -1e-12 * (1.0 + std::abs(p0))) {
        fail(ErrorKind::validation,
             "malformed profit function: negative or non-finite value, dual is unbounded below");
      }
      best = std::min(best, pi + a * l[0] + b * l[1]);
    }
  }
  return best / p0;
}

}  // namespace hjm
