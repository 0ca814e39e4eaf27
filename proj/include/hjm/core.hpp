#pragma once

// Shared domain types, CES unit costs, Young/Fenchel transforms on grids and
// the Neyman-Pearson loading rule for discrete capacity distributions.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjm/error.hpp"

namespace hjm {

using Vec = std::vector<double>;
using Vec2 = std::array<double, 2>;

struct TimeSeriesRecord {
  int t = 0;
  double y = 0.0;
  double p0 = 1.0;
  Vec p;

  void validate() const;
};

/// p(t)/p0(t) per record, two inputs.
struct NormalizedPrices {
  std::vector<Vec2> phat;

  static NormalizedPrices from_series(std::span<const TimeSeriesRecord> series);
  std::size_t size() const { return phat.size(); }
};

Vec outputs_of(std::span<const TimeSeriesRecord> series);

struct CesParams {
  double rho = 1.0;
  int n = 2;

  void validate() const;
  double sigma() const { return 1.0 / (1.0 + rho); }
};

/// (sum_i (p_i x_i)^(-rho))^(-1/rho); evaluated in log space for |rho| > 8.
double ces_unit_cost(const CesParams& params, std::span<const double> p,
                     std::span<const double> x);

struct Atom {
  Vec x;
  double mass = 0.0;
  double smoothing_radius = 0.0;
};

struct DiscreteMeasure {
  std::vector<Atom> atoms;

  void validate() const;
  double total_mass() const;
  bool empty() const { return atoms.empty(); }
};

// Relative tolerance on (p0 - cost)/p0 below which an atom is a boundary atom.
inline constexpr double kBoundaryTol = 1e-9;

struct LoadResult {
  std::vector<int> loaded;            // 0/1 per atom
  double total_output = 0.0;
  Vec resource_use;
  std::vector<std::size_t> boundary;  // atoms with cost == p0 (loaded)
};

LoadResult gnp_load(const DiscreteMeasure& measure, std::span<const double> p,
                    double p0);

struct GeneralizedLoadResult {
  std::vector<int> loaded;
  double total_output = 0.0;
  Vec resource_use;
  std::vector<Vec> demand;  // per atom, cost-minimizing bundle at unit output
  std::vector<std::size_t> boundary;
  bool tie = false;
};

GeneralizedLoadResult gnp_load_generalized(const DiscreteMeasure& measure,
                                           const CesParams& h,
                                           std::span<const double> p, double p0);

/// Input bundle u minimizing p.u at unit output for technology x (Shephard).
Vec ces_demand(const CesParams& h, std::span<const double> p,
               std::span<const double> x);

/// Values on a rectangular lattice in the positive quadrant.
struct GridFunction {
  Vec xs;
  Vec ys;
  Vec values;  // row-major, values[i * ys.size() + j] at (xs[i], ys[j])

  static GridFunction sample(Vec xs, Vec ys,
                             const std::function<double(double, double)>& f);
  double at(std::size_t i, std::size_t j) const { return values[i * ys.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * ys.size() + j]; }
  void validate() const;
};

/// n points log-spaced on [lo, hi], both ends included.
Vec geometric_grid(double lo, double hi, std::size_t n);

GridFunction young_transform(const GridFunction& f);

struct FenchelResult {
  double value = 0.0;
  std::array<std::size_t, 2> argmax{0, 0};
  bool at_origin = false;
  bool boundary_truncated = false;
};

/// sup over grid nodes (and the origin) of p0 F(l) - p.l.
FenchelResult fenchel_profit_from_production(const GridFunction& F, Vec2 p, double p0);

using ProfitFn = std::function<double(Vec2 p, double p0)>;

struct PriceGrid {
  Vec p1;  // may include 0
  Vec p2;
  static PriceGrid geometric(double lo, double hi, std::size_t n, bool with_zero = true);
};

/// (1/p0) inf over the price grid of Pi(p, p0) + p.l.
double fenchel_production_from_profit(const ProfitFn& Pi, Vec2 l, double p0,
                                      const PriceGrid& grid);

}  // namespace hjm
