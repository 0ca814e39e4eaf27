#pragma once

// Closed-form profit/production pairs (Cobb-Douglas, CES), their capacity
// densities, quadrature of the profit integral, Laplace-transform identities
// and local diagnostics of the profit-function characterization.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/core.hpp"

namespace hjm {

struct CobbDouglasParams {
  double C = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;

  void validate() const;
  /// Density constant A of mu(dx) = A x1^(a1-1) x2^(a2-1) dx.
  double A() const;
};

struct CesProductionParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double rho = 1.0;
  double gamma = 0.5;

  void validate() const;
  double beta1() const;
  double beta2() const;
  double r() const;  // -2 rho / (1 + rho)
  double b() const;  // gamma (1 + rho) / ((1 - gamma) rho)
};

double production_cobb_douglas(const CobbDouglasParams& c, double l1, double l2);
double production_ces(const CesProductionParams& c, double l1, double l2);

double profit_cobb_douglas(const CobbDouglasParams& c, double p1, double p2, double p0);

/// Closed form; rho = -1 uses the limit (max_i alpha_i / p_i)^(gamma/(1-gamma)).
double profit_ces(const CesProductionParams& c, double p1, double p2, double p0);

/// phi_CD for the unit cost with exponent r in [-1, 0).
double capacity_density_cd(const CobbDouglasParams& c, double r, double x1, double x2);

/// phi_CES paired with the unit cost of exponent r = -2 rho / (1 + rho).
double capacity_density_ces(const CesProductionParams& c, double x1, double x2);

/// Laplace-side densities f with d2Pi/dp0^2 (p^(-1/r), 1) = int e^(-p.x) f(x) dx.
double laplace_density_cd(const CobbDouglasParams& c, double r, double x1, double x2);
double laplace_density_ces(const CesProductionParams& c, double x1, double x2);

using Density = std::function<double(double, double)>;
using UnitCost = std::function<double(Vec2 p, Vec2 x)>;

/// (p1^-r x1^-r + p2^-r x2^-r)^(-1/r).
UnitCost unit_cost_r(double r);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimate reported by the integrator
  std::string method;
};

struct QuadratureOptions {
  double rel_tol = 1e-6;
};

/// Profit integral with a density over the bounded region {h(p o x) <= p0}.
QuadratureResult numeric_profit(const Density& phi, const UnitCost& h, Vec2 p, double p0,
                                const QuadratureOptions& opt = {});

/// Profit integral of a discrete measure: sum of mass * (p0 - h(p o x))_+.
double numeric_profit(const DiscreteMeasure& mu, const UnitCost& h, Vec2 p, double p0);

inline constexpr double kLaplaceTail = 30.0;  // truncate where e^(-p.x) < e^-30

QuadratureResult laplace2d(const Density& f, Vec2 p, const QuadratureOptions& opt = {});

/// phi(x) = (-r) (x1 x2)^(-r-1) int_0^inf t e^-t f(t x1^-r, t x2^-r) dt.
double phi_from_f(const Density& f, double r, double x1, double x2);

struct PropcharInput {
  ProfitFn Pi;
  Density f;
  double r = -1.0;
  std::optional<Density> phi;  // closed-form density to compare against, if known
  std::vector<Vec2> price_grid;
  double tol = 1e-3;
  bool check_phi_profit = true;  // numeric_profit of the constructed phi vs Pi
};

struct PropcharReport {
  bool limits_ok = false;
  bool homogeneity_ok = false;
  bool d2pi_ok = false;
  bool phi_ok = true;
  double limit_worst = 0.0;
  double homogeneity_worst = 0.0;
  double d2pi_worst = 0.0;  // relative
  double phi_worst = 0.0;   // relative
  bool all() const { return limits_ok && homogeneity_ok && d2pi_ok && phi_ok; }
};

PropcharReport check_propchar(const PropcharInput& in);

struct LapsqrtResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |lhs - rhs| / |lhs|
};

LapsqrtResult lapsqrt2_identity(double beta1, double beta2, double b, double p1, double p2);

using GFn = std::function<double(Vec2)>;

struct MonotoneReport {
  double worst_margin = 0.0;  // min over samples of (-1)^k D...D G / |G|
  int worst_k = 0;
  double worst_lambda = 0.0;
  std::vector<int> worst_dirs;
  std::size_t samples = 0;
};

/// Sampling diagnostic only: a negative margin refutes complete monotonicity,
/// a nonnegative one certifies nothing.
MonotoneReport completely_monotone_check(const GFn& G, Vec2 s0, const std::vector<Vec2>& dirs,
                                         int k_max, const std::vector<double>& lambdas = {});

/// int_0^inf e^-tau d_tau (dPi/dtau)(s, tau), integrated by parts twice.
double g_from_pi(const ProfitFn& Pi, Vec2 s);

}  // namespace hjm
