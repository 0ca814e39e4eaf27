#pragma once

// Aggregate profit of small groups of industries, the two-industry closed
// forms, K-stable correspondences and equilibrium-condition checks.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/core.hpp"

namespace hjm {

struct Industry {
  std::string id;
  DiscreteMeasure measure;
};

/// Consumer utility F0 and its Young transform q0.
struct Demand {
  enum class Kind { identity, leontief, ces };
  Kind kind = Kind::leontief;
  double rho = 1.0;  // ces only

  static Demand identity() { return {Kind::identity, 0.0}; }
  static Demand leontief() { return {Kind::leontief, 0.0}; }
  static Demand ces(double rho) { return {Kind::ces, rho}; }

  void validate() const;
  double utility(std::span<const double> X) const;  // F0
  double q0(std::span<const double> q) const;        // Young transform of F0
  std::string name() const;
};

/// Profit of one Houthakker-Johansen industry at output price q and resource prices s.
double industry_profit(const Industry& ind, double q, std::span<const double> s);

struct ComplementaryResult {
  double value = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
  bool in_K1 = false;  // s.y2 <= s.y1
  bool in_K2 = false;  // s.y1 <= s.y2
};

ComplementaryResult aggregate_profit_complementary(double k0, Vec2 z, double k1, Vec2 y1, double k2,
                                                   Vec2 y2, Vec2 s, double p0);

struct CesDemandResult {
  double value = 0.0;
  bool closed_form = false;  // false: fell back to numeric minimization
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  DiscreteMeasure aggregate_measure;  // valid when closed_form
};

CesDemandResult aggregate_profit_ces_demand(double k0, Vec2 z, double k1, Vec2 y1, double k2, Vec2 y2,
                                            double rho, Vec2 s, double p0);

struct AggregateResult {
  double value = 0.0;
  Vec q;                     // minimizing product prices
  double constraint_gap = 0.0;  // q0(q) - p0
  double stationarity = 0.0;    // max positive directional slope along the constraint, relative
  bool converged = true;        // starts agree
  std::size_t starts = 0;
  std::vector<std::string> notes;
};

inline constexpr std::size_t kMaxIndustries = 3;

AggregateResult aggregate_profit_numeric(const std::vector<Industry>& industries, const Demand& demand,
                                         std::span<const double> s, double p0);

struct KStableResult {
  bool stable = true;
  std::optional<std::pair<std::size_t, std::size_t>> violating;
  int criterion = 0;  // 1 or 2 when violated
};

/// K* membership against the generators of K: d.g >= -tol for all g.
bool in_dual_cone(std::span<const double> d, const std::vector<Vec>& K);

KStableResult k_stable_check(const std::vector<Vec>& X, const std::vector<Vec>& Y,
                             std::span<const std::size_t> gamma, const std::vector<Vec>& K);

struct EquilibriumInput {
  std::vector<Industry> industries;
  Demand demand;
  std::vector<Vec> loads;  // per industry, per atom, in [0, 1]
  Vec q;                   // product prices
  Vec s;                   // resource prices
  double p0 = 1.0;
  Vec X0;                  // final consumption per product
  Vec l;                   // resource limits
  double tol = 1e-9;
};

struct EquilibriumReport {
  bool profit_max = true;       // each industry's loading is optimal at (q_j, s)
  bool product_balance = true;  // q_j (output_j - X0_j) = 0 and output_j >= X0_j
  bool resource_balance = true; // s_k (l_k - use_k) = 0 and use_k <= l_k
  bool demand_opt = true;       // X0 maximizes p0 F0(X) - q.X
  std::vector<std::string> violations;
  bool all() const { return profit_max && product_balance && resource_balance && demand_opt; }
};

EquilibriumReport verify_equilibrium(const EquilibriumInput& in);

}  // namespace hjm
