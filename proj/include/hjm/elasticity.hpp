#pragma once

// Critical rho values (triple concurrency) and the interval-wise solvability
// estimate of the micro-level elasticity of substitution.

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hjm/moment.hpp"

namespace hjm {

using Triple = std::array<int, 3>;  // 0-based time indices, increasing

/// det with rows (1,1,1), (p1^-rho), (p2^-rho); value = scaled * exp(log_scale).
struct ScaledDet {
  double scaled = 0.0;
  double log_scale = 0.0;
  double value() const;
  int sign() const { return (scaled > 0.0) - (scaled < 0.0); }
};

ScaledDet concurrency_determinant_scaled(const NormalizedPrices& phat, Triple triple, double rho);
double concurrency_determinant(const NormalizedPrices& phat, Triple triple, double rho);

struct CriticalRoot {
  double rho = 0.0;
  Triple triple{};
  bool boundary = false;  // root at rho = -1
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  Triple triple{};
};

struct CriticalRhoSet {
  std::vector<CriticalRoot> roots;  // sorted by rho
  std::vector<Bracket> brackets;
  double r_max = 0.0;  // upper end of the scanned positive range
};

inline constexpr double kRhoFloor = 1e-8;
inline constexpr double kRhoCap = 1e4;
inline constexpr double kRootTol = 1e-10;

CriticalRhoSet critical_rhos(const NormalizedPrices& phat);

struct ElasticityInterval {
  double lo = -1.0;
  double hi = 0.0;  // +inf for the last positive interval
  bool lo_closed = false;
  bool solvable = false;
  double probe_rho = 0.0;
  int probe_attempts = 1;
  double sigma_lo = 0.0;  // image under sigma = 1/(1+rho); may be +inf
  double sigma_hi = 0.0;
  MomentProblemReport report;
};

struct ElasticityOptions {
  bool build_witness = true;
};

struct ElasticityReport {
  CriticalRhoSet critical;
  std::vector<ElasticityInterval> intervals;  // sorted by rho
  std::vector<std::string> warnings;
};

double sigma_of_rho(double rho);

ElasticityReport estimate_elasticity(std::span<const TimeSeriesRecord> series,
                                     const ElasticityOptions& options = {});

}  // namespace hjm
