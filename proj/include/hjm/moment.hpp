#pragma once

// Moment problem: does a nonnegative capacity distribution reproduce the
// observed outputs at a given rho? Witness construction and verification.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/cone.hpp"

namespace hjm {

struct MomentOptions {
  bool build_witness = true;
};

struct MomentProblemReport {
  double rho = 0.0;
  bool solvable = false;
  std::optional<DiscreteMeasure> witness;
  Vec certificate;  // nu with nu.Z >= 0 on all cells and nu.y < 0
  std::size_t cone_size = 0;
  std::size_t spectra_count = 0;
  double witness_residual = 0.0;  // max |verify_measure| / max(1, |y|_inf)
  LineFamily family;
  std::vector<Spectrum> spectra;
  PolyhedralCone cone;
  MembershipResult membership;
  std::vector<std::string> notes;
};

MomentProblemReport moment_solvable(std::span<const TimeSeriesRecord> series, double rho,
                                    const MomentOptions& options = {});

struct ChebyshevCell {
  Vec2 center{};
  double radius = 0.0;
  bool truncated = false;  // bounded only by the bounding box
};

/// Deepest point of the cell with the given spectrum, in arrangement coordinates.
ChebyshevCell chebyshev_center(const LineFamily& family, const Spectrum& cell);

/// One atom per generator with positive coefficient, at the Chebyshev center
/// of its cell mapped back to technology space.
DiscreteMeasure construct_witness_measure(std::span<const TimeSeriesRecord> series, double rho,
                                          const PolyhedralCone& cone, const Vec& coefficients,
                                          std::vector<std::string>* notes = nullptr);

/// residual(t) = sum of masses loaded at time t minus y(t), in original coordinates.
Vec verify_measure(const DiscreteMeasure& measure, std::span<const TimeSeriesRecord> series,
                   double rho);

}  // namespace hjm
