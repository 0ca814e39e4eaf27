#pragma once

// Polyhedral cones spanned by 0/1 spectra: LP membership with certificates,
// facet normals by double description, discrete convexity and the
// {-1,0,1} necessary condition.

#include <optional>
#include <span>
#include <vector>

#include "hjm/arrangement.hpp"

namespace hjm {

struct PolyhedralCone {
  std::vector<Spectrum> generators;  // nonzero, distinct, lexicographic
  std::size_t ambient_dim = 0;
};

PolyhedralCone cone_from_spectra(const std::vector<Spectrum>& spectra);

/// Drops generators that are nonnegative combinations of the others.
PolyhedralCone irredundant(const PolyhedralCone& cone);

struct MembershipWitness {
  Vec coefficients;      // one per generator, >= 0
  double residual = 0.0; // max |sum lambda_G Z(G) - y| / max(1, |y|_inf)
};

struct MembershipResult {
  bool contains = false;
  MembershipWitness witness;  // valid when contains
  Vec certificate;            // nu with nu.Z >= 0, nu.y < 0, |nu|_inf = 1
  double certificate_margin = 0.0;  // nu.y / |y|_inf
  bool exact = false;               // decided in rational arithmetic
};

inline constexpr double kLpTol = 1e-9;

MembershipResult cone_contains(const PolyhedralCone& cone, std::span<const double> y);

/// Same question decided entirely in rational arithmetic.
MembershipResult cone_contains_exact(const PolyhedralCone& cone, std::span<const double> y);

struct FacetNormal {
  std::vector<long long> nu;
  std::vector<std::size_t> tight_generators;
};

struct FacetReport {
  std::vector<FacetNormal> facets;
  std::size_t dimension = 0;  // dim of the linear span
  bool full_dimensional = false;
  // Primitive integer basis of the orthogonal complement of the span
  // (empty for full-dimensional cones). Facet normals are taken inside the span.
  std::vector<std::vector<long long>> hull_normals;
};

inline constexpr std::size_t kMaxFacetDim = 12;

FacetReport facet_normals(const PolyhedralCone& cone);

struct DiscreteConvexity {
  bool convex = true;
  std::optional<FacetNormal> violating;
};

DiscreteConvexity is_discretely_convex(const PolyhedralCone& cone);
DiscreteConvexity is_discretely_convex(const PolyhedralCone& cone, const FacetReport& facets);

enum class NecessaryMode { automatic, exhaustive, facet };

struct NecessaryResult {
  bool passes = true;
  std::vector<int> omega1;  // 1-based, empty when passing
  std::vector<int> omega2;
  NecessaryMode mode_used = NecessaryMode::exhaustive;
};

/// Precomputes the admissible {-1,0,1} vectors of a spectra set so repeated
/// queries are cheap.
class NecessaryChecker {
 public:
  explicit NecessaryChecker(const std::vector<Spectrum>& spectra,
                            NecessaryMode mode = NecessaryMode::automatic);
  NecessaryResult check(std::span<const double> y) const;
  std::size_t admissible_count() const { return plus_.size(); }
  NecessaryMode mode() const { return mode_; }

 private:
  std::size_t T_ = 0;
  NecessaryMode mode_ = NecessaryMode::exhaustive;
  std::vector<std::uint32_t> plus_;   // Omega1 masks
  std::vector<std::uint32_t> minus_;  // Omega2 masks
};

NecessaryResult necessary_condition(std::span<const double> y, const std::vector<Spectrum>& spectra,
                                    NecessaryMode mode = NecessaryMode::automatic);

}  // namespace hjm
