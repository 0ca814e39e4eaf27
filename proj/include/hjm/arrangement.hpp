#pragma once

// Line arrangements in the positive quadrant obtained from normalized prices
// after the rho-dependent change of variables, and their angular sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "hjm/core.hpp"

namespace hjm {

enum class Branch { negative_rho, positive_rho, direct };

std::string to_string(Branch b);

/// Lines a_t z1 + b_t z2 = 1, t = 0..T-1, in original time order.
///
/// For rho > 0 the coefficients are stored divided by M = max p^(-rho), i.e.
/// in the rescaled variables z' = M z; the arrangement is unchanged up to that
/// dilation and no coefficient overflows.
struct LineFamily {
  std::vector<Vec2> coeffs;
  double rho = 0.0;
  double epsilon = 0.0;     // 0.5 / M, may underflow; see log_scale
  double log_scale = 0.0;   // ln M (0 unless positive_rho)
  Branch branch = Branch::direct;
  // ln p^(-rho) per line and coordinate; empty for direct families. Exact
  // order and crossing predicates use these when present, since for large
  // |rho| distinct lines can share the same rounded coefficients.
  std::vector<Vec2> log_u;

  std::size_t size() const { return coeffs.size(); }
  static LineFamily from_coeffs(std::vector<Vec2> coeffs);
  void validate() const;
};

struct Spectrum {
  std::vector<std::uint8_t> bits;  // bit t = 1 iff strictly below line t

  std::size_t size() const { return bits.size(); }
  bool is_zero() const;
  std::string str() const;  // "0110"
  auto operator<=>(const Spectrum&) const = default;
};

struct FormalWord {
  std::vector<int> letters;  // 1-based adjacent transposition positions
  std::string str() const;   // "s1 s2 s1", or "e" when empty
};

struct SweepResult {
  Vec angles;                                // N critical angles, increasing
  std::vector<std::vector<int>> permutations;  // N+1 sector orders, farthest line first
  FormalWord word;
  std::vector<std::vector<Spectrum>> sector_spectra;  // N+1 lists of T+1 spectra
  std::vector<int> order;  // renumbering: order[k] = line with the k-th smallest a
  std::vector<std::string> warnings;
};

LineFamily transform_coordinates(double rho, const NormalizedPrices& phat);

SweepResult sweep(const LineFamily& family);

/// All cell spectra, sorted lexicographically.
std::vector<Spectrum> enumerate_spectra(const LineFamily& family);

/// Lines sorted by (a, b) ascending; ties in a or b are an error.
std::vector<int> renumbering(const LineFamily& family, bool strict = true);

/// Sigma as a 1-based permutation of renumbered labels, increasing b.
std::vector<int> sigma_order(const LineFamily& family);

/// Whether z lies in the image of the open orthant under the change of variables.
bool in_image(const LineFamily& family, Vec2 z);

/// Inverse change of variables: technology point x for a point z of the arrangement.
Vec2 z_to_x(const LineFamily& family, Vec2 z);

/// Forward change of variables (inverse of z_to_x).
Vec2 x_to_z(const LineFamily& family, Vec2 x);

}  // namespace hjm
