#include "hjm/moment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hjm/simplex.hpp"

namespace hjm {

namespace {

void validate_series(std::span<const TimeSeriesRecord> series) {
  require(!series.empty(), "empty time series");
  for (const auto& r : series) {
    r.validate();
    require(r.p.size() == 2, "exactly two input prices per record are supported");
  }
}

// (p0 - h(p o x)) / p0 for record r.
double load_margin(const CesParams& h, const TimeSeriesRecord& r, std::span<const double> x) {
  return (r.p0 - ces_unit_cost(h, r.p, x)) / r.p0;
}

}  // namespace

ChebyshevCell chebyshev_center(const LineFamily& family, const Spectrum& cell) {
  const std::size_t T = family.size();
  require(cell.size() == T, "spectrum length differs from the family");
  double reach = 0.0;
  for (const auto& c : family.coeffs) reach = std::max({reach, 1.0 / c[0], 1.0 / c[1]});
  const double box = 2.0 * std::max(reach, 1.0);

  // Rows of A x <= b with x = (z1, z2, r).
  std::vector<std::array<double, 3>> rows;
  Vec rhs;
  for (std::size_t t = 0; t < T; ++t) {
    const double a = family.coeffs[t][0], b = family.coeffs[t][1];
    const double nrm = std::hypot(a, b);
    if (cell.bits[t]) {
      rows.push_back({a, b, nrm});
      rhs.push_back(1.0);
    } else {
      rows.push_back({-a, -b, nrm});
      rhs.push_back(-1.0);
    }
  }
  rows.push_back({-1.0, 0.0, 1.0});
  rhs.push_back(0.0);
  rows.push_back({0.0, -1.0, 1.0});
  rhs.push_back(0.0);
  const std::size_t box_row = rows.size();
  rows.push_back({1.0, 0.0, 1.0});
  rhs.push_back(box);
  rows.push_back({0.0, 1.0, 1.0});
  rhs.push_back(box);
  if (family.branch == Branch::positive_rho) {
    rows.push_back({-1.0, -1.0, std::numbers::sqrt2});
    rhs.push_back(-0.5);
  }

  const std::size_t K = rows.size();
  std::vector<Vec> A(K, Vec(3 + K, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (int i = 0; i < 3; ++i) A[k][i] = rows[k][i];
    A[k][3 + k] = 1.0;
  }
  Vec c(3 + K, 0.0);
  c[2] = -1.0;
  const auto sol = solve_standard_lp<double>(A, rhs, c, 1e-12);
  if (sol.status != LpStatus::optimal || !(sol.x[2] > 0.0)) {
    fail(ErrorKind::degenerate, "cell " + cell.str() + " has empty interior");
  }
  ChebyshevCell out;
  out.center = {sol.x[0], sol.x[1]};
  out.radius = sol.x[2];
  const double slack1 = sol.x[3 + box_row], slack2 = sol.x[3 + box_row + 1];
  out.truncated = std::min(slack1, slack2) <= 1e-9 * box;
  return out;
}

DiscreteMeasure construct_witness_measure(std::span<const TimeSeriesRecord> series, double rho,
                                          const PolyhedralCone& cone, const Vec& coefficients,
                                          std::vector<std::string>* notes) {
  validate_series(series);
  require(coefficients.size() == cone.generators.size(), "one coefficient per generator expected");
  const auto phat = NormalizedPrices::from_series(series);
  const LineFamily family = transform_coordinates(rho, phat);
  const CesParams h{rho, 2};
  DiscreteMeasure mu;
  for (std::size_t j = 0; j < cone.generators.size(); ++j) {
    if (!(coefficients[j] > 0.0)) continue;
    const Spectrum& cell = cone.generators[j];
    const ChebyshevCell cc = chebyshev_center(family, cell);
    if (cc.truncated && notes) {
      notes->push_back("cell " + cell.str() + " is unbounded; center taken inside the bounding box");
    }
    const Vec2 x = z_to_x(family, cc.center);

    // Jacobian norm of z -> x by central differences, for the radius in x.
    const double hstep = 1e-6 * cc.radius;
    double jn = 0.0;
    for (int i = 0; i < 2; ++i) {
      Vec2 zp = cc.center, zm = cc.center;
      zp[i] += hstep;
      zm[i] -= hstep;
      const Vec2 xp = z_to_x(family, zp), xm = z_to_x(family, zm);
      jn += std::pow((xp[0] - xm[0]) / (2 * hstep), 2) + std::pow((xp[1] - xm[1]) / (2 * hstep), 2);
    }
    jn = std::sqrt(jn);
    double r = 0.5 * cc.radius / std::max(jn, 1e-300);
    r = std::min(r, 0.5 * std::min(x[0], x[1]));

    std::vector<int> sign(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) sign[t] = load_margin(h, series[t], x) > 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 60 && !ok; ++attempt) {
      ok = true;
      for (int k = 0; k < 64 && ok; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / 64.0;
        const Vec2 xs{x[0] + r * std::cos(ang), x[1] + r * std::sin(ang)};
        if (!(xs[0] > 0.0 && xs[1] > 0.0)) {
          ok = false;
          break;
        }
        for (std::size_t t = 0; t < series.size() && ok; ++t) {
          const double m = load_margin(h, series[t], xs);
          ok = std::abs(m) > kBoundaryTol && (m > 0.0) == static_cast<bool>(sign[t]);
        }
      }
      if (!ok) r *= 0.5;
    }
    if (!ok) fail(ErrorKind::numeric, "no smoothing disk fits inside cell " + cell.str());
    mu.atoms.push_back(Atom{Vec{x[0], x[1]}, coefficients[j], r});
  }
  return mu;
}

Vec verify_measure(const DiscreteMeasure& measure, std::span<const TimeSeriesRecord> series,
                   double rho) {
  validate_series(series);
  measure.validate();
  const CesParams h{rho, 2};
  h.validate();
  Vec res(series.size(), 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
      const auto& a = measure.atoms[k];
      require(a.x.size() == 2, "atoms must be two-dimensional");
      const double m = load_margin(h, series[t], a.x);
      if (std::abs(m) <= kBoundaryTol) {
        fail(ErrorKind::degenerate, "atom " + std::to_string(k) + " lies on the level set at t=" +
                                        std::to_string(series[t].t) + " (ambiguous loading)");
      }
      if (m > 0.0) s += a.mass;
    }
    res[t] = s - series[t].y;
  }
  return res;
}

MomentProblemReport moment_solvable(std::span<const TimeSeriesRecord> series, double rho,
                                    const MomentOptions& options) {
  validate_series(series);
  CesParams{rho, 2}.validate();
  MomentProblemReport rep;
  rep.rho = rho;
  rep.family = transform_coordinates(rho, NormalizedPrices::from_series(series));
  try {
    rep.spectra = enumerate_spectra(rep.family);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    fail(ErrorKind::degenerate, std::string(e.what()) +
                                    "; rho is at a critical value, perturb rho or use the "
                                    "elasticity intervals");
  }
  rep.spectra_count = rep.spectra.size();
  rep.cone = cone_from_spectra(rep.spectra);
  rep.cone_size = rep.cone.generators.size();
  const Vec y = outputs_of(series);
  rep.membership = cone_contains(rep.cone, y);
  rep.solvable = rep.membership.contains;
  if (!rep.solvable) {
    rep.certificate = rep.membership.certificate;
    return rep;
  }
  if (!options.build_witness) return rep;
  try {
    DiscreteMeasure mu =
        construct_witness_measure(series, rho, rep.cone, rep.membership.witness.coefficients,
                                  &rep.notes);
    const Vec r = verify_measure(mu, series, rho);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    double ymax = 1.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    rep.witness_residual = worst / ymax;
    rep.witness = std::move(mu);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("witness construction failed: ") + e.what());
  }
  return rep;
}

}  // namespace hjm
