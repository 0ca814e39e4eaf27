#include "hjm/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjm {

double ScaledDet::value() const {
  if (scaled == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(scaled)) + log_scale), scaled);
}

namespace {

struct Estimate {
  ScaledDet d;
  double cond = INFINITY;  // sum of |parts| / |result|, the rounding amplification
};

// (u2 - u1)(v3 - v1) - (u3 - u1)(v2 - v1) with expm1 differences. Accurate
// while rho is small; at large rho its leading u1 v1 product cancels only
// algebraically and the sign can be lost.
Estimate difference_form(const NormalizedPrices& phat, Triple tr, double rho) {
  std::array<double, 3> L1{}, L2{};
  for (int k = 0; k < 3; ++k) {
    L1[k] = -rho * std::log(phat.phat[tr[k]][0]);
    L2[k] = -rho * std::log(phat.phat[tr[k]][1]);
  }
  const double m1 = *std::max_element(L1.begin(), L1.end());
  const double m2 = *std::max_element(L2.begin(), L2.end());
  // e^a - e^b as (sign, log|.|): log|e^a - e^b| = max(a,b) + log(-expm1(-|a-b|))
  struct Signed {
    int s;
    double lg;
  };
  auto diff = [](const std::array<double, 3>& L, double m, int j, int i) -> Signed {
    const double a = L[j] - m, b = L[i] - m;
    if (a == b) return {0, 0.0};
    return {a > b ? 1 : -1, std::max(a, b) + std::log(-std::expm1(-std::abs(a - b)))};
  };
  const Signed du21 = diff(L1, m1, 1, 0), du31 = diff(L1, m1, 2, 0);
  const Signed dv21 = diff(L2, m2, 1, 0), dv31 = diff(L2, m2, 2, 0);
  const int sa = du21.s * dv31.s, sb = du31.s * dv21.s;
  const double la = du21.lg + dv31.lg, lb = du31.lg + dv21.lg;
  double shift = 0.0;
  if (sa != 0 && sb != 0) {
    shift = std::max(la, lb);
  } else if (sa != 0) {
    shift = la;
  } else if (sb != 0) {
    shift = lb;
  }
  const double A = sa == 0 ? 0.0 : sa * std::exp(la - shift);
  const double B = sb == 0 ? 0.0 : sb * std::exp(lb - shift);
  Estimate r;
  r.d.scaled = A - B;
  r.d.log_scale = m1 + m2 + shift;
  if (r.d.scaled != 0.0) r.cond = (std::abs(A) + std::abs(B)) / std::abs(r.d.scaled);
  if (sa == 0 && sb == 0) r.cond = 1.0;  // exactly zero
  return r;
}

// Direct sum of the six terms e^(-rho (log p1_i + log p2_j)), i != j, with
// equal exponents merged first so structural cancellation is exact.
// Accurate once the terms are well separated, poor near rho = 0.
Estimate expansion_form(const NormalizedPrices& phat, Triple tr, double rho) {
  static constexpr int terms[6][3] = {{1, 2, 1}, {2, 1, -1}, {0, 2, -1}, {2, 0, 1}, {0, 1, 1}, {1, 0, -1}};
  std::array<std::pair<double, int>, 6> e{};
  for (int k = 0; k < 6; ++k) {
    const auto& t = terms[k];
    e[k] = {std::log(phat.phat[tr[t[0]]][0]) + std::log(phat.phat[tr[t[1]]][1]), t[2]};
  }
  std::sort(e.begin(), e.end());
  std::vector<std::pair<double, int>> g;
  for (std::size_t k = 0; k < e.size();) {
    int c = 0;
    std::size_t j = k;
    while (j < e.size() && std::abs(e[j].first - e[k].first) <= 1e-12 * std::max(1.0, std::abs(e[k].first))) {
      c += e[j++].second;
    }
    if (c != 0) g.push_back({-rho * e[k].first, c});
    k = j;
  }
  Estimate r;
  if (g.empty()) {
    r.cond = 1.0;
    return r;
  }
  double m = -INFINITY;
  for (const auto& [x, c] : g) m = std::max(m, x);
  double abs_sum = 0.0;
  for (const auto& [x, c] : g) {
    const double v = c * std::exp(x - m);
    r.d.scaled += v;
    abs_sum += std::abs(v);
  }
  r.d.log_scale = m;
  if (r.d.scaled != 0.0) r.cond = abs_sum / std::abs(r.d.scaled);
  return r;
}

}  // namespace

ScaledDet concurrency_determinant_scaled(const NormalizedPrices& phat, Triple tr, double rho) {
  const int T = static_cast<int>(phat.size());
  require(tr[0] >= 0 && tr[0] < tr[1] && tr[1] < tr[2] && tr[2] < T, "invalid triple");
  require(std::isfinite(rho), "rho must be finite");
  // keep whichever form amplifies rounding less
  const Estimate a = difference_form(phat, tr, rho);
  const Estimate b = expansion_form(phat, tr, rho);
  return a.cond <= b.cond ? a.d : b.d;
}

double concurrency_determinant(const NormalizedPrices& phat, Triple triple, double rho) {
  return concurrency_determinant_scaled(phat, triple, rho).value();
}

namespace {

std::vector<double> negative_grid() {
  std::vector<double> g;
  const int steps = 20;
  for (int k = 0; k <= 8 * steps; ++k) g.push_back(-std::pow(10.0, -static_cast<double>(k) / steps));
  g.front() = -1.0;
  g.back() = -kRhoFloor;
  return g;  // -1 ... -1e-8
}

std::vector<double> positive_decade(int lo_exp) {
  std::vector<double> g;
  const int steps = 20;
  for (int k = 1; k <= steps; ++k) {
    g.push_back(std::pow(10.0, lo_exp + static_cast<double>(k) / steps));
  }
  return g;
}

std::string triple_str(Triple t) {
  std::ostringstream os;
  os << "(" << t[0] + 1 << "," << t[1] + 1 << "," << t[2] + 1 << ")";
  return os.str();
}

// Scans the ordered grid and returns sign-change brackets (or exact zeros as
// degenerate brackets lo == hi).
void scan(const NormalizedPrices& phat, Triple tr, const std::vector<double>& grid,
          std::vector<Bracket>& out) {
  int last_sign = 0;
  std::size_t last_idx = 0;
  std::vector<int> sg(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sg[k] = concurrency_determinant_scaled(phat, tr, grid[k]).sign();
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (sg[k] == 0) continue;
    if (last_sign != 0 && sg[k] != last_sign) {
      if (k == last_idx + 1) {
        out.push_back({grid[last_idx], grid[k], tr});
      } else {
        const double z = grid[(last_idx + k) / 2];
        out.push_back({z, z, tr});
      }
    }
    last_sign = sg[k];
    last_idx = k;
  }
  // Zero at an end of the grid with a nonzero neighbour.
  if (!grid.empty() && sg.front() == 0 && grid.size() > 1 && sg[1] != 0) {
    out.push_back({grid.front(), grid.front(), tr});
  }
  if (grid.size() > 1 && sg.back() == 0 && sg[grid.size() - 2] != 0) {
    out.push_back({grid.back(), grid.back(), tr});
  }
}

// det = sum of six signed terms exp(-rho (log p1_i + log p2_j)), i != j. It is
// zero for every rho iff the signs cancel within each group of equal exponents
// (parallel lines, or a shared price coordinate).
bool identically_zero(const NormalizedPrices& phat, Triple tr) {
  static constexpr int terms[6][3] = {{1, 2, 1}, {2, 1, -1}, {0, 2, -1}, {2, 0, 1}, {0, 1, 1}, {1, 0, -1}};
  std::vector<std::pair<double, int>> e;
  for (const auto& t : terms) {
    e.push_back({std::log(phat.phat[tr[t[0]]][0]) + std::log(phat.phat[tr[t[1]]][1]), t[2]});
  }
  std::sort(e.begin(), e.end());
  for (std::size_t k = 0; k < e.size();) {
    int sum = 0;
    std::size_t j = k;
    while (j < e.size() && std::abs(e[j].first - e[k].first) <= 1e-12 * std::max(1.0, std::abs(e[k].first))) {
      sum += e[j++].second;
    }
    if (sum != 0) return false;
    k = j;
  }
  return true;
}

double bisect(const NormalizedPrices& phat, Triple tr, double lo, double hi) {
  int slo = concurrency_determinant_scaled(phat, tr, lo).sign();
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = concurrency_determinant_scaled(phat, tr, mid).sign();
    if (s == 0) return mid;
    if (s == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CriticalRhoSet critical_rhos(const NormalizedPrices& phat) {
  const int T = static_cast<int>(phat.size());
  for (int i = 0; i < T; ++i) {
    for (int j = i + 1; j < T; ++j) {
      if (phat.phat[i] == phat.phat[j]) {
        fail(ErrorKind::validation, "normalized prices at t=" + std::to_string(i + 1) +
                                        " and t=" + std::to_string(j + 1) + " coincide");
      }
    }
  }
  CriticalRhoSet out;
  const auto neg = negative_grid();
  std::vector<double> pos;
  for (int e = -8; e < 2; ++e) {
    const auto d = positive_decade(e);
    pos.insert(pos.end(), d.begin(), d.end());
  }
  pos.front() = std::max(pos.front(), kRhoFloor);
  pos.insert(pos.begin(), kRhoFloor);
  double r_max = 100.0;

  for (int a = 0; a < T; ++a) {
    for (int b = a + 1; b < T; ++b) {
      for (int c = b + 1; c < T; ++c) {
        const Triple tr{a, b, c};
        if (identically_zero(phat, tr)) continue;
        std::vector<Bracket> br;
        scan(phat, tr, neg, br);
        std::vector<double> grid = pos;
        scan(phat, tr, grid, br);
        // Extend the positive range a decade at a time while the sign still moves.
        double R = 100.0;
        while (R < kRhoCap) {
          const int s_now = concurrency_determinant_scaled(phat, tr, R).sign();
          std::vector<double> dec{R};
          const auto more = positive_decade(static_cast<int>(std::lround(std::log10(R))));
          dec.insert(dec.end(), more.begin(), more.end());
          const std::size_t before = br.size();
          scan(phat, tr, dec, br);
          R *= 10.0;
          const int s_next = concurrency_determinant_scaled(phat, tr, R).sign();
          if (br.size() == before && s_now == s_next) break;
        }
        r_max = std::max(r_max, R);
        if (br.size() > 1) {
          fail(ErrorKind::numeric, "triple " + triple_str(tr) +
                                       " shows more than one sign change; at most one critical "
                                       "rho per triple is possible");
        }
        for (const auto& bk : br) {
          out.brackets.push_back(bk);
          CriticalRoot root;
          root.triple = tr;
          root.rho = bk.lo == bk.hi ? bk.lo : bisect(phat, tr, bk.lo, bk.hi);
          root.boundary = std::abs(root.rho + 1.0) <= kRootTol;
          out.roots.push_back(root);
        }
      }
    }
  }
  out.r_max = r_max;
  std::sort(out.roots.begin(), out.roots.end(),
            [](const CriticalRoot& x, const CriticalRoot& y) { return x.rho < y.rho; });
  return out;
}

double sigma_of_rho(double rho) {
  if (rho == -1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(rho)) return 0.0;
  return 1.0 / (1.0 + rho);
}

namespace {

struct Piece {
  double lo;
  double hi;
  bool lo_closed;
};

double probe_point(const Piece& p, int attempt) {
  static const double fr[] = {0.5, 0.3, 0.7, 0.2, 0.8, 0.4};
  const double f = fr[attempt % 6];
  if (std::isinf(p.hi)) {
    const double base = p.lo > 0.0 ? p.lo : 0.0;
    if (base == 0.0) return 1.0 + attempt * 0.37;
    return (2.0 + attempt * 0.5) * base + 1.0;
  }
  if (p.hi == 0.0) {
    // (lo, 0)
    if (p.lo == -1.0 && p.lo_closed && attempt == 0) return -0.5;
    return p.lo * f;
  }
  if (p.lo == 0.0) return p.hi * f;
  // Geometric interpolation in |rho|.
  const double a = std::abs(p.lo), b = std::abs(p.hi);
  const double m = std::exp((1.0 - f) * std::log(a) + f * std::log(b));
  return p.lo < 0.0 ? -m : m;
}

}  // namespace

ElasticityReport estimate_elasticity(std::span<const TimeSeriesRecord> series,
                                     const ElasticityOptions& options) {
  require(!series.empty(), "empty time series");
  for (const auto& r : series) r.validate();
  const auto phat = NormalizedPrices::from_series(series);
  ElasticityReport rep;
  rep.critical = critical_rhos(phat);

  std::vector<double> cuts;
  for (const auto& r : rep.critical.roots) {
    if (r.boundary) continue;
    if (cuts.empty() || std::abs(r.rho - cuts.back()) > 1e-9 * std::max(1.0, std::abs(r.rho))) {
      cuts.push_back(r.rho);
    }
  }
  std::vector<Piece> pieces;
  double lo = -1.0;
  bool closed = true;
  for (double c : cuts) {
    if (c > 0.0) break;
    pieces.push_back({lo, c, closed});
    lo = c;
    closed = false;
  }
  pieces.push_back({lo, 0.0, closed});
  lo = 0.0;
  for (double c : cuts) {
    if (c < 0.0) continue;
    pieces.push_back({lo, c, false});
    lo = c;
  }
  pieces.push_back({lo, std::numeric_limits<double>::infinity(), false});

  for (const auto& pc : pieces) {
    ElasticityInterval iv;
    iv.lo = pc.lo;
    iv.hi = pc.hi;
    iv.lo_closed = pc.lo_closed;
    iv.sigma_lo = std::isinf(pc.hi) ? 0.0 : sigma_of_rho(pc.hi);
    iv.sigma_hi = sigma_of_rho(pc.lo);
    bool done = false;
    for (int attempt = 0; attempt < 6 && !done; ++attempt) {
      const double rho = probe_point(pc, attempt);
      try {
        iv.report = moment_solvable(series, rho, MomentOptions{options.build_witness});
        iv.probe_rho = rho;
        iv.probe_attempts = attempt + 1;
        iv.solvable = iv.report.solvable;
        done = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
        rep.warnings.push_back("probe at rho=" + std::to_string(rho) + " degenerate: " + e.what());
      }
    }
    if (!done) {
      fail(ErrorKind::degenerate, "every probe of an interval was degenerate");
    }
    rep.intervals.push_back(std::move(iv));
  }
  return rep;
}

}  // namespace hjm
