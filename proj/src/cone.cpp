#include "hjm/cone.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "hjm/simplex.hpp"

namespace hjm {

PolyhedralCone cone_from_spectra(const std::vector<Spectrum>& spectra) {
  require(!spectra.empty(), "empty spectra set");
  PolyhedralCone cone;
  cone.ambient_dim = spectra.front().size();
  for (const auto& s : spectra) {
    require(s.size() == cone.ambient_dim, "spectra of different lengths");
    if (!s.is_zero()) cone.generators.push_back(s);
  }
  std::sort(cone.generators.begin(), cone.generators.end());
  cone.generators.erase(std::unique(cone.generators.begin(), cone.generators.end()),
                        cone.generators.end());
  return cone;
}

PolyhedralCone irredundant(const PolyhedralCone& cone) {
  PolyhedralCone out = cone;
  for (std::size_t j = out.generators.size(); j-- > 0;) {
    PolyhedralCone rest = out;
    rest.generators.erase(rest.generators.begin() + static_cast<std::ptrdiff_t>(j));
    if (rest.generators.empty()) continue;
    const Spectrum& g = out.generators[j];
    Vec y(g.bits.begin(), g.bits.end());
    if (cone_contains(rest, y).contains) out = std::move(rest);
  }
  return out;
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double witness_residual(const PolyhedralCone& cone, const Vec& lambda, std::span<const double> y) {
  double r = 0.0;
  for (std::size_t t = 0; t < cone.ambient_dim; ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < cone.generators.size(); ++j) {
      if (cone.generators[j].bits[t]) s += lambda[j];
    }
    r = std::max(r, std::abs(s - y[t]));
  }
  return r / std::max(1.0, inf_norm(y));
}

// Returns true when nu separates: nu.Z >= -1e-12 for all generators, nu.y <= -1e-9 |y|.
bool certificate_ok(const PolyhedralCone& cone, const Vec& nu, std::span<const double> y,
                    double& margin) {
  for (const auto& g : cone.generators) {
    double s = 0.0;
    for (std::size_t t = 0; t < nu.size(); ++t) {
      if (g.bits[t]) s += nu[t];
    }
    if (s < -1e-12) return false;
  }
  double s = 0.0;
  for (std::size_t t = 0; t < nu.size(); ++t) s += nu[t] * y[t];
  margin = s / std::max(1e-300, inf_norm(y));
  return margin <= -1e-9;
}

template <class S>
Vec normalized(const std::vector<S>& v) {
  S m(0);
  for (const auto& x : v) {
    const S a = x < S(0) ? S(-x) : x;
    if (a > m) m = a;
  }
  Vec out(v.size(), 0.0);
  if (m == S(0)) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<S, double>) {
      out[i] = v[i] / m;
    } else {
      const S q = v[i] / m;
      out[i] = q.get_d();
    }
  }
  return out;
}

MembershipResult contains_exact(const PolyhedralCone& cone, std::span<const double> y) {
  const std::size_t T = cone.ambient_dim, m = cone.generators.size();
  std::vector<std::vector<mpq_class>> A(T, std::vector<mpq_class>(m));
  std::vector<mpq_class> b(T);
  for (std::size_t t = 0; t < T; ++t) {
    b[t] = mpq_class(y[t]);
    for (std::size_t j = 0; j < m; ++j) A[t][j] = cone.generators[j].bits[t];
  }
  const auto sol = solve_standard_lp<mpq_class>(A, b, {}, mpq_class(0));
  MembershipResult res;
  res.exact = true;
  if (sol.status == LpStatus::optimal) {
    res.contains = true;
    res.witness.coefficients.resize(m);
    for (std::size_t j = 0; j < m; ++j) res.witness.coefficients[j] = sol.x[j].get_d();
    res.witness.residual = witness_residual(cone, res.witness.coefficients, y);
    return res;
  }
  std::vector<mpq_class> nu(T);
  for (std::size_t t = 0; t < T; ++t) nu[t] = -sol.phase1_dual[t];
  res.certificate = normalized(nu);
  mpq_class dot(0);
  mpq_class ymax(0);
  for (std::size_t t = 0; t < T; ++t) {
    dot += nu[t] * b[t];
    ymax = std::max(ymax, mpq_class(abs(b[t])));
  }
  mpq_class numax(0);
  for (const auto& v : nu) numax = std::max(numax, mpq_class(abs(v)));
  const mpq_class margin = dot / (numax * ymax);
  res.certificate_margin = margin.get_d();
  return res;
}

}  // namespace

MembershipResult cone_contains_exact(const PolyhedralCone& cone, std::span<const double> y) {
  require(y.size() == cone.ambient_dim, "dimension of y differs from the cone");
  for (double v : y) require(std::isfinite(v), "y must be finite");
  if (inf_norm(y) == 0.0) {
    MembershipResult res;
    res.contains = true;
    res.exact = true;
    res.witness.coefficients.assign(cone.generators.size(), 0.0);
    return res;
  }
  if (cone.generators.empty()) {
    MembershipResult res = cone_contains(cone, y);
    res.exact = true;
    return res;
  }
  return contains_exact(cone, y);
}

MembershipResult cone_contains(const PolyhedralCone& cone, std::span<const double> y) {
  const std::size_t T = cone.ambient_dim, m = cone.generators.size();
  require(y.size() == T, "dimension of y differs from the cone");
  for (double v : y) require(std::isfinite(v), "y must be finite");
  MembershipResult res;
  const double scale = inf_norm(y);
  if (scale == 0.0) {
    res.contains = true;
    res.witness.coefficients.assign(m, 0.0);
    return res;
  }
  if (m == 0) {
    res.certificate.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) res.certificate[t] = -y[t] / scale;
    certificate_ok(cone, res.certificate, y, res.certificate_margin);
    return res;
  }
  std::vector<Vec> A(T, Vec(m));
  Vec b(T);
  for (std::size_t t = 0; t < T; ++t) {
    b[t] = y[t] / scale;
    for (std::size_t j = 0; j < m; ++j) A[t][j] = cone.generators[j].bits[t];
  }
  LpSolution<double> sol;
  try {
    sol = solve_standard_lp<double>(A, b, {}, kLpTol);
  } catch (const Error&) {
    return contains_exact(cone, y);
  }
  const double obj = sol.phase1_objective;
  if (obj <= kLpTol) {
    Vec lambda(m);
    for (std::size_t j = 0; j < m; ++j) lambda[j] = std::max(0.0, sol.x[j]) * scale;
    const double r = witness_residual(cone, lambda, y);
    if (r <= kLpTol) {
      res.contains = true;
      res.witness = {std::move(lambda), r};
      return res;
    }
  } else if (obj > 1e-6) {
    Vec nu(T);
    for (std::size_t t = 0; t < T; ++t) nu[t] = -sol.phase1_dual[t];
    nu = normalized(nu);
    double margin = 0.0;
    if (certificate_ok(cone, nu, y, margin)) {
      res.certificate = std::move(nu);
      res.certificate_margin = margin;
      return res;
    }
  }
  return contains_exact(cone, y);
}

// ---------------------------------------------------------------- facets

namespace {

using ZVec = std::vector<mpz_class>;

struct Bits {
  std::vector<std::uint64_t> w;
  explicit Bits(std::size_t n = 0) : w((n + 63) / 64, 0) {}
  void set(std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (w[i / 64] >> (i % 64)) & 1U; }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < w.size(); ++k) r.w[k] &= o.w[k];
    return r;
  }
  bool subset_of(const Bits& o) const {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] & ~o.w[k]) return false;
    }
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }
};

struct Ray {
  ZVec v;
  Bits zero;
};

mpz_class dot(const ZVec& a, const ZVec& b) {
  mpz_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void make_primitive(ZVec& v) {
  mpz_class g = 0;
  for (const auto& x : v) g = gcd(g, x);
  if (g == 0 || g == 1) return;
  for (auto& x : v) x /= g;
}

ZVec to_integer(const std::vector<mpq_class>& q) {
  mpz_class l = 1;
  for (const auto& x : q) l = lcm(l, mpz_class(x.get_den()));
  ZVec v(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    mpq_class s = q[i] * l;
    v[i] = s.get_num();
  }
  make_primitive(v);
  return v;
}

// Row echelon over Q: rank, indices of independent rows, basis of the null space.
struct SpanInfo {
  std::vector<std::size_t> independent;
  std::vector<ZVec> null_basis;
};

SpanInfo span_info(const std::vector<ZVec>& rows, std::size_t T) {
  SpanInfo info;
  std::vector<std::vector<mpq_class>> basis;  // reduced rows
  std::vector<std::size_t> pivots;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<mpq_class> v(T);
    for (std::size_t i = 0; i < T; ++i) v[i] = rows[r][i];
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (v[pivots[k]] != 0) {
        const mpq_class f = v[pivots[k]];
        for (std::size_t i = 0; i < T; ++i) v[i] -= f * basis[k][i];
      }
    }
    std::size_t p = T;
    for (std::size_t i = 0; i < T; ++i) {
      if (v[i] != 0) {
        p = i;
        break;
      }
    }
    if (p == T) continue;
    const mpq_class f = v[p];
    for (auto& x : v) x /= f;
    for (auto& b : basis) {
      if (b[p] != 0) {
        const mpq_class g = b[p];
        for (std::size_t i = 0; i < T; ++i) b[i] -= g * v[i];
      }
    }
    basis.push_back(std::move(v));
    pivots.push_back(p);
    info.independent.push_back(r);
  }
  std::vector<char> is_pivot(T, 0);
  for (auto p : pivots) is_pivot[p] = 1;
  for (std::size_t fcol = 0; fcol < T; ++fcol) {
    if (is_pivot[fcol]) continue;
    std::vector<mpq_class> n(T);
    n[fcol] = 1;
    for (std::size_t k = 0; k < basis.size(); ++k) n[pivots[k]] = -basis[k][fcol];
    info.null_basis.push_back(to_integer(n));
  }
  return info;
}

std::vector<std::vector<mpq_class>> inverse(const std::vector<ZVec>& B) {
  const std::size_t n = B.size();
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = B[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) fail(ErrorKind::numeric, "singular initial basis in facet enumeration");
    std::swap(a[p], a[c]);
    const mpq_class f = a[c][c];
    for (auto& x : a[c]) x /= f;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const mpq_class g = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= g * a[c][j];
    }
  }
  std::vector<std::vector<mpq_class>> inv(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

// Extreme rays of {nu : h.nu >= 0 for h in H}, given that the rows listed in
// `start` are linearly independent and span R^T.
std::vector<ZVec> double_description(const std::vector<ZVec>& H, const std::vector<std::size_t>& start,
                                     std::size_t T) {
  const std::size_t nh = H.size();
  std::vector<ZVec> B;
  for (auto i : start) B.push_back(H[i]);
  const auto inv = inverse(B);
  std::vector<char> done(nh, 0);
  for (auto i : start) done[i] = 1;
  std::vector<Ray> rays;
  for (std::size_t k = 0; k < T; ++k) {
    std::vector<mpq_class> col(T);
    for (std::size_t i = 0; i < T; ++i) col[i] = inv[i][k];
    Ray r{to_integer(col), Bits(nh)};
    for (std::size_t h = 0; h < nh; ++h) {
      if (done[h] && dot(H[h], r.v) == 0) r.zero.set(h);
    }
    rays.push_back(std::move(r));
  }
  for (std::size_t h = 0; h < nh; ++h) {
    if (done[h]) continue;
    std::vector<mpz_class> s(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      s[k] = dot(H[h], rays[k].v);
      if (s[k] > 0) pos.push_back(k);
      if (s[k] < 0) neg.push_back(k);
    }
    std::vector<Ray> next;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      if (s[k] >= 0) next.push_back(rays[k]);
    }
    for (auto p : pos) {
      for (auto n : neg) {
        const Bits common = rays[p].zero & rays[n].zero;
        if (T >= 2 && common.count() + 2 < T) continue;
        bool adjacent = true;
        for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
          if (k == p || k == n) continue;
          if (common.subset_of(rays[k].zero)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray r{ZVec(T), common};
        for (std::size_t i = 0; i < T; ++i) r.v[i] = s[p] * rays[n].v[i] - s[n] * rays[p].v[i];
        make_primitive(r.v);
        next.push_back(std::move(r));
      }
    }
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (dot(H[h], next[k].v) == 0) next[k].zero.set(h);
    }
    done[h] = 1;
    rays = std::move(next);
  }
  std::vector<ZVec> out;
  for (auto& r : rays) out.push_back(std::move(r.v));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<long long> to_ll(const ZVec& v) {
  std::vector<long long> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].fits_slong_p()) fail(ErrorKind::numeric, "facet normal entry exceeds 64 bits");
    out[i] = v[i].get_si();
  }
  return out;
}

}  // namespace

FacetReport facet_normals(const PolyhedralCone& cone) {
  const std::size_t T = cone.ambient_dim;
  if (T > kMaxFacetDim) {
    fail(ErrorKind::capability, "facet enumeration is limited to dimension " +
                                    std::to_string(kMaxFacetDim) + "; use LP membership instead");
  }
  FacetReport rep;
  std::vector<ZVec> gens;
  for (const auto& g : cone.generators) {
    ZVec v(T);
    for (std::size_t i = 0; i < T; ++i) v[i] = g.bits[i];
    gens.push_back(std::move(v));
  }
  const SpanInfo info = span_info(gens, T);
  rep.dimension = info.independent.size();
  rep.full_dimensional = rep.dimension == T;
  for (const auto& n : info.null_basis) rep.hull_normals.push_back(to_ll(n));
  if (T == 0 || rep.dimension == 0) return rep;

  std::vector<ZVec> H = gens;
  std::vector<std::size_t> start = info.independent;
  for (const auto& n : info.null_basis) {
    start.push_back(H.size());
    H.push_back(n);
  }
  for (const auto& n : info.null_basis) {
    ZVec neg = n;
    for (auto& x : neg) x = -x;
    H.push_back(std::move(neg));
  }
  for (const auto& nu : double_description(H, start, T)) {
    FacetNormal f;
    f.nu = to_ll(nu);
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (dot(gens[j], nu) == 0) f.tight_generators.push_back(j);
    }
    rep.facets.push_back(std::move(f));
  }
  return rep;
}

namespace {

std::vector<std::uint32_t> generator_masks(const std::vector<Spectrum>& gens) {
  std::vector<std::uint32_t> masks;
  for (const auto& g : gens) {
    std::uint32_t m = 0;
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (g.bits[t]) m |= 1U << t;
    }
    masks.push_back(m);
  }
  return masks;
}

bool entries_unit(const std::vector<long long>& nu) {
  return std::all_of(nu.begin(), nu.end(), [](long long v) { return v >= -1 && v <= 1; });
}

}  // namespace

DiscreteConvexity is_discretely_convex(const PolyhedralCone& cone) {
  return is_discretely_convex(cone, facet_normals(cone));
}

DiscreteConvexity is_discretely_convex(const PolyhedralCone& cone, const FacetReport& facets) {
  DiscreteConvexity out;
  if (facets.full_dimensional) {
    for (const auto& f : facets.facets) {
      if (!entries_unit(f.nu)) {
        out.convex = false;
        out.violating = f;
        return out;
      }
    }
    return out;
  }
  // Low-dimensional: a facet normal is defined modulo the orthogonal complement,
  // so search {-1,0,1}^T for a vector exposing the same face.
  const std::size_t T = cone.ambient_dim;
  const auto masks = generator_masks(cone.generators);
  for (const auto& f : facets.facets) {
    if (entries_unit(f.nu)) continue;
    std::vector<char> tight(masks.size(), 0);
    for (auto j : f.tight_generators) tight[j] = 1;
    bool found = false;
    const std::uint32_t full = T >= 32 ? ~0U : ((1U << T) - 1U);
    for (std::uint32_t p = 0; p <= full && !found; ++p) {
      const std::uint32_t rest = full & ~p;
      for (std::uint32_t q = rest;; q = (q - 1) & rest) {
        bool ok = true;
        for (std::size_t j = 0; j < masks.size() && ok; ++j) {
          const int d = std::popcount(masks[j] & p) - std::popcount(masks[j] & q);
          ok = d >= 0 && ((d == 0) == static_cast<bool>(tight[j]));
        }
        if (ok && (p | q) != 0) {
          found = true;
          break;
        }
        if (q == 0) break;
      }
      if (p == full) break;
    }
    if (!found) {
      out.convex = false;
      out.violating = f;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------- necessary condition

NecessaryChecker::NecessaryChecker(const std::vector<Spectrum>& spectra, NecessaryMode mode) {
  require(!spectra.empty(), "empty spectra set");
  T_ = spectra.front().size();
  if (mode == NecessaryMode::automatic) {
    mode = T_ <= kMaxFacetDim ? NecessaryMode::exhaustive : NecessaryMode::facet;
  }
  mode_ = mode;
  const PolyhedralCone cone = cone_from_spectra(spectra);
  if (mode == NecessaryMode::exhaustive) {
    if (T_ > kMaxFacetDim) {
      fail(ErrorKind::capability,
           "exhaustive necessary condition needs T <= 12; use LP membership instead");
    }
    const auto masks = generator_masks(cone.generators);
    const std::uint32_t full = (1U << T_) - 1U;
    for (std::uint32_t p = 0;; ++p) {
      const std::uint32_t rest = full & ~p;
      for (std::uint32_t q = rest;; q = (q - 1) & rest) {
        if ((p | q) != 0) {
          bool ok = true;
          for (auto m : masks) {
            if (std::popcount(m & p) < std::popcount(m & q)) {
              ok = false;
              break;
            }
          }
          if (ok) {
            plus_.push_back(p);
            minus_.push_back(q);
          }
        }
        if (q == 0) break;
      }
      if (p == full) break;
    }
    return;
  }
  if (T_ > kMaxFacetDim) {
    fail(ErrorKind::capability,
         "T > 12 and discrete convexity cannot be established; use LP membership instead");
  }
  const FacetReport facets = facet_normals(cone);
  const auto dc = is_discretely_convex(cone, facets);
  if (!dc.convex || !facets.full_dimensional) {
    fail(ErrorKind::capability,
         "facet mode needs a full-dimensional discretely convex cone; use LP membership instead");
  }
  for (const auto& f : facets.facets) {
    std::uint32_t p = 0, q = 0;
    for (std::size_t t = 0; t < T_; ++t) {
      if (f.nu[t] == 1) p |= 1U << t;
      if (f.nu[t] == -1) q |= 1U << t;
    }
    plus_.push_back(p);
    minus_.push_back(q);
  }
}

NecessaryResult NecessaryChecker::check(std::span<const double> y) const {
  require(y.size() == T_, "dimension of y differs from the spectra");
  NecessaryResult res;
  res.mode_used = mode_;
  const double tol = kLpTol * std::max(1.0, inf_norm(y));
  for (std::size_t k = 0; k < plus_.size(); ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < T_; ++t) {
      if (plus_[k] >> t & 1U) s += y[t];
      if (minus_[k] >> t & 1U) s -= y[t];
    }
    if (s < -tol) {
      res.passes = false;
      for (std::size_t t = 0; t < T_; ++t) {
        if (plus_[k] >> t & 1U) res.omega1.push_back(static_cast<int>(t) + 1);
        if (minus_[k] >> t & 1U) res.omega2.push_back(static_cast<int>(t) + 1);
      }
      return res;
    }
  }
  return res;
}

NecessaryResult necessary_condition(std::span<const double> y, const std::vector<Spectrum>& spectra,
                                    NecessaryMode mode) {
  return NecessaryChecker(spectra, mode).check(y);
}

}  // namespace hjm
