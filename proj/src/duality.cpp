#include "hjm/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace hjm {

namespace bq = boost::math::quadrature;

namespace {

double lgam(double x) { return boost::math::lgamma(x); }
double lbeta(double a, double b) { return lgam(a) + lgam(b) - lgam(a + b); }

double log_add(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double guard(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

void CobbDouglasParams::validate() const {
  require(std::isfinite(C) && C > 0.0, "Cobb-Douglas C must be > 0");
  require(alpha1 >= 1.0 && alpha2 >= 1.0, "Cobb-Douglas exponents must be >= 1");
}

double CobbDouglasParams::A() const {
  validate();
  const double a = alpha1 + alpha2, s = a + 1.0;
  const double logA = s * std::log(C) + std::log(a) + alpha1 * std::log(alpha1) +
                      alpha2 * std::log(alpha2) - a * std::log(s) - lbeta(alpha1, alpha2);
  return std::exp(logA);
}

void CesProductionParams::validate() const {
  require(alpha1 > 0.0 && alpha2 > 0.0, "CES weights must be > 0");
  require(std::isfinite(rho) && rho >= -1.0 && rho != 0.0, "CES rho must lie in [-1,0) or (0,inf)");
  require(gamma > 0.0 && gamma < 1.0, "CES gamma must lie in (0,1)");
}

double CesProductionParams::beta1() const { return std::pow(alpha1, 1.0 / (1.0 + rho)); }
double CesProductionParams::beta2() const { return std::pow(alpha2, 1.0 / (1.0 + rho)); }
double CesProductionParams::r() const { return -2.0 * rho / (1.0 + rho); }
double CesProductionParams::b() const { return gamma / (1.0 - gamma) * (1.0 + rho) / rho; }

double production_cobb_douglas(const CobbDouglasParams& c, double l1, double l2) {
  c.validate();
  require(l1 >= 0.0 && l2 >= 0.0, "resources must be >= 0");
  const double s = c.alpha1 + c.alpha2 + 1.0;
  return c.C * std::pow(l1, c.alpha1 / s) * std::pow(l2, c.alpha2 / s);
}

double production_ces(const CesProductionParams& c, double l1, double l2) {
  c.validate();
  require(l1 >= 0.0 && l2 >= 0.0, "resources must be >= 0");
  if (c.rho > 0.0 && (l1 == 0.0 || l2 == 0.0)) return 0.0;
  if (c.rho < 0.0 && l1 == 0.0 && l2 == 0.0) return 0.0;
  if (c.rho < 0.0 && (l1 == 0.0 || l2 == 0.0)) {
    const double s = c.alpha1 * std::pow(l1, -c.rho) + c.alpha2 * std::pow(l2, -c.rho);
    return std::pow(s, -c.gamma / c.rho);
  }
  const double la = std::log(c.alpha1) - c.rho * std::log(l1);
  const double lb = std::log(c.alpha2) - c.rho * std::log(l2);
  return std::exp(-c.gamma / c.rho * log_add(la, lb));
}

double profit_cobb_douglas(const CobbDouglasParams& c, double p1, double p2, double p0) {
  c.validate();
  require(p1 > 0.0 && p2 > 0.0 && p0 > 0.0, "prices must be positive");
  const double a = c.alpha1 + c.alpha2, s = a + 1.0;
  const double lg = std::log(c.A()) + lbeta(c.alpha1, c.alpha2) - std::log(a) - std::log(s) +
                    s * std::log(p0) - c.alpha1 * std::log(p1) - c.alpha2 * std::log(p2);
  return std::exp(lg);
}

double profit_ces(const CesProductionParams& c, double p1, double p2, double p0) {
  c.validate();
  require(p1 > 0.0 && p2 > 0.0 && p0 > 0.0, "prices must be positive");
  const double g = c.gamma;
  const double lead = g / (1.0 - g) * std::log(g) + std::log(1.0 - g) + std::log(p0) / (1.0 - g);
  if (c.rho == -1.0) {
    const double m = std::max(std::log(c.alpha1) - std::log(p1), std::log(c.alpha2) - std::log(p2));
    return std::exp(lead + g / (1.0 - g) * m);
  }
  const double k = 1.0 + c.rho;
  const double t1 = (std::log(c.alpha1) + c.rho * std::log(p1)) / k;
  const double t2 = (std::log(c.alpha2) + c.rho * std::log(p2)) / k;
  const double expo = -g * k / (c.rho * (1.0 - g));
  return std::exp(lead + expo * log_add(t1, t2));
}

double capacity_density_cd(const CobbDouglasParams& c, double r, double x1, double x2) {
  c.validate();
  require(r >= -1.0 && r < 0.0, "r must lie in [-1,0)");
  if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
  const double lc = std::log(-r) + std::log(c.A()) + lbeta(c.alpha1, c.alpha2) -
                    lbeta(-c.alpha1 / r, -c.alpha2 / r);
  return std::exp(lc + (c.alpha1 - 1.0) * std::log(x1) + (c.alpha2 - 1.0) * std::log(x2));
}

double laplace_density_cd(const CobbDouglasParams& c, double r, double x1, double x2) {
  c.validate();
  require(r >= -1.0 && r < 0.0, "r must lie in [-1,0)");
  if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
  const double a1 = -c.alpha1 / r, a2 = -c.alpha2 / r;
  const double lc = std::log(c.A()) + lbeta(c.alpha1, c.alpha2) - lgam(a1) - lgam(a2);
  return std::exp(lc + (a1 - 1.0) * std::log(x1) + (a2 - 1.0) * std::log(x2));
}

namespace {

double ces_log_lead(const CesProductionParams& c) {
  const double g = c.gamma, b = c.b();
  return std::log(g) / (1.0 - g) - std::log(1.0 - g) + (b - 1.0) * std::log(2.0) -
         std::log(std::numbers::pi) + std::log(c.beta1()) + std::log(c.beta2()) +
         lgam(b / 2.0 + 1.0) - lgam(b);
}

}  // namespace

double laplace_density_ces(const CesProductionParams& c, double x1, double x2) {
  c.validate();
  require(c.rho > 0.0, "the CES density representation needs rho > 0");
  if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
  const double b = c.b();
  const double inner = log_add(2.0 * std::log(c.beta1()) - std::log(x1),
                               2.0 * std::log(c.beta2()) - std::log(x2));
  return std::exp(ces_log_lead(c) - 1.5 * (std::log(x1) + std::log(x2)) +
                  (-b / 2.0 - 1.0) * inner);
}

double capacity_density_ces(const CesProductionParams& c, double x1, double x2) {
  c.validate();
  require(c.rho > 0.0, "the CES density representation needs rho > 0");
  if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
  const double b = c.b(), r = c.r();
  const double inner = log_add(2.0 * std::log(c.beta1()) + r * std::log(x1),
                               2.0 * std::log(c.beta2()) + r * std::log(x2));
  // (-r) comes from the phi construction; the printed closed form drops it
  return std::exp(ces_log_lead(c) + std::log(-r) + lgam(b / 2.0) + (r / 2.0 - 1.0) * (std::log(x1) + std::log(x2)) +
                  (-b / 2.0 - 1.0) * inner);
}

UnitCost unit_cost_r(double r) {
  const CesParams h{r, 2};
  h.validate();
  return [h](Vec2 p, Vec2 x) { return ces_unit_cost(h, p, x); };
}

QuadratureResult numeric_profit(const Density& phi, const UnitCost& h, Vec2 p, double p0,
                                const QuadratureOptions& opt) {
  require(p[0] > 0.0 && p[1] > 0.0 && p0 > 0.0, "prices must be positive");
  auto h_dir = [&](double th) { return h(p, {std::cos(th), std::sin(th)}); };
  const double mid = h_dir(std::numbers::pi / 4);
  const double e1 = h_dir(1e-7), e2 = h_dir(std::numbers::pi / 2 - 1e-7);
  if (!(mid > 0.0) || !(e1 > 1e-4 * mid) || !(e2 > 1e-4 * mid)) {
    fail(ErrorKind::validation,
         "level set {h(p o x) <= p0} is unbounded; the unit cost does not grow along the axes");
  }
  bq::tanh_sinh<double> outer_q, inner_q;
  const double inner_tol = std::max(opt.rel_tol * 1e-2, 1e-12);
  auto outer = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double ht = h(p, {c, s});
    if (!(ht > 0.0) || !std::isfinite(ht)) return 0.0;
    const double S = p0 / ht;
    auto inner = [&](double u) { return guard((1.0 - u) * u * phi(S * u * c, S * u * s)); };
    const double v = inner_q.integrate(inner, 0.0, 1.0, inner_tol);
    return guard(p0 * S * S * v);
  };
  QuadratureResult res;
  res.method = "polar level-set tanh-sinh";
  res.value = outer_q.integrate(outer, 0.0, std::numbers::pi / 2, opt.rel_tol, &res.error);
  return res;
}

double numeric_profit(const DiscreteMeasure& mu, const UnitCost& h, Vec2 p, double p0) {
  mu.validate();
  double s = 0.0;
  for (const auto& a : mu.atoms) {
    require(a.x.size() == 2, "atoms must be two-dimensional");
    s += a.mass * std::max(0.0, p0 - h(p, {a.x[0], a.x[1]}));
  }
  return s;
}

QuadratureResult laplace2d(const Density& f, Vec2 p, const QuadratureOptions& opt) {
  require(p[0] > 0.0 && p[1] > 0.0, "Laplace variable must be positive");
  const double L1 = kLaplaceTail / p[0], L2 = kLaplaceTail / p[1];
  bq::tanh_sinh<double> outer_q, inner_q;
  const double inner_tol = std::max(opt.rel_tol * 1e-2, 1e-12);
  auto outer = [&](double x1) {
    auto inner = [&](double x2) { return guard(std::exp(-p[1] * x2) * f(x1, x2)); };
    return guard(std::exp(-p[0] * x1) * inner_q.integrate(inner, 0.0, L2, inner_tol));
  };
  QuadratureResult res;
  res.method = "tanh-sinh on [0, 30/p1] x [0, 30/p2]";
  res.value = outer_q.integrate(outer, 0.0, L1, opt.rel_tol, &res.error);
  return res;
}

double phi_from_f(const Density& f, double r, double x1, double x2) {
  require(r >= -1.0 && r < 0.0, "r must lie in [-1,0)");
  if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
  const double u1 = std::pow(x1, -r), u2 = std::pow(x2, -r);
  bq::exp_sinh<double> q;
  auto g = [&](double t) { return guard(t * std::exp(-t) * f(t * u1, t * u2)); };
  const double I = q.integrate(g, 1e-12);
  return -r * std::pow(x1 * x2, -r - 1.0) * I;
}

PropcharReport check_propchar(const PropcharInput& in) {
  require(in.r >= -1.0 && in.r < 0.0, "r must lie in [-1,0)");
  require(!in.price_grid.empty(), "empty price grid");
  PropcharReport rep;

  for (const auto& p : in.price_grid) {
    const double scale = std::max(1.0, std::abs(in.Pi(p, 1.0)));
    const double d = 1e-4;
    const double v = std::abs(in.Pi(p, d)) / scale;
    const double dv = std::abs((in.Pi(p, 1.5 * d) - in.Pi(p, 0.5 * d)) / d) / scale;
    rep.limit_worst = std::max({rep.limit_worst, v, dv});
  }
  rep.limits_ok = rep.limit_worst <= in.tol;

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> lam(0.1, 10.0), p0d(0.2, 5.0);
  for (const auto& p : in.price_grid) {
    for (int k = 0; k < 3; ++k) {
      const double l = lam(rng), p0 = p0d(rng);
      const double a = in.Pi({l * p[0], l * p[1]}, l * p0);
      const double b = l * in.Pi(p, p0);
      rep.homogeneity_worst =
          std::max(rep.homogeneity_worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
    }
  }
  rep.homogeneity_ok = rep.homogeneity_worst <= in.tol;

  const double h = std::cbrt(std::numeric_limits<double>::epsilon());
  for (const auto& p : in.price_grid) {
    const Vec2 q{std::pow(p[0], -1.0 / in.r), std::pow(p[1], -1.0 / in.r)};
    const double d2 = (in.Pi(q, 1.0 + h) - 2.0 * in.Pi(q, 1.0) + in.Pi(q, 1.0 - h)) / (h * h);
    const double lap = laplace2d(in.f, p, {1e-8}).value;
    rep.d2pi_worst = std::max(rep.d2pi_worst, std::abs(d2 - lap) / std::max(std::abs(lap), 1e-300));
  }
  rep.d2pi_ok = rep.d2pi_worst <= in.tol;

  Density built = [&](double x1, double x2) { return phi_from_f(in.f, in.r, x1, x2); };
  if (in.phi) {
    for (double x1 : {0.3, 1.0, 2.5}) {
      for (double x2 : {0.4, 1.3}) {
        const double want = (*in.phi)(x1, x2), got = built(x1, x2);
        rep.phi_worst = std::max(rep.phi_worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
      }
    }
  }
  if (in.check_phi_profit) {
    const UnitCost hr = unit_cost_r(in.r);
    const std::size_t n = std::min<std::size_t>(2, in.price_grid.size());
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 p = in.price_grid[k];
      const double want = in.Pi(p, 1.0);
      const double got = numeric_profit(built, hr, p, 1.0, {1e-6}).value;
      rep.phi_worst = std::max(rep.phi_worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
    }
  }
  rep.phi_ok = rep.phi_worst <= in.tol;
  return rep;
}

LapsqrtResult lapsqrt2_identity(double beta1, double beta2, double b, double p1, double p2) {
  require(beta1 > 0.0 && beta2 > 0.0 && b > 0.0 && p1 > 0.0 && p2 > 0.0,
          "all parameters must be positive");
  LapsqrtResult r;
  r.lhs = std::pow(beta1 * std::sqrt(p1) + beta2 * std::sqrt(p2), -b);
  const double lead = (b - 1.0) * std::log(2.0) - std::log(std::numbers::pi) + std::log(beta1) +
                      std::log(beta2) + lgam(b / 2.0 + 1.0) - lgam(b);
  Density H = [&](double x1, double x2) {
    if (!(x1 > 0.0 && x2 > 0.0)) return 0.0;
    const double inner = log_add(2.0 * std::log(beta1) - std::log(x1), 2.0 * std::log(beta2) - std::log(x2));
    return std::exp(lead - 1.5 * (std::log(x1) + std::log(x2)) + (-b / 2.0 - 1.0) * inner);
  };
  r.rhs = laplace2d(H, {p1, p2}, {1e-10}).value;
  r.gap = std::abs(r.lhs - r.rhs) / std::abs(r.lhs);
  return r;
}

namespace {

void combos(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combos(n, k, i, cur, out);
    cur.pop_back();
  }
}

}  // namespace

MonotoneReport completely_monotone_check(const GFn& G, Vec2 s0, const std::vector<Vec2>& dirs,
                                         int k_max, const std::vector<double>& lambdas_in) {
  require(k_max >= 1 && k_max <= 4, "k_max must lie in 1..4");
  require(s0[0] > 0.0 && s0[1] > 0.0, "base point must be positive");
  require(!dirs.empty(), "no directions");
  const std::vector<double> lambdas = lambdas_in.empty() ? std::vector<double>{0.5, 1.0, 2.0} : lambdas_in;
  MonotoneReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double eps = std::numeric_limits<double>::epsilon();
  for (double lam : lambdas) {
    const Vec2 s{lam * s0[0], lam * s0[1]};
    const double g0 = G(s);
    const double norm = std::max(std::abs(g0), 1e-300);
    for (int k = 1; k <= k_max; ++k) {
      std::vector<std::vector<int>> tuples;
      std::vector<int> cur;
      combos(static_cast<int>(dirs.size()), k, 0, cur, tuples);
      for (const auto& tup : tuples) {
        double reach = 0.0;
        for (int i : tup) reach += std::abs(dirs[i][0]) + std::abs(dirs[i][1]);
        double h = std::pow(eps, 1.0 / (k + 2)) * std::hypot(s[0], s[1]);
        h = std::min(h, 0.25 * std::min(s[0], s[1]) / std::max(reach, 1e-300));
        double acc = 0.0;
        for (int mask = 0; mask < (1 << k); ++mask) {
          Vec2 x = s;
          int sign = 1;
          for (int i = 0; i < k; ++i) {
            const int e = (mask >> i & 1) ? 1 : -1;
            sign *= e;
            x[0] += e * h * dirs[tup[i]][0];
            x[1] += e * h * dirs[tup[i]][1];
          }
          acc += sign * G(x);
        }
        const double deriv = acc / std::pow(2.0 * h, k);
        const double margin = ((k % 2) ? -deriv : deriv) / norm;
        ++rep.samples;
        if (margin < rep.worst_margin) {
          rep.worst_margin = margin;
          rep.worst_k = k;
          rep.worst_lambda = lam;
          rep.worst_dirs = tup;
        }
      }
    }
  }
  return rep;
}

double g_from_pi(const ProfitFn& Pi, Vec2 s) {
  require(s[0] >= 0.0 && s[1] >= 0.0, "s must be nonnegative");
  auto f = [&](double tau) { return std::exp(-tau) * Pi(s, tau); };
  double err = 0.0;
  // Pi(s, 0) = dPi/dtau(s, 0) = 0 makes both boundary terms vanish.
  return bq::gauss_kronrod<double, 61>::integrate(f, 0.0, 60.0, 25, 1e-13, &err);
}

}  // namespace hjm
