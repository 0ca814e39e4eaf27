#include "hjm/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hjm {

namespace {

constexpr double kConcurrencyTol = 1e-10;
constexpr double kAngleTol = 1e-12;

struct Crossing {
  double angle;
  double key;  // increasing with angle; log tan(angle) when computed from log_u
  int i;
  int j;
};

// Increases with coefficient i of line t.
double coeff_key(const LineFamily& f, int t, int i) {
  if (f.log_u.empty()) return f.coeffs[t][i];
  return f.branch == Branch::positive_rho ? -f.log_u[t][i] : f.log_u[t][i];
}

bool keys_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// log|e^a - e^b|
double log_diff(double a, double b) {
  return std::max(a, b) + std::log(-std::expm1(-std::abs(a - b)));
}

double log_sum(double a, double b) {
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::negative_rho: return "negative_rho";
    case Branch::positive_rho: return "positive_rho";
    case Branch::direct: return "direct";
  }
  return "direct";
}

LineFamily LineFamily::from_coeffs(std::vector<Vec2> coeffs) {
  LineFamily f;
  f.coeffs = std::move(coeffs);
  f.validate();
  return f;
}

void LineFamily::validate() const {
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    require(std::isfinite(coeffs[t][0]) && std::isfinite(coeffs[t][1]) && coeffs[t][0] > 0.0 &&
                coeffs[t][1] > 0.0,
            "line " + std::to_string(t + 1) + " has a non-positive coefficient");
  }
}

bool Spectrum::is_zero() const {
  return std::all_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b == 0; });
}

std::string Spectrum::str() const {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string FormalWord::str() const {
  if (letters.empty()) return "e";
  std::string s;
  for (std::size_t k = 0; k < letters.size(); ++k) {
    if (k) s.push_back(' ');
    s += "s" + std::to_string(letters[k]);
  }
  return s;
}

LineFamily transform_coordinates(double rho, const NormalizedPrices& phat) {
  require(std::isfinite(rho), "rho must be finite");
  if (rho == 0.0 || rho < -1.0) {
    fail(ErrorKind::validation, "rho must lie in [-1,0) or (0,inf)");
  }
  for (const auto& p : phat.phat) {
    require(p[0] > 0.0 && p[1] > 0.0 && std::isfinite(p[0]) && std::isfinite(p[1]),
            "normalized prices must be positive");
  }
  LineFamily f;
  f.rho = rho;
  f.coeffs.resize(phat.size());
  if (rho < 0.0) {
    f.branch = Branch::negative_rho;
    f.log_u.resize(phat.size());
    for (std::size_t t = 0; t < phat.size(); ++t) {
      for (int i = 0; i < 2; ++i) f.log_u[t][i] = -rho * std::log(phat.phat[t][i]);
      for (int i = 0; i < 2; ++i) f.coeffs[t][i] = std::exp(-rho * std::log(phat.phat[t][i]));
      require(std::isfinite(f.coeffs[t][0]) && std::isfinite(f.coeffs[t][1]) &&
                  f.coeffs[t][0] > 0.0 && f.coeffs[t][1] > 0.0,
              "transformed coefficient out of range at t=" + std::to_string(t + 1));
    }
    return f;
  }
  f.branch = Branch::positive_rho;
  double log_m = -std::numeric_limits<double>::infinity();
  for (const auto& p : phat.phat) {
    log_m = std::max({log_m, -rho * std::log(p[0]), -rho * std::log(p[1])});
  }
  f.log_scale = phat.size() ? log_m : 0.0;
  f.epsilon = 0.5 * std::exp(-f.log_scale);
  f.log_u.resize(phat.size());
  for (std::size_t t = 0; t < phat.size(); ++t) {
    for (int i = 0; i < 2; ++i) {
      f.log_u[t][i] = -rho * std::log(phat.phat[t][i]);
      // (1/eps - p^-rho) / M = 2 - p^-rho / M
      f.coeffs[t][i] = 2.0 - std::exp(-rho * std::log(phat.phat[t][i]) - f.log_scale);
    }
  }
  return f;
}

std::vector<int> renumbering(const LineFamily& family, bool strict) {
  const auto& c = family.coeffs;
  std::vector<int> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int u, int v) {
    const double a = coeff_key(family, u, 0), b = coeff_key(family, v, 0);
    if (a != b) return a < b;
    return coeff_key(family, u, 1) < coeff_key(family, v, 1);
  });
  if (strict) {
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (keys_tie(coeff_key(family, order[k - 1], 0), coeff_key(family, order[k], 0))) {
        fail(ErrorKind::validation, "tie in first coefficient between lines " +
                                        std::to_string(order[k - 1] + 1) + " and " +
                                        std::to_string(order[k] + 1));
      }
    }
  }
  return order;
}

std::vector<int> sigma_order(const LineFamily& family) {
  family.validate();
  const auto order = renumbering(family, true);
  std::vector<int> sigma(order.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  std::sort(sigma.begin(), sigma.end(), [&](int u, int v) {
    return coeff_key(family, order[u], 1) < coeff_key(family, order[v], 1);
  });
  for (std::size_t k = 1; k < sigma.size(); ++k) {
    if (keys_tie(coeff_key(family, order[sigma[k - 1]], 1), coeff_key(family, order[sigma[k]], 1))) {
      fail(ErrorKind::validation, "tie in second coefficient between lines " +
                                      std::to_string(order[sigma[k - 1]] + 1) + " and " +
                                      std::to_string(order[sigma[k]] + 1));
    }
  }
  for (auto& s : sigma) s += 1;
  return sigma;
}

namespace {

Spectrum zero_spectrum(std::size_t T) { return Spectrum{std::vector<std::uint8_t>(T, 0)}; }

std::vector<Spectrum> prefix_spectra(const std::vector<int>& perm) {
  std::vector<Spectrum> out;
  Spectrum s = zero_spectrum(perm.size());
  out.push_back(s);
  for (int line : perm) {
    s.bits[line] = 1;
    out.push_back(s);
  }
  return out;
}

}  // namespace

SweepResult sweep(const LineFamily& family) {
  family.validate();
  const auto& c = family.coeffs;
  const int T = static_cast<int>(c.size());
  SweepResult res;
  res.order = renumbering(family, false);

  std::vector<Crossing> events;
  auto concurrent = [](int i, int j, int k) {
    std::ostringstream os;
    os << "concurrent lines (" << i + 1 << "," << j + 1 << "," << k + 1 << ")";
    fail(ErrorKind::degenerate, os.str());
  };
  if (!family.log_u.empty()) {
    // Crossings of u.w = 1 in w = x^-rho; the change of variables keeps
    // directions (z is a positive multiple of w) and maps lines to lines.
    const auto& U = family.log_u;
    for (int i = 0; i < T; ++i) {
      for (int j = i + 1; j < T; ++j) {
        if (!((U[i][0] - U[j][0]) * (U[i][1] - U[j][1]) < 0.0)) continue;
        const double lnum1 = log_diff(U[j][1], U[i][1]);
        const double lnum2 = log_diff(U[i][0], U[j][0]);
        const double ldet = log_diff(U[i][0] + U[j][1], U[j][0] + U[i][1]);
        const double lw1 = lnum1 - ldet, lw2 = lnum2 - ldet;
        for (int k = 0; k < T; ++k) {
          if (k == i || k == j) continue;
          if (std::abs(log_sum(U[k][0] + lw1, U[k][1] + lw2)) < kConcurrencyTol) concurrent(i, j, k);
        }
        const double key = lnum2 - lnum1;
        events.push_back({std::atan(std::exp(key)), key, i, j});
      }
    }
  }
  for (int i = 0; i < T && family.log_u.empty(); ++i) {
    for (int j = i + 1; j < T; ++j) {
      const double da = c[i][0] - c[j][0];
      const double db = c[i][1] - c[j][1];
      if (!(da * db < 0.0)) continue;
      const double det = c[i][0] * c[j][1] - c[j][0] * c[i][1];
      const double z1 = (c[j][1] - c[i][1]) / det;
      const double z2 = (c[i][0] - c[j][0]) / det;
      for (int k = 0; k < T; ++k) {
        if (k == i || k == j) continue;
        if (std::abs(c[k][0] * z1 + c[k][1] * z2 - 1.0) < kConcurrencyTol) concurrent(i, j, k);
      }
      const double angle = std::atan2(z2, z1);
      events.push_back({angle, angle, i, j});
    }
  }
  std::sort(events.begin(), events.end(), [](const Crossing& x, const Crossing& y) {
    if (x.key != y.key) return x.key < y.key;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });

  std::vector<int> perm = res.order;
  std::vector<int> pos(T);
  for (int k = 0; k < T; ++k) pos[perm[k]] = k;
  res.permutations.push_back(perm);
  res.sector_spectra.push_back(prefix_spectra(perm));

  std::size_t g = 0;
  while (g < events.size()) {
    std::size_t h = g + 1;
    while (h < events.size() && events[h].key - events[h - 1].key <= kAngleTol) ++h;
    if (h - g > 1) {
      res.warnings.push_back("equal critical angles (" + std::to_string(h - g) +
                             " crossings at angle " + std::to_string(events[g].angle) +
                             "); processed as an infinitesimal rotation");
    }
    std::vector<Crossing> pending(events.begin() + static_cast<std::ptrdiff_t>(g),
                                  events.begin() + static_cast<std::ptrdiff_t>(h));
    while (!pending.empty()) {
      auto it = std::find_if(pending.begin(), pending.end(), [&](const Crossing& e) {
        return std::abs(pos[e.i] - pos[e.j]) == 1;
      });
      if (it == pending.end()) {
        fail(ErrorKind::numeric, "sweep lost track of line order near angle " +
                                     std::to_string(pending.front().angle));
      }
      const int lo = std::min(pos[it->i], pos[it->j]);
      std::swap(perm[lo], perm[lo + 1]);
      pos[perm[lo]] = lo;
      pos[perm[lo + 1]] = lo + 1;
      res.angles.push_back(it->angle);
      res.word.letters.push_back(lo + 1);
      res.permutations.push_back(perm);
      res.sector_spectra.push_back(prefix_spectra(perm));
      pending.erase(it);
    }
    g = h;
  }
  return res;
}

std::vector<Spectrum> enumerate_spectra(const LineFamily& family) {
  const auto res = sweep(family);
  std::vector<Spectrum> all;
  for (const auto& sec : res.sector_spectra) all.insert(all.end(), sec.begin(), sec.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

bool in_image(const LineFamily& family, Vec2 z) {
  if (!(z[0] > 0.0 && z[1] > 0.0)) return false;
  if (family.branch == Branch::positive_rho) return z[0] + z[1] > 0.5;
  return true;
}

Vec2 z_to_x(const LineFamily& family, Vec2 z) {
  require(in_image(family, z), "point outside the image of the change of variables");
  Vec2 x{};
  switch (family.branch) {
    case Branch::negative_rho:
      for (int i = 0; i < 2; ++i) x[i] = std::exp(-std::log(z[i]) / family.rho);
      break;
    case Branch::positive_rho: {
      const double zs = z[0] + z[1] - 0.5;
      for (int i = 0; i < 2; ++i) {
        const double log_w = std::log(0.5 * z[i] / zs) - family.log_scale;
        x[i] = std::exp(-log_w / family.rho);
      }
      break;
    }
    case Branch::direct:
      fail(ErrorKind::validation, "family has no associated change of variables");
  }
  require(std::isfinite(x[0]) && std::isfinite(x[1]) && x[0] > 0.0 && x[1] > 0.0,
          "inverse change of variables out of range");
  return x;
}

Vec2 x_to_z(const LineFamily& family, Vec2 x) {
  require(x[0] > 0.0 && x[1] > 0.0, "x must lie in the open quadrant");
  Vec2 z{};
  switch (family.branch) {
    case Branch::negative_rho:
      for (int i = 0; i < 2; ++i) z[i] = std::exp(-family.rho * std::log(x[i]));
      return z;
    case Branch::positive_rho: {
      // w = x^-rho;  z' = M w (2 Z' - 1) with Z' = M W / (2 M W - 1).
      const double l0 = -family.rho * std::log(x[0]) + family.log_scale;
      const double l1 = -family.rho * std::log(x[1]) + family.log_scale;
      const double mw = std::exp(l0) + std::exp(l1);
      if (!(2.0 * mw > 1.0)) {
        fail(ErrorKind::validation, "technology point outside the transformed region");
      }
      const double zs = mw / (2.0 * mw - 1.0);
      const double k = 2.0 * zs - 1.0;
      z[0] = std::exp(l0) * k;
      z[1] = std::exp(l1) * k;
      return z;
    }
    case Branch::direct:
      break;
  }
  fail(ErrorKind::validation, "family has no associated change of variables");
}

}  // namespace hjm
