#include "inertia/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace inertia {

namespace {

// Maclaurin series for small arguments.
Scalar dawson_series(Scalar x) {
  Scalar x2 = x * x;
  Scalar term = x;
  Scalar sum = x;
  for (int n = 1; n < 30; ++n) {
    term *= -2.0 * x2 / (2 * n + 1);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Sampling-theorem evaluation (Rybicki): D(x) as a Gaussian-weighted sum
// over odd lattice offsets. With H = 0.25 and 12 terms both the lattice
// truncation and the aliasing error are far below 1e-12.
Scalar dawson_rybicki(Scalar x) {
  constexpr Scalar H = 0.25;
  constexpr int NMAX = 12;
  static const std::array<Scalar, NMAX> coeff = [] {
    std::array<Scalar, NMAX> c{};
    for (int i = 0; i < NMAX; ++i) {
      Scalar arg = (2.0 * i + 1.0) * H;
      c[static_cast<std::size_t>(i)] = std::exp(-arg * arg);
    }
    return c;
  }();

  Scalar ax = std::abs(x);
  int n0 = 2 * static_cast<int>(0.5 * ax / H + 0.5);  // nearest even multiple
  Scalar xp = ax - n0 * H;
  Scalar e1 = std::exp(2.0 * xp * H);
  Scalar e2 = e1 * e1;
  Scalar d1 = n0 + 1;
  Scalar d2 = d1 - 2.0;
  Scalar sum = 0;
  Scalar e1_pow = e1;
  for (int i = 0; i < NMAX; ++i, d1 += 2.0, d2 -= 2.0, e1_pow *= e2)
    sum += coeff[static_cast<std::size_t>(i)] * (e1_pow / d1 + 1.0 / (d2 * e1_pow));
  const Scalar inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi_v<Scalar>);
  Scalar result = inv_sqrt_pi * std::exp(-xp * xp) * sum;
  return x < 0 ? -result : result;
}

constexpr Scalar kTailSplit = 8.0;  // |u| above which the asymptotic tail is used

// g(u) = -2 D(u); tail uses the three-term asymptotic series of D.
Scalar escape_integrand(Scalar u) {
  if (std::abs(u) <= kTailSplit) return -2.0 * dawson(u);
  Scalar inv = 1.0 / u;
  Scalar inv2 = inv * inv;
  return -(inv + 0.5 * inv * inv2 + 0.75 * inv * inv2 * inv2);
}

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
constexpr std::array<Scalar, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr std::array<Scalar, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr std::array<Scalar, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  Scalar integral;
  Scalar error;
};

PanelResult gauss_kronrod(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b) {
  const Scalar center = 0.5 * (a + b);
  const Scalar half = 0.5 * (b - a);
  Scalar kronrod = 0, gauss = 0;
  for (int i = 0; i < 8; ++i) {
    Scalar node = kKronrodNodes[static_cast<std::size_t>(i)];
    Scalar fv;
    if (i == 7) {
      fv = f(center);
      kronrod += kKronrodWeights[7] * fv;
      gauss += kGaussWeights[3] * fv;
    } else {
      Scalar f1 = f(center - half * node);
      Scalar f2 = f(center + half * node);
      kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * (f1 + f2);
      if (i % 2 == 1)  // odd Kronrod indices carry the Gauss nodes
        gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * (f1 + f2);
    }
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

Scalar adaptive_panel(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                      Scalar abs_tol, int depth, int max_depth) {
  PanelResult r = gauss_kronrod(f, a, b);
  if (r.error <= abs_tol || depth >= max_depth) {
    if (depth >= max_depth && r.error > abs_tol) {
      std::ostringstream msg;
      msg << "integrate_adaptive: bisection depth exhausted, panel error " << r.error;
      throw NumericalError(msg.str());
    }
    return r.integral;
  }
  Scalar mid = 0.5 * (a + b);
  return adaptive_panel(f, a, mid, abs_tol / 2, depth + 1, max_depth) +
         adaptive_panel(f, mid, b, abs_tol / 2, depth + 1, max_depth);
}

}  // namespace

Scalar dawson(Scalar x) {
  if (std::abs(x) < 0.2) return dawson_series(x);
  return dawson_rybicki(x);
}

Scalar integrate_adaptive(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                          Scalar abs_tol, int max_depth) {
  if (a == b) return 0;
  if (a > b) return -integrate_adaptive(f, b, a, abs_tol, max_depth);
  return adaptive_panel(f, a, b, abs_tol, 0, max_depth);
}

Scalar analytic_escape_time(Scalar x, Scalar sigma) {
  if (!(std::abs(x) < 1)) throw ConfigError("analytic_escape_time: require |x| < 1");
  if (!(sigma > 0)) throw ConfigError("analytic_escape_time: require sigma > 0");

  const Scalar u1 = -1.0 / sigma;
  const Scalar u2 = x / sigma;

  // split at the tail boundaries and at 0 so each panel is smooth
  std::vector<Scalar> cuts = {u1};
  for (Scalar c : {-kTailSplit, 0.0, kTailSplit})
    if (c > u1 && c < u2) cuts.push_back(c);
  cuts.push_back(u2);

  Scalar total = 0;
  Scalar tol_per_panel = 1e-8 / static_cast<Scalar>(cuts.size() - 1);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
    total += integrate_adaptive(escape_integrand, cuts[s], cuts[s + 1], tol_per_panel);
  return total;
}

Scalar analytic_lifetime(Scalar sigma, const std::vector<Scalar>& samples) {
  if (samples.empty()) throw ConfigError("analytic_lifetime: empty sample list");
  Scalar sum = 0;
  for (Scalar x : samples) sum += analytic_escape_time(x, sigma);
  return sum / static_cast<Scalar>(samples.size());
}

}  // namespace inertia
