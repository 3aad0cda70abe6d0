#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/oracle.hpp"

#include <cmath>
#include <numbers>

using namespace inertia;

TEST_CASE("dawson reference values") {
  // high-precision values of exp(-x^2) int_0^x exp(t^2) dt
  struct Ref {
    Scalar x, d;
  };
  const Ref refs[] = {
      {0.1, 0.0993359923978529},  {0.5, 0.424436383502022},  {1.0, 0.538079506912768},
      {2.0, 0.301340388923792},   {4.0, 0.129348001236005},  {6.0, 0.0845426889745439},
      {7.9, 0.063810903219845},   {8.0, 0.0630001987075534}, {8.5, 0.0592393717799721},
      {12.0, 0.0418128764539883}, {25.0, 0.0200160385544664}};
  for (const Ref& r : refs) {
    CHECK(std::abs(dawson(r.x) - r.d) < 1e-12);
    CHECK(std::abs(dawson(-r.x) + r.d) < 1e-12);  // odd function
  }
  CHECK(dawson(0.0) == 0.0);
}

TEST_CASE("adaptive quadrature on known integrals") {
  CHECK(integrate_adaptive([](Scalar t) { return std::sin(t); }, 0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate_adaptive([](Scalar t) { return std::exp(-t * t); }, -8, 8) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  // narrow spike, forces recursion
  CHECK(integrate_adaptive([](Scalar t) { return 1.0 / (1e-4 + t * t); }, -1, 1) ==
        doctest::Approx(2.0 / 1e-2 * std::atan(1.0 / 1e-2)).epsilon(1e-8));
}

TEST_CASE("analytic escape time frozen reference values") {
  // computed independently with high-precision quadrature of the
  // mean-first-passage boundary value problem
  struct Ref {
    Scalar x, sigma, tau;
  };
  const Ref refs[] = {{0.5, 0.3, 0.79539148332806},   {0.0, 0.4, 1.8508192197387},
                      {0.1, 0.25, 2.1997803649097},   {0.8, 0.5, 0.27846499799028},
                      {-0.2, 0.7, 1.0890115980572},   {0.1, 0.04, 2.3494111368548},
                      {0.05, 0.02, 3.0428587686802},  {0.0, 0.1, 3.281821034992},
                      {0.9, 0.05, 0.10550773919164},  {1e-4, 0.04, 4.2002241066065}};
  // the asymptotic tail of the integrand is truncated after three terms,
  // which bounds the overall error near 1e-6 for small sigma
  for (const Ref& r : refs)
    CHECK(analytic_escape_time(r.x, r.sigma) == doctest::Approx(r.tau).epsilon(1e-5));
}

TEST_CASE("analytic escape time is symmetric in x") {
  for (Scalar sigma : {0.05, 0.2, 0.6}) {
    for (Scalar x : {0.1, 0.35, 0.8, 0.97}) {
      Scalar plus = analytic_escape_time(x, sigma);
      Scalar minus = analytic_escape_time(-x, sigma);
      CHECK(std::abs(plus - minus) < 1e-6 * std::max<Scalar>(1, plus));
    }
  }
}

TEST_CASE("analytic escape time small-noise limit is the deterministic time") {
  // x e^t reaches 1 at t = ln(1/x)
  CHECK(analytic_escape_time(0.1, 1e-3) == doctest::Approx(std::log(10.0)).epsilon(1e-3));
  CHECK(analytic_escape_time(0.5, 1e-3) == doctest::Approx(std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("analytic escape time is positive and decays for large noise") {
  for (Scalar x : {-0.7, 0.0, 0.3}) {
    Scalar prev = -1;
    bool past_peak = false;
    for (Scalar sigma = 0.02; sigma < 3.0; sigma *= 1.4) {
      Scalar tau = analytic_escape_time(x, sigma);
      CHECK(tau > 0);
      if (prev > 0 && tau < prev) past_peak = true;
      if (past_peak) CHECK(tau < prev);  // monotone decay beyond the peak
      prev = tau;
    }
    CHECK(past_peak);
  }
}

TEST_CASE("agreement with brute-force nested quadrature of the raw double integral") {
  // Oracle-of-the-oracle: the expected escape time solves
  //   tau(x) = -(2/s^2) int_{-1}^{x} e^{-w^2/s^2} int_{0}^{w} e^{z^2/s^2} dz dw
  //          + K int_{-1}^{x} e^{-w^2/s^2} dw
  // with K fixed by tau(1) = 0. Evaluated here with plain Simpson panels,
  // no Dawson function and no change of variables. Restricted to sigma
  // where exp(1/sigma^2) stays in double range.
  auto simpson = [](auto&& f, Scalar a, Scalar b, int n) {
    if (n % 2) ++n;
    Scalar h = (b - a) / n;
    Scalar sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
  };
  auto tau_brute = [&](Scalar x, Scalar s) {
    auto inner = [&](Scalar w) {
      return simpson([&](Scalar z) { return std::exp((z * z) / (s * s)); }, 0.0, w, 400);
    };
    auto weight = [&](Scalar w) { return std::exp(-(w * w) / (s * s)); };
    auto combined = [&](Scalar w) { return weight(w) * inner(w); };
    Scalar a = simpson(weight, -1.0, 1.0, 800);
    Scalar bsum = simpson(combined, -1.0, 1.0, 800);
    Scalar K = (2.0 / (s * s)) * bsum / a;
    return K * simpson(weight, -1.0, x, 800) -
           (2.0 / (s * s)) * simpson(combined, -1.0, x, 800);
  };
  for (Scalar sigma : {0.3, 0.5, 0.8, 1.2}) {
    for (Scalar x : {-0.9, -0.5, 0.0, 0.4, 0.8}) {
      Scalar fast = analytic_escape_time(x, sigma);
      Scalar brute = tau_brute(x, sigma);
      CHECK(fast == doctest::Approx(brute).epsilon(1e-4));
    }
  }
}

TEST_CASE("analytic_lifetime basics") {
  CHECK(analytic_lifetime(0.3, {0.5}) ==
        doctest::Approx(analytic_escape_time(0.5, 0.3)).epsilon(1e-12));
  Scalar single = analytic_lifetime(0.2, {0.1, 0.4});
  Scalar doubled = analytic_lifetime(0.2, {0.1, 0.4, 0.1, 0.4});
  CHECK(single == doctest::Approx(doubled).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_lifetime(0.2, {}), ConfigError);
  CHECK_THROWS_AS(analytic_escape_time(1.0, 0.2), ConfigError);
  CHECK_THROWS_AS(analytic_escape_time(0.2, 0.0), ConfigError);
}
