#pragma once

#include "inertia/types.hpp"

#include <functional>
#include <vector>

namespace inertia {

// Dawson integral D(x) = exp(-x^2) int_0^x exp(t^2) dt, absolute error
// below 1e-12 on the real line.
Scalar dawson(Scalar x);

// Adaptive Gauss-Kronrod (G7,K15) quadrature with interval bisection.
Scalar integrate_adaptive(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                          Scalar abs_tol = 1e-8, int max_depth = 50);

// Closed-form expected escape time from (-1, 1) for the unstable scalar
// system dx = x dt + sigma dW started at x:
//   E[tau] = int_{u1}^{u2} g(u) du,  g(u) = -sqrt(pi) e^{-u^2} erfi(u) = -2 D(u),
//   u1 = -1/sigma, u2 = x/sigma.
// The integrand is evaluated through the Dawson function for |u| <= U
// and through its asymptotic series beyond, with U = 8.
Scalar analytic_escape_time(Scalar x, Scalar sigma);

// Mean of analytic_escape_time over reinsertion positions.
Scalar analytic_lifetime(Scalar sigma, const std::vector<Scalar>& samples);

}  // namespace inertia
