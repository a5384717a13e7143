#pragma once

#include "orthant/errors.hpp"

#include <cmath>
#include <limits>

namespace orthant {
namespace special {

//! Natural log of the gamma function.
inline double log_gamma(double x)
{
  return std::lgamma(x);
}

//! Digamma function psi(x) = d/dx log Gamma(x), x > 0.
//!
//! Recurrence pushes the argument above 10, then the asymptotic
//! expansion with Bernoulli coefficients is applied.
inline double digamma(double x)
{
  if (!(x > 0.0))
    throw DomainError("digamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_2/2, B_4/4, ... over x^{2k}
  const double series = inv2 * (1.0 / 12.0 -
                        inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                        inv2 * (1.0 / 240.0 -
                        inv2 * (1.0 / 132.0 -
                        inv2 * (691.0 / 32760.0 -
                        inv2 * (1.0 / 12.0)))))));
  return result + std::log(x) - 0.5 * inv - series;
}

//! Trigamma function psi'(x), x > 0.
inline double trigamma(double x)
{
  if (!(x > 0.0))
    throw DomainError("trigamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series = 1.0 + inv * (0.5 +
                        inv * (1.0 / 6.0 -
                        inv2 * (1.0 / 30.0 -
                        inv2 * (1.0 / 42.0 -
                        inv2 * (1.0 / 30.0)))));
  return result + inv * series;
}

namespace detail {

//! Lower incomplete gamma by power series, x < a + 1.
inline double gamma_p_series(double a, double x)
{
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw NumericalError("incomplete gamma series did not converge");
}

//! Upper incomplete gamma by Lentz continued fraction, x >= a + 1.
inline double gamma_q_contfrac(double a, double x)
{
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      return frac * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw NumericalError("incomplete gamma continued fraction did not converge");
}

} // namespace detail

//! Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x)
{
  if (!(a > 0.0) || x < 0.0)
    throw DomainError("gamma_p requires a > 0, x >= 0");
  if (x == 0.0)
    return 0.0;
  if (x < a + 1.0)
    return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

//! Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x)
{
  if (!(a > 0.0) || x < 0.0)
    throw DomainError("gamma_q requires a > 0, x >= 0");
  if (x == 0.0)
    return 1.0;
  if (x < a + 1.0)
    return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_contfrac(a, x);
}

//! Error function, forwarded to the standard library.
inline double erf(double x)
{
  return std::erf(x);
}

} // namespace special
} // namespace orthant
