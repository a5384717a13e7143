#include <orthant/special.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Approx;
namespace sp = orthant::special;

TEST_CASE("log_gamma matches reference values")
{
  CHECK(sp::log_gamma(1.0) == Approx(0.0).margin(1e-14));
  CHECK(sp::log_gamma(2.0) == Approx(0.0).margin(1e-14));
  CHECK(sp::log_gamma(0.5) == Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
  CHECK(sp::log_gamma(3.5) == Approx(std::lgamma(3.5)).epsilon(1e-13));
  CHECK(sp::log_gamma(10.0) == Approx(std::lgamma(10.0)).epsilon(1e-13));
  CHECK(sp::log_gamma(123.456) == Approx(std::lgamma(123.456)).epsilon(1e-13));
  CHECK(sp::log_gamma(1e-4) == Approx(std::lgamma(1e-4)).epsilon(1e-12));
}

TEST_CASE("digamma matches reference values and recurrence")
{
  CHECK(sp::digamma(1.0) == Approx(-0.57721566490153286).epsilon(1e-12));
  CHECK(sp::digamma(0.5) == Approx(-1.9635100260214235).epsilon(1e-12));
  CHECK(sp::digamma(10.0) == Approx(2.2517525890667211).epsilon(1e-12));
  for (double x : { 0.3, 1.7, 5.5, 42.0 })
    CHECK(sp::digamma(x + 1.0) == Approx(sp::digamma(x) + 1.0 / x).epsilon(1e-12));
}

TEST_CASE("trigamma matches reference values and recurrence")
{
  CHECK(sp::trigamma(1.0) == Approx(M_PI * M_PI / 6.0).epsilon(1e-11));
  CHECK(sp::trigamma(0.5) == Approx(M_PI * M_PI / 2.0).epsilon(1e-11));
  for (double x : { 0.4, 2.2, 8.0, 60.0 })
    CHECK(sp::trigamma(x + 1.0) ==
          Approx(sp::trigamma(x) - 1.0 / (x * x)).epsilon(1e-10));
}

TEST_CASE("regularized incomplete gamma functions")
{
  for (double x : { 0.1, 0.7, 2.0, 9.0 })
    CHECK(sp::gamma_p(1.0, x) == Approx(-std::expm1(-x)).epsilon(1e-12));
  for (double a : { 0.5, 2.5, 12.0 })
    for (double x : { 0.2, 1.0, 6.0, 30.0 })
      CHECK(sp::gamma_p(a, x) + sp::gamma_q(a, x) == Approx(1.0).epsilon(1e-12));
  CHECK(sp::gamma_p(0.5, 1.0) == Approx(std::erf(1.0)).epsilon(1e-12));
}

TEST_CASE("erf agrees with the standard library")
{
  for (double x : { -2.0, -0.3, 0.0, 0.5, 1.0, 3.0 })
    CHECK(sp::erf(x) == Approx(std::erf(x)).margin(1e-12));
}
