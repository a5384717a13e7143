#include <orthant/kernels.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using Catch::Approx;
using namespace orthant;

namespace {

const std::vector<KernelFamily> continuous_families = {
  KernelFamily::make(KernelTag::Gamma),
  KernelFamily::make(KernelTag::LogNormal2),
  KernelFamily::make(KernelTag::Weibull),
  KernelFamily::make(KernelTag::BirnbaumSaunders),
  KernelFamily::make(KernelTag::InverseGamma),
  KernelFamily::make(KernelTag::ReciprocalInverseGaussian),
  KernelFamily::make(KernelTag::InverseGaussian),
  KernelFamily::make(KernelTag::LogNormal1),
};

const std::vector<KernelFamily> count_families = {
  KernelFamily::dirdu(11),
  KernelFamily::triangular(3),
  KernelFamily::make(KernelTag::Binomial),
  KernelFamily::make(KernelTag::Poisson),
};

//! Run check(family, x, h) over the grid, skipping (x,h) outside the
//! family's admissible range; returns the number of valid points.
template<typename Check>
int over_grid(const KernelFamily& family,
              const std::vector<double>& xs,
              const std::vector<double>& hs,
              const Check& check)
{
  int valid = 0;
  for (double x : xs)
    for (double h : hs) {
      try {
        moments(family, x, h);
      } catch (const DomainError&) {
        continue;
      }
      check(family, x, h);
      ++valid;
    }
  return valid;
}

const std::vector<double> xs_cont = { 0.1, 0.3, 1.0, 2.3, 5.0 };
const std::vector<double> hs_cont = { 0.05, 0.1, 0.4 };
const std::vector<double> xs_count = { 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10 };
const std::vector<double> hs_count = { 0.1, 0.5, 1.0 };

} // namespace

TEST_CASE("every kernel normalizes to one on the test grid")
{
  for (const KernelFamily& family : continuous_families) {
    const int valid = over_grid(family, xs_cont, hs_cont,
                                [](const KernelFamily& f, double x, double h) {
                                  INFO("family " << static_cast<int>(f.tag)
                                                 << " x=" << x << " h=" << h);
                                  CHECK(numeric_mass(f, x, h) ==
                                        Approx(1.0).margin(1e-8));
                                });
    CHECK(valid > 0);
  }
  for (const KernelFamily& family : count_families) {
    const int valid = over_grid(family, xs_count, hs_count,
                                [](const KernelFamily& f, double x, double h) {
                                  INFO("family " << static_cast<int>(f.tag)
                                                 << " x=" << x << " h=" << h);
                                  CHECK(numeric_mass(f, x, h) ==
                                        Approx(1.0).margin(1e-8));
                                });
    CHECK(valid > 0);
  }
}

TEST_CASE("closed-form moments match numeric moments on the test grid")
{
  auto check = [](const KernelFamily& f, double x, double h) {
    INFO("family " << static_cast<int>(f.tag) << " x=" << x << " h=" << h);
    const KernelMoments closed = moments(f, x, h);
    const KernelMoments numeric = numeric_moments(f, x, h);
    const double scale_a = std::max(std::abs(closed.a), std::abs(x) + h);
    const double scale_b = std::max(std::abs(closed.b), (std::abs(x) + h) * h);
    CHECK(std::abs(closed.a - numeric.a) <= 1e-6 * scale_a);
    CHECK(std::abs(closed.b - numeric.b) <= 1e-6 * scale_b);
  };
  for (const KernelFamily& family : continuous_families)
    CHECK(over_grid(family, xs_cont, hs_cont, check) > 0);
  for (const KernelFamily& family : count_families)
    CHECK(over_grid(family, xs_count, hs_count, check) > 0);
}

TEST_CASE("second-order kernels concentrate as the bandwidth vanishes")
{
  for (const KernelFamily& family : continuous_families) {
    const double x = 2.3;
    const KernelMoments coarse = moments(family, x, 0.05);
    const KernelMoments fine = moments(family, x, 0.005);
    CHECK(std::abs(fine.a) <= std::abs(coarse.a) + 1e-12);
    CHECK(fine.b < coarse.b);
    CHECK(family.consistency_order() == ConsistencyOrder::Second);
  }
}

TEST_CASE("first-order kernels keep a dispersion limit")
{
  const double x = 3.0;
  const KernelMoments binom = moments(KernelFamily::make(KernelTag::Binomial), x, 1e-9);
  CHECK(binom.b == Approx(x / (x + 1.0)).epsilon(1e-6));
  const KernelMoments pois = moments(KernelFamily::make(KernelTag::Poisson), x, 1e-9);
  CHECK(pois.b == Approx(x).epsilon(1e-6));
  CHECK(KernelFamily::make(KernelTag::Poisson).consistency_order() ==
        ConsistencyOrder::First);
}

TEST_CASE("gamma kernel at the boundary is exponential")
{
  const KernelFamily gamma = KernelFamily::make(KernelTag::Gamma);
  const double h = 0.7;
  for (double u : { 0.0, 0.5, 2.0 })
    CHECK(density(gamma, 0.0, h, u) == Approx(std::exp(-u / h) / h).epsilon(1e-13));
}

TEST_CASE("discrete uniform perturbation kernel collapses to a Dirac at h = 0")
{
  const KernelFamily f = KernelFamily::dirdu(5);
  CHECK(density(f, 2.0, 0.0, 2.0) == 1.0);
  CHECK(density(f, 2.0, 0.0, 3.0) == 0.0);
  // h > 0 spreads mass uniformly over the other categories
  CHECK(density(f, 2.0, 0.4, 2.0) == Approx(0.6));
  CHECK(density(f, 2.0, 0.4, 0.0) == Approx(0.1));
}

TEST_CASE("densities vanish outside the support")
{
  CHECK(density(KernelFamily::make(KernelTag::Gamma), 1.0, 0.1, -0.5) == 0.0);
  CHECK(density(KernelFamily::make(KernelTag::LogNormal2), 1.0, 0.1, 0.0) == 0.0);
  CHECK(density(KernelFamily::make(KernelTag::Binomial), 2.0, 0.5, 4.0) == 0.0);
  CHECK(density(KernelFamily::make(KernelTag::Binomial), 2.0, 0.5, 2.5) == 0.0);
  CHECK(density(KernelFamily::triangular(2), 5.0, 0.5, 8.0) == 0.0);
  CHECK(density(KernelFamily::dirdu(3), 1.0, 0.5, 3.0) == 0.0);
}

TEST_CASE("target validation enforces per-family constraints")
{
  CHECK_THROWS_AS(density(KernelFamily::make(KernelTag::Gamma), 1.0, 0.0, 1.0),
                  DomainError);
  CHECK_THROWS_AS(density(KernelFamily::make(KernelTag::Binomial), 1.0, 1.5, 1.0),
                  DomainError);
  CHECK_THROWS_AS(density(KernelFamily::dirdu(3), 3.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(
    density(KernelFamily::make(KernelTag::ReciprocalInverseGaussian), 0.1, 0.2, 1.0),
    DomainError);
  CHECK_THROWS_AS(density(KernelFamily::make(KernelTag::InverseGamma), 5.0, 0.4, 1.0),
                  DomainError);
  CHECK_THROWS_AS(KernelFamily::dirdu(1), DomainError);
  CHECK_THROWS_AS(KernelFamily::triangular(-1), DomainError);
  // inverse gamma moments have stricter existence conditions than the density
  const KernelFamily ig = KernelFamily::make(KernelTag::InverseGamma);
  CHECK_NOTHROW(density(ig, 2.3, 0.4, 1.0));
  CHECK_THROWS_AS(moments(ig, 2.3, 0.4), DomainError);
}

TEST_CASE("product kernel multiplies the univariate factors")
{
  const std::vector<KernelFamily> families = {
    KernelFamily::make(KernelTag::Gamma), KernelFamily::make(KernelTag::LogNormal2)
  };
  Eigen::VectorXd x(2), h(2), u(2);
  x << 1.0, 2.0;
  h << 0.2, 0.1;
  u << 1.3, 1.7;
  const double expected =
    density(families[0], 1.0, 0.2, 1.3) * density(families[1], 2.0, 0.1, 1.7);
  CHECK(product_density(x, h, families, u) == Approx(expected).epsilon(1e-13));
  CHECK(log_product_density(x, h, families, u) ==
        Approx(std::log(expected)).epsilon(1e-12));
  u[0] = -1.0;
  CHECK(product_density(x, h, families, u) == 0.0);
  Eigen::VectorXd bad(3);
  bad.setOnes();
  CHECK_THROWS_AS(product_density(x, h, families, bad), DomainError);
}
