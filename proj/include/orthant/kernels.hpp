#pragma once

#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"
#include "orthant/quadrature.hpp"
#include "orthant/special.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace orthant {

enum class KernelTag
{
  DirDU,
  SymCountTriangular,
  Binomial,
  Poisson,
  Gamma,
  LogNormal2,
  Weibull,
  BirnbaumSaunders,
  InverseGamma,
  ReciprocalInverseGaussian,
  InverseGaussian,
  LogNormal1
};

enum class ConsistencyOrder
{
  First,
  Second
};

//! A univariate associated kernel family; c is the category count for
//! DirDU, m the arm length for the symmetric count triangular kernel.
struct KernelFamily
{
  KernelTag tag = KernelTag::Gamma;
  int c = 2;
  int m = 1;

  static KernelFamily dirdu(int categories)
  {
    if (categories < 2)
      throw DomainError("DirDU kernel requires c >= 2 categories");
    return KernelFamily{ KernelTag::DirDU, categories, 0 };
  }

  static KernelFamily triangular(int arm)
  {
    if (arm < 0)
      throw DomainError("triangular kernel requires arm m >= 0");
    return KernelFamily{ KernelTag::SymCountTriangular, 2, arm };
  }

  static KernelFamily make(KernelTag t) { return KernelFamily{ t, 2, 1 }; }

  SupportKind support_kind() const
  {
    switch (tag) {
      case KernelTag::DirDU:
      case KernelTag::SymCountTriangular:
      case KernelTag::Binomial:
      case KernelTag::Poisson:
        return SupportKind::Count;
      default:
        return SupportKind::Continuous;
    }
  }

  //! First-order kernels keep a nonzero dispersion limit as h -> 0.
  ConsistencyOrder consistency_order() const
  {
    return (tag == KernelTag::Binomial || tag == KernelTag::Poisson)
             ? ConsistencyOrder::First
             : ConsistencyOrder::Second;
  }

  //! Growth rate r of the squared kernel norm in (det H)^{-r}.
  double squared_norm_rate() const
  {
    return support_kind() == SupportKind::Continuous ? 0.5 : 1.0;
  }
};

struct KernelMoments
{
  double a = 0.0; //!< mean shift A(x,h)
  double b = 0.0; //!< dispersion B(x,h)
};

namespace detail {

inline void check_target(const KernelFamily& family, double x, double h)
{
  switch (family.tag) {
    case KernelTag::DirDU:
      if (x != std::floor(x) || x < 0.0 || x > family.c - 1)
        throw DomainError("DirDU target must be an integer in [0, c-1]");
      if (h < 0.0 || h > 1.0)
        throw DomainError("DirDU bandwidth must lie in [0, 1]");
      return;
    case KernelTag::SymCountTriangular:
      if (x != std::floor(x) || x < 0.0)
        throw DomainError("triangular target must be a nonnegative integer");
      if (!(h > 0.0))
        throw DomainError("triangular bandwidth must be positive");
      return;
    case KernelTag::Binomial:
      if (x != std::floor(x) || x < 0.0)
        throw DomainError("binomial target must be a nonnegative integer");
      if (!(h > 0.0) || h > 1.0)
        throw DomainError("binomial bandwidth must lie in (0, 1]");
      return;
    case KernelTag::Poisson:
      if (x != std::floor(x) || x < 0.0)
        throw DomainError("Poisson target must be a nonnegative integer");
      if (!(h > 0.0))
        throw DomainError("Poisson bandwidth must be positive");
      return;
    case KernelTag::Gamma:
      if (x < 0.0 || !(h > 0.0))
        throw DomainError("gamma kernel requires x >= 0 and h > 0");
      return;
    case KernelTag::ReciprocalInverseGaussian:
      if (!(x > h) || !(h > 0.0))
        throw DomainError("reciprocal inverse Gaussian kernel requires x > h > 0");
      return;
    case KernelTag::InverseGamma:
      if (!(x > 0.0) || !(h > 0.0) || !(x * h < 1.0))
        throw DomainError("inverse gamma kernel requires x > 0, h > 0, xh < 1");
      return;
    default:
      if (!(x > 0.0) || !(h > 0.0))
        throw DomainError("kernel requires x > 0 and h > 0");
      return;
  }
}

//! Triangular kernel masses over the support clipped to the nonnegative
//! integers, renormalized; index 0 of the result corresponds to u = lo.
inline std::vector<double> triangular_masses(int m, double h, int x, int& lo)
{
  lo = std::max(0, x - m);
  const int hi = x + m;
  std::vector<double> mass(static_cast<std::size_t>(hi - lo + 1));
  double total = 0.0;
  for (int u = lo; u <= hi; ++u) {
    const double w =
      std::pow(m + 1.0, h) - std::pow(static_cast<double>(std::abs(u - x)), h);
    mass[static_cast<std::size_t>(u - lo)] = w;
    total += w;
  }
  for (double& w : mass)
    w /= total;
  return mass;
}

} // namespace detail

//! Log of the kernel pdmf at u; -inf outside the support.
inline double log_density(const KernelFamily& family, double x, double h, double u)
{
  detail::check_target(family, x, h);
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  switch (family.tag) {
    case KernelTag::DirDU: {
      if (u != std::floor(u) || u < 0.0 || u > family.c - 1)
        return neg_inf;
      if (h == 0.0)
        return u == x ? 0.0 : neg_inf;
      return u == x ? std::log1p(-h) : std::log(h / (family.c - 1));
    }
    case KernelTag::SymCountTriangular: {
      if (u != std::floor(u) || u < 0.0 || std::abs(u - x) > family.m)
        return neg_inf;
      int lo = 0;
      const std::vector<double> mass =
        detail::triangular_masses(family.m, h, static_cast<int>(x), lo);
      return std::log(mass[static_cast<std::size_t>(static_cast<int>(u) - lo)]);
    }
    case KernelTag::Binomial: {
      if (u != std::floor(u) || u < 0.0 || u > x + 1)
        return neg_inf;
      const double nn = x + 1.0;
      const double p = (x + h) / nn;
      const double lchoose = special::log_gamma(nn + 1.0) -
                             special::log_gamma(u + 1.0) -
                             special::log_gamma(nn - u + 1.0);
      const double lp = u == 0.0 ? 0.0 : u * std::log(p);
      const double lq = u == nn ? 0.0 : (nn - u) * std::log1p(-p);
      return lchoose + lp + lq;
    }
    case KernelTag::Poisson: {
      if (u != std::floor(u) || u < 0.0)
        return neg_inf;
      const double lambda = x + h;
      return u * std::log(lambda) - lambda - special::log_gamma(u + 1.0);
    }
    case KernelTag::Gamma: {
      if (u < 0.0)
        return neg_inf;
      const double shape = 1.0 + x / h;
      if (u == 0.0)
        return shape == 1.0 ? -std::log(h) : neg_inf;
      return (shape - 1.0) * std::log(u) - u / h - shape * std::log(h) -
             special::log_gamma(shape);
    }
    case KernelTag::LogNormal2: {
      if (u <= 0.0)
        return neg_inf;
      const double mu = std::log(x) + h * h;
      const double z = (std::log(u) - mu) / h;
      return -0.5 * z * z - std::log(u * h) - 0.5 * std::log(2.0 * M_PI);
    }
    case KernelTag::Weibull: {
      if (u < 0.0)
        return neg_inf;
      const double shape = 1.0 / h;
      const double scale = x / std::exp(special::log_gamma(1.0 + h));
      if (u == 0.0)
        return shape == 1.0 ? -std::log(scale) : neg_inf;
      const double t = u / scale;
      return std::log(shape / scale) + (shape - 1.0) * std::log(t) -
             std::pow(t, shape);
    }
    case KernelTag::BirnbaumSaunders: {
      if (u <= 0.0)
        return neg_inf;
      const double a = std::sqrt(h);
      const double r = std::sqrt(u / x);
      const double z = (r - 1.0 / r) / a;
      return std::log((r + 1.0 / r) / (2.0 * a * u)) - 0.5 * z * z -
             0.5 * std::log(2.0 * M_PI);
    }
    case KernelTag::InverseGamma: {
      if (u <= 0.0)
        return neg_inf;
      const double shape = 1.0 / (x * h) - 1.0;
      const double scale = 1.0 / h;
      return shape * std::log(scale) - special::log_gamma(shape) -
             (shape + 1.0) * std::log(u) - scale / u;
    }
    case KernelTag::ReciprocalInverseGaussian: {
      if (u <= 0.0)
        return neg_inf;
      const double t = x - h;
      const double diff = u - t;
      return -0.5 * std::log(2.0 * M_PI * u * h) - diff * diff / (2.0 * h * u);
    }
    case KernelTag::InverseGaussian: {
      if (u <= 0.0)
        return neg_inf;
      const double diff = u - x;
      return -0.5 * std::log(2.0 * M_PI * h * u * u * u) -
             diff * diff / (2.0 * h * x * x * u);
    }
    case KernelTag::LogNormal1: {
      if (u <= 0.0)
        return neg_inf;
      const double s2 = 4.0 * std::log1p(h);
      const double z = std::log(u) - std::log(x);
      return -z * z / (2.0 * s2) - std::log(u) - 0.5 * std::log(2.0 * M_PI * s2);
    }
  }
  return neg_inf;
}

//! Kernel pdmf at u; 0 outside the support.
inline double density(const KernelFamily& family, double x, double h, double u)
{
  const double lv = log_density(family, x, h, u);
  return std::isfinite(lv) ? std::exp(lv) : 0.0;
}

//! Closed-form mean shift A(x,h) and dispersion B(x,h).
inline KernelMoments moments(const KernelFamily& family, double x, double h)
{
  detail::check_target(family, x, h);
  KernelMoments out;
  switch (family.tag) {
    case KernelTag::DirDU: {
      const double cc = family.c;
      const double s = cc / 2.0 - x - x / (cc - 1.0);
      out.a = h * s;
      out.b = h * (cc * (2.0 * cc - 1.0) / 6.0 + x * x - x * cc + x * x / (cc - 1.0)) -
              h * h * s * s;
      return out;
    }
    case KernelTag::SymCountTriangular: {
      const int m = family.m;
      const int xi = static_cast<int>(x);
      if (xi >= m) {
        double sum_h2 = 0.0;
        double p = (2.0 * m + 1.0) * std::pow(m + 1.0, h);
        for (int l = 1; l <= m; ++l) {
          p -= 2.0 * std::pow(static_cast<double>(l), h);
          sum_h2 += std::pow(static_cast<double>(l), h + 2.0);
        }
        out.a = 0.0;
        out.b = (m * (2.0 * m + 1.0) * std::pow(m + 1.0, h + 1.0) / 3.0 - 2.0 * sum_h2) / p;
        return out;
      }
      // near the boundary the support is clipped to the nonnegative
      // integers, so the moments come from the renormalized masses
      int lo = 0;
      const std::vector<double> mass = detail::triangular_masses(m, h, xi, lo);
      double mean = 0.0, second = 0.0;
      for (std::size_t k = 0; k < mass.size(); ++k) {
        const double u = static_cast<double>(lo) + static_cast<double>(k);
        mean += u * mass[k];
        second += u * u * mass[k];
      }
      out.a = mean - x;
      out.b = second - mean * mean;
      return out;
    }
    case KernelTag::Binomial:
      out.a = h;
      out.b = (x + h) * (1.0 - h) / (x + 1.0);
      return out;
    case KernelTag::Poisson:
      out.a = h;
      out.b = x + h;
      return out;
    case KernelTag::Gamma:
      out.a = h;
      out.b = (x + h) * h;
      return out;
    case KernelTag::LogNormal2:
      out.a = x * std::expm1(1.5 * h * h);
      out.b = x * x * std::exp(3.0 * h * h) * std::expm1(h * h);
      return out;
    case KernelTag::Weibull: {
      const double g1 = std::exp(special::log_gamma(1.0 + h));
      const double g2 = std::exp(special::log_gamma(1.0 + 2.0 * h));
      out.a = 0.0;
      out.b = x * x * (g2 / (g1 * g1) - 1.0);
      return out;
    }
    case KernelTag::BirnbaumSaunders:
      out.a = x * h / 2.0;
      out.b = x * x * h * (2.0 + 2.5 * h) / 2.0;
      return out;
    case KernelTag::InverseGamma: {
      if (!(1.0 - 2.0 * x * h > 0.0))
        throw DomainError("inverse gamma kernel mean requires 1 - 2xh > 0");
      out.a = 2.0 * x * x * h / (1.0 - 2.0 * x * h);
      if (!(1.0 - 3.0 * x * h > 0.0))
        throw DomainError("inverse gamma kernel variance requires 1 - 3xh > 0");
      const double q = 1.0 - 2.0 * x * h;
      out.b = x * x * x * h / ((1.0 - 3.0 * x * h) * q * q);
      return out;
    }
    case KernelTag::ReciprocalInverseGaussian:
      // exact reciprocal-inverse-Gaussian variance; the (x-h)h form
      // drops the 2h^2 term
      out.a = 0.0;
      out.b = (x - h) * h + 2.0 * h * h;
      return out;
    case KernelTag::InverseGaussian:
      out.a = 0.0;
      out.b = x * x * x * h;
      return out;
    case KernelTag::LogNormal1: {
      const double g = (1.0 + h) * (1.0 + h);
      out.a = x * (g - 1.0);
      out.b = x * x * g * g * (g * g - 1.0);
      return out;
    }
  }
  return out;
}

//! Total kernel mass by quadrature or summation (should be 1).
inline double numeric_mass(const KernelFamily& family,
                           double x,
                           double h,
                           const quad::QuadratureSpec& spec = {})
{
  detail::check_target(family, x, h);
  if (family.support_kind() == SupportKind::Count) {
    double total = 0.0;
    const int limit =
      family.tag == KernelTag::Poisson
        ? static_cast<int>(10.0 * (x + h) + 100.0)
        : static_cast<int>(x) + std::max(family.m, family.c) + 2;
    for (int u = 0; u <= limit; ++u)
      total += density(family, x, h, static_cast<double>(u));
    return total;
  }
  double upper = std::max(1.0, x + 1.0);
  while (upper < 1e12 &&
         density(family, x, h, upper) * (upper * upper + 1.0) > 1e-18)
    upper *= 2.0;
  return quad::integrate_semiaxis([&](double u) { return density(family, x, h, u); },
                                  upper, spec);
}

//! Mean shift and dispersion by quadrature (continuous families) or
//! truncated summation (count families).
inline KernelMoments numeric_moments(const KernelFamily& family,
                                     double x,
                                     double h,
                                     const quad::QuadratureSpec& spec = {})
{
  detail::check_target(family, x, h);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  if (family.support_kind() == SupportKind::Count) {
    const int limit =
      family.tag == KernelTag::Poisson
        ? static_cast<int>(10.0 * (x + h) + 100.0)
        : static_cast<int>(x) + std::max(family.m, family.c) + 2;
    for (int ui = 0; ui <= limit; ++ui) {
      const double u = static_cast<double>(ui);
      const double k = density(family, x, h, u);
      m0 += k;
      m1 += u * k;
      m2 += u * u * k;
    }
  } else {
    double upper = std::max(1.0, x + 1.0);
    while (upper < 1e12 &&
           density(family, x, h, upper) * (upper * upper + 1.0) > 1e-18)
      upper *= 2.0;
    auto moment = [&](int p) {
      return quad::integrate_semiaxis(
        [&](double u) { return std::pow(u, p) * density(family, x, h, u); }, upper,
        spec);
    };
    m0 = moment(0);
    m1 = moment(1);
    m2 = moment(2);
  }
  if (!(m0 > 0.0))
    throw NumericalError("kernel mass vanished in numeric moments");
  KernelMoments out;
  const double mean = m1 / m0;
  out.a = mean - x;
  out.b = m2 / m0 - mean * mean;
  return out;
}

//! Product kernel of independent univariate factors with diagonal
//! bandwidths; drops to log space when a factor underflows.
inline double product_density(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& h,
                              const std::vector<KernelFamily>& families,
                              const Eigen::VectorXd& u)
{
  const Eigen::Index d = x.size();
  if (h.size() != d || u.size() != d ||
      static_cast<Eigen::Index>(families.size()) != d)
    throw DomainError("product kernel dimension mismatch");
  double prod = 1.0;
  bool use_log = false;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double k =
      density(families[static_cast<std::size_t>(j)], x[j], h[j], u[j]);
    if (k == 0.0)
      return 0.0;
    if (k < 1e-280)
      use_log = true;
    prod *= k;
  }
  if (!use_log)
    return prod;
  double log_prod = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    log_prod += log_density(families[static_cast<std::size_t>(j)], x[j], h[j], u[j]);
  return std::exp(log_prod);
}

//! Log of product_density; -inf when any factor has no support.
inline double log_product_density(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& h,
                                  const std::vector<KernelFamily>& families,
                                  const Eigen::VectorXd& u)
{
  const Eigen::Index d = x.size();
  if (h.size() != d || u.size() != d ||
      static_cast<Eigen::Index>(families.size()) != d)
    throw DomainError("product kernel dimension mismatch");
  double log_prod = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    log_prod += log_density(families[static_cast<std::size_t>(j)], x[j], h[j], u[j]);
  return log_prod;
}

} // namespace orthant
