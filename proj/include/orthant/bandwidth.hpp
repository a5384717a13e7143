#pragma once

#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"
#include "orthant/estimators.hpp"
#include "orthant/kernels.hpp"
#include "orthant/parametric.hpp"
#include "orthant/quadrature.hpp"
#include "orthant/special.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace orthant {

//! Inverse gamma prior on each diagonal bandwidth entry.
struct PriorSpec
{
  double alpha = 3.0;
  Eigen::VectorXd beta;
};

//! Prior schedule alpha = n^{2/5}, beta = 1 per axis.
inline PriorSpec default_prior(Eigen::Index n, Eigen::Index d)
{
  if (n < 7)
    throw DomainError("default prior needs n >= 7 so that alpha > 2; pass an explicit prior");
  PriorSpec prior;
  prior.alpha = std::pow(static_cast<double>(n), 0.4);
  prior.beta = Eigen::VectorXd::Ones(d);
  return prior;
}

inline double ig_log_pdf(double alpha, double beta, double h)
{
  if (!(h > 0.0))
    return -std::numeric_limits<double>::infinity();
  return alpha * std::log(beta) - special::log_gamma(alpha) -
         (alpha + 1.0) * std::log(h) - beta / h;
}

namespace detail {

inline void check_prior(const PriorSpec& prior, Eigen::Index d)
{
  if (!(prior.alpha > 0.5))
    throw DomainError("prior shape must exceed 1/2");
  if (prior.beta.size() != d || (prior.beta.array() <= 0.0).any())
    throw DomainError("prior needs one positive scale per axis");
}

//! Log posterior mixture weights (normalized) for observation i under
//! the gamma-kernel closed form; entries for excluded terms stay -inf.
inline Eigen::VectorXd closed_form_log_weights(const Dataset& data,
                                               const StartModel& start,
                                               const PriorSpec& prior,
                                               Eigen::Index i)
{
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  const double alpha = prior.alpha;
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd xi = data.row(i);
  Eigen::VectorXd logw = Eigen::VectorXd::Constant(n, neg_inf);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i)
      continue;
    const Eigen::VectorXd xj = data.row(j);
    double lw = -start.log_pdf(xj);
    bool excluded = false;
    for (Eigen::Index l = 0; l < d; ++l) {
      const double b = prior.beta[l];
      if (xi[l] == 0.0) {
        lw += special::log_gamma(alpha + 1.0) + alpha * std::log(b) -
              (alpha + 1.0) * std::log(xj[l] + b);
      } else {
        if (xj[l] == 0.0) {
          // the gamma kernel at target X_il > 0 has no mass at 0
          excluded = true;
          break;
        }
        const double bij = xi[l] * std::log(xi[l] / xj[l]) + xj[l] - xi[l] + b;
        if (!(bij > 0.0))
          throw NumericalError("nonpositive posterior scale in closed-form selector");
        lw += special::log_gamma(alpha + 0.5) + alpha * std::log(b) -
              0.5 * std::log(xi[l]) - 0.5 * std::log(2.0 * M_PI) -
              (alpha + 0.5) * std::log(bij);
      }
    }
    if (!excluded)
      logw[j] = lw;
  }
  const double m = logw.maxCoeff();
  if (!std::isfinite(m))
    throw DegenerateSampleError("all posterior weights vanish for observation " +
                                std::to_string(i + 1));
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isfinite(logw[j]))
      total += std::exp(logw[j] - m);
  const double log_norm = m + std::log(total);
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isfinite(logw[j]))
      logw[j] -= log_norm;
  return logw;
}

} // namespace detail

//! Normalized posterior mixture weights over j != i for observation i.
inline Eigen::VectorXd adaptive_bayes_posterior_weights(const Dataset& data,
                                                        const StartModel& start,
                                                        const PriorSpec& prior,
                                                        Eigen::Index i)
{
  detail::check_prior(prior, data.d());
  const Eigen::VectorXd logw = detail::closed_form_log_weights(data, start, prior, i);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(data.n());
  for (Eigen::Index j = 0; j < data.n(); ++j)
    if (std::isfinite(logw[j]))
      w[j] = std::exp(logw[j]);
  return w;
}

//! Closed-form adaptive Bayes bandwidths for multiple gamma kernels
//! under independent inverse gamma priors; one row per observation.
inline Eigen::MatrixXd adaptive_bayes_gamma_closed(const Dataset& data,
                                                   const StartModel& start,
                                                   const PriorSpec& prior)
{
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  if (n < 2)
    throw InsufficientDataError("adaptive selector requires n >= 2");
  detail::check_prior(prior, d);
  const double alpha = prior.alpha;
  Eigen::MatrixXd h(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd logw = detail::closed_form_log_weights(data, start, prior, i);
    const Eigen::VectorXd xi = data.row(i);
    for (Eigen::Index m = 0; m < d; ++m) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(logw[j]))
          continue;
        const double xjm = data.values()(j, m);
        double post_mean;
        if (xi[m] == 0.0) {
          post_mean = (xjm + prior.beta[m]) / alpha;
        } else {
          const double bij =
            xi[m] * std::log(xi[m] / xjm) + xjm - xi[m] + prior.beta[m];
          post_mean = bij / (alpha - 0.5);
        }
        acc += std::exp(logw[j]) * post_mean;
      }
      h(i, m) = acc;
    }
  }
  return h;
}

namespace detail {

struct AxisIntegrals
{
  double mass; //!< integral of K * prior over h
  double mean; //!< integral of h * K * prior over h
};

//! Axis likelihood of a bandwidth under the adaptive posterior.  For
//! the gamma family at a positive target the kernel normalizing
//! constant is taken in its second-order Stirling form, which makes
//! the inverse gamma prior conjugate; the closed-form selector solves
//! exactly this model, and the quadrature path integrates the same
//! integrand numerically.  At a zero target the gamma kernel is an
//! exponential density and is used exactly.
inline double selector_density(const KernelFamily& family, double x, double h, double u)
{
  if (family.tag != KernelTag::Gamma || x == 0.0)
    return density(family, x, h, u);
  if (!(u > 0.0))
    return 0.0; // no mass at the origin for a positive target
  const double b = x * std::log(x / u) + u - x;
  return std::exp(-b / h) / std::sqrt(2.0 * M_PI * x * h);
}

//! Bandwidths with a bounded admissible range are integrated on it
//! directly; otherwise the positive axis is mapped to (0,1).
inline bool bounded_bandwidth(const KernelFamily& family)
{
  return family.tag == KernelTag::Binomial || family.tag == KernelTag::DirDU;
}

//! Scale of the integrand found on a log-spaced probe grid around h0;
//! 0 when the integrand vanishes everywhere on the grid.
template<typename F>
double probe_scale(const F& f, double h0)
{
  double best_h = 0.0;
  double best = 0.0;
  for (int k = -8; k <= 10; ++k) {
    const double h = h0 * std::pow(10.0, 0.5 * k);
    const double v = f(h);
    if (v > best) {
      best = v;
      best_h = h;
    }
  }
  return best > 0.0 ? best_h : 0.0;
}

//! Integral of f over (0, inf) through the map h = s t / (1 - t).
template<typename F>
double integrate_positive_axis(const F& f, double s, const quad::QuadratureSpec& spec)
{
  return quad::integrate(
    [&](double t) {
      const double om = 1.0 - t;
      return f(s * t / om) * s / (om * om);
    },
    0.0, 1.0, spec);
}

//! Per-axis integrals of the kernel likelihood against the prior; the
//! posterior scale over h can exceed the prior scale by orders of
//! magnitude, so the range is located by probing before integrating.
template<typename KernelEval>
AxisIntegrals axis_integrals(const KernelEval& kernel_at_h,
                             const KernelFamily& family,
                             double alpha,
                             double beta,
                             const quad::QuadratureSpec& spec)
{
  auto f0 = [&](double h) {
    return std::exp(ig_log_pdf(alpha, beta, h)) * kernel_at_h(h);
  };
  auto f1 = [&](double h) { return h * f0(h); };
  AxisIntegrals out;
  if (bounded_bandwidth(family)) {
    out.mass = quad::integrate(f0, 0.0, 1.0, spec);
    out.mean = quad::integrate(f1, 0.0, 1.0, spec);
    return out;
  }
  const double scale = probe_scale(f0, beta / (alpha + 1.0));
  if (scale == 0.0) {
    out.mass = 0.0;
    out.mean = 0.0;
    return out;
  }
  out.mass = integrate_positive_axis(f0, scale, spec);
  out.mean = integrate_positive_axis(f1, scale, spec);
  return out;
}

} // namespace detail

//! Adaptive Bayes bandwidths by per-axis quadrature against the
//! leave-one-out likelihood; oracle for the gamma closed form and the
//! generic path for other continuous kernels.
inline Eigen::MatrixXd adaptive_bayes_quadrature(const Dataset& data,
                                                 const StartModel& start,
                                                 const PriorSpec& prior,
                                                 const KernelFamily& family,
                                                 const quad::QuadratureSpec& spec = { 1e-9, 1e-300, 2000 })
{
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  if (n < 2)
    throw InsufficientDataError("adaptive selector requires n >= 2");
  detail::check_prior(prior, d);
  if (!(prior.alpha > 1.0))
    throw DomainError("quadrature selector requires prior shape > 1");
  Eigen::MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = data.row(i);
    // the posterior over H_i is a mixture over the other observations;
    // the prior and the product kernel both factorize per axis
    Eigen::MatrixXd mass(n, d), mean(n, d);
    Eigen::VectorXd log_ratio(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i)
        continue;
      log_ratio[j] = -start.log_pdf(data.row(j));
      for (Eigen::Index m = 0; m < d; ++m) {
        const double u = data.values()(j, m);
        const detail::AxisIntegrals integ = detail::axis_integrals(
          [&](double h) { return detail::selector_density(family, xi[m], h, u); },
          family, prior.alpha, prior.beta[m], spec);
        mass(j, m) = integ.mass;
        mean(j, m) = integ.mean;
      }
    }
    for (Eigen::Index m = 0; m < d; ++m) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i)
          continue;
        double prod = std::exp(log_ratio[j]);
        for (Eigen::Index k = 0; k < d; ++k)
          if (k != m)
            prod *= mass(j, k);
        num += prod * mean(j, m);
        den += prod * mass(j, m);
      }
      if (!(den > 0.0))
        throw NumericalError("posterior mass vanished in quadrature selector");
      out(i, m) = num / den;
    }
  }
  return out;
}

//! Local Bayes bandwidth at a target point x.
inline Eigen::VectorXd local_bayes(const Dataset& data,
                                   const KernelFamily& family,
                                   const PriorSpec& prior,
                                   const Eigen::VectorXd& x,
                                   const quad::QuadratureSpec& spec = { 1e-9, 1e-300, 2000 })
{
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  detail::check_prior(prior, d);
  if (!(prior.alpha > 1.0))
    throw DomainError("quadrature selector requires prior shape > 1");
  if ((x.array() < 0.0).any() || x.size() != d)
    throw DomainError("target must lie in the data orthant");
  Eigen::MatrixXd mass(n, d), mean(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index m = 0; m < d; ++m) {
      const double u = data.values()(i, m);
      const detail::AxisIntegrals integ = detail::axis_integrals(
        [&](double h) { return detail::selector_density(family, x[m], h, u); },
        family, prior.alpha, prior.beta[m], spec);
      mass(i, m) = integ.mass;
      mean(i, m) = integ.mean;
    }
  Eigen::VectorXd out(d);
  for (Eigen::Index m = 0; m < d; ++m) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k)
        if (k != m)
          prod *= mass(i, k);
      num += prod * mean(i, m);
      den += prod * mass(i, m);
    }
    if (!(den > 0.0))
      throw NumericalError("posterior mass vanished in local selector");
    out[m] = num / den;
  }
  return out;
}

//! Global Bayes bandwidth for a univariate sample: posterior mean of h
//! against the product of leave-one-out likelihoods, held in log space.
inline double global_bayes_1d(const Dataset& data,
                              const KernelFamily& family,
                              const PriorSpec& prior,
                              const quad::QuadratureSpec& spec = { 1e-9, 1e-300, 2000 })
{
  if (data.d() != 1)
    throw DomainError("global Bayes selector requires d = 1");
  if (data.n() < 2)
    throw InsufficientDataError("global Bayes selector requires n >= 2");
  detail::check_prior(prior, 1);
  if (!(prior.alpha > 1.0))
    throw DomainError("quadrature selector requires prior shape > 1");
  const Eigen::Index n = data.n();
  auto log_integrand = [&](double h) {
    double lp = ig_log_pdf(prior.alpha, prior.beta[0], h);
    for (Eigen::Index i = 0; i < n; ++i) {
      double fi = 0.0;
      for (Eigen::Index l = 0; l < n; ++l)
        if (l != i)
          fi += density(family, data.values()(i, 0), h, data.values()(l, 0));
      fi /= static_cast<double>(n - 1);
      if (!(fi > 0.0))
        return -std::numeric_limits<double>::infinity();
      lp += std::log(fi);
    }
    return lp;
  };
  // locate the posterior peak on a log grid for a max shift and an
  // integration scale before quadrature
  const double h0 = prior.beta[0] / (prior.alpha + 1.0);
  double shift = -std::numeric_limits<double>::infinity();
  double peak_h = h0;
  for (int k = -8; k <= 10; ++k) {
    const double h = h0 * std::pow(10.0, 0.5 * k);
    if (detail::bounded_bandwidth(family) && h > 1.0)
      break;
    const double lv = log_integrand(h);
    if (lv > shift) {
      shift = lv;
      peak_h = h;
    }
  }
  if (!std::isfinite(shift))
    throw NumericalError("posterior underflows in global Bayes selector");
  auto f0 = [&](double h) {
    const double lv = log_integrand(h) - shift;
    return std::isfinite(lv) ? std::exp(lv) : 0.0;
  };
  auto f1 = [&](double h) { return h * f0(h); };
  double den, num;
  if (detail::bounded_bandwidth(family)) {
    den = quad::integrate(f0, 0.0, 1.0, spec);
    num = quad::integrate(f1, 0.0, 1.0, spec);
  } else {
    den = detail::integrate_positive_axis(f0, peak_h, spec);
    num = detail::integrate_positive_axis(f1, peak_h, spec);
  }
  if (!(den > 0.0))
    throw NumericalError("posterior mass vanished in global Bayes selector");
  return num / den;
}

//! Search configuration for the cross-validation selector.
struct CvSearchSpec
{
  int grid_points = 16;
  int refine_sweeps = 2;
  double lower_scale = 1e-3; //!< lower bound factor on the column sd
  double upper_scale = 10.0; //!< upper bound factor on the column sd
};

namespace detail {

inline double cv_objective(const Dataset& data,
                           const std::vector<KernelFamily>& families,
                           const Eigen::VectorXd& h)
{
  DensityEstimate est(data, families, BandwidthAssignment::make_global(h),
                      StartModel::constant_one());
  auto value = [&](const Eigen::VectorXd& x) {
    const double v = nonparametric_at(est, x);
    return v * v;
  };
  double integral;
  if (data.support_kind() == SupportKind::Count) {
    const std::vector<int> limits = summation_limits(est);
    const Eigen::Index d = data.d();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> cells;
    for (;;) {
      for (Eigen::Index j = 0; j < d; ++j)
        x[j] = static_cast<double>(idx[static_cast<std::size_t>(j)]);
      cells.push_back(value(x));
      Eigen::Index j = 0;
      while (j < d) {
        if (++idx[static_cast<std::size_t>(j)] <= limits[static_cast<std::size_t>(j)])
          break;
        idx[static_cast<std::size_t>(j)] = 0;
        ++j;
      }
      if (j == d)
        break;
    }
    integral = quad::pairwise_sum(cells);
  } else {
    const Eigen::VectorXd upper = integration_upper(est);
    integral = tensor_integrate(value, upper, data.d() == 1 ? 256 : 96);
  }
  double loo_sum = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    loo_sum += loo_at(est, i);
  return integral - 2.0 * loo_sum / static_cast<double>(data.n());
}

} // namespace detail

//! Cross-validation bandwidth: log-spaced grid search per axis followed
//! by cyclic golden-section refinement.
inline Eigen::VectorXd cv_bandwidth(const Dataset& data,
                                    const std::vector<KernelFamily>& families,
                                    const CvSearchSpec& search = {})
{
  const Eigen::Index d = data.d();
  if (data.n() < 2)
    throw InsufficientDataError("cross-validation requires n >= 2");
  if (static_cast<Eigen::Index>(families.size()) != d)
    throw DomainError("one kernel family per column is required");
  const MomentSummary mom = empirical_moments(data);
  Eigen::VectorXd lower(d), upper(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt(mom.cov(j, j));
    if (!(sd > 0.0))
      throw DegenerateSampleError("cross-validation requires spread in every column");
    lower[j] = search.lower_scale * sd;
    upper[j] = search.upper_scale * sd;
    if (families[static_cast<std::size_t>(j)].tag == KernelTag::Binomial ||
        families[static_cast<std::size_t>(j)].tag == KernelTag::DirDU)
      upper[j] = std::min(upper[j], 1.0);
  }
  // grid search on a shared per-axis log scale
  Eigen::VectorXd best = lower;
  double best_value = std::numeric_limits<double>::infinity();
  double worst_value = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < search.grid_points; ++g) {
    const double t = search.grid_points == 1
                       ? 0.0
                       : static_cast<double>(g) / (search.grid_points - 1);
    Eigen::VectorXd h(d);
    for (Eigen::Index j = 0; j < d; ++j)
      h[j] = lower[j] * std::pow(upper[j] / lower[j], t);
    const double value = detail::cv_objective(data, families, h);
    if (value < best_value) {
      best_value = value;
      best = h;
    }
    worst_value = std::max(worst_value, value);
  }
  if (worst_value - best_value < 1e-12)
    return lower; // flat objective: smallest bandwidth
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < search.refine_sweeps; ++sweep)
    for (Eigen::Index j = 0; j < d; ++j) {
      auto axis_value = [&](double hj) {
        Eigen::VectorXd h = best;
        h[j] = hj;
        return detail::cv_objective(data, families, h);
      };
      const double spacing =
        std::pow(upper[j] / lower[j], 1.0 / (search.grid_points - 1));
      double a = std::max(lower[j], best[j] / spacing);
      double b = std::min(upper[j], best[j] * spacing);
      double la = std::log(a), lb = std::log(b);
      double c1 = lb - gr * (lb - la);
      double c2 = la + gr * (lb - la);
      double f1 = axis_value(std::exp(c1));
      double f2 = axis_value(std::exp(c2));
      while (lb - la > 1e-3) {
        if (f1 < f2) {
          lb = c2;
          c2 = c1;
          f2 = f1;
          c1 = lb - gr * (lb - la);
          f1 = axis_value(std::exp(c1));
        } else {
          la = c1;
          c1 = c2;
          f1 = f2;
          c2 = la + gr * (lb - la);
          f2 = axis_value(std::exp(c2));
        }
      }
      const double candidate = std::exp(0.5 * (la + lb));
      if (axis_value(candidate) < best_value) {
        best[j] = candidate;
        best_value = axis_value(candidate);
      }
    }
  return best;
}

} // namespace orthant
