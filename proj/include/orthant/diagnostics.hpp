#pragma once

#include "orthant/bandwidth.hpp"
#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"
#include "orthant/estimators.hpp"
#include "orthant/kernels.hpp"
#include "orthant/parametric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

namespace orthant {

enum class Decision
{
  Nonparametric,
  Semiparametric,
  Parametric
};

inline const char* to_string(Decision d)
{
  switch (d) {
    case Decision::Nonparametric:
      return "nonparametric";
    case Decision::Semiparametric:
      return "semiparametric";
    case Decision::Parametric:
      return "parametric";
  }
  return "";
}

//! Per-observation log-weights with the in-band share and the model
//! decision derived from it.
struct DiagnosticReport
{
  Eigen::VectorXd log_weights;
  double band_halfwidth = 1.96;
  double percent_in_band = 0.0;
  Decision decision = Decision::Semiparametric;
  std::string start_descriptor;
};

//! Log of the estimated weight function at x.
inline double log_weight_at(const DensityEstimate& est, const Eigen::VectorXd& x)
{
  const double w = weight_at(est, x);
  if (!(w > 0.0))
    throw EvaluationUnderflowError("estimated weight vanishes at the evaluation point");
  return std::log(w);
}

//! Share of observations within the band, boundary inclusive.
inline double percent_in_band(const Eigen::VectorXd& log_weights, double band_halfwidth)
{
  if (log_weights.size() == 0)
    throw InsufficientDataError("no observations to diagnose");
  Eigen::Index inside = 0;
  for (Eigen::Index i = 0; i < log_weights.size(); ++i)
    if (std::abs(log_weights[i]) <= band_halfwidth)
      ++inside;
  return 100.0 * static_cast<double>(inside) /
         static_cast<double>(log_weights.size());
}

//! Percents of exactly 5 and 95 stay semiparametric.
inline Decision decide(double percent)
{
  if (percent < 5.0)
    return Decision::Nonparametric;
  if (percent > 95.0)
    return Decision::Parametric;
  return Decision::Semiparametric;
}

inline std::string describe_start(const StartModel& start)
{
  switch (start.kind()) {
    case StartKind::ExponentialProduct:
      return "exponential-product";
    case StartKind::GammaUniv:
      return "gamma";
    case StartKind::MarshallOlkin:
      return "marshall-olkin";
    case StartKind::ConstantOne:
      return "constant-one";
  }
  return "";
}

//! Diagnostic report from a readily configured estimate.
inline DiagnosticReport diagnose_estimate(const DensityEstimate& est,
                                          double band_halfwidth = 1.96)
{
  DiagnosticReport report;
  report.band_halfwidth = band_halfwidth;
  report.start_descriptor = describe_start(est.start());
  report.log_weights.resize(est.data().n());
  for (Eigen::Index i = 0; i < est.data().n(); ++i)
    report.log_weights[i] = log_weight_at(est, est.data().row(i));
  report.percent_in_band = percent_in_band(report.log_weights, band_halfwidth);
  report.decision = decide(report.percent_in_band);
  return report;
}

//! End-to-end diagnostic: adaptive Bayes bandwidths (closed form for
//! all-gamma kernels, quadrature otherwise), then the in-band share of
//! the log-weights at the observations.
inline DiagnosticReport diagnose(const Dataset& data,
                                 const StartModel& start,
                                 const std::vector<KernelFamily>& families,
                                 const PriorSpec& prior,
                                 double band_halfwidth = 1.96)
{
  bool all_gamma = true;
  for (const KernelFamily& f : families)
    if (f.tag != KernelTag::Gamma)
      all_gamma = false;
  Eigen::MatrixXd h;
  if (all_gamma)
    h = adaptive_bayes_gamma_closed(data, start, prior);
  else {
    if (families.empty())
      throw DomainError("one kernel family per column is required");
    h = adaptive_bayes_quadrature(data, start, prior, families.front());
  }
  DensityEstimate est(data, families, BandwidthAssignment::make_per_observation(h),
                      start);
  return diagnose_estimate(est, band_halfwidth);
}

} // namespace orthant
