#pragma once

#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"
#include "orthant/kernels.hpp"
#include "orthant/parametric.hpp"
#include "orthant/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace orthant {

//! Diagonal bandwidths shared by all observations or one row per
//! observation.
struct BandwidthAssignment
{
  enum class Kind
  {
    Global,
    PerObservation
  };

  Kind kind = Kind::Global;
  Eigen::VectorXd global;
  Eigen::MatrixXd per_observation;

  static BandwidthAssignment make_global(const Eigen::VectorXd& h)
  {
    if ((h.array() <= 0.0).any())
      throw DomainError("bandwidths must be strictly positive");
    BandwidthAssignment b;
    b.kind = Kind::Global;
    b.global = h;
    return b;
  }

  static BandwidthAssignment make_per_observation(const Eigen::MatrixXd& h)
  {
    if ((h.array() <= 0.0).any())
      throw DomainError("bandwidths must be strictly positive");
    BandwidthAssignment b;
    b.kind = Kind::PerObservation;
    b.per_observation = h;
    return b;
  }

  Eigen::Index dim() const
  {
    return kind == Kind::Global ? global.size() : per_observation.cols();
  }

  Eigen::VectorXd row(Eigen::Index i) const
  {
    return kind == Kind::Global ? global
                                : Eigen::VectorXd(per_observation.row(i).transpose());
  }
};

//! A configured density estimate: data, kernel families, bandwidths and
//! parametric start, with the start density cached at the observations.
class DensityEstimate
{
public:
  DensityEstimate(Dataset data,
                  std::vector<KernelFamily> families,
                  BandwidthAssignment bandwidths,
                  StartModel start)
    : data_(std::move(data))
    , families_(std::move(families))
    , bandwidths_(std::move(bandwidths))
    , start_(std::move(start))
  {
    const Eigen::Index d = data_.d();
    if (static_cast<Eigen::Index>(families_.size()) != d)
      throw DomainError("one kernel family per column is required");
    if (bandwidths_.dim() != d)
      throw DomainError("bandwidth dimension must match the data");
    if (bandwidths_.kind == BandwidthAssignment::Kind::PerObservation &&
        bandwidths_.per_observation.rows() != data_.n())
      throw DomainError("per-observation bandwidths need one row per observation");
    if (start_.dim() != 0 && start_.dim() != d)
      throw DomainError("start model dimension must match the data");
    log_start_rows_.resize(data_.n());
    for (Eigen::Index i = 0; i < data_.n(); ++i) {
      const double lp = start_.log_pdf(data_.row(i));
      if (!std::isfinite(lp))
        throw StartSupportError("start density vanishes at observation " +
                                  std::to_string(i + 1),
                                static_cast<std::size_t>(i));
      log_start_rows_[i] = lp;
    }
  }

  const Dataset& data() const { return data_; }
  const std::vector<KernelFamily>& families() const { return families_; }
  const BandwidthAssignment& bandwidths() const { return bandwidths_; }
  const StartModel& start() const { return start_; }
  double log_start_at_row(Eigen::Index i) const { return log_start_rows_[i]; }

private:
  Dataset data_;
  std::vector<KernelFamily> families_;
  BandwidthAssignment bandwidths_;
  StartModel start_;
  Eigen::VectorXd log_start_rows_;
};

namespace detail {

//! Sum over observations of exp(log_ratio_i) * K_{x,H_i}(X_i) / n.
inline double kernel_average(const DensityEstimate& est,
                             const Eigen::VectorXd& x,
                             const std::function<double(Eigen::Index)>& log_ratio,
                             Eigen::Index skip = -1)
{
  const Eigen::Index n = est.data().n();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == skip)
      continue;
    const Eigen::VectorXd h = est.bandwidths().row(skip >= 0 ? skip : i);
    const double lk = log_product_density(x, h, est.families(), est.data().row(i));
    if (!std::isfinite(lk)) {
      terms.push_back(0.0);
      continue;
    }
    terms.push_back(std::exp(log_ratio(i) + lk));
  }
  const double count = static_cast<double>(terms.size());
  return count > 0.0 ? quad::pairwise_sum(terms) / count : 0.0;
}

} // namespace detail

//! Plain associated-kernel estimate at x (requires the constant-one start).
inline double nonparametric_at(const DensityEstimate& est, const Eigen::VectorXd& x)
{
  if (est.start().kind() != StartKind::ConstantOne)
    throw DomainError("nonparametric evaluation requires the constant-one start");
  return detail::kernel_average(est, x, [](Eigen::Index) { return 0.0; });
}

//! Semiparametric estimate at x: start density times the smoothed weight.
inline double semiparametric_at(const DensityEstimate& est, const Eigen::VectorXd& x)
{
  const double lpx = est.start().log_pdf(x);
  if (!std::isfinite(lpx))
    return 0.0;
  return detail::kernel_average(
    est, x, [&](Eigen::Index i) { return lpx - est.log_start_at_row(i); });
}

//! Kernel estimate of the weight function w(x) = f(x) / p_d(x).
inline double weight_at(const DensityEstimate& est, const Eigen::VectorXd& x)
{
  const double px = est.start().pdf(x);
  if (!(px > 1e-300))
    throw EvaluationUnderflowError("start density underflows at the evaluation point");
  return detail::kernel_average(
    est, x, [&](Eigen::Index i) { return -est.log_start_at_row(i); });
}

//! Leave-one-out estimate at observation i with its own bandwidth row.
inline double loo_at(const DensityEstimate& est, Eigen::Index i)
{
  if (est.data().n() < 2)
    throw InsufficientDataError("leave-one-out requires n >= 2");
  if (i < 0 || i >= est.data().n())
    throw DomainError("row index out of range");
  const double lpi = est.log_start_at_row(i);
  return detail::kernel_average(
    est, est.data().row(i),
    [&](Eigen::Index l) { return lpi - est.log_start_at_row(l); }, i);
}

namespace detail {

//! Tensor Gauss-Legendre integral of f over the box [0, upper]^d.
inline double tensor_integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& upper,
                               int nodes_per_axis)
{
  const Eigen::Index d = upper.size();
  std::vector<quad::Rule1d> rules;
  for (Eigen::Index j = 0; j < d; ++j)
    rules.push_back(quad::gauss_legendre(nodes_per_axis, 0.0, upper[j]));
  Eigen::VectorXd x(d);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> cells;
  for (;;) {
    double w = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const int k = idx[static_cast<std::size_t>(j)];
      x[j] = rules[static_cast<std::size_t>(j)].nodes[k];
      w *= rules[static_cast<std::size_t>(j)].weights[k];
    }
    cells.push_back(w * f(x));
    Eigen::Index j = 0;
    while (j < d) {
      if (++idx[static_cast<std::size_t>(j)] < nodes_per_axis)
        break;
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == d)
      break;
  }
  return quad::pairwise_sum(cells);
}

//! Per-axis integration cutoffs covering the estimate's mass.
inline Eigen::VectorXd integration_upper(const DensityEstimate& est)
{
  const Eigen::Index d = est.data().d();
  Eigen::VectorXd upper(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double hmax = est.bandwidths().kind == BandwidthAssignment::Kind::Global
                    ? est.bandwidths().global[j]
                    : est.bandwidths().per_observation.col(j).maxCoeff();
    upper[j] = est.data().column(j).maxCoeff() * 1.5 + 10.0 * hmax;
  }
  return upper;
}

//! Per-axis summation cutoffs for count kernels.
inline std::vector<int> summation_limits(const DensityEstimate& est)
{
  const Eigen::Index d = est.data().d();
  std::vector<int> limits;
  for (Eigen::Index j = 0; j < d; ++j) {
    const KernelFamily& fam = est.families()[static_cast<std::size_t>(j)];
    const double xmax = est.data().column(j).maxCoeff();
    double hmax = est.bandwidths().kind == BandwidthAssignment::Kind::Global
                    ? est.bandwidths().global[j]
                    : est.bandwidths().per_observation.col(j).maxCoeff();
    int limit;
    switch (fam.tag) {
      case KernelTag::DirDU:
        limit = fam.c - 1;
        break;
      case KernelTag::SymCountTriangular:
        limit = static_cast<int>(xmax) + fam.m;
        break;
      case KernelTag::Binomial:
        limit = static_cast<int>(xmax) + 1;
        break;
      default:
        limit = static_cast<int>(10.0 * (xmax + hmax) + 100.0);
        break;
    }
    limits.push_back(limit);
  }
  return limits;
}

} // namespace detail

//! Total mass C_n of the estimate over the orthant: tensor quadrature
//! for d <= 2, adaptive cubature for d = 3, exhaustive summation for
//! count supports.
inline double normalizing_constant(const DensityEstimate& est,
                                   const quad::QuadratureSpec& spec = {})
{
  (void)spec;
  const Eigen::Index d = est.data().d();
  const bool count = est.data().support_kind() == SupportKind::Count;
  auto value = [&](const Eigen::VectorXd& x) {
    return est.start().kind() == StartKind::ConstantOne ? nonparametric_at(est, x)
                                                        : semiparametric_at(est, x);
  };
  if (count) {
    const std::vector<int> limits = detail::summation_limits(est);
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
    return quad::pairwise_sum(cells);
  }
  const Eigen::VectorXd upper = detail::integration_upper(est);
  if (d <= 2)
    return detail::tensor_integrate(value, upper, 256);
  if (d == 3)
    return quad::cubature(value, Eigen::VectorXd::Zero(d), upper, 1e-5);
  throw NumericalError("normalizing constant supported for d <= 3 continuous data");
}

} // namespace orthant
