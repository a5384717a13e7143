#pragma once

#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"
#include "orthant/special.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace orthant {

enum class StartKind
{
  ExponentialProduct,
  GammaUniv,
  MarshallOlkin,
  ConstantOne
};

//! Survival function of the Marshall-Olkin exponential.
inline double mo_survival(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& mu,
                          double mu0)
{
  if (x.size() != mu.size())
    throw DomainError("dimension mismatch in Marshall-Olkin survival");
  return std::exp(-mu0 * x.maxCoeff() - mu.dot(x));
}

//! Parametric start density: exponential product, univariate gamma,
//! Marshall-Olkin exponential, or the constant-one sentinel that turns
//! the semiparametric estimator into the plain nonparametric one.
class StartModel
{
public:
  static StartModel exponential_product(const Eigen::VectorXd& mu)
  {
    if ((mu.array() <= 0.0).any())
      throw DomainError("exponential product requires mu > 0 componentwise");
    StartModel m;
    m.kind_ = StartKind::ExponentialProduct;
    m.mu_ = mu;
    return m;
  }

  static StartModel gamma_univ(double shape, double scale)
  {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw DomainError("gamma start requires positive shape and scale");
    StartModel m;
    m.kind_ = StartKind::GammaUniv;
    m.shape_ = shape;
    m.scale_ = scale;
    return m;
  }

  static StartModel marshall_olkin(const Eigen::VectorXd& mu, double mu0)
  {
    if ((mu.array() <= 0.0).any() || mu0 < 0.0)
      throw DomainError("Marshall-Olkin requires mu > 0 componentwise, mu0 >= 0");
    StartModel m;
    m.kind_ = StartKind::MarshallOlkin;
    m.mu_ = mu;
    m.mu0_ = mu0;
    return m;
  }

  static StartModel constant_one()
  {
    StartModel m;
    m.kind_ = StartKind::ConstantOne;
    return m;
  }

  StartKind kind() const { return kind_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  double mu0() const { return mu0_; }
  double shape() const { return shape_; }
  double scale() const { return scale_; }

  //! Dimension constraint (0 means any dimension is accepted).
  Eigen::Index dim() const
  {
    switch (kind_) {
      case StartKind::ExponentialProduct:
      case StartKind::MarshallOlkin:
        return mu_.size();
      case StartKind::GammaUniv:
        return 1;
      case StartKind::ConstantOne:
        return 0;
    }
    return 0;
  }

  double pdf(const Eigen::VectorXd& x) const
  {
    check_dim(x);
    switch (kind_) {
      case StartKind::ExponentialProduct:
        return std::exp(-(mu_.array() * x.array()).sum()) * mu_.prod();
      case StartKind::GammaUniv: {
        const double u = x[0];
        if (u < 0.0)
          return 0.0;
        if (u == 0.0)
          return shape_ == 1.0 ? 1.0 / scale_ : (shape_ > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
        return std::exp(log_pdf(x));
      }
      case StartKind::MarshallOlkin:
        return mo_pdf(x);
      case StartKind::ConstantOne:
        return 1.0;
    }
    return 0.0;
  }

  double log_pdf(const Eigen::VectorXd& x) const
  {
    check_dim(x);
    switch (kind_) {
      case StartKind::ExponentialProduct:
        return mu_.array().log().sum() - (mu_.array() * x.array()).sum();
      case StartKind::GammaUniv: {
        const double u = x[0];
        if (u <= 0.0)
          return std::log(pdf(x));
        return (shape_ - 1.0) * std::log(u) - u / scale_ -
               shape_ * std::log(scale_) - special::log_gamma(shape_);
      }
      case StartKind::MarshallOlkin:
        return std::log(mo_pdf(x));
      case StartKind::ConstantOne:
        return 0.0;
    }
    return -std::numeric_limits<double>::infinity();
  }

private:
  void check_dim(const Eigen::VectorXd& x) const
  {
    const Eigen::Index d = dim();
    if (d != 0 && x.size() != d)
      throw DomainError("start model dimension mismatch");
    if ((x.array() < 0.0).any())
      throw DomainError("start model evaluated outside the orthant");
  }

  //! Piecewise Marshall-Olkin density wrt. its mixed dominating measure;
  //! coordinate ties (bit equality) select the singular branches.
  double mo_pdf(const Eigen::VectorXd& x) const
  {
    const double s = mo_survival(x, mu_, mu0_);
    const double xmax = x.maxCoeff();
    int ties = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (x[j] == xmax)
        ++ties;
    double factor;
    if (ties == 1) {
      factor = 1.0;
      for (Eigen::Index j = 0; j < x.size(); ++j)
        factor *= x[j] == xmax ? mu0_ + mu_[j] : mu_[j];
    } else {
      factor = mu0_;
      for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x[j] != xmax)
          factor *= mu_[j];
    }
    return s * factor;
  }

  StartKind kind_ = StartKind::ConstantOne;
  Eigen::VectorXd mu_;
  double mu0_ = 0.0;
  double shape_ = 1.0;
  double scale_ = 1.0;
};

//! Columnwise exponential MLE mu_j = 1/mean_j.
inline StartModel fit_exponential_product(const Dataset& data)
{
  const Eigen::VectorXd mean = data.values().colwise().mean();
  if ((mean.array() <= 0.0).any())
    throw DomainError("exponential fit requires positive column means");
  return StartModel::exponential_product(mean.cwiseInverse());
}

//! Gamma MLE for a univariate positive sample by safeguarded Newton on
//! the profile score log(a) - psi(a) = log(mean) - mean(log).
//!
//! With bias_correction the shape is shrunk by (n-3)/n + 2/(3n) and the
//! scale recomputed so that shape * scale stays equal to the mean.
inline StartModel fit_gamma_mle(const Eigen::VectorXd& sample, bool bias_correction = true)
{
  const Eigen::Index n = sample.size();
  if (n < 2)
    throw InsufficientDataError("gamma fit requires n >= 2");
  if ((sample.array() <= 0.0).any())
    throw DomainError("gamma fit requires strictly positive values");
  const double mean = sample.mean();
  const double mean_log = sample.array().log().mean();
  const double s = std::log(mean) - mean_log;
  if (!(s > 0.0))
    throw DegenerateSampleError("gamma fit requires a non-constant sample");
  double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double g = std::log(a) - special::digamma(a) - s;
    const double dg = 1.0 / a - special::trigamma(a);
    double step = g / dg;
    if (a - step <= 0.0)
      step = a / 2.0;
    a -= step;
    if (std::abs(step) < 1e-10 * a) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericalError("gamma MLE did not converge");
  if (bias_correction)
    a = a * (n - 3.0) / n + 2.0 / (3.0 * n);
  return StartModel::gamma_univ(a, mean / a);
}

//! Deterministic Marshall-Olkin sample: X_j is the minimum of an
//! individual Exp(mu_j) shock and a common Exp(mu0) shock.
inline Dataset mo_sample(const Eigen::VectorXd& mu,
                         double mu0,
                         Eigen::Index n,
                         std::uint64_t seed)
{
  if ((mu.array() <= 0.0).any() || mu0 < 0.0)
    throw DomainError("Marshall-Olkin requires mu > 0 componentwise, mu0 >= 0");
  if (n < 1)
    throw DomainError("sample size must be positive");
  const Eigen::Index d = mu.size();
  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  };
  auto exponential = [&](double rate) {
    return -std::log1p(-uniform()) / rate;
  };
  Eigen::MatrixXd values(n, d);
  std::vector<std::string> labels;
  for (Eigen::Index j = 0; j < d; ++j)
    labels.push_back("X" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = mu0 > 0.0 ? exponential(mu0)
                               : std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j)
      values(i, j) = std::min(exponential(mu[j]), z);
  }
  return Dataset(std::move(values), std::move(labels), SupportKind::Continuous);
}

//! Exact mean vector and covariance of the Marshall-Olkin exponential.
struct MoMoments
{
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline MoMoments mo_moments(const Eigen::VectorXd& mu, double mu0)
{
  if ((mu.array() <= 0.0).any() || mu0 < 0.0)
    throw DomainError("Marshall-Olkin requires mu > 0 componentwise, mu0 >= 0");
  const Eigen::Index d = mu.size();
  MoMoments out;
  out.mean = (mu.array() + mu0).inverse();
  out.cov.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = 0; l < d; ++l) {
      if (j == l)
        out.cov(j, l) = out.mean[j] * out.mean[j];
      else
        out.cov(j, l) = mu0 / ((mu[j] + mu0) * (mu[l] + mu0) * (mu[j] + mu[l] + mu0));
    }
  return out;
}

//! Marshall-Olkin generalized variation index, closed form.
inline double mo_gvi(const Eigen::VectorXd& mu, double mu0)
{
  if ((mu.array() <= 0.0).any() || mu0 < 0.0)
    throw DomainError("Marshall-Olkin requires mu > 0 componentwise, mu0 >= 0");
  const Eigen::Index d = mu.size();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    double inner = 0.0;
    for (Eigen::Index l = 0; l < d; ++l)
      if (l != j)
        inner += 1.0 / ((mu[j] + mu[l] + mu0) * (mu[l] + mu0));
    num += inner / (mu[j] + mu0);
    den += 1.0 / ((mu[j] + mu0) * (mu[j] + mu0));
  }
  return 1.0 + mu0 * num / (den * den);
}

//! Marshall-Olkin marginal variation index, closed form.
inline double mo_mvi(const Eigen::VectorXd& mu, double mu0)
{
  if ((mu.array() <= 0.0).any() || mu0 < 0.0)
    throw DomainError("Marshall-Olkin requires mu > 0 componentwise, mu0 >= 0");
  const Eigen::Index d = mu.size();
  double quartic = 0.0;
  double cross = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mj2 = 1.0 / ((mu[j] + mu0) * (mu[j] + mu0));
    quartic += mj2 * mj2;
    for (Eigen::Index l = j + 1; l < d; ++l)
      cross += mj2 / ((mu[l] + mu0) * (mu[l] + mu0));
  }
  return quartic / (quartic + 2.0 * cross);
}

//! Symmetric nonnegative variation matrix with positive diagonal.
struct VariationMatrix
{
  Eigen::MatrixXd lambda;

  explicit VariationMatrix(Eigen::MatrixXd l)
    : lambda(std::move(l))
  {
    if (lambda.rows() != lambda.cols())
      throw DomainError("variation matrix must be square");
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
      if (!(lambda(i, i) > 0.0))
        throw DomainError("variation matrix diagonal must be positive");
      for (Eigen::Index j = 0; j < lambda.cols(); ++j)
        if (lambda(i, j) < 0.0 || lambda(i, j) != lambda(j, i))
          throw DomainError("variation matrix must be symmetric nonnegative");
    }
  }
};

struct CorrelationBound
{
  double rho = 0.0;
  double upper = 0.0; //!< half-open: admissible rho lies in [0, upper)
  bool violated = false;
};

//! Pairwise correlations and their admissible upper bounds for a
//! variation-matrix parameterized orthant model.
inline Eigen::Matrix<CorrelationBound, Eigen::Dynamic, Eigen::Dynamic>
correlation_bounds(const VariationMatrix& vm)
{
  const Eigen::MatrixXd& l = vm.lambda;
  const Eigen::Index d = l.rows();
  auto r_budget = [&](Eigen::Index i, Eigen::Index j) {
    double off = 0.0;
    for (Eigen::Index k = 0; k < d; ++k)
      if (k != i && k != j)
        off += l(i, k);
    return std::sqrt(l(i, i) / l(j, j)) * (1.0 - off / l(i, i));
  };
  Eigen::Matrix<CorrelationBound, Eigen::Dynamic, Eigen::Dynamic> out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) {
        out(i, j) = CorrelationBound{ 1.0, 1.0, false };
        continue;
      }
      const double rij = r_budget(i, j);
      const double rji = r_budget(j, i);
      if (rij <= 0.0 || rji <= 0.0)
        throw InfeasibleStructureError(
          "correlation budget exhausted for pair (" + std::to_string(i + 1) + "," +
          std::to_string(j + 1) + ")");
      CorrelationBound b;
      b.rho = l(i, j) / std::sqrt(l(i, i) * l(j, j));
      b.upper = std::min(rij, rji);
      b.violated = !(b.rho >= 0.0 && b.rho < b.upper);
      out(i, j) = b;
    }
  return out;
}

} // namespace orthant
