#pragma once

#include "orthant/dataset.hpp"
#include "orthant/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

namespace orthant {

enum class Variability
{
  Under,
  Equi,
  Over
};

inline Variability classify_index(double value, double eps = 1e-6)
{
  if (std::abs(value - 1.0) <= eps)
    return Variability::Equi;
  return value > 1.0 ? Variability::Over : Variability::Under;
}

namespace detail {

inline void check_index_inputs(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
  if (mean.size() != cov.rows() || cov.rows() != cov.cols())
    throw DomainError("mean and covariance dimensions disagree");
  if ((mean.array() <= 0.0).any())
    throw DomainError("index requires strictly positive mean components");
}

} // namespace detail

//! Generalized dispersion index: full variability against an
//! uncorrelated Poisson reference with the same mean.
inline double gdi(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
  detail::check_index_inputs(mean, cov);
  const Eigen::VectorXd root = mean.array().sqrt();
  return root.dot(cov * root) / mean.squaredNorm();
}

//! Generalized variation index: full variability against an
//! uncorrelated exponential reference with the same mean.
inline double gvi(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
  detail::check_index_inputs(mean, cov);
  const double denom = mean.squaredNorm();
  return mean.dot(cov * mean) / (denom * denom);
}

//! Marginal dispersion index: gdi with correlation replaced by identity.
inline double mdi(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
  detail::check_index_inputs(mean, cov);
  return (mean.array() * cov.diagonal().array()).sum() / mean.squaredNorm();
}

//! Marginal variation index: gvi with correlation replaced by identity.
inline double mvi(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
  detail::check_index_inputs(mean, cov);
  const double denom = mean.squaredNorm();
  return (mean.array().square() * cov.diagonal().array()).sum() / (denom * denom);
}

//! Relative dispersion index GDI(X)/GDI(Y).
inline double rdi(double gdi_x, double gdi_y)
{
  if (!(gdi_y > 0.0))
    throw DomainError("relative index requires a positive reference index");
  return gdi_x / gdi_y;
}

//! Relative variation index GVI(X)/GVI(Y).
inline double rvi(double gvi_x, double gvi_y)
{
  if (!(gvi_y > 0.0))
    throw DomainError("relative index requires a positive reference index");
  return gvi_x / gvi_y;
}

//! Moore-Penrose pseudoinverse of a symmetric matrix by spectral
//! decomposition; singular values below cutoff * sigma_max are dropped.
inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& w, double cutoff = 1e-12)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double sigma_max = values.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) > cutoff * sigma_max)
      inv[i] = 1.0 / values[i];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

//! Relative variability index tr(cov_x * w^+).
inline double rwi(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& w)
{
  if (w.rows() != w.cols() || cov_x.rows() != w.rows())
    throw DomainError("rwi dimension mismatch");
  if (!w.isApprox(w.transpose(), 1e-12))
    throw DomainError("rwi requires a symmetric associated matrix");
  if (w.cwiseAbs().maxCoeff() == 0.0)
    throw DomainError("rwi requires a nonzero associated matrix");
  return (cov_x * pseudo_inverse(w)).trace();
}

//! rwi for the rank-1 associated matrix w = v v^T, by the closed form
//! v^T cov_x v / ||v||^4.
inline double rwi_rank1(const Eigen::MatrixXd& cov_x, const Eigen::VectorXd& v)
{
  const double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0))
    throw DomainError("rank-1 rwi requires a nonzero vector");
  return v.dot(cov_x * v) / (norm2 * norm2);
}

//! Index table in the layout of the paper-style summary: univariate
//! indexes on the diagonal, pairwise off the diagonal, joint at the corner.
struct IndexReport
{
  std::vector<std::string> labels;
  Eigen::MatrixXd vi;  //!< diagonal: VI(X_j); off-diagonal: pairwise GVI
  Eigen::MatrixXd di;  //!< diagonal: DI(X_j); off-diagonal: pairwise GDI
  double joint_gvi = 0.0;
  double joint_gdi = 0.0;
  std::optional<double> joint_mvi;
  std::optional<double> joint_mdi;
  double eps_classify = 1e-6;

  Variability classify(double value) const { return classify_index(value, eps_classify); }
};

inline IndexReport index_table(const Dataset& data,
                               Divisor divisor = Divisor::NMinus1,
                               double eps_classify = 1e-6)
{
  const MomentSummary mom = empirical_moments(data, divisor);
  if ((mom.mean.array() <= 0.0).any())
    throw DomainError("index table requires positive column means");
  const Eigen::Index d = data.d();
  IndexReport report;
  report.labels = data.labels();
  report.eps_classify = eps_classify;
  report.vi.resize(d, d);
  report.di.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      std::vector<Eigen::Index> idx = i == j ? std::vector<Eigen::Index>{ i }
                                             : std::vector<Eigen::Index>{ i, j };
      Eigen::VectorXd m(idx.size());
      Eigen::MatrixXd c(idx.size(), idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) {
        m[static_cast<Eigen::Index>(a)] = mom.mean[idx[a]];
        for (std::size_t b = 0; b < idx.size(); ++b)
          c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            mom.cov(idx[a], idx[b]);
      }
      report.vi(i, j) = gvi(m, c);
      report.di(i, j) = gdi(m, c);
    }
  report.joint_gvi = gvi(mom.mean, mom.cov);
  report.joint_gdi = gdi(mom.mean, mom.cov);
  report.joint_mvi = mvi(mom.mean, mom.cov);
  report.joint_mdi = mdi(mom.mean, mom.cov);
  return report;
}

} // namespace orthant
