#pragma once

#include "orthant/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace orthant {

enum class SupportKind
{
  Continuous,
  Count
};

enum class Divisor
{
  N,
  NMinus1
};

//! Immutable n x d matrix of nonnegative observations with column labels.
class Dataset
{
public:
  Dataset(Eigen::MatrixXd values, std::vector<std::string> labels, SupportKind kind)
    : values_(std::move(values))
    , labels_(std::move(labels))
    , kind_(kind)
  {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw DomainError("dataset must have n >= 1 rows and d >= 1 columns");
    if (static_cast<Eigen::Index>(labels_.size()) != values_.cols())
      throw DomainError("label count must match column count");
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        const double v = values_(i, j);
        if (!std::isfinite(v) || v < 0.0)
          throw DomainError("dataset entries must be finite and nonnegative");
        if (kind_ == SupportKind::Count && v != std::floor(v))
          throw DomainError("count dataset entries must be nonnegative integers");
      }
  }

  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  SupportKind support_kind() const { return kind_; }
  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index d() const { return values_.cols(); }
  Eigen::VectorXd row(Eigen::Index i) const { return values_.row(i).transpose(); }
  Eigen::VectorXd column(Eigen::Index j) const { return values_.col(j); }

  //! Dataset restricted to a subset of columns, in the given order.
  Dataset select_columns(const std::vector<Eigen::Index>& cols) const
  {
    Eigen::MatrixXd sub(n(), static_cast<Eigen::Index>(cols.size()));
    std::vector<std::string> sub_labels;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] < 0 || cols[k] >= d())
        throw DomainError("column index out of range");
      sub.col(static_cast<Eigen::Index>(k)) = values_.col(cols[k]);
      sub_labels.push_back(labels_[static_cast<std::size_t>(cols[k])]);
    }
    return Dataset(std::move(sub), std::move(sub_labels), kind_);
  }

private:
  Eigen::MatrixXd values_;
  std::vector<std::string> labels_;
  SupportKind kind_;
};

//! Mean vector, covariance, and correlation of a dataset.
struct MomentSummary
{
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd corr;
  Divisor divisor = Divisor::NMinus1;
  std::vector<bool> degenerate_column; //!< true where the column variance is zero
};

//! Parse a comma-separated numeric table into a Dataset.
inline Dataset load_csv(const std::string& path, bool has_header, SupportKind kind)
{
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot open file: " + path);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
      fields.push_back(field);
    if (line.back() == ',')
      fields.push_back("");
    if (first && has_header) {
      labels = fields;
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    for (const auto& fstr : fields) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(fstr, &pos);
      } catch (const std::exception&) {
        throw FormatError("unparsable field '" + fstr + "' in " + path);
      }
      while (pos < fstr.size() && std::isspace(static_cast<unsigned char>(fstr[pos])))
        ++pos;
      if (pos != fstr.size())
        throw FormatError("unparsable field '" + fstr + "' in " + path);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw FormatError("empty table in " + path);
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size());
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != d)
    throw FormatError("header width does not match data width in " + path);
  Eigen::MatrixXd values(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (labels.empty())
    for (Eigen::Index j = 0; j < d; ++j)
      labels.push_back("X" + std::to_string(j + 1));
  return Dataset(std::move(values), std::move(labels), kind);
}

//! Embedded drinking-water-pump fixture: n = 42 trivariate measurements
//! (failure time in months, distance to repair center in km, average
//! daily volume in cubic meters).
inline Dataset waterpumps()
{
  static const double x1[42] = { 23,  261, 87,  10, 120, 14, 62, 15, 47, 225, 71,
                                 20,  246, 21,  19, 42,  20, 5,  12, 120, 17, 11,
                                 3,   14,  71,  11, 5,   14, 11, 16, 90, 1,  16,
                                 52,  95,  10,  1,  14,  4,  7,  14, 20 };
  static const double x2[42] = { 97,  93,  94,  100, 98,  84,  96,  110, 121, 73, 90,
                                 93,  103, 116, 114, 82,  96,  94,  77,  91,  117, 103,
                                 99,  113, 79,  109, 84,  118, 98,  93,  94,  103, 109,
                                 110, 89,  108, 101, 93,  102, 138, 103, 96 };
  static const double x3[42] = { 26, 52, 22, 39, 23, 26, 32, 17, 10, 39, 31,
                                 42, 52, 26, 26, 36, 43, 36, 6,  27, 15, 36,
                                 9,  52, 11, 20, 25, 37, 25, 18, 43, 43, 24,
                                 38, 6,  40, 21, 34, 15, 23, 68, 37 };
  Eigen::MatrixXd values(42, 3);
  for (int i = 0; i < 42; ++i) {
    values(i, 0) = x1[i];
    values(i, 1) = x2[i];
    values(i, 2) = x3[i];
  }
  return Dataset(std::move(values), { "X1", "X2", "X3" }, SupportKind::Continuous);
}

//! Column means with covariance/correlation under the requested divisor.
//!
//! Zero-variance columns are flagged and their correlation entries set
//! to 0 (diagonal stays 1).
inline MomentSummary empirical_moments(const Dataset& data, Divisor divisor = Divisor::NMinus1)
{
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  if (n < 2)
    throw InsufficientDataError("empirical moments require n >= 2");
  MomentSummary out;
  out.divisor = divisor;
  out.mean = data.values().colwise().mean();
  Eigen::MatrixXd centered = data.values().rowwise() - out.mean.transpose();
  const double denom = divisor == Divisor::N ? static_cast<double>(n)
                                             : static_cast<double>(n - 1);
  out.cov = centered.transpose() * centered / denom;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.corr = Eigen::MatrixXd::Identity(d, d);
  out.degenerate_column.assign(static_cast<std::size_t>(d), false);
  Eigen::VectorXd sd(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    sd[j] = std::sqrt(out.cov(j, j));
    if (out.cov(j, j) <= 0.0)
      out.degenerate_column[static_cast<std::size_t>(j)] = true;
  }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j)
        continue;
      if (out.degenerate_column[static_cast<std::size_t>(i)] ||
          out.degenerate_column[static_cast<std::size_t>(j)])
        out.corr(i, j) = 0.0;
      else
        out.corr(i, j) = out.cov(i, j) / (sd[i] * sd[j]);
    }
  return out;
}

} // namespace orthant
