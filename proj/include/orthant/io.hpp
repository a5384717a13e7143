#pragma once

#include "orthant/dataset.hpp"
#include "orthant/diagnostics.hpp"
#include "orthant/errors.hpp"
#include "orthant/indexes.hpp"
#include "orthant/parametric.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace orthant {
namespace io {

using json = nlohmann::ordered_json;

//! Fixed four-decimal rendering for human-readable tables.
inline std::string table_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

//! Full-precision rendering used in machine-readable CSV columns.
inline std::string csv_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

//! Write content to path via a temporary file and an atomic rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw FormatError("cannot open output file: " + tmp.string());
    out << content;
    if (!out)
      throw FormatError("failed writing output file: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string dataset_csv(const Dataset& data)
{
  std::ostringstream out;
  for (std::size_t j = 0; j < data.labels().size(); ++j)
    out << (j ? "," : "") << data.labels()[j];
  out << "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j)
      out << (j ? "," : "") << csv_number(data.values()(i, j));
    out << "\n";
  }
  return out.str();
}

inline json matrix_to_json(const Eigen::MatrixXd& m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(v[i]);
  return out;
}

inline const char* variability_name(Variability v)
{
  switch (v) {
    case Variability::Under:
      return "under";
    case Variability::Equi:
      return "equi";
    case Variability::Over:
      return "over";
  }
  return "";
}

inline json index_report_to_json(const IndexReport& report)
{
  json out;
  out["labels"] = report.labels;
  out["variation"] = matrix_to_json(report.vi);
  out["dispersion"] = matrix_to_json(report.di);
  out["joint_gvi"] = report.joint_gvi;
  out["joint_gdi"] = report.joint_gdi;
  if (report.joint_mvi)
    out["joint_mvi"] = *report.joint_mvi;
  if (report.joint_mdi)
    out["joint_mdi"] = *report.joint_mdi;
  out["joint_gvi_class"] = variability_name(report.classify(report.joint_gvi));
  out["joint_gdi_class"] = variability_name(report.classify(report.joint_gdi));
  return out;
}

//! Univariate entries on the diagonal, pairwise off the diagonal, joint
//! at the corner of the last row.
inline std::string index_report_to_csv(const IndexReport& report)
{
  std::ostringstream out;
  const Eigen::Index d = report.vi.rows();
  auto block = [&](const char* name, const Eigen::MatrixXd& m, double joint) {
    out << name;
    for (Eigen::Index j = 0; j < d; ++j)
      out << "," << report.labels[static_cast<std::size_t>(j)];
    out << ",joint\n";
    for (Eigen::Index i = 0; i < d; ++i) {
      out << report.labels[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < d; ++j)
        out << "," << table_number(m(i, j));
      if (i == d - 1)
        out << "," << table_number(joint);
      out << "\n";
    }
  };
  block("variation", report.vi, report.joint_gvi);
  block("dispersion", report.di, report.joint_gdi);
  return out.str();
}

inline json start_model_to_json(const StartModel& model)
{
  json out;
  switch (model.kind()) {
    case StartKind::ExponentialProduct:
      out["variant"] = "exponential-product";
      out["mu"] = vector_to_json(model.mu());
      break;
    case StartKind::GammaUniv:
      out["variant"] = "gamma";
      out["shape"] = model.shape();
      out["scale"] = model.scale();
      break;
    case StartKind::MarshallOlkin:
      out["variant"] = "marshall-olkin";
      out["mu"] = vector_to_json(model.mu());
      out["mu0"] = model.mu0();
      break;
    case StartKind::ConstantOne:
      out["variant"] = "constant-one";
      break;
  }
  return out;
}

inline StartModel start_model_from_json(const json& j)
{
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "constant-one")
    return StartModel::constant_one();
  if (variant == "gamma")
    return StartModel::gamma_univ(j.at("shape").get<double>(),
                                  j.at("scale").get<double>());
  if (variant != "exponential-product" && variant != "marshall-olkin")
    throw FormatError("unknown start model variant: " + variant);
  const std::vector<double> mu_values = j.at("mu").get<std::vector<double>>();
  Eigen::VectorXd mu(static_cast<Eigen::Index>(mu_values.size()));
  for (std::size_t k = 0; k < mu_values.size(); ++k)
    mu[static_cast<Eigen::Index>(k)] = mu_values[k];
  if (variant == "exponential-product")
    return StartModel::exponential_product(mu);
  if (variant == "marshall-olkin")
    return StartModel::marshall_olkin(mu, j.at("mu0").get<double>());
  throw FormatError("unknown start model variant: " + variant);
}

inline json diagnostic_report_to_json(const DiagnosticReport& report)
{
  json out;
  out["start"] = report.start_descriptor;
  out["band_halfwidth"] = report.band_halfwidth;
  out["percent_in_band"] = report.percent_in_band;
  out["decision"] = to_string(report.decision);
  out["log_weights"] = vector_to_json(report.log_weights);
  return out;
}

inline DiagnosticReport diagnostic_report_from_json(const json& j)
{
  DiagnosticReport report;
  report.start_descriptor = j.at("start").get<std::string>();
  report.band_halfwidth = j.at("band_halfwidth").get<double>();
  report.percent_in_band = j.at("percent_in_band").get<double>();
  const std::string decision = j.at("decision").get<std::string>();
  if (decision == "nonparametric")
    report.decision = Decision::Nonparametric;
  else if (decision == "semiparametric")
    report.decision = Decision::Semiparametric;
  else if (decision == "parametric")
    report.decision = Decision::Parametric;
  else
    throw FormatError("unknown decision: " + decision);
  const std::vector<double> w = j.at("log_weights").get<std::vector<double>>();
  report.log_weights.resize(static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k)
    report.log_weights[static_cast<Eigen::Index>(k)] = w[k];
  return report;
}

//! Plot-ready diagnostic trace: index, log-weight and the band lines.
inline std::string diagnostic_report_to_csv(const DiagnosticReport& report)
{
  std::ostringstream out;
  out << "i,log_weight,band_low,band_high\n";
  for (Eigen::Index i = 0; i < report.log_weights.size(); ++i)
    out << (i + 1) << "," << csv_number(report.log_weights[i]) << ","
        << csv_number(-report.band_halfwidth) << ","
        << csv_number(report.band_halfwidth) << "\n";
  return out.str();
}

} // namespace io
} // namespace orthant
