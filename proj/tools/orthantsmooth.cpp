//! Command-line front end for orthant data analysis: variability
//! indexes, parametric fits, kernel smoothing, model diagnostics and
//! Marshall-Olkin simulation with reproducible seeded output.

#include <orthant/orthant.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using orthant::io::json;

constexpr int exit_usage = 64;
constexpr int exit_data = 65;
constexpr int exit_numeric = 70;

struct DataOptions
{
  std::string fixture;
  std::string path;
  bool has_header = false;
  std::string kind = "continuous";
  std::string columns;
  std::string divisor = "n-1";
  std::string out_dir;
};

void add_data_options(CLI::App* cmd, DataOptions& opts)
{
  cmd->add_option("--fixture", opts.fixture, "Embedded dataset name (waterpumps)")
    ->check(CLI::IsMember({ "waterpumps" }));
  cmd->add_option("--data", opts.path, "CSV input path");
  cmd->add_flag("--header", opts.has_header, "First CSV line holds column names");
  cmd->add_option("--kind", opts.kind, "Data support kind")
    ->check(CLI::IsMember({ "continuous", "count" }));
  cmd->add_option("--columns", opts.columns,
                  "Comma-separated column labels or 1-based indexes to keep");
  cmd->add_option("--divisor", opts.divisor, "Covariance divisor")
    ->check(CLI::IsMember({ "n", "n-1" }));
  const char* env = std::getenv("ORTHANTSMOOTH_OUT");
  opts.out_dir = env ? env : ".";
  cmd->add_option("--out", opts.out_dir, "Output directory");
}

std::vector<std::string> split_list(const std::string& text)
{
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    parts.push_back(item);
  return parts;
}

Eigen::VectorXd parse_vector(const std::string& text)
{
  const std::vector<std::string> parts = split_list(text);
  if (parts.empty())
    throw orthant::FormatError("empty numeric list");
  Eigen::VectorXd out(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    try {
      out[static_cast<Eigen::Index>(k)] = std::stod(parts[k]);
    } catch (const std::exception&) {
      throw orthant::FormatError("unparsable number '" + parts[k] + "'");
    }
  }
  return out;
}

orthant::Dataset load_data(const DataOptions& opts, bool* used_fixture = nullptr)
{
  if (opts.fixture.empty() == opts.path.empty())
    throw orthant::FormatError("exactly one of --fixture and --data is required");
  orthant::Dataset data =
    !opts.fixture.empty()
      ? orthant::waterpumps()
      : orthant::load_csv(opts.path, opts.has_header,
                          opts.kind == "count" ? orthant::SupportKind::Count
                                               : orthant::SupportKind::Continuous);
  if (used_fixture)
    *used_fixture = !opts.fixture.empty();
  if (!opts.columns.empty()) {
    std::vector<Eigen::Index> keep;
    for (const std::string& token : split_list(opts.columns)) {
      Eigen::Index idx = -1;
      for (std::size_t j = 0; j < data.labels().size(); ++j)
        if (data.labels()[j] == token)
          idx = static_cast<Eigen::Index>(j);
      if (idx < 0) {
        try {
          idx = std::stol(token) - 1;
        } catch (const std::exception&) {
          throw orthant::FormatError("unknown column '" + token + "'");
        }
      }
      keep.push_back(idx);
    }
    data = data.select_columns(keep);
  }
  return data;
}

orthant::Divisor parse_divisor(const DataOptions& opts)
{
  return opts.divisor == "n" ? orthant::Divisor::N : orthant::Divisor::NMinus1;
}

std::filesystem::path out_path(const DataOptions& opts, const std::string& name)
{
  std::filesystem::create_directories(opts.out_dir);
  return std::filesystem::path(opts.out_dir) / name;
}

void maybe_export_fixture(const DataOptions& opts, bool used_fixture)
{
  if (used_fixture)
    orthant::io::atomic_write(out_path(opts, "waterpumps.csv"),
                              orthant::io::dataset_csv(orthant::waterpumps()));
}

orthant::KernelFamily parse_kernel(const std::string& name, int c, int m)
{
  using orthant::KernelFamily;
  using orthant::KernelTag;
  if (name == "gamma")
    return KernelFamily::make(KernelTag::Gamma);
  if (name == "lognormal2")
    return KernelFamily::make(KernelTag::LogNormal2);
  if (name == "weibull")
    return KernelFamily::make(KernelTag::Weibull);
  if (name == "birnbaum-saunders")
    return KernelFamily::make(KernelTag::BirnbaumSaunders);
  if (name == "inverse-gamma")
    return KernelFamily::make(KernelTag::InverseGamma);
  if (name == "reciprocal-inverse-gaussian")
    return KernelFamily::make(KernelTag::ReciprocalInverseGaussian);
  if (name == "inverse-gaussian")
    return KernelFamily::make(KernelTag::InverseGaussian);
  if (name == "lognormal1")
    return KernelFamily::make(KernelTag::LogNormal1);
  if (name == "binomial")
    return KernelFamily::make(KernelTag::Binomial);
  if (name == "poisson")
    return KernelFamily::make(KernelTag::Poisson);
  if (name == "dirdu")
    return KernelFamily::dirdu(c);
  if (name == "triangular")
    return KernelFamily::triangular(m);
  throw orthant::FormatError("unknown kernel family '" + name + "'");
}

std::vector<orthant::KernelFamily> kernels_for(const std::string& names,
                                               Eigen::Index d,
                                               int c,
                                               int m)
{
  std::vector<std::string> parts = split_list(names);
  if (parts.size() == 1)
    parts.assign(static_cast<std::size_t>(d), parts.front());
  if (parts.size() != static_cast<std::size_t>(d))
    throw orthant::FormatError("kernel list must have one entry or one per column");
  std::vector<orthant::KernelFamily> families;
  for (const std::string& name : parts)
    families.push_back(parse_kernel(name, c, m));
  return families;
}

orthant::PriorSpec prior_for(const orthant::Dataset& data,
                             double alpha_override,
                             const std::string& beta_override)
{
  orthant::PriorSpec prior = orthant::default_prior(data.n(), data.d());
  if (alpha_override > 0.0)
    prior.alpha = alpha_override;
  if (!beta_override.empty()) {
    Eigen::VectorXd beta = parse_vector(beta_override);
    if (beta.size() == 1)
      beta = Eigen::VectorXd::Constant(data.d(), beta[0]);
    prior.beta = beta;
  }
  return prior;
}

orthant::StartModel start_for(const std::string& name, const orthant::Dataset& data)
{
  if (name == "none")
    return orthant::StartModel::constant_one();
  if (name == "exp")
    return orthant::fit_exponential_product(data);
  if (name == "gamma") {
    if (data.d() != 1)
      throw orthant::DomainError("gamma start is univariate; select one column");
    return orthant::fit_gamma_mle(data.column(0));
  }
  throw orthant::FormatError("unknown start model '" + name + "'");
}

int run_indexes(const DataOptions& opts)
{
  bool used_fixture = false;
  const orthant::Dataset data = load_data(opts, &used_fixture);
  const orthant::IndexReport report =
    orthant::index_table(data, parse_divisor(opts));
  orthant::io::atomic_write(out_path(opts, "indexes.csv"),
                            orthant::io::index_report_to_csv(report));
  orthant::io::atomic_write(out_path(opts, "indexes.json"),
                            orthant::io::index_report_to_json(report).dump(2) + "\n");
  maybe_export_fixture(opts, used_fixture);
  std::cout << orthant::io::index_report_to_csv(report);
  return 0;
}

int run_fit(const DataOptions& opts, bool no_bias_correction)
{
  bool used_fixture = false;
  const orthant::Dataset data = load_data(opts, &used_fixture);
  const orthant::MomentSummary mom =
    orthant::empirical_moments(data, parse_divisor(opts));
  json out;
  out["labels"] = data.labels();
  const orthant::StartModel expfit = orthant::fit_exponential_product(data);
  out["exponential"] = orthant::io::start_model_to_json(expfit);
  json gammas = json::array();
  for (Eigen::Index j = 0; j < data.d(); ++j) {
    json g;
    g["label"] = data.labels()[static_cast<std::size_t>(j)];
    try {
      const orthant::StartModel fit =
        orthant::fit_gamma_mle(data.column(j), !no_bias_correction);
      g["shape"] = fit.shape();
      g["scale"] = fit.scale();
    } catch (const orthant::Error& err) {
      g["error"] = err.what();
    }
    gammas.push_back(g);
  }
  out["gamma"] = gammas;
  out["correlation"] = orthant::io::matrix_to_json(mom.corr);
  out["det_correlation"] = mom.corr.determinant();
  if (data.d() > 1) {
    json mvis = json::object();
    for (Eigen::Index i = 0; i < data.d(); ++i)
      for (Eigen::Index j = i + 1; j < data.d(); ++j) {
        const orthant::IndexReport pair = orthant::index_table(
          data.select_columns({ i, j }), parse_divisor(opts));
        mvis[data.labels()[static_cast<std::size_t>(i)] + "," +
             data.labels()[static_cast<std::size_t>(j)]] = *pair.joint_mvi;
      }
    const orthant::IndexReport joint = orthant::index_table(data, parse_divisor(opts));
    mvis["joint"] = *joint.joint_mvi;
    out["mvi"] = mvis;
  }
  orthant::io::atomic_write(out_path(opts, "fit.json"), out.dump(2) + "\n");
  maybe_export_fixture(opts, used_fixture);
  std::cout << "mu:";
  for (Eigen::Index j = 0; j < data.d(); ++j)
    std::cout << " " << orthant::io::table_number(expfit.mu()[j]);
  std::cout << "\n";
  for (const auto& g : gammas)
    if (g.contains("shape"))
      std::cout << "gamma " << g["label"].get<std::string>() << ": "
                << orthant::io::table_number(g["shape"].get<double>()) << " "
                << orthant::io::table_number(g["scale"].get<double>()) << "\n";
  return 0;
}

int run_smooth(const DataOptions& opts,
               const std::string& kernel_names,
               int kernel_c,
               int kernel_m,
               const std::string& selector,
               const std::string& start_name,
               double alpha_override,
               const std::string& beta_override,
               int grid_points,
               bool renormalize)
{
  bool used_fixture = false;
  const orthant::Dataset data = load_data(opts, &used_fixture);
  const std::vector<orthant::KernelFamily> families =
    kernels_for(kernel_names, data.d(), kernel_c, kernel_m);
  const orthant::StartModel start = start_for(start_name, data);

  json header;
  header["kernel"] = split_list(kernel_names);
  header["selector"] = selector;
  header["start"] = orthant::io::start_model_to_json(start);

  std::optional<orthant::BandwidthAssignment> bandwidths;
  if (selector == "adaptive-bayes") {
    const orthant::PriorSpec prior = prior_for(data, alpha_override, beta_override);
    bool all_gamma = true;
    for (const auto& f : families)
      if (f.tag != orthant::KernelTag::Gamma)
        all_gamma = false;
    const Eigen::MatrixXd h =
      all_gamma ? orthant::adaptive_bayes_gamma_closed(data, start, prior)
                : orthant::adaptive_bayes_quadrature(data, start, prior,
                                                     families.front());
    bandwidths = orthant::BandwidthAssignment::make_per_observation(h);
    std::ostringstream csv;
    for (Eigen::Index j = 0; j < data.d(); ++j)
      csv << (j ? "," : "") << "h_" << data.labels()[static_cast<std::size_t>(j)];
    csv << "\n";
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        csv << (j ? "," : "") << orthant::io::csv_number(h(i, j));
      csv << "\n";
    }
    orthant::io::atomic_write(out_path(opts, "bandwidths.csv"), csv.str());
    header["prior"] = { { "alpha", prior.alpha },
                        { "beta", orthant::io::vector_to_json(prior.beta) } };
  } else if (selector == "cv") {
    const Eigen::VectorXd h = orthant::cv_bandwidth(data, families);
    bandwidths = orthant::BandwidthAssignment::make_global(h);
    header["bandwidth"] = orthant::io::vector_to_json(h);
  } else if (selector == "global-bayes") {
    const orthant::PriorSpec prior = prior_for(data, alpha_override, beta_override);
    const double h = orthant::global_bayes_1d(data, families.front(), prior);
    bandwidths =
      orthant::BandwidthAssignment::make_global(Eigen::VectorXd::Constant(1, h));
    header["bandwidth"] = orthant::io::vector_to_json(bandwidths->global);
    header["prior"] = { { "alpha", prior.alpha },
                        { "beta", orthant::io::vector_to_json(prior.beta) } };
  } else if (selector != "local-bayes") {
    throw orthant::FormatError("unknown selector '" + selector + "'");
  }

  // evaluation grid: per axis from 0 to 1.2 * max
  const Eigen::Index d = data.d();
  std::vector<Eigen::VectorXd> axes;
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd axis(grid_points);
    const double top = data.column(j).maxCoeff() * 1.2;
    for (int g = 0; g < grid_points; ++g)
      axis[g] = top * (g + 0.5) / grid_points;
    if (data.support_kind() == orthant::SupportKind::Count) {
      const int limit = std::min<int>(grid_points - 1, static_cast<int>(top) + 1);
      axis.resize(limit + 1);
      for (int g = 0; g <= limit; ++g)
        axis[g] = g;
    }
    axes.push_back(axis);
  }

  const orthant::PriorSpec local_prior =
    selector == "local-bayes" ? prior_for(data, alpha_override, beta_override)
                              : orthant::PriorSpec{};

  std::ostringstream grid_csv;
  for (Eigen::Index j = 0; j < d; ++j)
    grid_csv << data.labels()[static_cast<std::size_t>(j)] << ",";
  grid_csv << "density\n";

  double cn = 1.0;
  if (bandwidths) {
    orthant::DensityEstimate est(data, families, *bandwidths, start);
    cn = orthant::normalizing_constant(est);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd x(d);
    for (;;) {
      for (Eigen::Index j = 0; j < d; ++j)
        x[j] = axes[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
      double value = orthant::semiparametric_at(est, x);
      if (renormalize)
        value /= cn;
      for (Eigen::Index j = 0; j < d; ++j)
        grid_csv << orthant::io::csv_number(x[j]) << ",";
      grid_csv << orthant::io::csv_number(value) << "\n";
      Eigen::Index j = 0;
      while (j < d) {
        if (++idx[static_cast<std::size_t>(j)] <
            axes[static_cast<std::size_t>(j)].size())
          break;
        idx[static_cast<std::size_t>(j)] = 0;
        ++j;
      }
      if (j == d)
        break;
    }
  } else {
    // local Bayes: a fresh bandwidth at every grid target
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd x(d);
    for (;;) {
      for (Eigen::Index j = 0; j < d; ++j)
        x[j] = axes[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
      const Eigen::VectorXd h =
        orthant::local_bayes(data, families.front(), local_prior, x);
      orthant::DensityEstimate est(
        data, families, orthant::BandwidthAssignment::make_global(h), start);
      const double value = orthant::semiparametric_at(est, x);
      for (Eigen::Index j = 0; j < d; ++j)
        grid_csv << orthant::io::csv_number(x[j]) << ",";
      grid_csv << orthant::io::csv_number(value) << "\n";
      Eigen::Index j = 0;
      while (j < d) {
        if (++idx[static_cast<std::size_t>(j)] <
            axes[static_cast<std::size_t>(j)].size())
          break;
        idx[static_cast<std::size_t>(j)] = 0;
        ++j;
      }
      if (j == d)
        break;
    }
    header["prior"] = { { "alpha", local_prior.alpha },
                        { "beta", orthant::io::vector_to_json(local_prior.beta) } };
  }
  header["normalizing_constant"] = cn;
  header["renormalized"] = renormalize;
  orthant::io::atomic_write(out_path(opts, "smooth_grid.csv"), grid_csv.str());
  orthant::io::atomic_write(out_path(opts, "smooth.json"), header.dump(2) + "\n");
  maybe_export_fixture(opts, used_fixture);
  std::cout << "C_n = " << orthant::io::table_number(cn) << "\n";
  return 0;
}

int run_diagnose(const DataOptions& opts,
                 const std::string& kernel_names,
                 int kernel_c,
                 int kernel_m,
                 const std::string& start_name,
                 double alpha_override,
                 const std::string& beta_override,
                 double band)
{
  bool used_fixture = false;
  const orthant::Dataset data = load_data(opts, &used_fixture);
  const std::vector<orthant::KernelFamily> families =
    kernels_for(kernel_names, data.d(), kernel_c, kernel_m);
  const orthant::StartModel start = start_for(start_name, data);
  const orthant::PriorSpec prior = prior_for(data, alpha_override, beta_override);
  const orthant::DiagnosticReport report =
    orthant::diagnose(data, start, families, prior, band);
  orthant::io::atomic_write(
    out_path(opts, "diagnose.json"),
    orthant::io::diagnostic_report_to_json(report).dump(2) + "\n");
  orthant::io::atomic_write(out_path(opts, "diagnose.csv"),
                            orthant::io::diagnostic_report_to_csv(report));
  maybe_export_fixture(opts, used_fixture);
  std::cout << "percent_in_band = " << orthant::io::table_number(report.percent_in_band)
            << "\ndecision = " << orthant::to_string(report.decision) << "\n";
  switch (report.decision) {
    case orthant::Decision::Nonparametric:
      return 0;
    case orthant::Decision::Semiparametric:
      return 1;
    case orthant::Decision::Parametric:
      return 2;
  }
  return 0;
}

int run_mo_sim(const DataOptions& opts,
               const std::string& mu_text,
               double mu0,
               long n,
               std::uint64_t seed)
{
  const Eigen::VectorXd mu = parse_vector(mu_text);
  const orthant::Dataset sample = orthant::mo_sample(mu, mu0, n, seed);
  orthant::io::atomic_write(out_path(opts, "mo_sample.csv"),
                            orthant::io::dataset_csv(sample));
  const orthant::MoMoments moments = orthant::mo_moments(mu, mu0);
  const orthant::MomentSummary emp = orthant::empirical_moments(sample);
  json out;
  out["mu"] = orthant::io::vector_to_json(mu);
  out["mu0"] = mu0;
  out["n"] = n;
  out["seed"] = seed;
  out["gvi_closed_form"] = orthant::mo_gvi(mu, mu0);
  out["mvi_closed_form"] = orthant::mo_mvi(mu, mu0);
  out["mean"] = orthant::io::vector_to_json(moments.mean);
  out["cov"] = orthant::io::matrix_to_json(moments.cov);
  out["gvi_from_moments"] = orthant::gvi(moments.mean, moments.cov);
  out["empirical_mean"] = orthant::io::vector_to_json(emp.mean);
  out["empirical_gvi"] = orthant::gvi(emp.mean, emp.cov);
  orthant::io::atomic_write(out_path(opts, "mo_summary.json"), out.dump(2) + "\n");
  std::cout << "written mo_sample.csv (" << n << " rows)\n";
  return 0;
}

int run_kernels_probe(const DataOptions& opts,
                      const std::string& family_name,
                      int kernel_c,
                      int kernel_m,
                      double x,
                      double h,
                      int grid_points)
{
  const orthant::KernelFamily family = parse_kernel(family_name, kernel_c, kernel_m);
  std::ostringstream csv;
  csv << "u,density\n";
  if (family.support_kind() == orthant::SupportKind::Count) {
    const int limit = static_cast<int>(x) + std::max(kernel_c, kernel_m) +
                      (family.tag == orthant::KernelTag::Poisson ? 30 : 2);
    for (int u = 0; u <= limit; ++u)
      csv << u << "," << orthant::io::csv_number(orthant::density(family, x, h, u))
          << "\n";
  } else {
    const double top = (x + 1.0) * 3.0;
    for (int g = 0; g < grid_points; ++g) {
      const double u = top * (g + 0.5) / grid_points;
      csv << orthant::io::csv_number(u) << ","
          << orthant::io::csv_number(orthant::density(family, x, h, u)) << "\n";
    }
  }
  const orthant::KernelMoments closed = orthant::moments(family, x, h);
  const orthant::KernelMoments numeric = orthant::numeric_moments(family, x, h);
  csv << "moment,closed,numeric\n";
  csv << "a," << orthant::io::csv_number(closed.a) << ","
      << orthant::io::csv_number(numeric.a) << "\n";
  csv << "b," << orthant::io::csv_number(closed.b) << ","
      << orthant::io::csv_number(numeric.b) << "\n";
  orthant::io::atomic_write(out_path(opts, "kernel_probe.csv"), csv.str());
  std::cout << "a: closed " << orthant::io::table_number(closed.a) << ", numeric "
            << orthant::io::table_number(numeric.a) << "\n"
            << "b: closed " << orthant::io::table_number(closed.b) << ", numeric "
            << orthant::io::table_number(numeric.b) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Analysis of multivariate nonnegative orthant data: "
                "variability indexes, associated-kernel smoothing, "
                "semiparametric diagnostics and Marshall-Olkin simulation" };
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker cap (execution is sequential)")
    ->check(CLI::PositiveNumber);

  DataOptions idx_opts;
  CLI::App* cmd_indexes =
    app.add_subcommand("indexes", "Variation and dispersion index table");
  add_data_options(cmd_indexes, idx_opts);

  DataOptions fit_opts;
  bool no_bias_correction = false;
  CLI::App* cmd_fit =
    app.add_subcommand("fit", "Parametric start models and correlation summary");
  add_data_options(cmd_fit, fit_opts);
  cmd_fit->add_flag("--no-bias-correction", no_bias_correction,
                    "Report the uncorrected gamma likelihood maximizer");

  DataOptions smooth_opts;
  std::string smooth_kernel = "gamma";
  std::string smooth_selector = "adaptive-bayes";
  std::string smooth_start = "none";
  double smooth_alpha = 0.0;
  std::string smooth_beta;
  int smooth_grid = 50;
  int smooth_c = 2, smooth_m = 1;
  bool smooth_renormalize = false;
  CLI::App* cmd_smooth = app.add_subcommand("smooth", "Density estimate on a grid");
  add_data_options(cmd_smooth, smooth_opts);
  cmd_smooth->add_option("--kernel", smooth_kernel,
                         "Kernel family (single name or one per column)");
  cmd_smooth->add_option("--selector", smooth_selector, "Bandwidth selector")
    ->check(CLI::IsMember({ "adaptive-bayes", "local-bayes", "cv", "global-bayes" }));
  cmd_smooth->add_option("--start", smooth_start, "Parametric start")
    ->check(CLI::IsMember({ "none", "exp", "gamma" }));
  cmd_smooth->add_option("--alpha", smooth_alpha, "Prior shape override");
  cmd_smooth->add_option("--beta", smooth_beta, "Prior scale override (list)");
  cmd_smooth->add_option("--grid-points", smooth_grid, "Grid nodes per axis")
    ->check(CLI::PositiveNumber);
  cmd_smooth->add_option("--categories", smooth_c, "DirDU category count");
  cmd_smooth->add_option("--arm", smooth_m, "Triangular kernel arm");
  cmd_smooth->add_flag("--renormalize", smooth_renormalize,
                       "Divide the estimate by its total mass");

  DataOptions diag_opts;
  std::string diag_kernel = "gamma";
  std::string diag_start = "exp";
  double diag_alpha = 0.0;
  std::string diag_beta;
  double diag_band = 1.96;
  int diag_c = 2, diag_m = 1;
  CLI::App* cmd_diagnose =
    app.add_subcommand("diagnose", "Model decision from the log-weight band");
  add_data_options(cmd_diagnose, diag_opts);
  cmd_diagnose->add_option("--kernel", diag_kernel, "Kernel family");
  cmd_diagnose->add_option("--start", diag_start, "Parametric start")
    ->check(CLI::IsMember({ "exp", "gamma" }));
  cmd_diagnose->add_option("--alpha", diag_alpha, "Prior shape override");
  cmd_diagnose->add_option("--beta", diag_beta, "Prior scale override (list)");
  cmd_diagnose->add_option("--band", diag_band, "Band halfwidth");
  cmd_diagnose->add_option("--categories", diag_c, "DirDU category count");
  cmd_diagnose->add_option("--arm", diag_m, "Triangular kernel arm");

  DataOptions mo_opts;
  std::string mo_mu = "1";
  double mo_mu0 = 0.0;
  long mo_n = 1000;
  std::uint64_t mo_seed = 0;
  CLI::App* cmd_mo = app.add_subcommand("mo-sim", "Marshall-Olkin exponential sample");
  mo_opts.out_dir = std::getenv("ORTHANTSMOOTH_OUT") ? std::getenv("ORTHANTSMOOTH_OUT") : ".";
  cmd_mo->add_option("--out", mo_opts.out_dir, "Output directory");
  cmd_mo->add_option("--mu", mo_mu, "Individual rates (comma list)")->required();
  cmd_mo->add_option("--mu0", mo_mu0, "Common shock rate");
  cmd_mo->add_option("--n", mo_n, "Sample size")->check(CLI::PositiveNumber);
  cmd_mo->add_option("--seed", mo_seed, "Generator seed")->required();

  DataOptions probe_opts;
  std::string probe_family = "gamma";
  double probe_x = 1.0, probe_h = 0.1;
  int probe_grid = 200, probe_c = 2, probe_m = 1;
  CLI::App* cmd_probe =
    app.add_subcommand("kernels-probe", "Kernel density grid and moment check");
  probe_opts.out_dir = std::getenv("ORTHANTSMOOTH_OUT") ? std::getenv("ORTHANTSMOOTH_OUT") : ".";
  // the bandwidth option is spelled --h, so this subcommand keeps only the
  // long help flag
  cmd_probe->set_help_flag("--help", "Print this help message and exit");
  cmd_probe->add_option("--out", probe_opts.out_dir, "Output directory");
  cmd_probe->add_option("--family", probe_family, "Kernel family")->required();
  cmd_probe->add_option("--x", probe_x, "Target")->required();
  cmd_probe->add_option("--h", probe_h, "Bandwidth")->required();
  cmd_probe->add_option("--grid-points", probe_grid, "Continuous grid size");
  cmd_probe->add_option("--categories", probe_c, "DirDU category count");
  cmd_probe->add_option("--arm", probe_m, "Triangular kernel arm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*cmd_indexes)
      return run_indexes(idx_opts);
    if (*cmd_fit)
      return run_fit(fit_opts, no_bias_correction);
    if (*cmd_smooth)
      return run_smooth(smooth_opts, smooth_kernel, smooth_c, smooth_m,
                        smooth_selector, smooth_start, smooth_alpha, smooth_beta,
                        smooth_grid, smooth_renormalize);
    if (*cmd_diagnose)
      return run_diagnose(diag_opts, diag_kernel, diag_c, diag_m, diag_start,
                          diag_alpha, diag_beta, diag_band);
    if (*cmd_mo)
      return run_mo_sim(mo_opts, mo_mu, mo_mu0, mo_n, mo_seed);
    if (*cmd_probe)
      return run_kernels_probe(probe_opts, probe_family, probe_c, probe_m, probe_x,
                               probe_h, probe_grid);
  } catch (const orthant::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const orthant::EvaluationUnderflowError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const orthant::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  }
  return exit_usage;
}
