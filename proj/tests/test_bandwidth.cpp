#include <orthant/bandwidth.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using Catch::Approx;
using namespace orthant;

namespace {

std::vector<KernelFamily> gammas(Eigen::Index d)
{
  return std::vector<KernelFamily>(static_cast<std::size_t>(d),
                                   KernelFamily::make(KernelTag::Gamma));
}

//! Seeded positive sample with a sprinkle of exact zeros.
Dataset sample_with_zeros(Eigen::Index n, Eigen::Index d, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> expo(0.5);
  Eigen::MatrixXd values(n, d);
  std::vector<std::string> labels;
  for (Eigen::Index j = 0; j < d; ++j)
    labels.push_back("Z" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      values(i, j) = (i + j) % 4 == 0 ? 0.0 : expo(gen);
  return Dataset(values, labels, SupportKind::Continuous);
}

} // namespace

TEST_CASE("default prior schedule")
{
  const PriorSpec prior = default_prior(42, 3);
  CHECK(prior.alpha == Approx(std::pow(42.0, 0.4)).epsilon(1e-14));
  CHECK(prior.beta.size() == 3);
  CHECK(prior.beta.minCoeff() == 1.0);
  CHECK_THROWS_AS(default_prior(6, 1), DomainError);
}

TEST_CASE("inverse gamma prior log density")
{
  // direct formula at a hand point
  const double v = ig_log_pdf(2.0, 1.5, 0.7);
  const double expected = 2.0 * std::log(1.5) - std::lgamma(2.0) -
                          3.0 * std::log(0.7) - 1.5 / 0.7;
  CHECK(v == Approx(expected).epsilon(1e-13));
  CHECK(std::isinf(ig_log_pdf(2.0, 1.5, 0.0)));
}

TEST_CASE("posterior mixture weights normalize")
{
  const Dataset data = waterpumps();
  const PriorSpec prior = default_prior(data.n(), data.d());
  const StartModel start = fit_exponential_product(data);
  for (Eigen::Index i : { 0, 11, 41 }) {
    const Eigen::VectorXd w = adaptive_bayes_posterior_weights(data, start, prior, i);
    CHECK(w.sum() == Approx(1.0).margin(1e-10));
    CHECK(w[i] == 0.0);
    CHECK(w.minCoeff() >= 0.0);
  }
}

TEST_CASE("two-point closed form matches the hand posterior mean")
{
  Eigen::MatrixXd values(2, 1);
  values << 1.0, 2.0;
  const Dataset data(values, { "a" }, SupportKind::Continuous);
  PriorSpec prior;
  prior.alpha = 2.0;
  prior.beta = Eigen::VectorXd::Ones(1);
  const Eigen::MatrixXd h =
    adaptive_bayes_gamma_closed(data, StartModel::constant_one(), prior);
  // with a single admissible mixture component, the posterior mean is
  // (x_i log(x_i/x_j) + x_j - x_i + beta) / (alpha - 1/2)
  const double b01 = 1.0 * std::log(0.5) + 2.0 - 1.0 + 1.0;
  const double b10 = 2.0 * std::log(2.0) + 1.0 - 2.0 + 1.0;
  CHECK(h(0, 0) == Approx(b01 / 1.5).epsilon(1e-12));
  CHECK(h(1, 0) == Approx(b10 / 1.5).epsilon(1e-12));
}

TEST_CASE("zero targets use the boundary posterior branch")
{
  Eigen::MatrixXd values(3, 1);
  values << 0.0, 1.0, 3.0;
  const Dataset data(values, { "a" }, SupportKind::Continuous);
  PriorSpec prior;
  prior.alpha = 3.0;
  prior.beta = Eigen::VectorXd::Ones(1);
  const Eigen::MatrixXd h =
    adaptive_bayes_gamma_closed(data, StartModel::constant_one(), prior);
  CHECK(h.minCoeff() > 0.0);
  // at the zero target both remaining components contribute (x_j + beta)/alpha
  const Eigen::VectorXd w = adaptive_bayes_posterior_weights(
    data, StartModel::constant_one(), prior, 0);
  const double expected = w[1] * (1.0 + 1.0) / 3.0 + w[2] * (3.0 + 1.0) / 3.0;
  CHECK(h(0, 0) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("quadrature selector reproduces the closed form")
{
  const Dataset data = sample_with_zeros(9, 2, 99);
  PriorSpec prior;
  prior.alpha = 2.4;
  prior.beta = Eigen::VectorXd::Constant(2, 1.0);
  for (const StartModel& start :
       { StartModel::constant_one(), fit_exponential_product(data) }) {
    const Eigen::MatrixXd closed = adaptive_bayes_gamma_closed(data, start, prior);
    const Eigen::MatrixXd oracle = adaptive_bayes_quadrature(
      data, start, prior, KernelFamily::make(KernelTag::Gamma));
    const double rel =
      ((closed - oracle).cwiseAbs().array() / closed.cwiseAbs().array()).maxCoeff();
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("local selector at an observation stays within the sample scale")
{
  const Dataset data = sample_with_zeros(12, 1, 5);
  PriorSpec prior;
  prior.alpha = 3.0;
  prior.beta = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x(1);
  x << 1.0;
  const Eigen::VectorXd h =
    local_bayes(data, KernelFamily::make(KernelTag::Gamma), prior, x);
  CHECK(h[0] > 0.0);
  CHECK(h[0] < 100.0);
  Eigen::VectorXd outside(1);
  outside << -1.0;
  CHECK_THROWS_AS(local_bayes(data, KernelFamily::make(KernelTag::Gamma), prior, outside),
                  DomainError);
}

TEST_CASE("global selector returns a deterministic positive bandwidth")
{
  const Dataset x1 = waterpumps().select_columns({ 2 });
  PriorSpec prior;
  prior.alpha = 3.0;
  prior.beta = Eigen::VectorXd::Ones(1);
  const double h1 = global_bayes_1d(x1, KernelFamily::make(KernelTag::Gamma), prior);
  const double h2 = global_bayes_1d(x1, KernelFamily::make(KernelTag::Gamma), prior);
  CHECK(h1 > 0.0);
  CHECK(h1 == h2);
  CHECK_THROWS_AS(global_bayes_1d(waterpumps(), KernelFamily::make(KernelTag::Gamma), prior),
                  DomainError);
}

TEST_CASE("prior validation")
{
  const Dataset data = sample_with_zeros(8, 2, 1);
  PriorSpec bad;
  bad.alpha = 0.4;
  bad.beta = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(adaptive_bayes_gamma_closed(data, StartModel::constant_one(), bad),
                  DomainError);
  PriorSpec wrong_dim;
  wrong_dim.alpha = 2.0;
  wrong_dim.beta = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(adaptive_bayes_gamma_closed(data, StartModel::constant_one(), wrong_dim),
                  DomainError);
}

TEST_CASE("cross-validation selects an interior bandwidth on smooth data")
{
  std::mt19937_64 gen(17);
  std::gamma_distribution<double> dist(3.0, 2.0);
  Eigen::MatrixXd values(30, 1);
  for (Eigen::Index i = 0; i < 30; ++i)
    values(i, 0) = dist(gen);
  const Dataset data(values, { "g" }, SupportKind::Continuous);
  const Eigen::VectorXd h = cv_bandwidth(data, gammas(1));
  const double sd = std::sqrt(empirical_moments(data).cov(0, 0));
  CHECK(h[0] >= 1e-3 * sd);
  CHECK(h[0] <= 10.0 * sd);
  // the selected bandwidth should beat the search bounds
  const double at_h = detail::cv_objective(data, gammas(1), h);
  CHECK(at_h <= detail::cv_objective(data, gammas(1), Eigen::VectorXd::Constant(1, 1e-3 * sd)) + 1e-12);
  CHECK(at_h <= detail::cv_objective(data, gammas(1), Eigen::VectorXd::Constant(1, 10.0 * sd)) + 1e-12);
}
