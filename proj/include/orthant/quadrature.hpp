#pragma once

#include "orthant/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

namespace orthant {
namespace quad {

//! Tolerances and limits for adaptive integration.
struct QuadratureSpec
{
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
};

struct Rule1d
{
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

//! Gauss-Legendre rule on [a, b], nodes by Newton iteration on P_n.
inline Rule1d gauss_legendre(int n, double a, double b)
{
  Rule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15)
        break;
    }
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    rule.nodes[i] = xm - xl * z;
    rule.nodes[n - 1 - i] = xm + xl * z;
    rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
  0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
  0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0
};
inline constexpr std::array<double, 8> kronrod_weights = {
  0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
  0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728
};
inline constexpr std::array<double, 4> gauss7_weights = {
  0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469
};

struct Segment
{
  double a, b, integral, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template<typename F>
Segment gk15(const F& f, double a, double b)
{
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kronrod_weights[i] * fsum;
    if (i % 2 == 1)
      resg += gauss7_weights[i / 2] * fsum;
  }
  const double fc = f(c);
  resk += kronrod_weights[7] * fc;
  resg += gauss7_weights[3] * fc;
  Segment seg;
  seg.a = a;
  seg.b = b;
  seg.integral = resk * half;
  seg.error = std::abs((resk - resg) * half);
  return seg;
}

} // namespace detail

//! Globally adaptive Gauss-Kronrod integration of f over [a, b].
template<typename F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec = {})
{
  std::priority_queue<detail::Segment> segments;
  // start from a uniform partition so that features much narrower than the
  // interval still touch at least one evaluation point
  constexpr int initial = 16;
  double total = 0.0;
  double err = 0.0;
  for (int k = 0; k < initial; ++k) {
    const double lo = a + (b - a) * k / initial;
    const double hi = a + (b - a) * (k + 1) / initial;
    detail::Segment seg = detail::gk15(f, lo, hi);
    total += seg.integral;
    err += seg.error;
    segments.push(seg);
  }
  int splits = 0;
  while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (++splits > spec.max_subdivisions)
      throw NumericalError("adaptive quadrature did not converge",
                           err / std::max(std::abs(total), 1e-300));
    detail::Segment worst = segments.top();
    segments.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Segment left = detail::gk15(f, worst.a, mid);
    detail::Segment right = detail::gk15(f, mid, worst.b);
    total += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    segments.push(left);
    segments.push(right);
  }
  return total;
}

//! Adaptive integration over [0, upper) split on decade boundaries, for
//! integrands with slowly decaying tails.
template<typename F>
double integrate_semiaxis(const F& f, double upper, const QuadratureSpec& spec = {})
{
  double total = 0.0;
  double lo = 0.0, hi = 1.0;
  while (lo < upper) {
    hi = std::min(hi, upper);
    total += integrate(f, lo, hi, spec);
    lo = hi;
    hi *= 10.0;
  }
  return total;
}

//! Genz-Malik style adaptive cubature over an axis-aligned box (d >= 2).
//!
//! Uses a degree-7 fully symmetric rule with the embedded degree-5 rule
//! as error estimate; subdivides the worst region along its widest axis.
template<typename F>
double cubature(const F& f,
                const Eigen::VectorXd& lower,
                const Eigen::VectorXd& upper,
                double rel_tol = 1e-6,
                int max_regions = 20000)
{
  const int d = static_cast<int>(lower.size());
  const double l2 = std::sqrt(9.0 / 70.0);
  const double l3 = std::sqrt(9.0 / 10.0);
  const double l4 = l3;
  const double l5 = std::sqrt(9.0 / 19.0);
  const double twod = std::pow(2.0, d);
  const double w1 = twod * (12824.0 - 9120.0 * d + 400.0 * d * d) / 19683.0;
  const double w2 = twod * 980.0 / 6561.0;
  const double w3 = twod * (1820.0 - 400.0 * d) / 19683.0;
  const double w4 = twod * 200.0 / 19683.0;
  const double w5 = 6859.0 / 19683.0;
  const double w1e = twod * (729.0 - 950.0 * d + 50.0 * d * d) / 729.0;
  const double w2e = twod * 245.0 / 486.0;
  const double w3e = twod * (265.0 - 100.0 * d) / 1458.0;
  const double w4e = twod * 25.0 / 729.0;

  struct Region
  {
    Eigen::VectorXd center, halfwidth;
    double integral, error;
    int split_axis;
    bool operator<(const Region& o) const { return error < o.error; }
  };

  auto evaluate = [&](Region& r) {
    const Eigen::VectorXd& c = r.center;
    const Eigen::VectorXd& h = r.halfwidth;
    const double vol = h.prod();
    Eigen::VectorXd p = c;
    const double f0 = f(p);
    double sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum5 = 0.0;
    double max_divdiff = -1.0;
    int axis = 0;
    for (int j = 0; j < d; ++j) {
      p = c;
      p[j] = c[j] - l2 * h[j];
      const double f2a = f(p);
      p[j] = c[j] + l2 * h[j];
      const double f2b = f(p);
      p[j] = c[j] - l3 * h[j];
      const double f3a = f(p);
      p[j] = c[j] + l3 * h[j];
      const double f3b = f(p);
      sum2 += f2a + f2b;
      sum3 += f3a + f3b;
      const double divdiff =
        std::abs(f2a + f2b - 2.0 * f0 - (9.0 / 70.0) / (9.0 / 10.0) * (f3a + f3b - 2.0 * f0));
      if (divdiff > max_divdiff) {
        max_divdiff = divdiff;
        axis = j;
      }
    }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        for (int sj = -1; sj <= 1; sj += 2)
          for (int sk = -1; sk <= 1; sk += 2) {
            p = c;
            p[j] = c[j] + sj * l4 * h[j];
            p[k] = c[k] + sk * l4 * h[k];
            sum4 += f(p);
          }
    std::vector<int> signs(d, -1);
    for (;;) {
      p = c;
      for (int j = 0; j < d; ++j)
        p[j] = c[j] + signs[j] * l5 * h[j];
      sum5 += f(p);
      int j = 0;
      while (j < d && signs[j] == 1)
        signs[j++] = -1;
      if (j == d)
        break;
      signs[j] = 1;
    }
    r.integral = vol * (w1 * f0 + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5);
    const double est5 = vol * (w1e * f0 + w2e * sum2 + w3e * sum3 + w4e * sum4);
    r.error = std::abs(r.integral - est5);
    r.split_axis = axis;
  };

  std::priority_queue<Region> regions;
  Region root;
  root.center = 0.5 * (lower + upper);
  root.halfwidth = 0.5 * (upper - lower);
  evaluate(root);
  double total = root.integral;
  double err = root.error;
  regions.push(root);
  int count = 1;
  while (err > rel_tol * std::abs(total) && std::abs(total) > 0.0) {
    if (count > max_regions)
      throw NumericalError("cubature did not converge",
                           err / std::max(std::abs(total), 1e-300));
    Region worst = regions.top();
    regions.pop();
    Region left = worst, right = worst;
    const int ax = worst.split_axis;
    left.halfwidth[ax] *= 0.5;
    right.halfwidth[ax] *= 0.5;
    left.center[ax] -= left.halfwidth[ax];
    right.center[ax] += right.halfwidth[ax];
    evaluate(left);
    evaluate(right);
    total += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    regions.push(left);
    regions.push(right);
    count += 2;
  }
  return total;
}

//! Numerically stable sum by pairwise (tree) reduction.
inline double pairwise_sum(const std::vector<double>& values, std::size_t lo, std::size_t hi)
{
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      s += values[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& values)
{
  return values.empty() ? 0.0 : pairwise_sum(values, 0, values.size());
}

} // namespace quad
} // namespace orthant
