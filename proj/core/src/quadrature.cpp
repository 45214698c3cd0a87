#include "pm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pm {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Legendre P_n(x) and derivative by the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Hermite H_n (physicists') scaled as in the classical gauher routine.
void hermite_eval(int n, double x, double& p, double& dp) {
  const double inv_pi4 = 0.7511255444649424828587030047762;  // pi^{-1/4}
  double p0 = inv_pi4, p1 = x * std::sqrt(2.0) * inv_pi4;
  for (int k = 2; k <= n; ++k) {
    const double p2 =
        x * std::sqrt(2.0 / k) * p1 - std::sqrt((k - 1.0) / k) * p0;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = std::sqrt(2.0 * n) * p0;
}

}  // namespace

std::vector<QuadNode> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  std::vector<QuadNode> nodes(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 64; ++it) {
      legendre_eval(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_eval(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {-x, w};
    nodes[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) nodes[n / 2].x = 0.0;
  return nodes;
}

std::vector<QuadNode> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  std::vector<QuadNode> nodes(n);
  const int half = (n + 1) / 2;
  double x = 0.0;
  for (int i = 0; i < half; ++i) {
    // Standard initial guesses for the largest roots downward.
    if (i == 0)
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      x -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x;
    else if (i == 2)
      x = 1.86 * x - 0.86 * nodes[0].x;
    else if (i == 3)
      x = 1.91 * x - 0.91 * nodes[1].x;
    else
      x = 2.0 * x - nodes[i - 2].x;

    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      hermite_eval(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-14) break;
    }
    hermite_eval(n, x, p, dp);
    const double w = 2.0 / (dp * dp);
    nodes[i] = {x, w};
    nodes[n - 1 - i] = {-x, w};
  }
  if (n % 2 == 1) nodes[n / 2].x = 0.0;
  return nodes;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order) {
  static thread_local int cached_order = -1;
  static thread_local std::vector<QuadNode> cached;
  if (order != cached_order) {
    cached = gauss_legendre(order);
    cached_order = order;
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& nd : cached) s += nd.w * f(mid + half * nd.x);
  return s * half;
}

double gl_panels(const std::function<double(double)>& f,
                 const std::vector<double>& edges, int order) {
  if (edges.size() < 2) throw std::invalid_argument("gl_panels: needs >= 2 edges");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1]))
      throw std::invalid_argument("gl_panels: edges not strictly increasing");
    s += gl_integrate(f, edges[i], edges[i + 1], order);
  }
  return s;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("inverse_normal_cdf: p outside (0,1)");

  // Acklam's approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step on Phi(x) - p = 0 using erfc for the CDF.
  const double inv_sqrt2 = 0.70710678118654752440084436210485;
  const double cdf = 0.5 * std::erfc(-x * inv_sqrt2);
  const double pdf = std::exp(-0.5 * x * x) * 0.39894228040143267793994605993438;
  const double e = cdf - p;
  const double u = e / pdf;
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double upper_incomplete_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("upper_incomplete_gamma: a <= 0");
  if (x < 0.0) throw std::domain_error("upper_incomplete_gamma: x < 0");
  if (x == 0.0) return std::tgamma(a);

  if (x < a + 1.0) {
    // Lower series, then complement.
    double term = 1.0 / a, sum = term, ap = a;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double lower = sum * std::exp(-x + a * std::log(x));
    return std::tgamma(a) - lower;
  }

  // Lentz continued fraction for the upper function.
  const double tiny = 1e-300;
  double b0 = x + 1.0 - a, c = 1.0 / tiny, dd = 1.0 / b0, h = dd;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b0 += 2.0;
    dd = an * dd + b0;
    if (std::abs(dd) < tiny) dd = tiny;
    c = b0 + an / c;
    if (std::abs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    const double delta = dd * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x));
}

}  // namespace pm
