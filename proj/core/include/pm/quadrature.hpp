#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace pm {

struct QuadNode {
  double x;
  double w;
};

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on the
// three-term recurrence. Exact for polynomials of degree 2n-1.
std::vector<QuadNode> gauss_legendre(int n);

// Gauss-Hermite nodes/weights for weight exp(-x^2) on the real line.
std::vector<QuadNode> gauss_hermite(int n);

// Integral of f over [a,b] with one n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order = 12);

// Composite rule over the sorted edge list (adjacent pairs form panels).
double gl_panels(const std::function<double(double)>& f,
                 const std::vector<double>& edges, int order = 12);

// Inverse standard normal CDF. Acklam's rational approximation polished by
// one Halley step against erfc; |Phi(result) - p| <= 1e-13 over (0,1).
double inverse_normal_cdf(double p);

// Upper incomplete gamma Gamma(a,x) = int_x^inf t^{a-1} e^{-t} dt for
// a > 0, x >= 0. Series for x < a+1, Lentz continued fraction otherwise.
double upper_incomplete_gamma(double a, double x);

}  // namespace pm
