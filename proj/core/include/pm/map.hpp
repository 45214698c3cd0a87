#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pm {

// Interval map on [0,1] with a neutral fixed point at the origin:
//
//   T(x) = x (1 + (2x)^alpha)   on [0, 1/2)
//   T(x) = 2x - 1               on [1/2, 1]
//
// alpha in (0,1). The point x = 1/2 belongs to the right branch, so the
// derivative there is 2. The left branch is increasing and convex with
// T'(0) = 1.
class MapParameter {
public:
  explicit MapParameter(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw std::invalid_argument("MapParameter: alpha must lie in (0,1)");
  }
  double alpha() const { return alpha_; }

private:
  double alpha_;
};

enum class Branch { left, right };

namespace detail {

// (2x)^alpha. Dyadic alphas get sqrt chains: sqrt is correctly rounded and
// several times cheaper than pow, and these exponents dominate actual runs.
inline double pow_2x(double alpha, double x) {
  const double t = 2.0 * x;
  if (alpha == 0.5) return std::sqrt(t);
  if (alpha == 0.25) return std::sqrt(std::sqrt(t));
  if (alpha == 0.75) {
    const double r = std::sqrt(t);
    return r * std::sqrt(r);
  }
  return std::pow(t, alpha);
}

[[noreturn]] void throw_domain(const char* op, double x);

}  // namespace detail

inline double apply(const MapParameter& p, double x) {
  if (!(x >= 0.0) || !(x <= 1.0)) detail::throw_domain("apply", x);
  if (x < 0.5) return x * (1.0 + detail::pow_2x(p.alpha(), x));
  return 2.0 * x - 1.0;
}

inline double derivative(const MapParameter& p, double x) {
  if (!(x >= 0.0) || !(x <= 1.0)) detail::throw_domain("derivative", x);
  if (x < 0.5) return 1.0 + (1.0 + p.alpha()) * detail::pow_2x(p.alpha(), x);
  return 2.0;
}

// Inverse of the selected branch at y in [0,1]. The left branch is solved by
// a bracketed Newton iteration; the result satisfies |apply(x) - y| <= 1e-12.
double branch_inverse(const MapParameter& p, Branch b, double y);

// Finite or unbounded sequence of map parameters (alpha_1, alpha_2, ...),
// all bounded by a common beta_star in (0,1). Indexing is 1-based to match
// the composition order of iterate(): step k applies the k-th map.
class AdmissibleSequence {
public:
  static AdmissibleSequence constant(double alpha);
  static AdmissibleSequence constant(double alpha, double beta_star);
  static AdmissibleSequence explicit_list(std::vector<double> alphas, double beta_star);
  static AdmissibleSequence cycle(std::vector<double> alphas, double beta_star);

  double beta_star() const { return beta_star_; }
  // nullopt means the sequence never runs out.
  std::optional<std::size_t> length() const;
  MapParameter at(std::size_t k) const;  // k >= 1

private:
  AdmissibleSequence(double beta_star, bool cyclic, std::vector<double> alphas);

  double beta_star_;
  bool cyclic_;
  std::vector<double> alphas_;
};

// Orbit of the time-dependent composition: points[j] = T_j o ... o T_1 (x0),
// with points[0] = x0.
struct Orbit {
  double x0 = 0.0;
  AdmissibleSequence seq;
  std::vector<double> points;
};

Orbit iterate(const AdmissibleSequence& seq, double x0, std::size_t n);

}  // namespace pm
