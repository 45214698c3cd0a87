#include "pm/map.hpp"

#include <algorithm>
#include <string>

namespace pm {

namespace detail {

void throw_domain(const char* op, double x) {
  throw std::domain_error(std::string(op) + ": x = " + std::to_string(x) +
                          " outside [0,1]");
}

}  // namespace detail

double branch_inverse(const MapParameter& p, Branch b, double y) {
  if (!(y >= 0.0) || !(y <= 1.0))
    throw std::domain_error("branch_inverse: y outside [0,1]");
  if (b == Branch::right) return 0.5 * (y + 1.0);

  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;

  // Solve x (1 + (2x)^alpha) = y on [0, 1/2]. The branch is increasing and
  // convex, so Newton from the secant guess converges fast; a maintained
  // bracket catches any step that escapes.
  double lo = 0.0, hi = 0.5;
  double x = 0.5 * y;  // below the root since T(x) >= x
  for (int it = 0; it < 100; ++it) {
    const double fx = x * (1.0 + detail::pow_2x(p.alpha(), x)) - y;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double dfx = 1.0 + (1.0 + p.alpha()) * detail::pow_2x(p.alpha(), x);
    double step = fx / dfx;
    double next = x - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

AdmissibleSequence::AdmissibleSequence(double beta_star, bool cyclic,
                                       std::vector<double> alphas)
    : beta_star_(beta_star), cyclic_(cyclic), alphas_(std::move(alphas)) {
  if (!(beta_star_ > 0.0) || !(beta_star_ < 1.0))
    throw std::invalid_argument("AdmissibleSequence: beta_star must lie in (0,1)");
  if (alphas_.empty())
    throw std::invalid_argument("AdmissibleSequence: empty parameter list");
  for (double a : alphas_) {
    (void)MapParameter(a);  // validates (0,1)
    if (a > beta_star_)
      throw std::invalid_argument(
          "AdmissibleSequence: alpha exceeds beta_star (inadmissible)");
  }
}

AdmissibleSequence AdmissibleSequence::constant(double alpha) {
  return AdmissibleSequence(alpha, true, {alpha});
}

AdmissibleSequence AdmissibleSequence::constant(double alpha, double beta_star) {
  return AdmissibleSequence(beta_star, true, {alpha});
}

AdmissibleSequence AdmissibleSequence::explicit_list(std::vector<double> alphas,
                                                     double beta_star) {
  return AdmissibleSequence(beta_star, false, std::move(alphas));
}

AdmissibleSequence AdmissibleSequence::cycle(std::vector<double> alphas,
                                             double beta_star) {
  return AdmissibleSequence(beta_star, true, std::move(alphas));
}

std::optional<std::size_t> AdmissibleSequence::length() const {
  if (cyclic_) return std::nullopt;
  return alphas_.size();
}

MapParameter AdmissibleSequence::at(std::size_t k) const {
  if (k == 0) throw std::out_of_range("AdmissibleSequence::at: index is 1-based");
  if (cyclic_) return MapParameter(alphas_[(k - 1) % alphas_.size()]);
  if (k > alphas_.size())
    throw std::out_of_range("AdmissibleSequence::at: sequence exhausted");
  return MapParameter(alphas_[k - 1]);
}

Orbit iterate(const AdmissibleSequence& seq, double x0, std::size_t n) {
  if (!(x0 >= 0.0) || !(x0 <= 1.0))
    throw std::domain_error("iterate: x0 outside [0,1]");
  if (auto len = seq.length(); len && n > *len)
    throw std::out_of_range("iterate: n exceeds sequence length");

  Orbit o{x0, seq, {}};
  o.points.resize(n + 1);
  o.points[0] = x0;
  double x = x0;
  for (std::size_t k = 1; k <= n; ++k) {
    x = apply(seq.at(k), x);
    o.points[k] = x;
  }
  return o;
}

}  // namespace pm
