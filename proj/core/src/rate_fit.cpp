#include "pm/rate_fit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pm {

RateFit fit_decay(const std::vector<DecayPoint>& points, double sigma_mult) {
  RateFit fit;
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!(pt.n > 0.0))
      throw std::invalid_argument("fit_decay: nonpositive abscissa");
    const double mag = std::abs(pt.value);
    if (mag == 0.0 || mag <= sigma_mult * pt.std_error) {
      fit.dropped.push_back(static_cast<int>(i));
      continue;
    }
    xs.push_back(std::log(pt.n));
    ys.push_back(std::log(mag));
  }

  if (xs.size() < 4)
    throw std::invalid_argument(
        "fit_decay: fewer than 4 usable points (" + std::to_string(xs.size()) +
        " kept, " + std::to_string(fit.dropped.size()) +
        " dropped as unresolved above " + std::to_string(sigma_mult) +
        " sigma or zero)");

  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;

  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay: degenerate abscissas");

  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.points_used = static_cast<int>(n);

  double ssr = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ssr += resid * resid;
    sst += (ys[i] - my) * (ys[i] - my);
  }
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  return fit;
}

}  // namespace pm
