#pragma once

#include <vector>

namespace pm {

struct DecayPoint {
  double n = 0.0;        // abscissa, must be positive
  double value = 0.0;    // magnitude whose decay is fitted
  double std_error = 0.0;
};

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  std::vector<int> dropped;  // indices of points excluded from the fit
};

// Ordinary least squares of log|value| against log n. Points whose magnitude
// is not resolved above noise (|value| <= sigma_mult * std_error) or whose
// magnitude is zero are dropped and reported; fewer than 4 surviving points
// is an error. Constant values fit exponent 0 with r_squared 1.
RateFit fit_decay(const std::vector<DecayPoint>& points, double sigma_mult = 3.0);

}  // namespace pm
