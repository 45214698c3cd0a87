#include "pm/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pm {

double cone_constant_a(double beta) { return std::pow(2.0, beta) * (2.0 + beta); }

namespace {

ConeReport check_values(const std::vector<double>& v, double beta, double mass,
                        const ConeCheckOptions& opt) {
  const int m = static_cast<int>(v.size());
  ConeReport rep;
  rep.beta = beta;
  rep.resolution = m;
  rep.positive_ok = true;
  rep.decreasing_ok = true;
  rep.weighted_increasing_ok = true;
  rep.pointwise_bound_ok = true;
  double worst = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < m; ++i) {
    const double viol = -v[i];  // positive when v[i] < 0
    worst = std::max(worst, viol);
    if (v[i] < -opt.slack) rep.positive_ok = false;
  }
  if (!rep.positive_ok || !(mass > 0.0)) {
    // Nonpositive input: fail immediately, the remaining conditions are
    // meaningless for a signed function.
    rep.positive_ok = false;
    rep.decreasing_ok = rep.weighted_increasing_ok = rep.pointwise_bound_ok = false;
    rep.max_violation = worst;
    return rep;
  }

  const double a = cone_constant_a(beta);
  auto mid = [m](int i) { return (i + 0.5) / m; };

  for (int i = opt.monotone_skip; i + 1 < m; ++i) {
    const double d1 = v[i + 1] - v[i];
    worst = std::max(worst, d1);
    if (d1 > opt.slack) rep.decreasing_ok = false;

    const double wl = std::pow(mid(i), beta + 1.0) * v[i];
    const double wr = std::pow(mid(i + 1), beta + 1.0) * v[i + 1];
    const double d2 = wl - wr;
    worst = std::max(worst, d2);
    if (d2 > opt.slack) rep.weighted_increasing_ok = false;
  }

  for (int i = opt.pointwise_skip; i < m; ++i) {
    const double bound = a * std::pow(mid(i), -beta) * mass;
    const double d3 = v[i] - bound;
    worst = std::max(worst, d3);
    if (d3 > opt.slack * std::max(1.0, bound)) rep.pointwise_bound_ok = false;
  }

  rep.max_violation = worst;
  return rep;
}

}  // namespace

ConeReport cone_check(const GridDensity& f, double beta, ConeCheckOptions opt) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("cone_check: beta outside (0,1)");
  return check_values(f.values(), beta, f.mass(), opt);
}

ConeReport cone_check(const std::function<double(double)>& f, double beta,
                      int resolution, ConeCheckOptions opt) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("cone_check: beta outside (0,1)");
  if (resolution < 2) throw std::invalid_argument("cone_check: resolution < 2");
  std::vector<double> v(resolution);
  double mass = 0.0;
  for (int i = 0; i < resolution; ++i) {
    v[i] = f((i + 0.5) / resolution);
    mass += v[i];
  }
  mass /= resolution;
  return check_values(v, beta, mass, opt);
}

ConeEmbedding lip_cone_embed(const std::function<double(double)>& f, double A,
                             const GridDensity& h, double B, double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("lip_cone_embed: beta outside (0,1)");
  if (A < 0.0 || B < 0.0)
    throw std::invalid_argument("lip_cone_embed: negative budget");

  ConeEmbedding e;
  e.A = A;
  e.B = B;

  if (A == 0.0 || B == 0.0) {
    e.degenerate = true;
    e.F = GridDensity(h.bins(), 0.0);
    e.report = cone_check(e.F, beta);
    // Zero function: vacuously in the cone apart from the mass>0 clause.
    return e;
  }

  const ConeReport hrep = cone_check(h, beta);
  if (!hrep.pass())
    throw std::invalid_argument("lip_cone_embed: h fails the cone conditions");
  if (h.mass() > B * (1.0 + 1e-12))
    throw std::invalid_argument("lip_cone_embed: m(h) exceeds the budget B");

  // Certify the Lipschitz budget on h's grid: sup|f| + max grid slope <= A.
  const int m = h.bins();
  double sup = 0.0, lip = 0.0, prev = f(0.5 / m);
  sup = std::abs(prev);
  for (int i = 1; i < m; ++i) {
    const double cur = f((i + 0.5) / m);
    sup = std::max(sup, std::abs(cur));
    lip = std::max(lip, std::abs(cur - prev) * m);
    prev = cur;
  }
  if (sup + lip > A * (1.0 + 1e-9) + 1e-12)
    throw std::invalid_argument(
        "lip_cone_embed: grid-certified |f|_sup + Lip(f) exceeds A");

  const double a = cone_constant_a(beta);
  e.lambda = -A;
  e.nu = 6.0 * A;
  e.delta = 2.0 * A * B * std::max(a / (beta + 1.0), 4.0 * a / (a - 1.0));

  e.F = GridDensity(m, 0.0);
  double l1 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = h.midpoint(i);
    const double g = f(x) + e.lambda * x + e.nu;
    e.F[i] = g * h[i] + e.delta;
    l1 += std::abs(e.F[i]);
  }
  e.l1_norm = l1 / m;
  e.report = cone_check(e.F, beta);
  return e;
}

}  // namespace pm
