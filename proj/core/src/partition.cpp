#include "pm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pm {

double BranchPartition::length(int theta) const {
  if (theta < 1 || theta > cells())
    throw std::out_of_range("BranchPartition::length: theta outside [1, 2^n]");
  return endpoints[theta] - endpoints[theta - 1];
}

Branch BranchPartition::branch_at(int theta, int k) const {
  if (theta < 1 || theta > cells())
    throw std::out_of_range("BranchPartition::branch_at: bad theta");
  if (k < 1 || k > n) throw std::out_of_range("BranchPartition::branch_at: bad k");
  const unsigned bit = static_cast<unsigned>(n - k);
  return ((static_cast<unsigned>(theta - 1) >> bit) & 1u) ? Branch::right
                                                          : Branch::left;
}

double BranchPartition::cell_inverse(int theta, double y) const {
  // T~_n^{-1} = T_1^{-1} o ... o T_n^{-1}: peel maps from the last one.
  double u = y;
  for (int k = n; k >= 1; --k)
    u = branch_inverse(seq.at(static_cast<std::size_t>(k)), branch_at(theta, k), u);
  return u;
}

double BranchPartition::composite_derivative(double x) const {
  double d = 1.0, y = x;
  for (int k = 1; k <= n; ++k) {
    const MapParameter p = seq.at(static_cast<std::size_t>(k));
    d *= derivative(p, y);
    y = apply(p, y);
  }
  return d;
}

BranchPartition build_partition(const AdmissibleSequence& seq, int n) {
  if (n < 1 || n > 20)
    throw std::invalid_argument("build_partition: n outside [1, 20]");
  if (auto len = seq.length(); len && static_cast<std::size_t>(n) > *len)
    throw std::invalid_argument("build_partition: sequence exhausted");

  std::vector<double> pts = {0.0, 1.0};
  for (int k = n; k >= 1; --k) {
    const MapParameter p = seq.at(static_cast<std::size_t>(k));
    std::vector<double> next;
    next.reserve(2 * pts.size() - 1);
    for (double e : pts) next.push_back(branch_inverse(p, Branch::left, e));
    // The left list ends at 1/2 = right-branch preimage of 0; skip the
    // duplicate when appending the right preimages.
    for (std::size_t i = 1; i < pts.size(); ++i)
      next.push_back(0.5 * (pts[i] + 1.0));
    pts = std::move(next);
  }

  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i] < pts[i + 1]))
      throw std::runtime_error(
          "build_partition: endpoint resolution exhausted at n = " +
          std::to_string(n));

  // Forward verification: every endpoint is an n-step preimage of {0,1}.
  for (double e : pts) {
    double y = e;
    for (int k = 1; k <= n; ++k) y = apply(seq.at(static_cast<std::size_t>(k)), y);
    if (std::min(std::abs(y), std::abs(y - 1.0)) > 1e-8)
      throw std::runtime_error(
          "build_partition: endpoint fails forward verification");
  }

  return BranchPartition{n, seq, std::move(pts)};
}

double leftmost_cell_length(const AdmissibleSequence& seq, int n) {
  if (n < 1) throw std::invalid_argument("leftmost_cell_length: n < 1");
  if (auto len = seq.length(); len && static_cast<std::size_t>(n) > *len)
    throw std::invalid_argument("leftmost_cell_length: sequence exhausted");
  double y = 1.0;
  for (int k = n; k >= 1; --k)
    y = branch_inverse(seq.at(static_cast<std::size_t>(k)), Branch::left, y);
  return y;
}

RateFit leftmost_length_law(const AdmissibleSequence& seq,
                            const std::vector<int>& n_values) {
  if (n_values.size() < 4)
    throw std::invalid_argument("leftmost_length_law: needs >= 4 grid points");
  std::vector<DecayPoint> pts;
  pts.reserve(n_values.size());
  for (int n : n_values)
    pts.push_back({static_cast<double>(n), leftmost_cell_length(seq, n), 0.0});
  return fit_decay(pts);
}

ConditionalDensity conditional_density(const GridDensity& h,
                                       const BranchPartition& part, int theta) {
  if (theta < 1 || theta > part.cells())
    throw std::out_of_range("conditional_density: theta outside [1, 2^n]");
  const double a = part.endpoints[theta - 1];
  const double b = part.endpoints[theta];
  const int m = h.bins();

  GridDensity cond(m, 0.0);
  double measure = 0.0;
  for (int i = 0; i < m; ++i) {
    const double lo = static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m;
    const double ov = std::min(b, hi) - std::max(a, lo);
    if (ov <= 0.0) continue;
    measure += h[i] * ov;
    cond[i] = h[i] * (ov * m);  // fraction of the cell actually covered
  }
  if (!(measure > 0.0))
    throw std::domain_error("conditional_density: cell carries no mass");
  for (int i = 0; i < m; ++i) cond[i] /= measure;

  ConditionalDensity cd;
  cd.theta = theta;
  cd.cell_measure = measure;
  cd.base = h;
  cd.conditional = std::move(cond);
  return cd;
}

GridDensity pushforward_conditional(const AdmissibleSequence& seq,
                                    const BranchPartition& part,
                                    ConditionalDensity& cd) {
  (void)seq;  // the partition carries the sequence it was built from
  const int m = cd.base.bins();
  GridDensity out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double x = out.midpoint(i);
    const double u = part.cell_inverse(cd.theta, x);
    const double dT = part.composite_derivative(u);
    out[i] = cd.base.value_at(u) / (cd.cell_measure * dT);
  }
  cd.pushed = out;
  return out;
}

}  // namespace pm
