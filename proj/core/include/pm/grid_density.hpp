#pragma once

#include <string>
#include <vector>

namespace pm {

// Piecewise-constant function on the uniform grid over [0,1]: value i lives
// on the half-open cell (i/m, (i+1)/m]. Mass is the Lebesgue integral, i.e.
// the mean of the values. Densities are normalized to mass 1.
class GridDensity {
public:
  GridDensity() = default;
  explicit GridDensity(int bins, double fill = 0.0);
  static GridDensity from_values(std::vector<double> values);

  int bins() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  double midpoint(int i) const { return (i + 0.5) / bins(); }
  double mass() const;
  void normalize();  // divide by mass; throws if mass <= 0

  // Value of the cell containing x (x = 0 reads the first cell).
  double value_at(double x) const;

private:
  std::vector<double> v_;
};

// CSV round trip, schema "x_mid,value" with one row per cell.
std::string to_csv(const GridDensity& f);
void write_csv(const GridDensity& f, const std::string& path);
GridDensity read_density_csv(const std::string& path);

}  // namespace pm
