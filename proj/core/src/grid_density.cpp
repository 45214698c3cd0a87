#include "pm/grid_density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pm/csv.hpp"

namespace pm {

GridDensity::GridDensity(int bins, double fill) {
  if (bins < 2) throw std::invalid_argument("GridDensity: needs at least 2 bins");
  v_.assign(static_cast<std::size_t>(bins), fill);
}

GridDensity GridDensity::from_values(std::vector<double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("GridDensity: needs at least 2 bins");
  GridDensity g;
  g.v_ = std::move(values);
  return g;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s / bins();
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw std::domain_error("GridDensity::normalize: mass <= 0");
  for (double& x : v_) x /= m;
}

double GridDensity::value_at(double x) const {
  if (!(x >= 0.0) || !(x <= 1.0))
    throw std::domain_error("GridDensity::value_at: x outside [0,1]");
  int i = static_cast<int>(std::ceil(x * bins())) - 1;
  if (i < 0) i = 0;
  if (i >= bins()) i = bins() - 1;
  return v_[i];
}

std::string to_csv(const GridDensity& f) {
  std::string out = "x_mid,value\n";
  for (int i = 0; i < f.bins(); ++i) {
    out += format_double(f.midpoint(i));
    out += ',';
    out += format_double(f[i]);
    out += '\n';
  }
  return out;
}

void write_csv(const GridDensity& f, const std::string& path) {
  write_text_atomic(path, to_csv(f));
}

GridDensity read_density_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("x_mid,", 0) != 0)
    throw std::runtime_error("read_density_csv: bad header in " + path);
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("read_density_csv: bad row in " + path);
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  return GridDensity::from_values(std::move(vals));
}

}  // namespace pm
