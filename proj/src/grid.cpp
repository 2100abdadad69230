#include "cmra/grid.hpp"

#include "cmra/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cmra {

int rational_denominator(double x)
{
  for (int d = 1; d <= 1'000'000; ++d) {
    const double scaled = x * d;
    if (std::abs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, scaled)) {
      return d;
    }
  }
  return 0;
}

QuantityGrid::QuantityGrid(int requested_resolution, double cap)
  : cap_(cap)
{
  if (!(cap > 0.5 && cap < 1.0)) {
    throw DomainError("cap must lie in (1/2, 1), got " + std::to_string(cap));
  }
  const int denom = rational_denominator(cap);
  if (denom == 0) {
    throw DomainError("cap " + std::to_string(cap) + " has no grid representation");
  }
  const int step = std::lcm(denom, 2);
  const int minimum = std::max(requested_resolution, 4);
  resolution_ = ((minimum + step - 1) / step) * step;
  cap_index_ = static_cast<GridIndex>(std::lround(cap * resolution_));
}

GridIndex QuantityGrid::index_of(double x) const
{
  const double scaled = x * resolution_;
  const double k = std::round(scaled);
  if (std::abs(scaled - k) > 1e-7 || k < 0 || k > resolution_) {
    throw DomainError("quantity " + std::to_string(x) + " is not a point of the " + std::to_string(resolution_) +
                      "-grid");
  }
  return static_cast<GridIndex>(k);
}

}  // namespace cmra
