#pragma once

#include <cstddef>

namespace cmra {

/// Index into a QuantityGrid; quantity share = index / resolution.
using GridIndex = int;

/// Uniform discretization of the unit supply: points k/N, k = 0..N.
///
/// The resolution is rounded up so that the cap, the residual 1 - cap and
/// one half are exact grid points. Bids at other quantities are rejected.
class QuantityGrid
{
public:
  QuantityGrid(int requested_resolution, double cap);

  int resolution() const { return resolution_; }
  std::size_t size() const { return static_cast<std::size_t>(resolution_) + 1; }
  double cap() const { return cap_; }

  GridIndex cap_index() const { return cap_index_; }
  GridIndex residual_index() const { return resolution_ - cap_index_; }
  GridIndex half_index() const { return resolution_ / 2; }

  double share(GridIndex k) const { return static_cast<double>(k) / static_cast<double>(resolution_); }

  /// Exact grid point for x; throws DomainError when x is off-grid.
  GridIndex index_of(double x) const;
  bool contains(GridIndex k) const { return k >= 0 && k <= resolution_; }

private:
  int resolution_;
  double cap_;
  GridIndex cap_index_;
};

/// Smallest denominator d <= 10^6 with x * d integral (to 1e-9), or 0 if none.
int rational_denominator(double x);

}  // namespace cmra
