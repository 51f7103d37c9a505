#pragma once

#include <array>
#include <vector>

namespace fbl {

using Pt = std::array<double, 2>;

// Level-set geometry of a single grid cell, values at the four corners in the
// order BL, BR, TR, TL and corner coordinates (x0,y0) .. (x0+h,y0+h).
// "live" means value > level; crossings are placed by linear interpolation
// along the edge (optionally on transformed values supplied by the caller).

struct CellSegments {
  std::array<std::array<Pt, 2>, 2> seg;
  int count = 0;
};

// Interface segments of the cell for the 16-case table; the ambiguous saddle
// cases are resolved by the corner mean. Vertices lie on cell edges.
// vals are the interpolation values (may be transformed), live flags are
// decided by the caller against the untransformed field.
CellSegments cell_segments(double x0, double y0, double h,
                           const std::array<double, 4>& vals,
                           const std::array<bool, 4>& live,
                           double level);

// Area fraction of {value > level} in the cell, exact for the piecewise-linear
// interpolant on the 4-triangle fan around the cell center.
double cell_positive_fraction(const std::array<double, 4>& vals, double level);

// Fraction of [0,1] where the linear interpolant between a and b exceeds level.
double edge_positive_fraction(double a, double b, double level);

}  // namespace fbl
