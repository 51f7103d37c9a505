#include "fbl/marching.hpp"

#include <algorithm>
#include <cmath>

namespace fbl {

namespace {

// Corner order: 0=BL, 1=BR, 2=TR, 3=TL.
// Edge order:   0=B(0-1), 1=R(1-2), 2=T(3-2), 3=L(0-3).
const int kEdgeEnds[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};

Pt corner_pt(double x0, double y0, double h, int c) {
  switch (c) {
    case 0: return {x0, y0};
    case 1: return {x0 + h, y0};
    case 2: return {x0 + h, y0 + h};
    default: return {x0, y0 + h};
  }
}

Pt edge_cross(double x0, double y0, double h, const std::array<double, 4>& vals,
              double level, int e) {
  const int a = kEdgeEnds[e][0], b = kEdgeEnds[e][1];
  const double va = vals[a], vb = vals[b];
  double th = (vb == va) ? 0.5 : (level - va) / (vb - va);
  th = std::clamp(th, 0.0, 1.0);
  const Pt pa = corner_pt(x0, y0, h, a), pb = corner_pt(x0, y0, h, b);
  return {pa[0] + th * (pb[0] - pa[0]), pa[1] + th * (pb[1] - pa[1])};
}

// Positive area of a triangle with vertex values v0,v1,v2 under linear
// interpolation; area of the triangle itself is A.
double tri_positive_area(double A, double v0, double v1, double v2) {
  // Sort so that v0 <= v1 <= v2.
  if (v0 > v1) std::swap(v0, v1);
  if (v1 > v2) std::swap(v1, v2);
  if (v0 > v1) std::swap(v0, v1);
  if (v2 <= 0.0) return 0.0;
  if (v0 >= 0.0) return A;
  if (v1 <= 0.0) {
    // one positive corner; similar triangle ratio
    const double r2 = v2 / (v2 - v0), r1 = v2 / (v2 - v1);
    return A * r1 * r2;
  }
  // one negative corner
  const double r2 = (-v0) / (v2 - v0), r1 = (-v0) / (v1 - v0);
  return A * (1.0 - r1 * r2);
}

}  // namespace

CellSegments cell_segments(double x0, double y0, double h,
                           const std::array<double, 4>& vals,
                           const std::array<bool, 4>& live,
                           double level) {
  CellSegments out;
  int mask = 0;
  for (int c = 0; c < 4; ++c)
    if (live[c]) mask |= 1 << c;
  if (mask == 0 || mask == 15) return out;

  auto X = [&](int e) { return edge_cross(x0, y0, h, vals, level, e); };
  auto add = [&](int ea, int eb) {
    out.seg[out.count][0] = X(ea);
    out.seg[out.count][1] = X(eb);
    ++out.count;
  };

  switch (mask) {
    case 1: add(3, 0); break;           // BL
    case 2: add(0, 1); break;           // BR
    case 3: add(3, 1); break;           // BL BR
    case 4: add(1, 2); break;           // TR
    case 6: add(0, 2); break;           // BR TR
    case 7: add(3, 2); break;           // BL BR TR
    case 8: add(2, 3); break;           // TL
    case 9: add(0, 2); break;           // BL TL
    case 11: add(1, 2); break;          // BL BR TL
    case 12: add(3, 1); break;          // TR TL
    case 13: add(0, 1); break;          // BL TR TL
    case 14: add(3, 0); break;          // BR TR TL
    case 5: {                           // BL TR saddle
      const double mid = 0.25 * (vals[0] + vals[1] + vals[2] + vals[3]);
      if (mid > level) { add(0, 1); add(2, 3); }
      else             { add(3, 0); add(1, 2); }
      break;
    }
    case 10: {                          // BR TL saddle
      const double mid = 0.25 * (vals[0] + vals[1] + vals[2] + vals[3]);
      if (mid > level) { add(3, 0); add(1, 2); }
      else             { add(0, 1); add(2, 3); }
      break;
    }
    default: break;
  }
  return out;
}

double cell_positive_fraction(const std::array<double, 4>& vals, double level) {
  const double v0 = vals[0] - level, v1 = vals[1] - level, v2 = vals[2] - level,
               v3 = vals[3] - level;
  const double vc = 0.25 * (v0 + v1 + v2 + v3);
  const double A = 0.25;  // each fan triangle is a quarter of the unit cell
  double a = tri_positive_area(A, v0, v1, vc);  // bottom
  a += tri_positive_area(A, v1, v2, vc);        // right
  a += tri_positive_area(A, v2, v3, vc);        // top
  a += tri_positive_area(A, v3, v0, vc);        // left
  return std::clamp(a, 0.0, 1.0);
}

double edge_positive_fraction(double a, double b, double level) {
  const bool la = a > level, lb = b > level;
  if (la && lb) return 1.0;
  if (!la && !lb) return 0.0;
  const double th = (level - a) / (b - a);
  return la ? th : 1.0 - th;
}

}  // namespace fbl
