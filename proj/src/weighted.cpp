#include "fbl/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbl/exponents.hpp"

namespace fbl {

HalfGrid make_half_grid(int tdim, std::array<double, 2> tmin, std::array<double, 2> tmax,
                        std::array<int, 2> tcells, int zrows, double h, bool staggered) {
  if (tdim != 1 && tdim != 2)
    throw std::invalid_argument("half grid: tangential dimension must be 1 or 2");
  if (zrows < 4) throw std::invalid_argument("half grid: need at least 4 rows");
  HalfGrid g;
  g.tdim = tdim;
  g.tmin = tmin;
  g.tmax = tmax;
  g.tcells = tcells;
  g.zrows = zrows;
  g.h = h;
  g.staggered = staggered;
  for (int a = 0; a < tdim; ++a) {
    if (tcells[a] < 4) throw std::invalid_argument("half grid: too few tangential cells");
    const double ha = (tmax[a] - tmin[a]) / tcells[a];
    if (std::abs(ha - h) > 1e-12 * h)
      throw std::invalid_argument("half grid: spacing mismatch on tangential axis");
  }
  return g;
}

double WeightedField::sample(double x0, double x1, double z) const {
  const HalfGrid& g = grid;
  auto frac = [](double f, int nmax) {
    f = std::clamp(f, 0.0, double(nmax));
    int i = std::min(int(f), nmax - 1);
    return std::pair<int, double>(i, f - i);
  };
  auto [i0, t0] = frac((x0 - g.tmin[0]) / g.h, g.tcells[0]);
  int i1 = 0;
  double t1 = 0.0;
  if (g.tdim == 2) std::tie(i1, t1) = frac((x1 - g.tmin[1]) / g.h, g.tcells[1]);
  const double zf = (z - g.zrow(0)) / g.h;
  auto [j, tz] = frac(zf, g.zrows - 1);

  auto plane = [&](int jj) -> double {
    if (g.tdim == 1) return (1 - t0) * at(i0, 0, jj) + t0 * at(i0 + 1, 0, jj);
    return (1 - t0) * (1 - t1) * at(i0, i1, jj) + t0 * (1 - t1) * at(i0 + 1, i1, jj) +
           (1 - t0) * t1 * at(i0, i1 + 1, jj) + t0 * t1 * at(i0 + 1, i1 + 1, jj);
  };
  return (1 - tz) * plane(j) + tz * plane(j + 1);
}

namespace {

struct Csr {
  std::vector<int> ptr, col;
  std::vector<double> val;
  int n = 0;
};

// Jacobi-preconditioned CG for SPD systems.
SolveStats pcg(const Csr& A, const std::vector<double>& b, std::vector<double>& x,
               double tol, int max_iter) {
  const int n = A.n;
  std::vector<double> r(n), z(n), p(n), Ap(n), dinv(n);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
      if (A.col[k] == i) d = A.val[k];
    dinv[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) acc += A.val[k] * v[A.col[k]];
      out[i] = acc;
    }
  };
  matvec(x, Ap);
  double bnorm = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = b[i] - Ap[i];
    bnorm += b[i] * b[i] * dinv[i];
  }
  bnorm = std::sqrt(std::max(bnorm, 1e-300));
  double rz = 0.0;
  for (int i = 0; i < n; ++i) {
    z[i] = dinv[i] * r[i];
    rz += r[i] * z[i];
  }
  p = z;
  SolveStats st;
  for (int it = 0; it < max_iter; ++it) {
    const double rn = std::sqrt(std::max(rz, 0.0));
    st.residual = rn / bnorm;
    st.iterations = it;
    if (st.residual <= tol) return st;
    matvec(p, Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0.0) break;
    const double a = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += a * p[i];
      r[i] -= a * Ap[i];
    }
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[i] = dinv[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw std::runtime_error("weighted solve: CG stalled at relative residual " +
                           std::to_string(st.residual));
}

bool outer_dirichlet(const HalfGrid& g, int i0, int i1, int j) {
  if (i0 == 0 || i0 == g.tn(0) - 1) return true;
  if (g.tdim == 2 && (i1 == 0 || i1 == g.tn(1) - 1)) return true;
  if (j == g.zrows - 1) return true;
  if (!g.staggered && j == 0) return true;  // bottom trace row
  return false;
}

// Assemble and solve div(z^s grad v) = 0 on the given half grid with the
// supplied Dirichlet values where outer_dirichlet holds.
WeightedField solve_on_grid(const HalfGrid& g, double s,
                            const std::vector<double>& dirichlet, double tol,
                            SolveStats* stats) {
  const int n0 = g.tn(0), n1 = g.tdim == 2 ? g.tn(1) : 1;
  std::vector<int> unknown_id(g.n_nodes(), -1);
  std::vector<std::size_t> unknowns;
  for (int j = 0; j < g.zrows; ++j)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n0; ++i0)
        if (!outer_dirichlet(g, i0, i1, j)) {
          unknown_id[g.node(i0, i1, j)] = int(unknowns.size());
          unknowns.push_back(g.node(i0, i1, j));
        }

  // Face weights: vertical faces carry the pointwise weight z_face^s; lateral
  // faces carry the exact integral mean of z^s over the control volume, which
  // keeps the integrable singularity at z=0 and makes tangential quadratics
  // exact discrete solutions.
  auto wlat = [&](int j) {
    const double z1 = g.staggered ? j * g.h : (j - 0.5) * g.h;
    const double z2 = g.staggered ? (j + 1) * g.h : (j + 0.5) * g.h;
    if (s == -1.0) return std::log(z2 / z1) / (z2 - z1);
    return (positive_pow(z2, 1.0 + s) - positive_pow(z1, 1.0 + s)) / ((1.0 + s) * (z2 - z1));
  };
  auto wvert = [&](int j) {  // face between rows j and j+1
    const double zf = g.staggered ? (j + 1) * g.h : (j + 0.5) * g.h;
    return positive_pow(zf, s);
  };

  WeightedField f;
  f.grid = g;
  f.values = dirichlet;  // Dirichlet values everywhere; unknowns start from data blend

  Csr A;
  A.n = int(unknowns.size());
  A.ptr.assign(A.n + 1, 0);
  std::vector<double> b(A.n, 0.0);
  std::vector<std::array<std::pair<int, double>, 7>> rows(A.n);
  std::vector<int> rowlen(A.n, 0);

  auto add = [&](int row, int col, double v) {
    auto& rr = rows[row];
    for (int k = 0; k < rowlen[row]; ++k)
      if (rr[k].first == col) {
        rr[k].second += v;
        return;
      }
    rr[rowlen[row]++] = {col, v};
  };

  for (std::size_t uix = 0; uix < unknowns.size(); ++uix) {
    const std::size_t nd = unknowns[uix];
    const int j = int(nd / (std::size_t(n0) * n1));
    const int rem = int(nd % (std::size_t(n0) * n1));
    const int i1 = g.tdim == 2 ? rem / n0 : 0;
    const int i0 = g.tdim == 2 ? rem % n0 : rem;

    auto couple = [&](int ii0, int ii1, int jj, double w) {
      add(int(uix), int(uix), w);
      const std::size_t nb = g.node(ii0, ii1, jj);
      const int id = unknown_id[nb];
      if (id >= 0)
        add(int(uix), id, -w);
      else
        b[uix] += w * dirichlet[nb];
    };

    const double wl = wlat(j);
    couple(i0 - 1, i1, j, wl);
    couple(i0 + 1, i1, j, wl);
    if (g.tdim == 2) {
      couple(i0, i1 - 1, j, wl);
      couple(i0, i1 + 1, j, wl);
    }
    if (j + 1 < g.zrows) couple(i0, i1, j + 1, wvert(j));
    if (j > 0)
      couple(i0, i1, j - 1, wvert(j - 1));
    // j == 0 on the staggered grid: no bottom face (zero weighted flux)
  }

  for (int i = 0; i < A.n; ++i) A.ptr[i + 1] = A.ptr[i] + rowlen[i];
  A.col.resize(A.ptr[A.n]);
  A.val.resize(A.ptr[A.n]);
  for (int i = 0; i < A.n; ++i)
    for (int k = 0; k < rowlen[i]; ++k) {
      A.col[A.ptr[i] + k] = rows[i][k].first;
      A.val[A.ptr[i] + k] = rows[i][k].second;
    }

  std::vector<double> x(A.n, 0.0);
  for (std::size_t uix = 0; uix < unknowns.size(); ++uix) x[uix] = dirichlet[unknowns[uix]];
  SolveStats st = pcg(A, b, x, tol, 100000);
  if (stats) *stats = st;
  for (std::size_t uix = 0; uix < unknowns.size(); ++uix) f.values[unknowns[uix]] = x[uix];
  return f;
}

std::vector<double> boundary_values(const HalfGrid& g,
                                    const std::function<double(double, double, double)>& data) {
  const int n1 = g.tdim == 2 ? g.tn(1) : 1;
  std::vector<double> vals(g.n_nodes(), 0.0);
  for (int j = 0; j < g.zrows; ++j)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < g.tn(0); ++i0) {
        const double x0 = g.tx(0, i0);
        const double x1 = g.tdim == 2 ? g.tx(1, i1) : 0.0;
        vals[g.node(i0, i1, j)] = data(x0, x1, g.zrow(j));
      }
  return vals;
}

}  // namespace

WeightedField solve_weighted(const WeightedProblem& prob, double solve_tol,
                             SolveStats* stats) {
  if (prob.limit)
    throw std::invalid_argument("solve_weighted: problem tagged LIMIT, use solve_limit");
  if (!(prob.s > -1.0 && prob.s <= 0.0))
    throw std::invalid_argument("solve_weighted: s must lie in (-1, 0]");
  if (!prob.grid.staggered)
    throw std::invalid_argument("solve_weighted: grid must be staggered in x_n");
  const std::vector<double> vals = boundary_values(prob.grid, prob.data);
  return solve_on_grid(prob.grid, prob.s, vals, solve_tol, stats);
}

WeightedField solve_limit(const WeightedProblem& prob, double solve_tol, SolveStats* stats) {
  if (!prob.limit) throw std::invalid_argument("solve_limit: problem not tagged LIMIT");
  HalfGrid g = prob.grid;
  g.staggered = false;  // bottom row carries the trace
  std::vector<double> vals = boundary_values(g, prob.data);

  // stage (i): harmonic trace on {x_n = 0} with data inherited at the corners
  const int n0 = g.tn(0), n1 = g.tdim == 2 ? g.tn(1) : 1;
  if (g.tdim == 1) {
    const double a = vals[g.node(0, 0, 0)], b = vals[g.node(n0 - 1, 0, 0)];
    for (int i0 = 0; i0 < n0; ++i0) {
      const double t = double(i0) / (n0 - 1);
      vals[g.node(i0, 0, 0)] = (1.0 - t) * a + t * b;
    }
  } else {
    // 5-point Laplace solve on the bottom plane, Dirichlet on its edge ring
    Csr A;
    std::vector<int> id(std::size_t(n0) * n1, -1);
    std::vector<std::size_t> unk;
    for (int i1 = 1; i1 < n1 - 1; ++i1)
      for (int i0 = 1; i0 < n0 - 1; ++i0) {
        id[std::size_t(i1) * n0 + i0] = int(unk.size());
        unk.push_back(std::size_t(i1) * n0 + i0);
      }
    A.n = int(unk.size());
    A.ptr.assign(A.n + 1, 0);
    std::vector<double> b(A.n, 0.0);
    std::vector<std::array<std::pair<int, double>, 5>> rows(A.n);
    std::vector<int> rl(A.n, 0);
    auto addA = [&](int r, int c, double v) {
      for (int k = 0; k < rl[r]; ++k)
        if (rows[r][k].first == c) {
          rows[r][k].second += v;
          return;
        }
      rows[r][rl[r]++] = {c, v};
    };
    for (std::size_t ux = 0; ux < unk.size(); ++ux) {
      const int i1 = int(unk[ux]) / n0, i0 = int(unk[ux]) % n0;
      auto cpl = [&](int a0, int a1) {
        addA(int(ux), int(ux), 1.0);
        const int nb = a1 * n0 + a0;
        if (id[nb] >= 0)
          addA(int(ux), id[nb], -1.0);
        else
          b[ux] += vals[g.node(a0, a1, 0)];
      };
      cpl(i0 - 1, i1);
      cpl(i0 + 1, i1);
      cpl(i0, i1 - 1);
      cpl(i0, i1 + 1);
    }
    for (int i = 0; i < A.n; ++i) A.ptr[i + 1] = A.ptr[i] + rl[i];
    A.col.resize(A.ptr[A.n]);
    A.val.resize(A.ptr[A.n]);
    for (int i = 0; i < A.n; ++i)
      for (int k = 0; k < rl[i]; ++k) {
        A.col[A.ptr[i] + k] = rows[i][k].first;
        A.val[A.ptr[i] + k] = rows[i][k].second;
      }
    std::vector<double> x(A.n, 0.0);
    pcg(A, b, x, solve_tol, 100000);
    for (std::size_t ux = 0; ux < unk.size(); ++ux) {
      const int i1 = int(unk[ux]) / n0, i0 = int(unk[ux]) % n0;
      vals[g.node(i0, i1, 0)] = x[ux];
    }
  }

  // stage (ii): interior solve with s = -1 face weights; bottom row Dirichlet
  return solve_on_grid(g, -1.0, vals, solve_tol, stats);
}

std::vector<BarrierSample> barrier_residual_q(double s, int which, double c0, double C0,
                                              int n_dim,
                                              const std::vector<std::array<double, 3>>& pts) {
  if (!(s > -1.0 && s < 0.0))
    throw std::domain_error("barrier_residual_q: s must lie in (-1, 0)");
  (void)c0;  // the additive constant drops out of every derivative
  std::vector<BarrierSample> out;
  out.reserve(pts.size());
  for (const auto& x : pts) {
    const double z = x[2];
    if (!(z > 0.0)) throw std::domain_error("barrier_residual_q: need x_n > 0");
    // Laplacian of -|x'|^2 over the n-1 tangential coordinates
    const double lap_tan = -2.0 * (n_dim - 1);
    double lap_z, dz;
    if (which == 1) {
      // z^2/(1+s) + z^(1-s)
      lap_z = 2.0 / (1.0 + s) + (1.0 - s) * (-s) * positive_pow(z, -1.0 - s);
      dz = 2.0 * z / (1.0 + s) + (1.0 - s) * positive_pow(z, -s);
    } else if (which == 2) {
      // (z^2 - z^(1-s))/(1+s)
      lap_z = (2.0 - (1.0 - s) * (-s) * positive_pow(z, -1.0 - s)) / (1.0 + s);
      dz = (2.0 * z - (1.0 - s) * positive_pow(z, -s)) / (1.0 + s);
    } else {
      throw std::invalid_argument("barrier_residual_q: barrier id must be 1 or 2");
    }
    const double res = C0 * (lap_tan + lap_z + s * dz / z);
    out.push_back({x, res});
  }
  return out;
}

double barrier_limit_pair_sup(double s, int grid_points) {
  if (!(s > -1.0 && s < 0.0))
    throw std::domain_error("barrier_limit_pair_sup: s must lie in (-1, 0)");
  double sup = 0.0;
  for (int k = 1; k <= grid_points; ++k) {
    const double z = double(k) / grid_points;
    const double lhs = (z * z - positive_pow(z, 1.0 - s)) / (1.0 + s);
    const double rhs = z * z * std::log(z);
    sup = std::max(sup, std::abs(lhs - rhs));
  }
  return sup;
}

C1AlphaFit c1alpha_fit(const WeightedField& v, double fit_radius, double ball_radius) {
  const HalfGrid& g = v.grid;
  const int n0 = g.tn(0), n1 = g.tdim == 2 ? g.tn(1) : 1;
  // tangential origin: center of the tangential box
  const double o0 = 0.5 * (g.tmin[0] + g.tmax[0]);
  const double o1 = g.tdim == 2 ? 0.5 * (g.tmin[1] + g.tmax[1]) : 0.0;

  // least squares v ~ v0 + a'.x' on the bottom row within fit_radius
  const int m = g.tdim + 1;
  std::vector<double> AtA(std::size_t(m) * m, 0.0), Atb(m, 0.0);
  int count = 0;
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const double x0 = g.tx(0, i0) - o0;
      const double x1 = g.tdim == 2 ? g.tx(1, i1) - o1 : 0.0;
      if (x0 * x0 + x1 * x1 > fit_radius * fit_radius) continue;
      ++count;
      const double row[3] = {1.0, x0, x1};
      const double val = v.at(i0, i1, 0);
      for (int a = 0; a < m; ++a) {
        Atb[a] += row[a] * val;
        for (int b = 0; b < m; ++b) AtA[a * m + b] += row[a] * row[b];
      }
    }
  if (count < m + 2) throw std::domain_error("c1alpha_fit: too few bottom-row nodes");
  // solve the tiny normal system by Gaussian elimination
  std::vector<double> M(AtA), rhs(Atb), sol(m, 0.0);
  for (int cpiv = 0; cpiv < m; ++cpiv) {
    int piv = cpiv;
    for (int r = cpiv + 1; r < m; ++r)
      if (std::abs(M[r * m + cpiv]) > std::abs(M[piv * m + cpiv])) piv = r;
    for (int c = 0; c < m; ++c) std::swap(M[cpiv * m + c], M[piv * m + c]);
    std::swap(rhs[cpiv], rhs[piv]);
    const double d = M[cpiv * m + cpiv];
    if (std::abs(d) < 1e-300) throw std::domain_error("c1alpha_fit: singular fit system");
    for (int r = 0; r < m; ++r) {
      if (r == cpiv) continue;
      const double f = M[r * m + cpiv] / d;
      for (int c = 0; c < m; ++c) M[r * m + c] -= f * M[cpiv * m + c];
      rhs[r] -= f * rhs[cpiv];
    }
  }
  for (int a = 0; a < m; ++a) sol[a] = rhs[a] / M[a * m + a];

  C1AlphaFit fit;
  fit.a_prime.assign(sol.begin() + 1, sol.end());
  const double v0 = sol[0];

  double rss = 0.0;
  int rssn = 0;
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const double x0 = g.tx(0, i0) - o0;
      const double x1 = g.tdim == 2 ? g.tx(1, i1) - o1 : 0.0;
      if (x0 * x0 + x1 * x1 > fit_radius * fit_radius) continue;
      double pred = v0 + sol[1] * x0;
      if (g.tdim == 2) pred += sol[2] * x1;
      const double r = v.at(i0, i1, 0) - pred;
      rss += r * r;
      ++rssn;
    }
  fit.lsq_residual = std::sqrt(rss / std::max(rssn, 1));

  // dyadic annuli of |x| for the log-log slope of the residual
  const int K = 5;
  std::vector<double> mk(K, 0.0);
  std::vector<bool> seen(K, false);
  double cmax = 0.0;
  const double rmin_fit = 2.0 * g.h;
  std::vector<std::pair<double, double>> samples;  // (|x|, residual)
  for (int j = 0; j < g.zrows; ++j)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n0; ++i0) {
        const double x0 = g.tx(0, i0) - o0;
        const double x1 = g.tdim == 2 ? g.tx(1, i1) - o1 : 0.0;
        const double z = g.zrow(j);
        const double rr = std::sqrt(x0 * x0 + x1 * x1 + z * z);
        if (rr > ball_radius || rr < rmin_fit) continue;
        double pred = v0 + sol[1] * x0;
        if (g.tdim == 2) pred += sol[2] * x1;
        const double res = std::abs(v.at(i0, i1, j) - pred);
        samples.emplace_back(rr, res);
        int k = int(std::floor(std::log2(ball_radius / rr)));
        if (k >= 0 && k < K) {
          mk[k] = std::max(mk[k], res);
          seen[k] = true;
        }
      }
  // regression log(mk) vs log(radius of annulus k)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int nreg = 0;
  for (int k = 0; k < K; ++k) {
    if (!seen[k] || mk[k] <= 1e-14) continue;
    const double lx = std::log(ball_radius * std::pow(2.0, -k - 0.5));
    const double ly = std::log(mk[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++nreg;
  }
  double slope = 1.0;
  if (nreg >= 2 && (nreg * sxx - sx * sx) > 1e-14)
    slope = (nreg * sxy - sx * sy) / (nreg * sxx - sx * sx);
  fit.alpha_fit = std::clamp(slope - 1.0, 1e-3, 1.0);
  for (const auto& [rr, res] : samples)
    cmax = std::max(cmax, res / std::pow(rr, 1.0 + fit.alpha_fit));
  fit.C_fit = cmax;
  return fit;
}

}  // namespace fbl
