// Discrete Calderon-Zygmund operators with maximal truncations, and random
// Haar shift operators of complexity (m,k).
//
// Quadrature is midpoint with a hard shell test on cell centers, so the
// truncated integral is piecewise constant in (eps, nu) and the maximal
// truncation is an exact maximum over finitely many center-distance shells.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/random.hpp"
#include "dyadlab/sampled.hpp"

namespace dyad {

using KernelPoint = std::array<double, 2>;

/// Kernel with size |K(x,y)| <= c/|x-y|^n and delta-Holder smoothness off the
/// diagonal. The declared c must majorize both conditions; check_kernel
/// verifies it on random samples.
struct Kernel {
  std::function<double(const KernelPoint&, const KernelPoint&)> eval;
  double growth_c = 1.0;
  double holder_delta = 1.0;
  std::string name;
  int dim = 1;
};

// 1/(x-y). Size constant 1; the summed smoothness condition approaches
// sup 2|x-y|/|x'-y| -> 4 as |x-x'| -> |x-y|/2, so the declared c is 4.
inline Kernel hilbert_kernel() {
  return Kernel{[](const KernelPoint& x, const KernelPoint& y) {
                  return 1.0 / (x[0] - y[0]);
                },
                4.0, 1.0, "hilbert", 1};
}

// sign(x-y)/|x-y|: identical to the Hilbert kernel in one dimension
inline Kernel sign_kernel() {
  Kernel k = hilbert_kernel();
  k.eval = [](const KernelPoint& x, const KernelPoint& y) {
    double d = x[0] - y[0];
    return (d > 0 ? 1.0 : -1.0) / std::fabs(d);
  };
  k.name = "sign";
  return k;
}

// |x-y|^{-1/2} in one dimension: violates the size condition for
// |x-y| > c^2, a deliberate negative example
inline Kernel sqrt_kernel() {
  return Kernel{[](const KernelPoint& x, const KernelPoint& y) {
                  return 1.0 / std::sqrt(std::fabs(x[0] - y[0]));
                },
                1.0, 1.0, "sqrt", 1};
}

// first Riesz kernel (x1-y1)/|x-y|^3 in two dimensions; the gradient bound
// 2.5/r^3 on paths staying outside |x-y|/2 gives a summed Holder constant
// below 48
inline Kernel riesz_kernel() {
  return Kernel{[](const KernelPoint& x, const KernelPoint& y) {
                  double dx = x[0] - y[0], dy = x[1] - y[1];
                  double r = std::sqrt(dx * dx + dy * dy);
                  return dx / (r * r * r);
                },
                48.0, 1.0, "riesz1", 2};
}

struct KernelSample {
  KernelPoint x, xp, y;
  double ratio;
};

struct KernelCheck {
  bool pass = true;
  double max_growth_ratio = 0.0;
  double max_smooth_ratio = 0.0;
  std::optional<KernelSample> violating;
};

/// Sample triples (x, x', y) with |x-x'| < |x-y|/2 and measure both
/// conditions against the declared constant.
inline KernelCheck check_kernel(const Kernel& K, int samples = 4096,
                                uint64_t seed = 1) {
  auto rng = seeded_rng(seed);
  KernelCheck rep;
  auto record = [&](double ratio, double& slot, const KernelPoint& x,
                    const KernelPoint& xp, const KernelPoint& y) {
    slot = std::max(slot, ratio);
    if (ratio > 1.0 + 1e-9) {
      if (rep.pass) rep.violating = KernelSample{x, xp, y, ratio};
      rep.pass = false;
    }
  };
  for (int s = 0; s < samples; ++s) {
    KernelPoint x{uniform01(rng), K.dim == 2 ? uniform01(rng) : 0.0};
    KernelPoint y{uniform01(rng), K.dim == 2 ? uniform01(rng) : 0.0};
    double dx = x[0] - y[0], dy = x[1] - y[1];
    double dist = std::sqrt(dx * dx + dy * dy);
    if (dist < 1e-9) continue;
    double growth = std::fabs(K.eval(x, y)) * std::pow(dist, K.dim) / K.growth_c;
    record(growth, rep.max_growth_ratio, x, x, y);

    double step = uniform(rng, 0.05, 0.999) * dist / 2.0;
    double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    KernelPoint xp{x[0] + (K.dim == 2 ? step * std::cos(ang)
                                      : (uniform01(rng) < 0.5 ? step : -step)),
                   K.dim == 2 ? x[1] + step * std::sin(ang) : 0.0};
    double diff = std::fabs(K.eval(x, y) - K.eval(xp, y)) +
                  std::fabs(K.eval(y, x) - K.eval(y, xp));
    double smooth = diff * std::pow(dist, K.dim + K.holder_delta) /
                    (K.growth_c * std::pow(step, K.holder_delta));
    record(smooth, rep.max_smooth_ratio, x, xp, y);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Truncated singular integrals
// ---------------------------------------------------------------------------

/// T_{eps,nu} f(x) = sum over cells with eps < |x_c - y_c| < nu of
/// K(x_c, y_c) f(y_c) mu  (midpoint quadrature, open shell on centers).
inline SampledFunction truncated_apply(const Kernel& K,
                                       const SampledFunction& f, double eps,
                                       double nu) {
  DYAD_REQUIRE(eps > 0.0 && eps < nu, "truncated_apply: need 0 < eps < nu");
  DYAD_REQUIRE(K.dim == f.res.dim, "truncated_apply: dimension mismatch");
  SampledFunction out(f.res, 0.0);
  double mu = f.res.cell_measure();
  int64_t n = f.res.cells_per_axis();
  int64_t rows = f.res.dim == 2 ? n : 1;
  double h = 1.0 / static_cast<double>(n);
  if (f.res.dim == 1) {
    // walk shells outward and add the two sides adjacently, so odd-kernel
    // contributions against symmetric data cancel to an exact zero
    for (int64_t xx = 0; xx < n; ++xx) {
      KernelPoint xc{(static_cast<double>(xx) + 0.5) * h, 0.0};
      double acc = 0.0;
      for (int64_t kd = 1; kd < n; ++kd) {
        double d = static_cast<double>(kd) * h;
        if (d <= eps) continue;
        if (d >= nu) break;
        double shell = 0.0;
        if (xx - kd >= 0 && f.at(xx - kd) != 0.0)
          shell += K.eval(xc, {(static_cast<double>(xx - kd) + 0.5) * h, 0.0}) *
                   f.at(xx - kd);
        if (xx + kd < n && f.at(xx + kd) != 0.0)
          shell += K.eval(xc, {(static_cast<double>(xx + kd) + 0.5) * h, 0.0}) *
                   f.at(xx + kd);
        acc += shell;
      }
      out.at(xx) = acc * mu;
    }
    return out;
  }
  for (int64_t xy = 0; xy < rows; ++xy)
    for (int64_t xx = 0; xx < n; ++xx) {
      KernelPoint xc{(static_cast<double>(xx) + 0.5) * h,
                     (static_cast<double>(xy) + 0.5) * h};
      double acc = 0.0;
      for (int64_t yy = 0; yy < rows; ++yy)
        for (int64_t yx = 0; yx < n; ++yx) {
          double fv = f.at(yx, yy);
          if (fv == 0.0) continue;
          double ddx = static_cast<double>(xx - yx) * h;
          double ddy = static_cast<double>(xy - yy) * h;
          double d = std::sqrt(ddx * ddx + ddy * ddy);
          if (d > eps && d < nu) {
            KernelPoint yc{(static_cast<double>(yx) + 0.5) * h,
                           (static_cast<double>(yy) + 0.5) * h};
            acc += K.eval(xc, yc) * fv;
          }
        }
      out.at(xx, xy) = acc * mu;
    }
  return out;
}

/// T# f(x) = sup over 0 < eps < nu of |T_{eps,nu} f(x)|. Contributions are
/// grouped by exact integer squared center distance; the supremum over
/// truncation pairs is the max range-sum of the per-shell series, i.e.
/// max prefix - min prefix.
inline SampledFunction maximal_truncated(const Kernel& K,
                                         const SampledFunction& f) {
  DYAD_REQUIRE(K.dim == f.res.dim, "maximal_truncated: dimension mismatch");
  SampledFunction out(f.res, 0.0);
  double mu = f.res.cell_measure();
  int64_t n = f.res.cells_per_axis();
  int64_t rows = f.res.dim == 2 ? n : 1;
  double h = 1.0 / static_cast<double>(n);
  int64_t max_d2 = f.res.dim == 2 ? 2 * (n - 1) * (n - 1) + 1 : n;
  std::vector<double> shells(static_cast<size_t>(max_d2), 0.0);
  std::vector<int64_t> touched;
  for (int64_t xy = 0; xy < rows; ++xy)
    for (int64_t xx = 0; xx < n; ++xx) {
      KernelPoint xc{(static_cast<double>(xx) + 0.5) * h,
                     (static_cast<double>(xy) + 0.5) * h};
      touched.clear();
      for (int64_t yy = 0; yy < rows; ++yy)
        for (int64_t yx = 0; yx < n; ++yx) {
          double fv = f.at(yx, f.res.dim == 2 ? yy : 0);
          if (fv == 0.0) continue;
          int64_t ddx = xx - yx, ddy = f.res.dim == 2 ? xy - yy : 0;
          // shell key, monotone in center distance: |dx| in 1D, dx^2+dy^2 in 2D
          int64_t d2 = f.res.dim == 2 ? ddx * ddx + ddy * ddy : std::abs(ddx);
          if (d2 == 0) continue;
          KernelPoint yc{(static_cast<double>(yx) + 0.5) * h,
                         (static_cast<double>(yy) + 0.5) * h};
          if (shells[static_cast<size_t>(d2)] == 0.0)
            touched.push_back(d2);
          shells[static_cast<size_t>(d2)] += K.eval(xc, yc) * fv;
        }
      std::sort(touched.begin(), touched.end());
      double run = 0.0, lo = 0.0, hi = 0.0;
      for (int64_t d2 : touched) {
        run += shells[static_cast<size_t>(d2)];
        lo = std::min(lo, run);
        hi = std::max(hi, run);
        shells[static_cast<size_t>(d2)] = 0.0;
      }
      out.at(xx, f.res.dim == 2 ? xy : 0) = (hi - lo) * mu;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Haar shift operators
// ---------------------------------------------------------------------------

/// Generalized Haar function on a cube: one constant per dyadic child. The
/// plain (non-generalized) case additionally has mean zero.
struct HaarFunction {
  Cube support;
  std::vector<double> child_values;  // indexed like children(support)

  double sup_norm() const {
    double m = 0.0;
    for (double v : child_values) m = std::max(m, std::fabs(v));
    return m;
  }
};

/// Haar shift of complexity type (m,k): for each cube Q in scope and each
/// pair (Q', Q'') of descendants at depths m and k below Q,
///   S_Q f = sum <f, h^{Q''}_{Q'}> h^{Q'}_{Q''} / |Q|
/// with the pair normalization ||h'||_inf ||h''||_inf = 1.
struct HaarShift {
  DyadicGrid grid;
  int m = 0, k = 0;
  bool generalized = false;
  uint64_t seed = 0;

  struct PairEntry {
    HaarFunction in;   // h^{Q''}_{Q'}: paired against f
    HaarFunction out;  // h^{Q'}_{Q''}: where the mass lands
  };
  struct CubeEntry {
    Cube q;
    std::vector<PairEntry> pairs;
  };
  std::vector<CubeEntry> cubes;

  int complexity() const { return std::max({m, k, 1}); }
  int max_level() const { return grid.res.depth - std::max(m, k) - 1; }
};

namespace detail {

inline HaarFunction random_haar_function(const Cube& q, bool generalized,
                                         std::mt19937_64& rng) {
  size_t nc = size_t{1} << q.dim();
  HaarFunction h{q, std::vector<double>(nc, 0.0)};
  for (;;) {
    for (double& v : h.child_values) v = uniform(rng, -1.0, 1.0);
    double mean = 0.0;
    for (double v : h.child_values) mean += v;
    mean /= static_cast<double>(nc);
    for (double& v : h.child_values) v -= mean;
    if (h.sup_norm() < 1e-6) continue;  // degenerate draw
    if (generalized) {
      // constant part with amplitude at most the mean-zero part
      double amp = h.sup_norm() * uniform(rng, -1.0, 1.0);
      for (double& v : h.child_values) v += amp;
      if (h.sup_norm() < 1e-6) continue;
    }
    return h;
  }
}

// descendants of q exactly `depth` levels down, canonical order
inline void descendants(const Cube& q, int depth, std::vector<Cube>& out) {
  if (depth == 0) {
    out.push_back(q);
    return;
  }
  for (const Cube& c : children(q)) descendants(c, depth - 1, out);
}

inline double haar_inner_product(const SampledFunction& f,
                                 const BoxIntegrator& integ,
                                 const HaarFunction& h) {
  auto kids = children(h.support);
  double dn = static_cast<double>(f.res.denom());
  double scale = f.res.dim == 2 ? dn * dn : dn;
  double acc = 0.0;
  for (size_t i = 0; i < kids.size(); ++i)
    acc += h.child_values[i] * integ.integral_scaled(kids[i].box()) / scale;
  return acc;
}

}  // namespace detail

/// Deterministic-under-seed random Haar shift on the standard grid. Scope:
/// cubes meeting [0,1)^n whose (m,k)-descendants still have children at the
/// lattice resolution.
inline HaarShift random_haar_shift(const DyadicGrid& grid, int m, int k,
                                   uint64_t seed, bool generalized = false) {
  DYAD_REQUIRE(grid.is_standard(),
               "random_haar_shift: cell-exact application requires the "
               "standard grid");
  DYAD_REQUIRE(m >= 0 && k >= 0, "random_haar_shift: negative complexity");
  DYAD_REQUIRE(grid.res.depth - std::max(m, k) - 1 >= 0,
               "random_haar_shift: complexity exceeds the resolution");
  HaarShift S;
  S.grid = grid;
  S.m = m;
  S.k = k;
  S.generalized = generalized;
  S.seed = seed;
  auto rng = seeded_rng(seed ^ 0x5851f42d4c957f2dull);
  for (int level = 0; level <= S.max_level(); ++level) {
    for (const Cube& q : cubes_at_level(grid, level, domain_box(grid.res))) {
      HaarShift::CubeEntry entry{q, {}};
      std::vector<Cube> qs_in, qs_out;
      detail::descendants(q, m, qs_in);
      detail::descendants(q, k, qs_out);
      for (const Cube& qi : qs_in)
        for (const Cube& qo : qs_out) {
          HaarShift::PairEntry pe{
              detail::random_haar_function(qi, generalized, rng),
              detail::random_haar_function(qo, generalized, rng)};
          double s = pe.in.sup_norm() * pe.out.sup_norm();
          double r = 1.0 / std::sqrt(s);
          for (double& v : pe.in.child_values) v *= r;
          for (double& v : pe.out.child_values) v *= r;
          entry.pairs.push_back(std::move(pe));
        }
      S.cubes.push_back(std::move(entry));
    }
  }
  return S;
}

/// Per-sidelength band sums B_l(x) = sum over cubes Q at level l of S_Q f(x);
/// every truncation S_{eps,nu} is a contiguous sum of bands.
inline std::vector<SampledFunction> haar_band_sums(const HaarShift& S,
                                                   const SampledFunction& f) {
  BoxIntegrator integ(f);
  std::vector<SampledFunction> bands(static_cast<size_t>(S.max_level()) + 1,
                                     SampledFunction(f.res, 0.0));
  for (const auto& entry : S.cubes) {
    double qvol = entry.q.measure();
    SampledFunction& band = bands[static_cast<size_t>(entry.q.level)];
    for (const auto& pe : entry.pairs) {
      double coeff = detail::haar_inner_product(f, integ, pe.in) / qvol;
      if (coeff == 0.0) continue;
      auto kids = children(pe.out.support);
      for (size_t i = 0; i < kids.size(); ++i)
        accumulate_indicator(band, kids[i].box(),
                             coeff * pe.out.child_values[i]);
    }
  }
  return bands;
}

/// S_{eps,nu} f: sum of S_Q f over cubes with eps <= side(Q) <= nu.
inline SampledFunction haar_apply(const HaarShift& S, const SampledFunction& f,
                                  double eps, double nu) {
  DYAD_REQUIRE(eps > 0.0 && eps <= nu, "haar_apply: need 0 < eps <= nu");
  auto bands = haar_band_sums(S, f);
  SampledFunction out(f.res, 0.0);
  for (size_t l = 0; l < bands.size(); ++l) {
    double side = std::ldexp(1.0, -static_cast<int>(l));
    if (side >= eps && side <= nu)
      for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += bands[l].v[i];
  }
  return out;
}

/// S# f(x) = sup over eps <= nu of |S_{eps,nu} f(x)|: max over contiguous
/// band ranges, computed as max prefix - min prefix per cell.
inline SampledFunction haar_maximal(const HaarShift& S,
                                    const SampledFunction& f) {
  auto bands = haar_band_sums(S, f);
  SampledFunction out(f.res, 0.0);
  for (size_t i = 0; i < out.v.size(); ++i) {
    double run = 0.0, lo = 0.0, hi = 0.0;
    for (const auto& band : bands) {
      run += band.v[i];
      lo = std::min(lo, run);
      hi = std::max(hi, run);
    }
    out.v[i] = hi - lo;
  }
  return out;
}

/// Empirical probe of the oscillation bound for S#:
/// w_{lambda_n}(S# f; Q) / (kappa f_Q + sum_{i=1}^kappa f_{Q^(i)}).
inline double haar_oscillation_ratio(const HaarShift& S,
                                     const SampledFunction& f, const Cube& q) {
  int kappa = S.complexity();
  DYAD_REQUIRE(q.level >= kappa, "haar_oscillation_ratio: ancestors exhausted");
  SampledFunction sharp = haar_maximal(S, f);
  double lam = std::ldexp(1.0, -(f.res.dim + 2));
  double num = oscillation(sharp, q, lam);
  BoxIntegrator integ(f);
  double den = static_cast<double>(kappa) * integ.average(q);
  for (int i = 1; i <= kappa; ++i) den += integ.average(ancestor(q, i));
  if (den == 0.0) return 0.0;
  return num / den;
}

}  // namespace dyad
