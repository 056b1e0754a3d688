// Sampled functions: piecewise constant on the 2^{nL} lattice cells of
// [0,1)^n, zero outside. Geometry weights are exact integers, so integrals
// against cubes (including shifted, non-aligned ones) carry no quadrature
// error beyond double summation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dyadlab/geometry.hpp"

namespace dyad {

struct SampledFunction {
  Resolution res;
  std::vector<double> v;  // index = ix + 2^L * iy

  SampledFunction() = default;
  explicit SampledFunction(Resolution r, double fill = 0.0)
      : res(r), v(static_cast<size_t>(r.cell_count()), fill) {}

  int64_t nx() const { return res.cells_per_axis(); }
  size_t index(int64_t ix, int64_t iy = 0) const {
    return static_cast<size_t>(ix + nx() * iy);
  }
  double& at(int64_t ix, int64_t iy = 0) { return v[index(ix, iy)]; }
  double at(int64_t ix, int64_t iy = 0) const { return v[index(ix, iy)]; }

  // scaled box of cell #idx
  Box cell_box(size_t idx) const {
    Box b;
    b.dim = res.dim;
    int64_t ix = static_cast<int64_t>(idx) % nx();
    int64_t iy = static_cast<int64_t>(idx) / nx();
    b.lo[0] = 3 * ix;
    b.hi[0] = 3 * ix + 3;
    if (res.dim == 2) {
      b.lo[1] = 3 * iy;
      b.hi[1] = 3 * iy + 3;
    }
    return b;
  }
  double cell_center(size_t idx, int axis) const {
    int64_t ix = static_cast<int64_t>(idx) % nx();
    int64_t iy = static_cast<int64_t>(idx) / nx();
    int64_t i = axis == 0 ? ix : iy;
    return (static_cast<double>(i) + 0.5) / static_cast<double>(nx());
  }
};

/// Exact box integration against a fixed function. Integral values are in
/// scaled measure (multiply by denom^-n for the real integral); the weights
/// are exact integers so the only rounding is in the double sums.
class BoxIntegrator {
 public:
  explicit BoxIntegrator(const SampledFunction& f) : f_(&f) {
    const auto& r = f.res;
    int64_t n = r.cells_per_axis();
    int64_t rows = r.dim == 2 ? n : 1;
    pref_.assign(static_cast<size_t>(rows * (n + 1)), 0.0);
    for (int64_t y = 0; y < rows; ++y) {
      double acc = 0.0;
      for (int64_t x = 0; x < n; ++x) {
        acc += f.at(x, y);
        pref_[static_cast<size_t>(y * (n + 1) + x + 1)] = acc;
      }
    }
  }

  // integral of f over box in scaled measure units
  double integral_scaled(const Box& b) const {
    const auto& r = f_->res;
    int64_t d = r.denom();
    int64_t X0 = std::max(b.lo[0], int64_t{0});
    int64_t X1 = std::min(b.hi[0], d);
    if (X1 <= X0) return 0.0;
    if (r.dim == 1) return row_integral(0, X0, X1);
    int64_t Y0 = std::max(b.lo[1], int64_t{0});
    int64_t Y1 = std::min(b.hi[1], d);
    if (Y1 <= Y0) return 0.0;
    int64_t cy0 = Y0 / 3, cy1 = (Y1 + 2) / 3;
    double total = 0.0;
    for (int64_t cy = cy0; cy < cy1; ++cy) {
      int64_t wy = std::min(Y1, 3 * (cy + 1)) - std::max(Y0, 3 * cy);
      total += static_cast<double>(wy) * row_integral(cy, X0, X1);
    }
    return total;
  }

  double integral_real(const Box& b) const {
    double s = integral_scaled(b);
    double d = static_cast<double>(f_->res.denom());
    return f_->res.dim == 1 ? s / d : s / (d * d);
  }

  double average(const Cube& q) const {
    return integral_scaled(q.box()) / static_cast<double>(q.volume());
  }
  double average_box(const Box& b) const {
    return integral_scaled(b) / static_cast<double>(b.volume());
  }

 private:
  double row_integral(int64_t cy, int64_t X0, int64_t X1) const {
    int64_t c0 = X0 / 3, c1 = (X1 + 2) / 3;
    int64_t n = f_->res.cells_per_axis();
    const double* P = &pref_[static_cast<size_t>(cy * (n + 1))];
    if (c1 == c0 + 1)
      return static_cast<double>(X1 - X0) * f_->at(c0, cy);
    double left = static_cast<double>(3 * (c0 + 1) - X0) * f_->at(c0, cy);
    double right = static_cast<double>(X1 - 3 * (c1 - 1)) * f_->at(c1 - 1, cy);
    double mid = 3.0 * (P[c1 - 1] - P[c0 + 1]);
    return left + mid + right;
  }

  const SampledFunction* f_;
  std::vector<double> pref_;
};

/// f_Q = (1/|Q|) * integral of f over Q, with f zero-extended.
inline double average(const SampledFunction& f, const Cube& q) {
  return BoxIntegrator(f).average(q);
}

inline double integral(const SampledFunction& f) {
  return BoxIntegrator(f).integral_real(domain_box(f.res));
}

inline double lp_norm(const SampledFunction& f, double p) {
  double mu = f.res.cell_measure();
  double acc = 0.0;
  for (double x : f.v) acc += std::pow(std::fabs(x), p) * mu;
  return std::pow(acc, 1.0 / p);
}

// ||f||_{L^p(w)} with the weight zero outside [0,1)^n
inline double lp_norm_weighted(const SampledFunction& f,
                               const SampledFunction& w, double p) {
  double mu = f.res.cell_measure();
  double acc = 0.0;
  for (size_t i = 0; i < f.v.size(); ++i)
    acc += std::pow(std::fabs(f.v[i]), p) * w.v[i] * mu;
  return std::pow(acc, 1.0 / p);
}

/// Weight: strictly positive sampled function. Values are clipped into
/// [floor, cap] on ingestion; A_p characteristics divide by w-integrals and
/// raise w to negative powers, so degenerate zeros are rejected up front.
struct Weight {
  SampledFunction w;
  bool clipped = false;
  static constexpr double kFloor = 1e-12;
  static constexpr double kCap = 1e12;

  Weight() = default;
  explicit Weight(SampledFunction f, double floor_val = kFloor,
                  double cap_val = kCap)
      : w(std::move(f)) {
    for (double& x : w.v) {
      DYAD_REQUIRE(std::isfinite(x), "Weight: non-finite value");
      if (x < floor_val) {
        x = floor_val;
        clipped = true;
      } else if (x > cap_val) {
        x = cap_val;
        clipped = true;
      }
    }
  }
};

/// Non-increasing rearrangement of |f| restricted to a region, stored as
/// weighted pieces. Weights are exact scaled volumes, so queries at rational
/// t are tie-exact.
///
/// Convention: f*(t) = inf{a >= 0 : |{|f| > a}| < t}, with strict inequality.
/// This is the variant under which |m_f(Q)| <= (f chi_Q)*(|Q|/2) holds for
/// the maximal median and the selection-step counting argument goes through;
/// the "<= t" variant fails both on exact half-splits.
class Rearrangement {
 public:
  // pieces: (|value|, scaled weight); need not be sorted
  Rearrangement(std::vector<std::pair<double, int64_t>> pieces, Resolution res)
      : res_(res) {
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    vals_.reserve(pieces.size());
    cum_.reserve(pieces.size());
    int64_t acc = 0;
    for (auto& [val, wt] : pieces) {
      acc += wt;
      vals_.push_back(val);
      cum_.push_back(acc);
    }
  }

  // f*(t) with t = t_num/t_den > 0 in scaled measure units
  double value_at_frac(int64_t t_num, int64_t t_den) const {
    for (size_t j = 0; j < cum_.size(); ++j)
      if (cum_[j] * t_den >= t_num) return vals_[j];
    return 0.0;
  }

  double value_at_scaled(int64_t t) const { return value_at_frac(t, 1); }

  // t in real measure units
  double value_at(double t) const {
    double scale = static_cast<double>(res_.denom());
    if (res_.dim == 2) scale *= static_cast<double>(res_.denom());
    double ts = t * scale;
    for (size_t j = 0; j < cum_.size(); ++j)
      if (static_cast<double>(cum_[j]) >= ts) return vals_[j];
    return 0.0;
  }

  int64_t total_scaled() const { return cum_.empty() ? 0 : cum_.back(); }

 private:
  Resolution res_;
  std::vector<double> vals_;
  std::vector<int64_t> cum_;
};

// Weighted pieces of f over box (values with exact scaled overlap volumes).
inline std::vector<std::pair<double, int64_t>> box_pieces(
    const SampledFunction& f, const Box& b, bool absolute) {
  std::vector<std::pair<double, int64_t>> out;
  const auto& r = f.res;
  int64_t d = r.denom();
  Box dom = domain_box(r);
  // part of the box outside the domain contributes a zero piece
  int64_t outside = b.volume() - b.overlap_volume(dom);
  if (outside > 0) out.emplace_back(0.0, outside);
  int64_t X0 = std::max(b.lo[0], int64_t{0}), X1 = std::min(b.hi[0], d);
  if (X1 <= X0) return out;
  int64_t cx0 = X0 / 3, cx1 = (X1 + 2) / 3;
  int64_t Y0 = 0, Y1 = 3;  // dummy single row for dim 1
  if (r.dim == 2) {
    Y0 = std::max(b.lo[1], int64_t{0});
    Y1 = std::min(b.hi[1], d);
    if (Y1 <= Y0) return out;
  }
  int64_t cy0 = Y0 / 3, cy1 = (Y1 + 2) / 3;
  for (int64_t cy = cy0; cy < cy1; ++cy) {
    int64_t wy = r.dim == 2
                     ? std::min(Y1, 3 * (cy + 1)) - std::max(Y0, 3 * cy)
                     : 1;
    for (int64_t cx = cx0; cx < cx1; ++cx) {
      int64_t wx = std::min(X1, 3 * (cx + 1)) - std::max(X0, 3 * cx);
      double val = f.at(cx, r.dim == 2 ? cy : 0);
      out.emplace_back(absolute ? std::fabs(val) : val, wx * wy);
    }
  }
  return out;
}

inline Rearrangement rearrangement(const SampledFunction& f,
                                   std::optional<Cube> restricted_to = {}) {
  if (restricted_to)
    return Rearrangement(box_pieces(f, restricted_to->box(), true), f.res);
  return Rearrangement(box_pieces(f, domain_box(f.res), true), f.res);
}

inline bool lattice_aligned(const Box& b) {
  for (int a = 0; a < b.dim; ++a)
    if (b.lo[a] % 3 != 0 || b.hi[a] % 3 != 0) return false;
  return true;
}

inline bool lattice_aligned(const Cube& q) { return lattice_aligned(q.box()); }

// cell values of f over an aligned box inside [0,1)^n
inline std::vector<double> cell_values(const SampledFunction& f, const Box& b) {
  DYAD_REQUIRE(lattice_aligned(b), "cell_values: box not lattice-aligned");
  DYAD_REQUIRE(domain_box(f.res).contains(b),
               "cell_values: box leaves [0,1)^n");
  std::vector<double> out;
  int64_t cx0 = b.lo[0] / 3, cx1 = b.hi[0] / 3;
  if (f.res.dim == 1) {
    out.assign(f.v.begin() + cx0, f.v.begin() + cx1);
    return out;
  }
  int64_t cy0 = b.lo[1] / 3, cy1 = b.hi[1] / 3;
  out.reserve(static_cast<size_t>((cx1 - cx0) * (cy1 - cy0)));
  for (int64_t cy = cy0; cy < cy1; ++cy)
    for (int64_t cx = cx0; cx < cx1; ++cx) out.push_back(f.at(cx, cy));
  return out;
}

/// Maximal median: with cell values sorted ascending u_1 <= ... <= u_N this is
/// u_{floor(N/2)+1}, the largest m with max(|{f > m}|, |{f < m}|) <= |Q|/2.
inline double median(const SampledFunction& f, const Cube& q) {
  DYAD_REQUIRE(lattice_aligned(q) && domain_box(f.res).contains(q.box()),
               "median: cube must be lattice-aligned inside [0,1)^n");
  std::vector<double> u = cell_values(f, q.box());
  DYAD_REQUIRE(!u.empty(), "median: empty cube");
  size_t k = u.size() / 2;  // 0-based index of the (floor(N/2)+1)-th value
  std::nth_element(u.begin(), u.begin() + k, u.end());
  return u[k];
}

/// Local mean oscillation w_lambda(f;Q) = inf_c ((f-c)chi_Q)*(lambda|Q|).
/// Computed exactly: sort the (weighted) pieces and take the narrowest value
/// window whose complement has measure <= lambda|Q|.
inline double oscillation(const SampledFunction& f, const Cube& q,
                          double lambda) {
  DYAD_REQUIRE(lambda > 0.0 && lambda < 1.0, "oscillation: lambda in (0,1)");
  auto pieces = box_pieces(f, q.box(), false);
  std::sort(pieces.begin(), pieces.end());
  int64_t total = 0;
  for (auto& p : pieces) total += p.second;
  if (total == 0) return 0.0;
  // keep the narrowest value window whose complement weight is < lambda|Q|
  // strictly (matching the strict rearrangement convention)
  double t = lambda * static_cast<double>(total);
  double best = -1.0;
  size_t j = 0;
  int64_t wt = 0;  // weight of pieces[i..j-1]
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (j < i) {
      j = i;
      wt = 0;
    }
    while (j < pieces.size() && static_cast<double>(total - wt) >= t) {
      wt += pieces[j].second;
      ++j;
    }
    if (static_cast<double>(total - wt) >= t) break;  // no valid window left
    double width = pieces[j - 1].first - pieces[i].first;
    if (best < 0.0 || width < best) best = width;
    wt -= pieces[i].second;
  }
  return best < 0.0 ? 0.0 : best / 2.0;
}

// add coeff * chi_box to the cell representation (partial cells get the
// covered fraction, so integrals against cellwise functions stay exact)
inline void accumulate_indicator(SampledFunction& out, const Box& b,
                                 double coeff) {
  const auto& r = out.res;
  int64_t d = r.denom();
  int64_t X0 = std::max(b.lo[0], int64_t{0}), X1 = std::min(b.hi[0], d);
  if (X1 <= X0) return;
  double cell_vol = r.dim == 2 ? 9.0 : 3.0;
  int64_t cx0 = X0 / 3, cx1 = (X1 + 2) / 3;
  int64_t cy0 = 0, cy1 = 1;
  int64_t Y0 = 0, Y1 = 0;
  if (r.dim == 2) {
    Y0 = std::max(b.lo[1], int64_t{0});
    Y1 = std::min(b.hi[1], d);
    if (Y1 <= Y0) return;
    cy0 = Y0 / 3;
    cy1 = (Y1 + 2) / 3;
  }
  for (int64_t cy = cy0; cy < cy1; ++cy) {
    int64_t wy = r.dim == 2
                     ? std::min(Y1, 3 * (cy + 1)) - std::max(Y0, 3 * cy)
                     : 1;
    for (int64_t cx = cx0; cx < cx1; ++cx) {
      int64_t wx = std::min(X1, 3 * (cx + 1)) - std::max(X0, 3 * cx);
      out.at(cx, r.dim == 2 ? cy : 0) +=
          coeff * static_cast<double>(wx * wy) / cell_vol;
    }
  }
}

/// Piecewise-constant values on the fine lattice of [0,1)^n (resolution
/// 1/denom per axis, 3^n sub-cells per lattice cell). Shifted-grid cubes are
/// exact unions of fine cells, so indicator sums evaluate pointwise exactly.
struct FineFunction {
  Resolution res;
  std::vector<double> v;  // index = fx + denom * fy

  explicit FineFunction(Resolution r, double fill = 0.0) : res(r) {
    int64_t d = r.denom();
    int64_t count = r.dim == 2 ? d * d : d;
    DYAD_REQUIRE(count <= (int64_t{1} << 27),
                 "FineFunction: resolution too large for sub-cell storage");
    v.assign(static_cast<size_t>(count), fill);
  }

  double& at(int64_t fx, int64_t fy = 0) {
    return v[static_cast<size_t>(fx + res.denom() * fy)];
  }
  double at(int64_t fx, int64_t fy = 0) const {
    return v[static_cast<size_t>(fx + res.denom() * fy)];
  }

  // accumulate c over box ∩ [0,1)^n
  void add_box(const Box& b, double c) {
    int64_t d = res.denom();
    int64_t X0 = std::max(b.lo[0], int64_t{0}), X1 = std::min(b.hi[0], d);
    if (X1 <= X0) return;
    if (res.dim == 1) {
      for (int64_t x = X0; x < X1; ++x) v[static_cast<size_t>(x)] += c;
      return;
    }
    int64_t Y0 = std::max(b.lo[1], int64_t{0}), Y1 = std::min(b.hi[1], d);
    for (int64_t y = Y0; y < Y1; ++y)
      for (int64_t x = X0; x < X1; ++x) at(x, y) += c;
  }

  // min over the 3^n fine sub-cells of lattice cell (ix, iy)
  double cell_min(int64_t ix, int64_t iy = 0) const {
    double m = at(3 * ix, 3 * iy);
    for (int64_t dy = 0; dy < (res.dim == 2 ? 3 : 1); ++dy)
      for (int64_t dx = 0; dx < 3; ++dx)
        m = std::min(m, at(3 * ix + dx, res.dim == 2 ? 3 * iy + dy : 0));
    return m;
  }

  // integral of fine * g^pow * w over [0,1)^n (g, w cellwise; either optional)
  double integral_against(const SampledFunction* g, const SampledFunction* w,
                          double fine_pow = 1.0) const {
    int64_t d = res.denom();
    double mu = res.cell_measure() / (res.dim == 2 ? 9.0 : 3.0);
    double acc = 0.0;
    int64_t rows = res.dim == 2 ? d : 1;
    for (int64_t fy = 0; fy < rows; ++fy)
      for (int64_t fx = 0; fx < d; ++fx) {
        double t = fine_pow == 1.0 ? at(fx, fy)
                                   : std::pow(std::fabs(at(fx, fy)), fine_pow);
        if (g) t *= g->at(fx / 3, fy / 3);
        if (w) t *= w->at(fx / 3, fy / 3);
        acc += t;
      }
    return acc * mu;
  }
};

/// Dyadic local sharp maximal function M^{#,d}_{lambda;Q0} f: for each cell of
/// Q0 the sup of w_lambda(f;Q') over the subcubes Q' of Q0 containing it.
inline SampledFunction local_sharp_maximal(const SampledFunction& f,
                                           const Cube& q0, double lambda) {
  DYAD_REQUIRE(lattice_aligned(q0) && domain_box(f.res).contains(q0.box()),
               "local_sharp_maximal: Q0 must be lattice-aligned");
  SampledFunction out(f.res, 0.0);
  auto rec = [&](auto&& self, const Cube& q, double running) -> void {
    double m = std::max(running, oscillation(f, q, lambda));
    if (q.level == f.res.depth) {
      int64_t ix = q.corner[0] / 3;
      int64_t iy = f.res.dim == 2 ? q.corner[1] / 3 : 0;
      out.at(ix, iy) = m;
      return;
    }
    for (const Cube& c : children(q)) self(self, c, m);
  };
  rec(rec, q0, 0.0);
  return out;
}

}  // namespace dyad
