// Muckenhoupt characteristics, maximal operators, Orlicz (Luxemburg)
// averages and the B_p integrability diagnostic.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/sparse.hpp"

namespace dyad {

enum class Scope { Dyadic, Lattice };

inline const char* scope_name(Scope s) {
  return s == Scope::Dyadic ? "dyadic" : "lattice";
}

/// Walk the supremum scope: all standard-grid cubes inside [0,1)^n, or every
/// axis-aligned lattice cube (interval / square).
template <typename Fn>
void for_each_scope_box(const Resolution& res, Scope scope, Fn&& fn) {
  if (scope == Scope::Dyadic) {
    for (int k = 0; k <= res.depth; ++k)
      for (const Cube& q : cubes_at_level(standard_grid(res), k, domain_box(res)))
        fn(q.box());
    return;
  }
  int64_t n = res.cells_per_axis();
  if (res.dim == 1) {
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = i + 1; j <= n; ++j) {
        Box b;
        b.dim = 1;
        b.lo[0] = 3 * i;
        b.hi[0] = 3 * j;
        fn(b);
      }
    return;
  }
  for (int64_t s = 1; s <= n; ++s)
    for (int64_t y = 0; y + s <= n; ++y)
      for (int64_t x = 0; x + s <= n; ++x) {
        Box b;
        b.dim = 2;
        b.lo = {3 * x, 3 * y};
        b.hi = {3 * (x + s), 3 * (y + s)};
        fn(b);
      }
}

struct CharacteristicReport {
  double value = 0.0;
  Box attaining{};   // cube realizing the supremum
  Scope scope = Scope::Dyadic;
  bool clipped = false;  // weight was clipped on ingestion
};

/// A_p(w;Q) = avg_Q(w) * avg_Q(w^{-1/(p-1)})^{p-1}
inline double ap_local(const Weight& w, const Cube& q, double p) {
  DYAD_REQUIRE(p > 1.0, "ap_local: p must exceed 1");
  SampledFunction dual(w.w.res);
  for (size_t i = 0; i < dual.v.size(); ++i)
    dual.v[i] = std::pow(w.w.v[i], -1.0 / (p - 1.0));
  BoxIntegrator wi(w.w), di(dual);
  return wi.average(q) * std::pow(di.average(q), p - 1.0);
}

inline CharacteristicReport ap_characteristic(const Weight& w, double p,
                                              Scope scope = Scope::Dyadic) {
  DYAD_REQUIRE(p > 1.0, "ap_characteristic: p must exceed 1");
  SampledFunction dual(w.w.res);
  for (size_t i = 0; i < dual.v.size(); ++i)
    dual.v[i] = std::pow(w.w.v[i], -1.0 / (p - 1.0));
  BoxIntegrator wi(w.w), di(dual);
  CharacteristicReport rep;
  rep.scope = scope;
  rep.clipped = w.clipped;
  for_each_scope_box(w.w.res, scope, [&](const Box& b) {
    double val = wi.average_box(b) * std::pow(di.average_box(b), p - 1.0);
    if (val > rep.value) {
      rep.value = val;
      rep.attaining = b;
    }
  });
  return rep;
}

/// ||w||_{A_1} = max over cells of Mw / w with the exact lattice maximal
/// operator.
inline CharacteristicReport a1_characteristic(const Weight& w) {
  SampledFunction mw = lattice_maximal(w.w);
  CharacteristicReport rep;
  rep.scope = Scope::Lattice;
  rep.clipped = w.clipped;
  for (size_t i = 0; i < mw.v.size(); ++i) {
    double ratio = mw.v[i] / w.w.v[i];
    if (ratio > rep.value) {
      rep.value = ratio;
      rep.attaining = w.w.cell_box(i);
    }
  }
  return rep;
}

namespace detail {

// M(w chi_Q) restricted to Q, then integrated over Q (1D fast path: the
// maximizing window can be taken inside Q)
inline double a_infty_local_1d(const SampledFunction& w, const Box& b) {
  int64_t i0 = b.lo[0] / 3, i1 = b.hi[0] / 3;
  int64_t m = i1 - i0;
  std::vector<double> pref(static_cast<size_t>(m) + 1, 0.0);
  for (int64_t i = 0; i < m; ++i)
    pref[static_cast<size_t>(i) + 1] =
        pref[static_cast<size_t>(i)] + w.at(i0 + i);
  std::vector<double> best(static_cast<size_t>(m), 0.0);
  for (int64_t a = 0; a < m; ++a)
    for (int64_t c = a + 1; c <= m; ++c) {
      double avg = (pref[static_cast<size_t>(c)] - pref[static_cast<size_t>(a)]) /
                   static_cast<double>(c - a);
      for (int64_t x = a; x < c; ++x)
        best[static_cast<size_t>(x)] = std::max(best[static_cast<size_t>(x)], avg);
    }
  double integral = 0.0;
  for (double v : best) integral += v;
  double wq = pref[static_cast<size_t>(m)];
  return integral / wq;
}

inline double a_infty_local_2d(const SampledFunction& w, const Box& b) {
  SampledFunction masked(w.res, 0.0);
  int64_t x0 = b.lo[0] / 3, x1 = b.hi[0] / 3;
  int64_t y0 = b.lo[1] / 3, y1 = b.hi[1] / 3;
  for (int64_t y = y0; y < y1; ++y)
    for (int64_t x = x0; x < x1; ++x) masked.at(x, y) = w.at(x, y);
  SampledFunction mm = lattice_maximal(masked);
  double integral = 0.0, wq = 0.0;
  for (int64_t y = y0; y < y1; ++y)
    for (int64_t x = x0; x < x1; ++x) {
      integral += mm.at(x, y);
      wq += w.at(x, y);
    }
  return integral / wq;
}

}  // namespace detail

/// ||w||_{A_infty} = sup_Q (1/w(Q)) ∫_Q M(w chi_Q)  (Wilson–Hytönen–Pérez)
inline CharacteristicReport a_infty_characteristic(const Weight& w,
                                                   Scope scope = Scope::Dyadic) {
  CharacteristicReport rep;
  rep.scope = scope;
  rep.clipped = w.clipped;
  for_each_scope_box(w.w.res, scope, [&](const Box& b) {
    double val = w.w.res.dim == 1 ? detail::a_infty_local_1d(w.w, b)
                                  : detail::a_infty_local_2d(w.w, b);
    if (val > rep.value) {
      rep.value = val;
      rep.attaining = b;
    }
  });
  return rep;
}

/// ||w||_{(A_p)^alpha (A_r)^beta} = sup_Q A_p(w;Q)^alpha A_r(w;Q)^beta.
/// One supremum of the product, not a product of suprema.
inline CharacteristicReport mixed_characteristic(const Weight& w, double p,
                                                 double r, double alpha,
                                                 double beta,
                                                 Scope scope = Scope::Dyadic) {
  DYAD_REQUIRE(p > 1.0 && r > 1.0, "mixed_characteristic: p, r must exceed 1");
  DYAD_REQUIRE(alpha >= 0.0 && beta >= 0.0,
               "mixed_characteristic: exponents must be nonnegative");
  SampledFunction dp(w.w.res), dr(w.w.res);
  for (size_t i = 0; i < dp.v.size(); ++i) {
    dp.v[i] = std::pow(w.w.v[i], -1.0 / (p - 1.0));
    dr.v[i] = std::pow(w.w.v[i], -1.0 / (r - 1.0));
  }
  BoxIntegrator wi(w.w), dpi(dp), dri(dr);
  CharacteristicReport rep;
  rep.scope = scope;
  rep.clipped = w.clipped;
  for_each_scope_box(w.w.res, scope, [&](const Box& b) {
    double ap = wi.average_box(b) * std::pow(dpi.average_box(b), p - 1.0);
    double ar = wi.average_box(b) * std::pow(dri.average_box(b), r - 1.0);
    double val = std::pow(ap, alpha) * std::pow(ar, beta);
    if (val > rep.value) {
      rep.value = val;
      rep.attaining = b;
    }
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Maximal operators
// ---------------------------------------------------------------------------

/// Weighted dyadic maximal operator M^d_w f = sup_Q (1/w(Q)) ∫_Q |f| w.
inline SampledFunction weighted_dyadic_maximal(const SampledFunction& f,
                                               const Weight& w) {
  SampledFunction fw(f.res);
  for (size_t i = 0; i < f.v.size(); ++i)
    fw.v[i] = std::fabs(f.v[i]) * w.w.v[i];
  BoxIntegrator fwi(fw), wi(w.w);
  SampledFunction out(f.res, 0.0);
  Cube root(standard_grid(f.res), 0, {0, 0});
  auto rec = [&](auto&& self, const Cube& q, double running) -> void {
    double m = std::max(running, fwi.integral_scaled(q.box()) /
                                     wi.integral_scaled(q.box()));
    if (q.level == f.res.depth) {
      out.at(q.corner[0] / 3, f.res.dim == 2 ? q.corner[1] / 3 : 0) = m;
      return;
    }
    for (const Cube& c : children(q)) self(self, c, m);
  };
  rec(rec, root, 0.0);
  return out;
}

/// M_r f = M(|f|^r)^{1/r} with the exact lattice maximal operator.
inline SampledFunction maximal_mr(const SampledFunction& f, double r) {
  DYAD_REQUIRE(r > 0.0, "maximal_mr: r must be positive");
  SampledFunction fr(f.res);
  for (size_t i = 0; i < f.v.size(); ++i)
    fr.v[i] = std::pow(std::fabs(f.v[i]), r);
  SampledFunction m = lattice_maximal(fr);
  for (double& x : m.v) x = std::pow(x, 1.0 / r);
  return m;
}

// ---------------------------------------------------------------------------
// Young functions and Orlicz (Luxemburg) machinery
// ---------------------------------------------------------------------------

/// Young function: A(0) = 0, convex increasing. Construction spot-checks
/// monotonicity and convexity by finite differences on a log grid.
class YoungFunction {
 public:
  static YoungFunction power(double p) {
    DYAD_REQUIRE(p >= 1.0, "YoungFunction::power: p >= 1 required");
    YoungFunction a([p](double t) { return std::pow(t, p); },
                    "power(p=" + std::to_string(p) + ")");
    return a;
  }

  // t^p * log(e + t)^gamma (gamma may be negative for B_p members)
  static YoungFunction power_log_bump(double p, double gamma) {
    DYAD_REQUIRE(p >= 1.0, "YoungFunction::power_log_bump: p >= 1 required");
    YoungFunction a(
        [p, gamma](double t) {
          return t <= 0.0 ? 0.0
                          : std::pow(t, p) *
                                std::pow(std::log(std::numbers::e + t), gamma);
        },
        "bump(p=" + std::to_string(p) + ",gamma=" + std::to_string(gamma) + ")");
    return a;
  }

  // piecewise power interpolation (linear in log-log) through (t_i, A_i)
  static YoungFunction from_table(std::vector<std::pair<double, double>> pts,
                                  std::string name = "table") {
    DYAD_REQUIRE(pts.size() >= 2, "YoungFunction::from_table: need 2+ points");
    for (auto& [t, a] : pts)
      DYAD_REQUIRE(t > 0.0 && a > 0.0, "from_table: positive entries required");
    YoungFunction out(
        [pts](double t) {
          if (t <= 0.0) return 0.0;
          size_t hi = 0;
          while (hi < pts.size() && pts[hi].first < t) ++hi;
          size_t i = hi == 0 ? 1 : (hi == pts.size() ? pts.size() - 1 : hi);
          double lt0 = std::log(pts[i - 1].first), lt1 = std::log(pts[i].first);
          double la0 = std::log(pts[i - 1].second), la1 = std::log(pts[i].second);
          double slope = (la1 - la0) / (lt1 - lt0);
          return std::exp(la0 + slope * (std::log(t) - lt0));
        },
        std::move(name));
    return out;
  }

  double operator()(double t) const { return eval_(t); }
  const std::string& name() const { return name_; }

 private:
  YoungFunction(std::function<double(double)> f, std::string name)
      : eval_(std::move(f)), name_(std::move(name)) {
    DYAD_REQUIRE(eval_(0.0) == 0.0, "YoungFunction: A(0) must be 0");
    double prev_t = 0.0, prev = 0.0;
    double prev_slope = 0.0;  // chord slope of the previous interval
    for (double t = 0x1p-8; t <= 0x1p20; t *= 2.0) {
      double cur = eval_(t);
      DYAD_REQUIRE(cur >= prev * (1.0 - 1e-9),
                   "YoungFunction: not increasing near t=" + std::to_string(t));
      double slope = (cur - prev) / (t - prev_t);
      DYAD_REQUIRE(slope >= prev_slope * (1.0 - 1e-6),
                   "YoungFunction: not convex near t=" + std::to_string(t));
      prev_t = t;
      prev = cur;
      prev_slope = slope;
    }
  }

  std::function<double(double)> eval_;
  std::string name_;
};

/// Luxemburg average ||f||_{A,Q} = inf{lambda > 0 : avg_Q A(|f|/lambda) <= 1},
/// solved by bisection to relative tolerance 1e-9 (the map is nonincreasing).
inline double luxemburg_average(const SampledFunction& f, const Box& b,
                                const YoungFunction& A) {
  auto pieces = box_pieces(f, b, true);
  double vol = static_cast<double>(b.volume());
  double vmax = 0.0;
  for (auto& [v, wt] : pieces) vmax = std::max(vmax, v);
  if (vmax == 0.0) return 0.0;
  auto mean = [&](double lam) {
    double acc = 0.0;
    for (auto& [v, wt] : pieces)
      if (v > 0.0) acc += A(v / lam) * static_cast<double>(wt);
    return acc / vol;
  };
  double hi = vmax;
  while (mean(hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (mean(lo) <= 1.0 && lo > 1e-300) lo /= 2.0;
  if (lo <= 1e-300) return 0.0;  // mean never exceeds 1: norm 0 edge
  // the residual |mean - 1| scales like p * (relative width), so bisect well
  // past the 1e-9 residual target
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mean(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double luxemburg_average(const SampledFunction& f, const Cube& q,
                                const YoungFunction& A) {
  return luxemburg_average(f, q.box(), A);
}

/// M_{L^A} f(x) = sup_{Q ∋ x, Q in scope} ||f||_{A,Q}.
inline SampledFunction orlicz_maximal(const SampledFunction& f,
                                      const YoungFunction& A,
                                      Scope scope = Scope::Dyadic) {
  SampledFunction out(f.res, 0.0);
  if (scope == Scope::Dyadic) {
    Cube root(standard_grid(f.res), 0, {0, 0});
    auto rec = [&](auto&& self, const Cube& q, double running) -> void {
      double m = std::max(running, luxemburg_average(f, q, A));
      if (q.level == f.res.depth) {
        out.at(q.corner[0] / 3, f.res.dim == 2 ? q.corner[1] / 3 : 0) = m;
        return;
      }
      for (const Cube& c : children(q)) self(self, c, m);
    };
    rec(rec, root, 0.0);
    return out;
  }
  for_each_scope_box(f.res, Scope::Lattice, [&](const Box& b) {
    double val = luxemburg_average(f, b, A);
    for (int64_t y = (f.res.dim == 2 ? b.lo[1] / 3 : 0);
         y < (f.res.dim == 2 ? b.hi[1] / 3 : 1); ++y)
      for (int64_t x = b.lo[0] / 3; x < b.hi[0] / 3; ++x) {
        double& o = out.at(x, f.res.dim == 2 ? y : 0);
        o = std::max(o, val);
      }
  });
  return out;
}

// ---------------------------------------------------------------------------
// B_p diagnostic
// ---------------------------------------------------------------------------

struct BpReport {
  enum class Verdict { Converging, Diverging, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> block_integrals;  // integral over [c 2^j, c 2^{j+1}]
  std::vector<double> partial_sums;
  double tail_ratio = 0.0;     // median of late block ratios
  double tail_exponent = 0.0;  // fitted s in b_j ~ j^{-s} when ratio ~ 1
};

/// Numeric probe of the B_p condition: integral_c^inf A(t) t^{-p} dt/t.
/// Diagnostic only; no claim of proof.
inline BpReport bp_diagnostic(const YoungFunction& A, double p,
                              double t_max = 0x1p40) {
  DYAD_REQUIRE(p > 1.0, "bp_diagnostic: p must exceed 1");
  BpReport rep;
  const double c = 2.0;
  double total = 0.0;
  for (double lo = c; lo * 2.0 <= t_max; lo *= 2.0) {
    // Simpson in u = log t over one octave: integrand A(e^u) e^{-p u}
    const int steps = 64;
    double u0 = std::log(lo), u1 = std::log(lo * 2.0);
    double h = (u1 - u0) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
      double u = u0 + h * i;
      double val = A(std::exp(u)) * std::exp(-p * u);
      double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * val;
    }
    acc *= h / 3.0;
    total += acc;
    rep.block_integrals.push_back(acc);
    rep.partial_sums.push_back(total);
  }
  size_t nb = rep.block_integrals.size();
  if (nb < 8) return rep;
  // late-block geometric ratio
  std::vector<double> ratios;
  for (size_t j = nb / 2; j + 1 < nb; ++j)
    if (rep.block_integrals[j] > 0.0)
      ratios.push_back(rep.block_integrals[j + 1] / rep.block_integrals[j]);
  if (ratios.empty()) {
    rep.verdict = BpReport::Verdict::Converging;  // blocks vanished
    return rep;
  }
  std::sort(ratios.begin(), ratios.end());
  rep.tail_ratio = ratios[ratios.size() / 2];
  if (rep.tail_ratio < 0.9) {
    rep.verdict = BpReport::Verdict::Converging;
    rep.tail_exponent = -std::log2(rep.tail_ratio);
    return rep;
  }
  // ratio near 1: fit b_j ~ j^{-s} on the late half
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (size_t j = nb / 2; j < nb; ++j) {
    if (rep.block_integrals[j] <= 0.0) continue;
    double x = std::log(static_cast<double>(j + 1));
    double y = std::log(rep.block_integrals[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 4) {
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.tail_exponent = -slope;
    if (rep.tail_exponent > 1.2)
      rep.verdict = BpReport::Verdict::Converging;
    else if (rep.tail_exponent < 1.05)
      rep.verdict = BpReport::Verdict::Diverging;
    else
      rep.verdict = BpReport::Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace dyad
