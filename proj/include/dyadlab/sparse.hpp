// Sparse families {Q_j^k}: disjoint in j for fixed k, Omega_{k+1} subset
// Omega_k, and |Omega_{k+1} ∩ Q_j^k| <= |Q_j^k|/2 (so |Q| <= 2|E| for the
// exclusive sets E_j^k = Q_j^k \ Omega_{k+1}). Stopping-time constructions,
// the positive operators A, A_i, A_i*, and the bilinear maximal function.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dyadlab/geometry.hpp"
#include "dyadlab/random.hpp"
#include "dyadlab/sampled.hpp"

namespace dyad {

struct SparseFamily {
  DyadicGrid grid;
  // generations[k] = {Q_j^k}; Omega_k is the union of generation k
  std::vector<std::vector<Cube>> generations;

  size_t size() const {
    size_t s = 0;
    for (const auto& g : generations) s += g.size();
    return s;
  }
  bool empty() const { return size() == 0; }
};

struct SparseValidation {
  bool pass = true;
  std::string first_violation;
  // min over cubes of |E_j^k| / |Q_j^k|; sparse requires >= 1/2
  double min_exclusive_ratio = 1.0;

  void fail(const std::string& what) {
    if (pass) first_violation = what;
    pass = false;
  }
};

/// Exact check (integer volumes) of the three sparse conditions plus the
/// derived |Q_j^k| <= 2|E_j^k|.
inline SparseValidation validate(const SparseFamily& S) {
  SparseValidation rep;
  const auto& gens = S.generations;
  for (size_t k = 0; k < gens.size(); ++k) {
    for (size_t a = 0; a < gens[k].size(); ++a)
      for (size_t b = a + 1; b < gens[k].size(); ++b)
        if (gens[k][a].box().overlap_volume(gens[k][b].box()) > 0)
          rep.fail("generation " + std::to_string(k) +
                   ": cubes not pairwise disjoint");
    if (k + 1 < gens.size()) {
      // nesting: each next-generation cube fully covered by this generation
      for (const Cube& q : gens[k + 1]) {
        int64_t covered = 0;
        for (const Cube& p : gens[k]) covered += q.box().overlap_volume(p.box());
        if (covered != q.volume())
          rep.fail("generation " + std::to_string(k + 1) +
                   ": Omega_{k+1} escapes Omega_k");
      }
      // packing: each cube loses at most half its measure to the next
      // generation
      for (const Cube& p : gens[k]) {
        int64_t lost = 0;
        for (const Cube& q : gens[k + 1]) lost += p.box().overlap_volume(q.box());
        if (2 * lost > p.volume())
          rep.fail("generation " + std::to_string(k) +
                   ": |Omega_{k+1} ∩ Q| > |Q|/2");
        double ratio = 1.0 - static_cast<double>(lost) /
                                 static_cast<double>(p.volume());
        rep.min_exclusive_ratio = std::min(rep.min_exclusive_ratio, ratio);
      }
    }
  }
  return rep;
}

// |E_j^k| in scaled volume units, same shape as S.generations
inline std::vector<std::vector<int64_t>> exclusive_measures(
    const SparseFamily& S) {
  std::vector<std::vector<int64_t>> out(S.generations.size());
  for (size_t k = 0; k < S.generations.size(); ++k) {
    out[k].reserve(S.generations[k].size());
    for (const Cube& p : S.generations[k]) {
      int64_t lost = 0;
      if (k + 1 < S.generations.size())
        for (const Cube& q : S.generations[k + 1])
          lost += p.box().overlap_volume(q.box());
      out[k].push_back(p.volume() - lost);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calderon-Zygmund stopping construction
// ---------------------------------------------------------------------------

struct CzSparseResult {
  SparseFamily family;
  // level-0 anchor cubes and their averages; thresholds within each root's
  // subtree are avg_R * 2^{(n+1)t}
  std::vector<std::pair<Cube, double>> roots;
};

namespace detail {

// maximal cubes strictly below `from` with avg > tau (top-down scan)
inline void select_maximal(const Cube& from, double tau,
                           const BoxIntegrator& integ, std::vector<Cube>& out) {
  if (from.level == from.grid.res.depth) return;
  for (const Cube& c : children(from)) {
    if (integ.average(c) > tau)
      out.push_back(c);
    else
      select_maximal(c, tau, integ, out);
  }
}

}  // namespace detail

/// Stopping cubes of the level sets of the grid-dyadic maximal function.
/// Thresholds are anchored per level-0 root at its own average (the local
/// Calderon-Zygmund iteration): generation t within a root R selects the
/// maximal cubes with f_Q > 2^{(n+1)t} f_R. This realizes exactly
///   M^d f <= 2^{n+1} sum f_{Q_j^k} chi_{E_j^k}
/// and keeps every root-truncated family sparse.
inline CzSparseResult cz_sparse_from_maximal(const SampledFunction& f,
                                             const DyadicGrid& g) {
  for (double x : f.v)
    DYAD_REQUIRE(x >= 0.0, "cz_sparse_from_maximal: f must be >= 0");
  BoxIntegrator integ(f);
  double base = std::ldexp(1.0, g.res.dim + 1);  // 2^{n+1}
  CzSparseResult out;
  out.family.grid = g;
  std::vector<std::pair<Cube, double>> roots;
  for (const Cube& r : cubes_at_level(g, 0, domain_box(g.res))) {
    double avg = integ.average(r);
    if (avg > 0.0) roots.emplace_back(r, avg);
  }
  DYAD_REQUIRE(!roots.empty(), "cz_sparse_from_maximal: f is identically 0");
  out.roots = roots;
  auto& gens = out.family.generations;
  gens.emplace_back();
  for (auto& [r, avg] : roots) gens[0].push_back(r);
  // per-root frontiers advance together one generation at a time
  std::vector<std::vector<Cube>> frontier;
  for (auto& [r, avg] : roots) frontier.push_back({r});
  for (int t = 1;; ++t) {
    std::vector<Cube> next_gen;
    for (size_t ri = 0; ri < roots.size(); ++ri) {
      if (frontier[ri].empty()) continue;
      double tau = std::ldexp(roots[ri].second, (g.res.dim + 1) * t);
      std::vector<Cube> next_r;
      for (const Cube& c : frontier[ri])
        detail::select_maximal(c, tau, integ, next_r);
      frontier[ri] = next_r;
      next_gen.insert(next_gen.end(), next_r.begin(), next_r.end());
    }
    if (next_gen.empty()) break;
    gens.push_back(std::move(next_gen));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximal functions
// ---------------------------------------------------------------------------

/// M^d over the standard grid, on the cells of [0,1)^n (zero outside, since
/// no standard cube outside [0,1)^n sees the support).
inline SampledFunction dyadic_maximal(const SampledFunction& f) {
  BoxIntegrator integ(f);
  SampledFunction absf(f.res);
  for (size_t i = 0; i < f.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);
  BoxIntegrator ainteg(absf);
  SampledFunction out(f.res, 0.0);
  Cube root(standard_grid(f.res), 0, {0, 0});
  auto rec = [&](auto&& self, const Cube& q, double running) -> void {
    double m = std::max(running, ainteg.average(q));
    if (q.level == f.res.depth) {
      out.at(q.corner[0] / 3, f.res.dim == 2 ? q.corner[1] / 3 : 0) = m;
      return;
    }
    for (const Cube& c : children(q)) self(self, c, m);
  };
  rec(rec, root, 0.0);
  return out;
}

/// M^d over an arbitrary (possibly shifted) grid, on the fine lattice of
/// [0,1)^n.
inline FineFunction dyadic_maximal_fine(const SampledFunction& f,
                                        const DyadicGrid& g) {
  SampledFunction absf(f.res);
  for (size_t i = 0; i < f.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);
  BoxIntegrator integ(absf);
  FineFunction out(f.res, 0.0);
  auto rec = [&](auto&& self, const Cube& q, double running) -> void {
    double m = std::max(running, integ.average(q));
    if (q.level == f.res.depth) {
      Box b = q.box();
      int64_t d = f.res.denom();
      int64_t X0 = std::max(b.lo[0], int64_t{0}), X1 = std::min(b.hi[0], d);
      if (f.res.dim == 1) {
        for (int64_t x = X0; x < X1; ++x)
          out.v[static_cast<size_t>(x)] = m;
      } else {
        int64_t Y0 = std::max(b.lo[1], int64_t{0}), Y1 = std::min(b.hi[1], d);
        for (int64_t y = Y0; y < Y1; ++y)
          for (int64_t x = X0; x < X1; ++x) out.at(x, y) = m;
      }
      return;
    }
    for (const Cube& c : children(q)) self(self, c, m);
  };
  for (const Cube& r : cubes_at_level(g, 0, domain_box(g.res)))
    rec(rec, r, 0.0);
  return out;
}

/// Hardy-Littlewood maximal function over all axis-aligned lattice cubes
/// within [0,1)^n (intervals for n=1, squares for n=2). Exhaustive and exact.
inline SampledFunction lattice_maximal(const SampledFunction& f) {
  int64_t n = f.res.cells_per_axis();
  SampledFunction out(f.res, 0.0);
  if (f.res.dim == 1) {
    std::vector<double> pref(static_cast<size_t>(n) + 1, 0.0);
    for (int64_t i = 0; i < n; ++i)
      pref[static_cast<size_t>(i) + 1] =
          pref[static_cast<size_t>(i)] + std::fabs(f.v[static_cast<size_t>(i)]);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = i + 1; j <= n; ++j) {
        double avg = (pref[static_cast<size_t>(j)] - pref[static_cast<size_t>(i)]) /
                     static_cast<double>(j - i);
        for (int64_t c = i; c < j; ++c) {
          double& o = out.v[static_cast<size_t>(c)];
          if (avg > o) o = avg;
        }
      }
    }
    return out;
  }
  // 2D summed-area table of |f|
  std::vector<double> sat(static_cast<size_t>((n + 1) * (n + 1)), 0.0);
  auto S = [&](int64_t x, int64_t y) -> double& {
    return sat[static_cast<size_t>(y * (n + 1) + x)];
  };
  for (int64_t y = 0; y < n; ++y)
    for (int64_t x = 0; x < n; ++x)
      S(x + 1, y + 1) =
          std::fabs(f.at(x, y)) + S(x, y + 1) + S(x + 1, y) - S(x, y);
  for (int64_t s = 1; s <= n; ++s) {
    double inv = 1.0 / static_cast<double>(s * s);
    for (int64_t y = 0; y + s <= n; ++y)
      for (int64_t x = 0; x + s <= n; ++x) {
        double avg =
            (S(x + s, y + s) - S(x, y + s) - S(x + s, y) + S(x, y)) * inv;
        for (int64_t cy = y; cy < y + s; ++cy)
          for (int64_t cx = x; cx < x + s; ++cx) {
            double& o = out.at(cx, cy);
            if (avg > o) o = avg;
          }
      }
  }
  return out;
}

/// Bilinear maximal function M(f,g)(x) = sup_{Q ∋ x} avg_Q|f| avg_Q|g| over
/// lattice cubes (dyadic=false) or standard-grid cubes (dyadic=true).
inline SampledFunction bilinear_maximal(const SampledFunction& f,
                                        const SampledFunction& g,
                                        bool dyadic = false) {
  DYAD_REQUIRE(f.res == g.res, "bilinear_maximal: resolution mismatch");
  int64_t n = f.res.cells_per_axis();
  SampledFunction out(f.res, 0.0);
  if (dyadic) {
    SampledFunction fa(f.res), ga(f.res);
    for (size_t i = 0; i < f.v.size(); ++i) {
      fa.v[i] = std::fabs(f.v[i]);
      ga.v[i] = std::fabs(g.v[i]);
    }
    BoxIntegrator fi(fa), gi(ga);
    Cube root(standard_grid(f.res), 0, {0, 0});
    auto rec = [&](auto&& self, const Cube& q, double running) -> void {
      double m = std::max(running, fi.average(q) * gi.average(q));
      if (q.level == f.res.depth) {
        out.at(q.corner[0] / 3, f.res.dim == 2 ? q.corner[1] / 3 : 0) = m;
        return;
      }
      for (const Cube& c : children(q)) self(self, c, m);
    };
    rec(rec, root, 0.0);
    return out;
  }
  if (f.res.dim == 1) {
    std::vector<double> pf(static_cast<size_t>(n) + 1, 0.0),
        pg(static_cast<size_t>(n) + 1, 0.0);
    for (int64_t i = 0; i < n; ++i) {
      pf[static_cast<size_t>(i) + 1] =
          pf[static_cast<size_t>(i)] + std::fabs(f.v[static_cast<size_t>(i)]);
      pg[static_cast<size_t>(i) + 1] =
          pg[static_cast<size_t>(i)] + std::fabs(g.v[static_cast<size_t>(i)]);
    }
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = i + 1; j <= n; ++j) {
        double inv = 1.0 / static_cast<double>(j - i);
        double prod = (pf[static_cast<size_t>(j)] - pf[static_cast<size_t>(i)]) *
                      (pg[static_cast<size_t>(j)] - pg[static_cast<size_t>(i)]) *
                      inv * inv;
        for (int64_t c = i; c < j; ++c) {
          double& o = out.v[static_cast<size_t>(c)];
          if (prod > o) o = prod;
        }
      }
    return out;
  }
  std::vector<double> satf(static_cast<size_t>((n + 1) * (n + 1)), 0.0),
      satg(satf);
  auto Sf = [&](int64_t x, int64_t y) -> double& {
    return satf[static_cast<size_t>(y * (n + 1) + x)];
  };
  auto Sg = [&](int64_t x, int64_t y) -> double& {
    return satg[static_cast<size_t>(y * (n + 1) + x)];
  };
  for (int64_t y = 0; y < n; ++y)
    for (int64_t x = 0; x < n; ++x) {
      Sf(x + 1, y + 1) =
          std::fabs(f.at(x, y)) + Sf(x, y + 1) + Sf(x + 1, y) - Sf(x, y);
      Sg(x + 1, y + 1) =
          std::fabs(g.at(x, y)) + Sg(x, y + 1) + Sg(x + 1, y) - Sg(x, y);
    }
  for (int64_t s = 1; s <= n; ++s) {
    double inv = 1.0 / static_cast<double>(s * s);
    for (int64_t y = 0; y + s <= n; ++y)
      for (int64_t x = 0; x + s <= n; ++x) {
        double af =
            (Sf(x + s, y + s) - Sf(x, y + s) - Sf(x + s, y) + Sf(x, y)) * inv;
        double ag =
            (Sg(x + s, y + s) - Sg(x, y + s) - Sg(x + s, y) + Sg(x, y)) * inv;
        double prod = af * ag;
        for (int64_t cy = y; cy < y + s; ++cy)
          for (int64_t cx = x; cx < x + s; ++cx) {
            double& o = out.at(cx, cy);
            if (prod > o) o = prod;
          }
      }
  }
  return out;
}

/// Stopping cubes of M^d(f,g) with ratio c_n = 2^{2(n+1)} between
/// generations, anchored per root at f_R g_R. The Cauchy-Schwarz packing
/// argument gives |Omega_{t+1} ∩ Q| <= |Q|/2 for every generation including
/// the root one, and
///   M^d(f,g) <= 2^{2(n+1)} sum f_Q g_Q chi_Q
/// holds cellwise.
inline CzSparseResult bilinear_sparse_decomposition(const SampledFunction& f,
                                                    const SampledFunction& g) {
  DYAD_REQUIRE(f.res == g.res, "bilinear decomposition: resolution mismatch");
  for (double x : f.v)
    DYAD_REQUIRE(x >= 0.0, "bilinear decomposition: f must be >= 0");
  for (double x : g.v)
    DYAD_REQUIRE(x >= 0.0, "bilinear decomposition: g must be >= 0");
  BoxIntegrator fi(f), gi(g);
  DyadicGrid grid = standard_grid(f.res);
  CzSparseResult out;
  out.family.grid = grid;
  Cube root(grid, 0, {0, 0});
  double beta = fi.average(root) * gi.average(root);
  DYAD_REQUIRE(beta > 0.0, "bilinear decomposition: f or g identically 0");
  out.roots.emplace_back(root, beta);
  auto& gens = out.family.generations;
  gens.push_back({root});
  std::vector<Cube> frontier{root};
  for (int t = 1; !frontier.empty(); ++t) {
    double tau = std::ldexp(beta, 2 * (f.res.dim + 1) * t);  // c_n^t, exact
    std::vector<Cube> next;
    auto scan = [&](auto&& self, const Cube& q) -> void {
      if (q.level == f.res.depth) return;
      for (const Cube& c : children(q)) {
        if (fi.average(c) * gi.average(c) > tau)
          next.push_back(c);
        else
          self(self, c);
      }
    };
    for (const Cube& c : frontier) scan(scan, c);
    if (next.empty()) break;
    gens.push_back(next);
    frontier = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse operators
// ---------------------------------------------------------------------------

/// A_i f = sum f_{Q^{(i)}} chi_Q as cell averages (exact against cellwise
/// test functions; pointwise values on partially covered cells are averaged —
/// use apply_sparse_i_fine for sub-cell pointwise values).
inline SampledFunction apply_sparse_i(const SparseFamily& S,
                                      const SampledFunction& f, int i) {
  BoxIntegrator integ(f);
  SampledFunction out(f.res, 0.0);
  for (const auto& gen : S.generations)
    for (const Cube& q : gen)
      accumulate_indicator(out, q.box(), integ.average(ancestor(q, i)));
  return out;
}

inline SampledFunction apply_sparse(const SparseFamily& S,
                                    const SampledFunction& f) {
  return apply_sparse_i(S, f, 0);
}

/// A_i* f = 2^{-in} sum f_Q chi_{Q^{(i)}} (the formal adjoint of A_i).
inline SampledFunction apply_sparse_i_star(const SparseFamily& S,
                                           const SampledFunction& f, int i) {
  BoxIntegrator integ(f);
  SampledFunction out(f.res, 0.0);
  double scale = std::ldexp(1.0, -i * f.res.dim);
  for (const auto& gen : S.generations)
    for (const Cube& q : gen)
      accumulate_indicator(out, ancestor(q, i).box(), scale * integ.average(q));
  return out;
}

inline FineFunction apply_sparse_i_fine(const SparseFamily& S,
                                        const SampledFunction& f, int i) {
  BoxIntegrator integ(f);
  FineFunction out(f.res, 0.0);
  for (const auto& gen : S.generations)
    for (const Cube& q : gen)
      out.add_box(q.box(), integ.average(ancestor(q, i)));
  return out;
}

inline FineFunction apply_sparse_fine(const SparseFamily& S,
                                      const SampledFunction& f) {
  return apply_sparse_i_fine(S, f, 0);
}

/// sum over the family of f_Q chi_{E_j^k} on the fine lattice.
inline FineFunction exclusive_sum_fine(const SparseFamily& S,
                                       const SampledFunction& f) {
  BoxIntegrator integ(f);
  FineFunction out(f.res, 0.0);
  for (size_t k = 0; k < S.generations.size(); ++k)
    for (const Cube& q : S.generations[k]) {
      double avg = integ.average(q);
      out.add_box(q.box(), avg);
      if (k + 1 < S.generations.size())
        for (const Cube& nx : S.generations[k + 1])
          out.add_box(q.box().intersect(nx.box()), -avg);
    }
  return out;
}

/// integral of (A f) g = sum f_Q g_Q |Q| (real measure), exact term by term.
inline double sparse_pairing(const SparseFamily& S, const SampledFunction& f,
                             const SampledFunction& g) {
  BoxIntegrator fi(f), gi(g);
  double dn = static_cast<double>(f.res.denom());
  double scale = f.res.dim == 2 ? dn * dn : dn;
  double acc = 0.0;
  for (const auto& gen : S.generations)
    for (const Cube& q : gen) {
      double vol = static_cast<double>(q.volume()) / scale;
      acc += fi.average(q) * gi.average(q) * vol;
    }
  return acc;
}

// ---------------------------------------------------------------------------
// (5.3): M f <= 2 * 12^n * sum over the 2^n shifted grids of A_alpha f
// ---------------------------------------------------------------------------

struct MaximalViaSparse {
  SampledFunction exact_maximal;          // lattice M f
  std::vector<CzSparseResult> per_grid;   // CZ family per shifted grid
  FineFunction majorant;                  // 2*12^n sum_alpha A_alpha f
  bool dominates = false;
  double min_slack = 0.0;
};

inline MaximalViaSparse maximal_via_sparse(const SampledFunction& f) {
  for (double x : f.v)
    DYAD_REQUIRE(x >= 0.0, "maximal_via_sparse: f must be >= 0");
  MaximalViaSparse out{lattice_maximal(f), {}, FineFunction(f.res, 0.0)};
  for (const DyadicGrid& g : all_grids(f.res)) {
    CzSparseResult cz = cz_sparse_from_maximal(f, g);
    FineFunction af = apply_sparse_fine(cz.family, f);
    for (size_t i = 0; i < out.majorant.v.size(); ++i)
      out.majorant.v[i] += af.v[i];
    out.per_grid.push_back(std::move(cz));
  }
  double c = 2.0 * std::pow(12.0, f.res.dim);
  for (double& x : out.majorant.v) x *= c;
  out.dominates = true;
  out.min_slack = std::numeric_limits<double>::infinity();
  int64_t n = f.res.cells_per_axis();
  for (int64_t iy = 0; iy < (f.res.dim == 2 ? n : 1); ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      double slack = out.majorant.cell_min(ix, iy) -
                     out.exact_maximal.at(ix, iy);
      out.min_slack = std::min(out.min_slack, slack);
      if (slack < 0.0) out.dominates = false;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Random sparse families (for property sweeps)
// ---------------------------------------------------------------------------

/// Seed-deterministic sparse family on the given grid with all cube levels
/// >= min_level (so i-th ancestors exist for i <= min_level). Each cube
/// passes at most half its measure to the next generation by construction.
inline SparseFamily random_sparse_family(const DyadicGrid& g, uint64_t seed,
                                         int min_level) {
  DYAD_REQUIRE(min_level >= 0 && min_level <= g.res.depth,
               "random_sparse_family: bad min_level");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
  SparseFamily S;
  S.grid = g;
  // generation 0: a random nonempty antichain at min_level inside [0,1)^n
  std::vector<Cube> level0;
  for (const Cube& q : cubes_at_level(g, min_level, domain_box(g.res)))
    if (domain_box(g.res).contains(q.box())) level0.push_back(q);
  if (level0.empty())
    level0 = cubes_at_level(g, min_level, domain_box(g.res));
  std::vector<Cube> gen;
  for (const Cube& q : level0)
    if (uniform01(rng) < 0.5) gen.push_back(q);
  if (gen.empty()) gen.push_back(level0[rng() % level0.size()]);
  S.generations.push_back(gen);
  while (true) {
    std::vector<Cube> next;
    for (const Cube& q : S.generations.back()) {
      if (q.level >= g.res.depth || uniform01(rng) < 0.3) continue;
      int drop = 1 + static_cast<int>(rng() % 2);  // descend 1 or 2 levels
      drop = std::min(drop, g.res.depth - q.level);
      std::vector<Cube> desc{q};
      for (int d = 0; d < drop; ++d) {
        std::vector<Cube> nd;
        for (const Cube& c : desc) {
          auto ch = children(c);
          nd.insert(nd.end(), ch.begin(), ch.end());
        }
        desc = nd;
      }
      // keep at most half of the descendants
      size_t max_keep = desc.size() / 2;
      if (max_keep == 0) continue;
      size_t keep = 1 + rng() % max_keep;
      for (size_t t = desc.size() - 1; t + 1 > 0; --t)
        std::swap(desc[t], desc[rng() % (t + 1)]);
      next.insert(next.end(), desc.begin(), desc.begin() + keep);
    }
    if (next.empty()) break;
    S.generations.push_back(next);
  }
  return S;
}

// ---------------------------------------------------------------------------
// Weighted operator norm via power iteration
// ---------------------------------------------------------------------------

struct OpNormResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// ||A_i||_{L^2(v) -> L^2(u)}, exact at resolution: the largest singular
/// value of diag(sqrt u) A_i diag(1/sqrt v) on the cell space, computed by
/// power iteration on the symmetrized form.
inline OpNormResult sparse_opnorm_l2(const SparseFamily& S, int i,
                                     const Weight& u, const Weight& v,
                                     double tol = 1e-8, int max_iter = 10000) {
  const Resolution res = u.w.res;
  size_t N = u.w.v.size();
  std::vector<double> su(N), svinv(N);
  for (size_t c = 0; c < N; ++c) {
    su[c] = std::sqrt(u.w.v[c]);
    svinv[c] = 1.0 / std::sqrt(v.w.v[c]);
  }
  auto apply_ai = [&](const SampledFunction& x) {
    return apply_sparse_i(S, x, i);
  };
  auto apply_ai_star = [&](const SampledFunction& x) {
    return apply_sparse_i_star(S, x, i);
  };
  SampledFunction x(res, 1.0);
  double lambda = 0.0;
  OpNormResult out;
  for (int it = 1; it <= max_iter; ++it) {
    // y = C^T C x with C = diag(su) A_i diag(svinv)
    SampledFunction t(res);
    for (size_t c = 0; c < N; ++c) t.v[c] = x.v[c] * svinv[c];
    SampledFunction a = apply_ai(t);
    for (size_t c = 0; c < N; ++c) a.v[c] *= su[c] * su[c];
    SampledFunction y = apply_ai_star(a);
    for (size_t c = 0; c < N; ++c) y.v[c] *= svinv[c];
    double num = 0.0, den = 0.0;
    for (size_t c = 0; c < N; ++c) {
      num += x.v[c] * y.v[c];
      den += x.v[c] * x.v[c];
    }
    double lam = num / den;
    double scale = 0.0;
    for (size_t c = 0; c < N; ++c) scale = std::max(scale, std::fabs(y.v[c]));
    if (scale == 0.0) {  // empty family: zero operator
      out.norm = 0.0;
      out.converged = true;
      out.iterations = it;
      return out;
    }
    for (size_t c = 0; c < N; ++c) x.v[c] = y.v[c] / scale;
    out.iterations = it;
    if (it > 1 && std::fabs(lam - lambda) <= tol * std::fabs(lam)) {
      lambda = lam;
      out.converged = true;
      break;
    }
    lambda = lam;
  }
  out.norm = std::sqrt(std::max(lambda, 0.0));
  return out;
}

namespace detail {

// box sums of a fine-lattice vector (1 scaled unit per fine cell per axis)
struct FinePrefix {
  const FineFunction* f;
  std::vector<double> pref;  // per-row prefix sums

  explicit FinePrefix(const FineFunction& fn) : f(&fn) {
    int64_t d = fn.res.denom();
    int64_t rows = fn.res.dim == 2 ? d : 1;
    pref.assign(static_cast<size_t>(rows * (d + 1)), 0.0);
    for (int64_t y = 0; y < rows; ++y) {
      double acc = 0.0;
      for (int64_t x = 0; x < d; ++x) {
        acc += fn.at(x, y);
        pref[static_cast<size_t>(y * (d + 1) + x + 1)] = acc;
      }
    }
  }

  double sum(const Box& b) const {
    int64_t d = f->res.denom();
    int64_t X0 = std::max(b.lo[0], int64_t{0}), X1 = std::min(b.hi[0], d);
    if (X1 <= X0) return 0.0;
    if (f->res.dim == 1)
      return pref[static_cast<size_t>(X1)] - pref[static_cast<size_t>(X0)];
    int64_t Y0 = std::max(b.lo[1], int64_t{0}), Y1 = std::min(b.hi[1], d);
    double acc = 0.0;
    for (int64_t y = Y0; y < Y1; ++y)
      acc += pref[static_cast<size_t>(y * (d + 1) + X1)] -
             pref[static_cast<size_t>(y * (d + 1) + X0)];
    return acc;
  }
};

}  // namespace detail

/// ||A_i||_{L^2(v) -> L^2(u)} on the fine lattice: exact for families on
/// shifted grids, whose cubes are unions of fine cells but not of lattice
/// cells.
inline OpNormResult sparse_opnorm_l2_fine(const SparseFamily& S, int i,
                                          const Weight& u, const Weight& v,
                                          double tol = 1e-8,
                                          int max_iter = 10000) {
  const Resolution res = u.w.res;
  FineFunction su(res, 0.0), svinv(res, 0.0);
  int64_t d = res.denom();
  int64_t rows = res.dim == 2 ? d : 1;
  for (int64_t y = 0; y < rows; ++y)
    for (int64_t x = 0; x < d; ++x) {
      su.at(x, y) = std::sqrt(u.w.at(x / 3, y / 3));
      svinv.at(x, y) = 1.0 / std::sqrt(v.w.at(x / 3, y / 3));
    }
  auto apply = [&](const FineFunction& x, bool star) {
    detail::FinePrefix px(x);
    FineFunction out(res, 0.0);
    double scale = std::ldexp(1.0, -i * res.dim);
    for (const auto& gen : S.generations)
      for (const Cube& q : gen) {
        Cube anc = ancestor(q, i);
        const Box& avg_over = star ? q.box() : anc.box();
        const Box& paint = star ? anc.box() : q.box();
        double avg = px.sum(avg_over) / static_cast<double>(avg_over.volume());
        out.add_box(paint, star ? scale * avg : avg);
      }
    return out;
  };
  FineFunction x(res, 1.0);
  double lambda = 0.0;
  OpNormResult out;
  for (int it = 1; it <= max_iter; ++it) {
    FineFunction t(res, 0.0);
    for (size_t c = 0; c < x.v.size(); ++c) t.v[c] = x.v[c] * svinv.v[c];
    FineFunction a = apply(t, false);
    for (size_t c = 0; c < a.v.size(); ++c) a.v[c] *= su.v[c] * su.v[c];
    FineFunction y = apply(a, true);
    for (size_t c = 0; c < y.v.size(); ++c) y.v[c] *= svinv.v[c];
    double num = 0.0, den = 0.0, scale = 0.0;
    for (size_t c = 0; c < x.v.size(); ++c) {
      num += x.v[c] * y.v[c];
      den += x.v[c] * x.v[c];
      scale = std::max(scale, std::fabs(y.v[c]));
    }
    double lam = num / den;
    if (scale == 0.0) {
      out.norm = 0.0;
      out.converged = true;
      out.iterations = it;
      return out;
    }
    for (size_t c = 0; c < x.v.size(); ++c) x.v[c] = y.v[c] / scale;
    out.iterations = it;
    if (it > 1 && std::fabs(lam - lambda) <= tol * std::fabs(lam)) {
      lambda = lam;
      out.converged = true;
      break;
    }
    lambda = lam;
  }
  out.norm = std::sqrt(std::max(lambda, 0.0));
  return out;
}

/// sup_{lambda > 0} lambda |{x in [0,1)^n : g(x) > lambda}|, exact on cells.
inline double weak_l1_sup(const SampledFunction& g) {
  std::vector<double> vals(g.v);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  double mu = g.res.cell_measure();
  double best = 0.0;
  for (size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] <= 0.0) break;
    // lambda just below vals[k]: measure of {>= vals[k]} >= (k+1) cells
    best = std::max(best, vals[k] * static_cast<double>(k + 1) * mu);
  }
  return best;
}

}  // namespace dyad
