// Exact dyadic geometry: cubes, grids, the 2^n shifted grids and the 6*side
// cover. All coordinates are integers scaled by 1/denom, denom = 3*2^L, so
// shifted corners (which involve thirds) stay exact.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyad {

using std::int64_t;

#define DYAD_REQUIRE(cond, msg) \
  do {                          \
    if (!(cond)) throw std::invalid_argument(msg); \
  } while (0)

#define DYAD_ASSERT(cond, msg) \
  do {                         \
    if (!(cond)) throw std::logic_error(msg); \
  } while (0)

/// Discretization of [0,1)^n: 2^depth lattice cells per axis, coordinates
/// stored as integers over denom = 3*2^depth.
struct Resolution {
  int dim = 1;    // 1 or 2
  int depth = 8;  // L; lattice cells per axis = 2^L

  Resolution() = default;
  Resolution(int n, int L) : dim(n), depth(L) {
    DYAD_REQUIRE(n == 1 || n == 2, "Resolution: dim must be 1 or 2");
    DYAD_REQUIRE(L >= 1 && L <= 16, "Resolution: depth must be in [1,16]");
  }

  int64_t denom() const { return int64_t{3} << depth; }
  int64_t cells_per_axis() const { return int64_t{1} << depth; }
  int64_t cell_count() const { return int64_t{1} << (dim * depth); }
  // scaled side of one lattice cell (1/2^L in units of 1/denom)
  int64_t cell_side() const { return 3; }
  double cell_measure() const {
    double m = 1.0;
    for (int a = 0; a < dim; ++a) m /= static_cast<double>(cells_per_axis());
    return m;
  }

  bool operator==(const Resolution& o) const {
    return dim == o.dim && depth == o.depth;
  }
};

/// Half-open axis-aligned box [lo, hi) in scaled integer coordinates.
struct Box {
  int dim = 1;
  std::array<int64_t, 2> lo{0, 0};
  std::array<int64_t, 2> hi{0, 0};

  int64_t side(int axis) const { return hi[axis] - lo[axis]; }
  int64_t volume() const {
    int64_t v = 1;
    for (int a = 0; a < dim; ++a) v *= side(a);
    return v;
  }
  bool empty() const {
    for (int a = 0; a < dim; ++a)
      if (hi[a] <= lo[a]) return true;
    return false;
  }
  bool contains(const Box& other) const {
    for (int a = 0; a < dim; ++a)
      if (other.lo[a] < lo[a] || other.hi[a] > hi[a]) return false;
    return true;
  }
  bool contains_point(const std::array<int64_t, 2>& p) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[a] || p[a] >= hi[a]) return false;
    return true;
  }
  Box intersect(const Box& other) const {
    Box r;
    r.dim = dim;
    for (int a = 0; a < dim; ++a) {
      r.lo[a] = std::max(lo[a], other.lo[a]);
      r.hi[a] = std::min(hi[a], other.hi[a]);
      if (r.hi[a] < r.lo[a]) r.hi[a] = r.lo[a];
    }
    return r;
  }
  int64_t overlap_volume(const Box& other) const {
    int64_t v = 1;
    for (int a = 0; a < dim; ++a) {
      int64_t w = std::min(hi[a], other.hi[a]) - std::max(lo[a], other.lo[a]);
      if (w <= 0) return 0;
      v *= w;
    }
    return v;
  }
};

// Ambient box [-1,2)^n: wide enough for every shifted cube of sidelength <= 1
// that meets the unit cube. Functions are zero-extended outside [0,1)^n.
inline Box ambient_box(const Resolution& res) {
  Box b;
  b.dim = res.dim;
  for (int a = 0; a < res.dim; ++a) {
    b.lo[a] = -res.denom();
    b.hi[a] = 2 * res.denom();
  }
  return b;
}

inline Box domain_box(const Resolution& res) {
  Box b;
  b.dim = res.dim;
  for (int a = 0; a < res.dim; ++a) {
    b.lo[a] = 0;
    b.hi[a] = res.denom();
  }
  return b;
}

/// One of the 2^n shifted dyadic grids
///   D_alpha = { 2^{-k}([0,1)^n + m + (-1)^k * alpha/3) },   alpha in {0,1}^n.
/// The (-1)^k alternation makes consecutive levels nest, so each D_alpha is a
/// genuine dyadic grid. alpha = 0 is the standard grid.
struct DyadicGrid {
  Resolution res;
  unsigned shift_bits = 0;  // bit j = alpha_j

  DyadicGrid() = default;
  DyadicGrid(Resolution r, unsigned alpha) : res(r), shift_bits(alpha) {
    DYAD_REQUIRE(alpha < (1u << r.dim), "DyadicGrid: shift id out of range");
  }

  bool is_standard() const { return shift_bits == 0; }
  int shift_component(int axis) const { return (shift_bits >> axis) & 1; }

  // scaled sidelength of a level-k cube
  int64_t side_at_level(int level) const {
    return int64_t{3} << (res.depth - level);
  }

  // Corner residue of level-k cubes on the given axis:
  // corner == residue (mod side_at_level).
  int64_t corner_residue(int level, int axis) const {
    if (!shift_component(axis)) return 0;
    int64_t s = int64_t{1} << (res.depth - level);  // side/3
    return (level % 2 == 0) ? s : 2 * s;            // (+1/3 or -1/3)*side
  }

  bool operator==(const DyadicGrid& o) const {
    return res == o.res && shift_bits == o.shift_bits;
  }
};

inline DyadicGrid standard_grid(const Resolution& res) {
  return DyadicGrid(res, 0);
}

inline std::vector<DyadicGrid> all_grids(const Resolution& res) {
  std::vector<DyadicGrid> out;
  for (unsigned a = 0; a < (1u << res.dim); ++a) out.emplace_back(res, a);
  return out;
}

/// A dyadic cube: grid, level k (sidelength 2^{-k}, 0 <= k <= L) and the
/// scaled corner. Level 0 cubes have sidelength 1.
struct Cube {
  DyadicGrid grid;
  int level = 0;
  std::array<int64_t, 2> corner{0, 0};

  Cube() = default;
  Cube(DyadicGrid g, int k, std::array<int64_t, 2> c)
      : grid(g), level(k), corner(c) {
    DYAD_REQUIRE(k >= 0 && k <= g.res.depth, "Cube: level out of range");
    int64_t s = g.side_at_level(k);
    for (int a = 0; a < g.res.dim; ++a) {
      int64_t rem = ((c[a] - g.corner_residue(k, a)) % s + s) % s;
      DYAD_REQUIRE(rem == 0, "Cube: corner does not match the grid pattern");
    }
  }

  int dim() const { return grid.res.dim; }
  int64_t side() const { return grid.side_at_level(level); }
  double side_real() const {
    return static_cast<double>(side()) / static_cast<double>(grid.res.denom());
  }
  Box box() const {
    Box b;
    b.dim = dim();
    for (int a = 0; a < dim(); ++a) {
      b.lo[a] = corner[a];
      b.hi[a] = corner[a] + side();
    }
    return b;
  }
  int64_t volume() const { return box().volume(); }
  double measure() const {
    double m = 1.0;
    for (int a = 0; a < dim(); ++a)
      m *= side_real();
    return m;
  }
  bool contains(const Cube& other) const { return box().contains(other.box()); }

  bool operator==(const Cube& o) const {
    return grid == o.grid && level == o.level && corner == o.corner;
  }
};

/// The 2^n children, level+1, tiling the parent exactly.
inline std::vector<Cube> children(const Cube& q) {
  DYAD_REQUIRE(q.level < q.grid.res.depth, "children: cube is at finest level");
  int64_t half = q.side() / 2;
  std::vector<Cube> out;
  int n = q.dim();
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::array<int64_t, 2> c = q.corner;
    for (int a = 0; a < n; ++a)
      if ((mask >> a) & 1) c[a] += half;
    out.emplace_back(q.grid, q.level + 1, c);
  }
  return out;
}

/// The unique cube of the same grid at level q.level - i containing q.
inline Cube ancestor(const Cube& q, int i) {
  DYAD_REQUIRE(i >= 0, "ancestor: negative index");
  if (i == 0) return q;
  DYAD_REQUIRE(q.level - i >= 0, "ancestor: index exceeds available levels");
  int k = q.level - i;
  int64_t s = q.grid.side_at_level(k);
  std::array<int64_t, 2> c{0, 0};
  for (int a = 0; a < q.dim(); ++a) {
    int64_t r = q.grid.corner_residue(k, a);
    c[a] = q.corner[a] - (((q.corner[a] - r) % s + s) % s);
  }
  Cube anc(q.grid, k, c);
  DYAD_ASSERT(anc.contains(q), "ancestor: containment failed");
  return anc;
}

inline Cube parent(const Cube& q) { return ancestor(q, 1); }

/// The level-k cube of the grid containing the scaled point.
inline Cube cube_at(const DyadicGrid& g, int level, std::array<int64_t, 2> p) {
  int64_t s = g.side_at_level(level);
  std::array<int64_t, 2> c{0, 0};
  for (int a = 0; a < g.res.dim; ++a) {
    int64_t r = g.corner_residue(level, a);
    c[a] = p[a] - (((p[a] - r) % s + s) % s);
  }
  return Cube(g, level, c);
}

/// All level-k cubes of the grid intersecting the window. For each fixed
/// level these tile space, so the result partitions the window exactly.
inline std::vector<Cube> cubes_at_level(const DyadicGrid& g, int level,
                                        const Box& window) {
  DYAD_REQUIRE(level >= 0 && level <= g.res.depth,
               "cubes_at_level: level out of range");
  int64_t s = g.side_at_level(level);
  int n = g.res.dim;
  std::array<int64_t, 2> first{0, 0};
  std::array<int64_t, 2> count{1, 1};
  for (int a = 0; a < n; ++a) {
    int64_t r = g.corner_residue(level, a);
    // first cube corner <= window.lo[a], on the pattern
    first[a] = window.lo[a] - (((window.lo[a] - r) % s + s) % s);
    count[a] = (window.hi[a] - first[a] + s - 1) / s;
    if (window.hi[a] <= window.lo[a]) count[a] = 0;
  }
  std::vector<Cube> out;
  for (int64_t i = 0; i < count[0]; ++i) {
    if (n == 1) {
      out.emplace_back(g, level, std::array<int64_t, 2>{first[0] + i * s, 0});
    } else {
      for (int64_t j = 0; j < count[1]; ++j)
        out.emplace_back(g, level,
                         std::array<int64_t, 2>{first[0] + i * s, first[1] + j * s});
    }
  }
  return out;
}

/// Cover of an arbitrary lattice cube Q subset [0,1)^n by a single shifted-grid
/// cube Q_alpha with side(Q_alpha) <= 6*side(Q). Existence is guaranteed; a
/// failure here is a bug, not an input error.
struct CoverResult {
  DyadicGrid grid;
  Cube cube;
  double ratio;  // side(Q_alpha) / side(Q)
};

inline CoverResult shifted_cover(const Box& q, const Resolution& res) {
  DYAD_REQUIRE(q.dim == res.dim, "shifted_cover: dimension mismatch");
  DYAD_REQUIRE(!q.empty(), "shifted_cover: empty cube");
  int64_t side = q.side(0);
  for (int a = 0; a < q.dim; ++a) {
    DYAD_REQUIRE(q.side(a) == side, "shifted_cover: box is not a cube");
    DYAD_REQUIRE(q.lo[a] % res.cell_side() == 0 && side % res.cell_side() == 0,
                 "shifted_cover: corners must lie on the lattice");
    DYAD_REQUIRE(q.lo[a] >= 0 && q.hi[a] <= res.denom(),
                 "shifted_cover: cube must lie in [0,1)^n");
  }
  // If Q is itself a cube of one of the 2^n grids, return it (ratio 1).
  if (side % 3 == 0 && (side / 3 & (side / 3 - 1)) == 0) {
    int k = res.depth;
    for (int64_t s = 1; s < side / 3; s *= 2) --k;
    if (k >= 0) {
      for (unsigned a = 0; a < (1u << res.dim); ++a) {
        DyadicGrid g(res, a);
        bool match = true;
        for (int ax = 0; ax < res.dim && match; ++ax) {
          int64_t r = g.corner_residue(k, ax);
          match = ((q.lo[ax] - r) % side + side) % side == 0;
        }
        if (match) {
          Cube self(g, k, {q.lo[0], q.lo[1]});
          return CoverResult{g, self, 1.0};
        }
      }
    }
  }
  // Finest level whose cells are >= 3x the cube side: an interval that short
  // meets at most one partition point of {D_0, D_alpha} per axis, so one of
  // the two offsets works on each axis.
  int level = 0;
  while (level < res.depth &&
         (int64_t{3} << (res.depth - (level + 1))) >= 3 * side)
    ++level;
  int64_t cube_side = int64_t{3} << (res.depth - level);
  DYAD_ASSERT(cube_side >= 3 * side || level == 0,
              "shifted_cover: level selection failed");

  unsigned alpha = 0;
  std::array<int64_t, 2> corner{0, 0};
  for (int a = 0; a < q.dim; ++a) {
    bool found = false;
    for (unsigned bit = 0; bit <= 1 && !found; ++bit) {
      int64_t s3 = int64_t{1} << (res.depth - level);
      int64_t r = bit ? ((level % 2 == 0) ? s3 : 2 * s3) : 0;
      int64_t c = q.lo[a] - (((q.lo[a] - r) % cube_side + cube_side) % cube_side);
      if (q.hi[a] <= c + cube_side) {
        alpha |= bit << a;
        corner[a] = c;
        found = true;
      }
    }
    DYAD_ASSERT(found, "shifted_cover: no offset contains the cube");
  }
  DyadicGrid g(res, alpha);
  Cube qa(g, level, corner);
  DYAD_ASSERT(qa.box().contains(q), "shifted_cover: cover does not contain Q");
  DYAD_ASSERT(qa.side() <= 6 * side, "shifted_cover: ratio exceeds 6");
  CoverResult out{g, qa,
                  static_cast<double>(qa.side()) / static_cast<double>(side)};
  return out;
}

}  // namespace dyad
