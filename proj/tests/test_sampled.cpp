#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dyadlab/generate.hpp"
#include "dyadlab/sampled.hpp"

using namespace dyad;

namespace {

Cube interval_cube(const Resolution& r, unsigned alpha, int level,
                   double corner) {
  return Cube(DyadicGrid(r, alpha), level,
              {static_cast<int64_t>(std::llround(
                   corner * static_cast<double>(r.denom()))),
               0});
}

SampledFunction chi_left_half(const Resolution& r) {
  SampledFunction f(r, 0.0);
  for (int64_t x = 0; x < r.cells_per_axis() / 2; ++x) f.at(x) = 1.0;
  return f;
}

// brute-force oscillation: try every pairwise midpoint and every value as c
double oscillation_brute(const SampledFunction& f, const Cube& q,
                         double lambda) {
  auto u = cell_values(f, q.box());
  int64_t N = static_cast<int64_t>(u.size());
  std::vector<double> cands;
  for (size_t i = 0; i < u.size(); ++i) {
    cands.push_back(u[i]);
    for (size_t j = i; j < u.size(); ++j) cands.push_back((u[i] + u[j]) / 2.0);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double c : cands) {
    std::vector<double> dev;
    dev.reserve(u.size());
    for (double x : u) dev.push_back(std::fabs(x - c));
    std::sort(dev.begin(), dev.end(), std::greater<double>());
    // strict convention: ((f-c)chi)*(lambda N) = first value with
    // cumulative count >= lambda N
    double val = 0.0;
    for (size_t j = 0; j < dev.size(); ++j)
      if (static_cast<double>(j + 1) >= lambda * static_cast<double>(N)) {
        val = dev[j];
        break;
      }
    best = std::min(best, val);
  }
  return best;
}

}  // namespace

TEST_CASE("averages with exact overlap", "[sampled]") {
  Resolution res(1, 6);
  SampledFunction c(res, 2.5);
  Cube unit(standard_grid(res), 0, {0, 0});
  CHECK(average(c, unit) == Catch::Approx(2.5).margin(1e-15));

  SampledFunction chi = chi_left_half(res);
  CHECK(average(chi, unit) == Catch::Approx(0.5).margin(1e-15));

  // shifted cube [1/3, 5/6): overlap with [0,1/2) is 1/6, |Q| = 1/2
  Cube shifted = interval_cube(res, 1, 1, 1.0 / 3.0);
  CHECK(average(chi, shifted) == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("average is linear and normalized", "[sampled]") {
  Resolution res(1, 5);
  auto f = random_function(res, 11);
  auto g = random_function(res, 12);
  SampledFunction h(res);
  for (size_t i = 0; i < h.v.size(); ++i) h.v[i] = 2.0 * f.v[i] - 3.0 * g.v[i];
  for (const DyadicGrid& gr : all_grids(res))
    for (int k = 0; k <= 3; ++k)
      for (const Cube& q : cubes_at_level(gr, k, domain_box(res))) {
        double lhs = average(h, q);
        double rhs = 2.0 * average(f, q) - 3.0 * average(g, q);
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
      }
  SampledFunction one(res, 1.0);
  Cube unit(standard_grid(res), 0, {0, 0});
  CHECK(average(one, unit) == 1.0);

  // monotone: f <= g pointwise implies f_Q <= g_Q
  SampledFunction lo = random_function(res, 13), hi = lo;
  auto bump_rng = seeded_rng(14);
  for (double& x : hi.v) x += uniform01(bump_rng);
  for (int k = 0; k <= res.depth; ++k)
    for (const Cube& q : cubes_at_level(standard_grid(res), k, domain_box(res)))
      CHECK(average(lo, q) <= average(hi, q) + 1e-14);
}

TEST_CASE("rearrangement of an indicator", "[sampled]") {
  Resolution res(1, 5);
  SampledFunction chi(res, 0.0);
  int64_t k = res.cells_per_axis() / 4;  // |E| = 1/4
  for (int64_t x = 0; x < k; ++x) chi.at(x) = 1.0;
  auto r = rearrangement(chi);
  CHECK(r.value_at(0.1) == 1.0);
  CHECK(r.value_at(0.25) == 1.0);  // strict convention: still 1 at t = |E|
  CHECK(r.value_at(0.2501) == 0.0);
  CHECK(r.value_at(0.9) == 0.0);
}

TEST_CASE("rearrangement matches the sorted-value formula", "[sampled]") {
  Resolution res(1, 4);
  // three equal pieces of measure 1/3 with values 4, 1, 3
  int64_t w = res.denom() / 3;
  Rearrangement r({{4.0, w}, {1.0, w}, {3.0, w}}, res);
  CHECK(r.value_at(0.4) == 3.0);  // 0.4 lands in the second piece
  CHECK(r.value_at(0.1) == 4.0);
  CHECK(r.value_at(0.7) == 1.0);
  CHECK(r.value_at(1.1) == 0.0);
}

TEST_CASE("rearrangement is non-increasing and equimeasurable", "[sampled]") {
  Resolution res(1, 6);
  auto f = random_function(res, 3);
  auto r = rearrangement(f);
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t < 1.0; t += 1.0 / 64.0) {
    double v = r.value_at(t);
    CHECK(v <= prev);
    prev = v;
  }
  // |{|f| > a}| agrees with |{t : f*(t) > a}| for several levels a; f* is a
  // left-continuous step function with steps at multiples of mu, so sampling
  // t = mu, 2mu, ..., N*mu counts the measure exactly
  double mu = res.cell_measure();
  for (double a : {0.0, 0.1, 0.5, 1.0, 2.0}) {
    int64_t count = 0;
    for (double x : f.v)
      if (std::fabs(x) > a) ++count;
    int64_t star_count = 0;
    for (int64_t i = 1; i <= res.cells_per_axis(); ++i)
      if (r.value_at(static_cast<double>(i) * mu) > a) ++star_count;
    CHECK(count == star_count);
  }
}

TEST_CASE("maximal median", "[sampled]") {
  Resolution res(1, 4);
  Cube unit(standard_grid(res), 0, {0, 0});
  SampledFunction c(res, 3.25);
  CHECK(median(c, unit) == 3.25);

  Resolution res2(1, 2);  // 4 cells
  Cube unit2(standard_grid(res2), 0, {0, 0});
  SampledFunction f(res2);
  f.v = {0.0, 0.0, 1.0, 1.0};
  CHECK(median(f, unit2) == 1.0);  // maximal median of a balanced split
  SampledFunction g(res2);
  g.v = {1.0, 2.0, 3.0, 4.0};
  CHECK(median(g, unit2) == 3.0);

  // misaligned (shifted) cube rejected
  Cube shifted = interval_cube(res, 1, 1, 1.0 / 3.0);
  CHECK_THROWS_AS(median(c, shifted), std::invalid_argument);
}

TEST_CASE("median property: neither side exceeds half", "[sampled]") {
  Resolution res(1, 5);
  auto f = random_function(res, 21);
  for (int k = 0; k <= res.depth; ++k)
    for (const Cube& q : cubes_at_level(standard_grid(res), k, domain_box(res))) {
      double m = median(f, q);
      auto u = cell_values(f, q.box());
      int64_t above = 0, below = 0;
      for (double x : u) {
        if (x > m) ++above;
        if (x < m) ++below;
      }
      CHECK(2 * above <= static_cast<int64_t>(u.size()));
      CHECK(2 * below <= static_cast<int64_t>(u.size()));
    }
}

TEST_CASE("oscillation window formula", "[sampled]") {
  Resolution res(1, 2);  // 4 cells
  Cube unit(standard_grid(res), 0, {0, 0});
  SampledFunction c(res, 7.0);
  for (double lam : {0.1, 0.25, 0.5, 0.9}) CHECK(oscillation(c, unit, lam) == 0.0);

  SampledFunction f(res);
  f.v = {0.0, 0.0, 10.0, 12.0};
  // lambda = 0.3 discards strictly less than 0.3*4 cells, i.e. one:
  // best window {0,0,10} of half-width 5
  CHECK(oscillation(f, unit, 0.3) == 5.0);
  // at lambda = 1/4 nothing is discardable (complement must be < 1 cell)
  CHECK(oscillation(f, unit, 0.25) == 6.0);

  // indicator with |E| < lambda |Q| strictly has zero oscillation (c = 0)
  Resolution res16(1, 4);
  Cube unit16(standard_grid(res16), 0, {0, 0});
  SampledFunction chi(res16, 0.0);
  for (int64_t x = 0; x < 3; ++x) chi.at(x) = 1.0;  // |E| = 3/16 < 1/4
  CHECK(oscillation(chi, unit16, 0.25) == 0.0);
}

TEST_CASE("oscillation equals brute force over candidate constants",
          "[sampled]") {
  Resolution res(1, 6);  // subcubes up to 64 cells
  auto f = random_function(res, 5);
  for (double lam : {1.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0}) {
    for (int k = 0; k <= res.depth; ++k)
      for (const Cube& q :
           cubes_at_level(standard_grid(res), k, domain_box(res))) {
        double fast = oscillation(f, q, lam);
        double brute = oscillation_brute(f, q, lam);
        CHECK(fast == Catch::Approx(brute).margin(1e-12));
      }
  }
}

TEST_CASE("local sharp maximal function", "[sampled]") {
  Resolution res(1, 4);
  Cube unit(standard_grid(res), 0, {0, 0});
  SampledFunction c(res, 1.0);
  auto m0 = local_sharp_maximal(c, unit, 1.0 / 8.0);
  for (double x : m0.v) CHECK(x == 0.0);

  // chi_{[0,1/2)}: the unit cube contributes 1/2, subcubes on one side 0
  SampledFunction chi = chi_left_half(res);
  auto m1 = local_sharp_maximal(chi, unit, 1.0 / 8.0);
  for (double x : m1.v) CHECK(x == 0.5);

  // monotone staircase: compare against direct enumeration over the chain
  SampledFunction stair(res);
  for (int64_t x = 0; x < res.cells_per_axis(); ++x)
    stair.at(x) = std::floor(4.0 * (static_cast<double>(x) + 0.5) /
                             static_cast<double>(res.cells_per_axis()));
  auto m2 = local_sharp_maximal(stair, unit, 1.0 / 8.0);
  for (int64_t cell = 0; cell < res.cells_per_axis(); ++cell) {
    double expect = 0.0;
    for (int k = 0; k <= res.depth; ++k) {
      int64_t side = res.cells_per_axis() >> k;
      int64_t start = (cell / side) * side;
      Cube q(standard_grid(res), k, {3 * start, 0});
      expect = std::max(expect, oscillation(stair, q, 1.0 / 8.0));
    }
    CHECK(m2.at(cell) == Catch::Approx(expect).margin(1e-15));
  }
}

TEST_CASE("median bound (4.1) and oscillation bound (4.2)", "[sampled]") {
  Resolution res(1, 6);
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    auto f = random_function(res, seed);
    for (int k = 0; k <= res.depth; ++k)
      for (const Cube& q :
           cubes_at_level(standard_grid(res), k, domain_box(res))) {
        double m = median(f, q);
        // (4.1): |m_f(Q)| <= (f chi_Q)*(|Q|/2)
        double star_half = rearrangement(f, q).value_at_frac(q.volume(), 2);
        CHECK(std::fabs(m) <= star_half);
        // (4.2): ((f - m) chi_Q)*(lambda|Q|) <= 2 w_lambda(f;Q), lambda <= 1/2
        for (int shift = 1; shift <= 3; ++shift) {
          int64_t den = int64_t{1} << shift;
          SampledFunction g = f;
          for (double& x : g.v) x -= m;
          double lhs = rearrangement(g, q).value_at_frac(q.volume(), den);
          double w = oscillation(f, q, 1.0 / static_cast<double>(den));
          CHECK(lhs <= 2.0 * w + 1e-12 * (1.0 + lhs));
        }
      }
  }
}

TEST_CASE("weights clip to a positive floor", "[sampled]") {
  Resolution res(1, 4);
  SampledFunction f(res, 1.0);
  f.at(0) = 0.0;
  f.at(1) = -2.0;
  Weight w(f);
  CHECK(w.clipped);
  CHECK(w.w.at(0) == Weight::kFloor);
  CHECK(w.w.at(1) == Weight::kFloor);
  CHECK(w.w.at(2) == 1.0);
}
