// Acceptance suite: every release criterion with its tolerance pinned in
// code, one pass/fail line per criterion. Pointwise inequalities are checked
// with zero tolerance; oracle equivalences use the stated relative bounds.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dyadlab/decompose.hpp"
#include "dyadlab/experiments.hpp"

using namespace dyad;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& label, bool pass,
            const std::string& detail) {
  g_results.push_back({id, label, pass, detail});
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool close_rel(double a, double b, double tol) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
  return std::fabs(a - b) <= tol * scale;
}

// --- 1: decomposition ------------------------------------------------------

void criterion_decomposition() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  auto run = [&](int n, int L, int trials) {
    Resolution res(n, L);
    Cube q0(standard_grid(res), 0, {0, 0});
    for (int t = 0; t < trials; ++t) {
      SampledFunction f =
          random_function(res, 1 + static_cast<uint64_t>(t), 5, 1, true, false);
      Decomposition d = decompose(f, q0);  // one_step asserts the half packing
      ok = ok && validate(d.family).pass;
      auto rep = verify_decomposition(f, d);
      ok = ok && rep.pass && rep.min_slack >= 0.0;
      min_slack = std::min(min_slack, rep.min_slack);
    }
  };
  try {
    run(1, 10, 200);
    run(2, 5, 50);
  } catch (const std::exception& e) {
    ok = false;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  ok = ok && secs < 60.0;
  record(1, "decomposition bound, constants 4 and 2, exact cellwise", ok,
         "250 trials, min slack " + fmt(min_slack) + ", " + fmt(secs) + " s");
}

// --- 2: CZ constructions ---------------------------------------------------

void criterion_cz() {
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  {
    Resolution res(1, 10);
    double c = std::ldexp(1.0, res.dim + 1);
    for (int t = 0; t < 200; ++t) {
      SampledFunction f =
          random_function(res, 10 + static_cast<uint64_t>(t), 4, 1, true, true);
      auto cz = cz_sparse_from_maximal(f, standard_grid(res));
      ok = ok && validate(cz.family).pass;
      SampledFunction md = dyadic_maximal(f);
      SampledFunction af = apply_sparse(cz.family, f);
      for (size_t i = 0; i < md.v.size(); ++i) {
        worst = std::min(worst, c * af.v[i] - md.v[i]);
        if (md.v[i] > c * af.v[i]) ok = false;  // zero tolerance
      }
    }
  }
  double worst2 = std::numeric_limits<double>::infinity();
  {
    Resolution res(1, 8);
    for (int t = 0; t < 100; ++t) {
      SampledFunction f =
          random_function(res, 300 + static_cast<uint64_t>(t), 4, 1, true, true);
      auto r = maximal_via_sparse(f);
      ok = ok && r.dominates;
      worst2 = std::min(worst2, r.min_slack);
    }
  }
  record(2, "M^d f <= 2^{n+1} A f and M f <= 2*12^n sum_a A_a f, exact", ok,
         "min slacks " + fmt(worst) + " and " + fmt(worst2));
}

// --- 3: bilinear -----------------------------------------------------------

void criterion_bilinear() {
  Resolution res(1, 8);
  double cn = std::ldexp(1.0, 2 * (res.dim + 1));
  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    uint64_t seed = 500 + static_cast<uint64_t>(t);
    SampledFunction f = random_function(res, seed, 4, 1, true, true);
    SampledFunction g = random_function(res, seed + 9000, 4, 1, true, true);
    auto cz = bilinear_sparse_decomposition(f, g);
    ok = ok && validate(cz.family).pass;
    SampledFunction md = bilinear_maximal(f, g, /*dyadic=*/true);
    SampledFunction bound(res, 0.0);
    BoxIntegrator fi(f), gi(g);
    for (const auto& gen : cz.family.generations)
      for (const Cube& q : gen)
        accumulate_indicator(bound, q.box(), fi.average(q) * gi.average(q));
    for (size_t i = 0; i < md.v.size(); ++i) {
      min_slack = std::min(min_slack, cn * bound.v[i] - md.v[i]);
      if (md.v[i] > cn * bound.v[i]) ok = false;
    }
  }
  record(3, "M^d(f,g) <= 2^{2(n+1)} sum f_Q g_Q chi_Q, families sparse, exact",
         ok, "200 pairs, min slack " + fmt(min_slack));
}

// --- 4: shifted-grid cover -------------------------------------------------

void criterion_cover() {
  bool ok = true;
  int64_t checked = 0;
  for (int L = 1; L <= 8; ++L) {
    Resolution res(1, L);
    int64_t cells = res.cells_per_axis();
    for (int64_t a = 0; a < cells; ++a)
      for (int64_t b = a + 1; b <= cells; ++b) {
        Box q;
        q.dim = 1;
        q.lo[0] = 3 * a;
        q.hi[0] = 3 * b;
        auto cov = shifted_cover(q, res);
        ok = ok && cov.cube.box().contains(q) && cov.cube.side() <= 6 * q.side(0);
        ++checked;
      }
  }
  Resolution res2(2, 6);
  auto rng = seeded_rng(99);
  int64_t cells = res2.cells_per_axis();
  for (int t = 0; t < 1000; ++t) {
    int64_t side = 1 + static_cast<int64_t>(rng() % cells);
    int64_t ax = static_cast<int64_t>(rng() % (cells - side + 1));
    int64_t ay = static_cast<int64_t>(rng() % (cells - side + 1));
    Box q;
    q.dim = 2;
    q.lo = {3 * ax, 3 * ay};
    q.hi = {3 * (ax + side), 3 * (ay + side)};
    auto cov = shifted_cover(q, res2);
    ok = ok && cov.cube.box().contains(q) && cov.cube.side() <= 6 * q.side(0);
    ++checked;
  }
  record(4, "shifted-grid cover with side ratio <= 6, zero failures", ok,
         std::to_string(checked) + " cubes");
}

// --- 5: L^2 bound for A_i --------------------------------------------------

void criterion_ai_l2() {
  Resolution res(1, 10);
  DyadicGrid g = standard_grid(res);
  bool ok = true;
  double max_ratio = 0.0;
  for (int i = 0; i <= 6; ++i)
    for (int t = 0; t < 100; ++t) {
      uint64_t seed = 700 + static_cast<uint64_t>(t);
      SparseFamily S = random_sparse_family(g, seed * 11 + i, i);
      SampledFunction f = random_function(res, seed + 40 * i, 4, 1, true, true);
      double den = lp_norm(f, 2.0);
      if (den <= 0.0) continue;
      double ratio = lp_norm(apply_sparse_i(S, f, i), 2.0) / den;
      max_ratio = std::max(max_ratio, ratio);
      if (ratio > 8.0) ok = false;
    }
  record(5, "||A_i f||_2 <= 8 ||f||_2 for i = 0..6", ok,
         "700 pairs, max ratio " + fmt(max_ratio));
}

// --- 6: weak (1,1) linearity -----------------------------------------------

void criterion_weak11() {
  ExperimentConfig cfg;
  cfg.name = "weak11";
  cfg.n = 1;
  cfg.L = 10;
  cfg.seeds = 15;
  cfg.params["i_values"] = "2,3,4,5,6,7,8";
  auto r = run_weak11_suite(cfg);
  record(6, "W(i)/i <= 6 for i >= 4 with no increasing trend", r.pass,
         "max " + fmt(r.summary["max_W_over_i_from_4"].get<double>()) +
             ", slope " + fmt(r.summary["loglog_slope_from_4"].get<double>()));
}

// --- 7: A_2 sweep ----------------------------------------------------------

void criterion_a2() {
  ExperimentConfig cfg;
  cfg.name = "a2-sweep";
  cfg.n = 1;
  cfg.L = 10;
  auto r = run_a2_sweep(cfg);
  record(7, "||A||_{L^2(w)} linear in ||w||_{A_2} over two decades", r.pass,
         "slope " + fmt(r.summary["loglog_slope"].get<double>()) +
             ", decades " + fmt(r.summary["char_decades"].get<double>()));
}

// --- 8: adjointness and oracle equivalences --------------------------------

void criterion_oracles() {
  bool ok = true;
  std::string worst_part;
  // adjointness to 1e-12 relative
  {
    Resolution res(1, 8);
    DyadicGrid g = standard_grid(res);
    double mu = res.cell_measure();
    for (uint64_t seed = 1; seed <= 20; ++seed)
      for (int i = 0; i <= 4; ++i) {
        SparseFamily S = random_sparse_family(g, seed * 3 + i, i);
        SampledFunction f = random_function(res, seed);
        SampledFunction h = random_function(res, seed + 555);
        SampledFunction af = apply_sparse_i(S, f, i);
        SampledFunction sh = apply_sparse_i_star(S, h, i);
        double lhs = 0.0, rhs = 0.0;
        for (size_t c = 0; c < f.v.size(); ++c) {
          lhs += af.v[c] * h.v[c] * mu;
          rhs += f.v[c] * sh.v[c] * mu;
        }
        if (!close_rel(lhs, rhs, 1e-12)) {
          ok = false;
          worst_part = "adjointness";
        }
      }
  }
  // oscillation window formula vs brute force over candidate constants
  {
    Resolution res(1, 6);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      SampledFunction f = random_function(res, seed + 77);
      for (double lam : {1.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0})
        for (int k = 0; k <= res.depth; ++k)
          for (const Cube& q :
               cubes_at_level(standard_grid(res), k, domain_box(res))) {
            auto u = cell_values(f, q.box());
            int64_t N = static_cast<int64_t>(u.size());
            double brute = std::numeric_limits<double>::infinity();
            std::vector<double> cands;
            for (size_t a = 0; a < u.size(); ++a) {
              cands.push_back(u[a]);
              for (size_t b = a; b < u.size(); ++b)
                cands.push_back((u[a] + u[b]) / 2.0);
            }
            for (double c : cands) {
              std::vector<double> dev;
              for (double x : u) dev.push_back(std::fabs(x - c));
              std::sort(dev.begin(), dev.end(), std::greater<double>());
              double val = 0.0;
              for (size_t j = 0; j < dev.size(); ++j)
                if (static_cast<double>(j + 1) >=
                    lam * static_cast<double>(N)) {
                  val = dev[j];
                  break;
                }
              brute = std::min(brute, val);
            }
            if (!close_rel(oscillation(f, q, lam), brute, 1e-12)) {
              ok = false;
              worst_part = "oscillation";
            }
          }
    }
  }
  // Haar maximal truncation vs brute force over all band pairs
  {
    Resolution res(1, 6);
    for (uint64_t seed = 1; seed <= 4; ++seed) {
      HaarShift S =
          random_haar_shift(standard_grid(res), 1, 2, seed, seed % 2 == 0);
      SampledFunction f = random_function(res, seed + 31);
      SampledFunction sup = haar_maximal(S, f);
      SampledFunction best(res, 0.0);
      for (int l1 = 0; l1 <= S.max_level(); ++l1)
        for (int l2 = l1; l2 <= S.max_level(); ++l2) {
          SampledFunction t =
              haar_apply(S, f, std::ldexp(1.0, -l2), std::ldexp(1.0, -l1));
          for (size_t c = 0; c < best.v.size(); ++c)
            best.v[c] = std::max(best.v[c], std::fabs(t.v[c]));
        }
      for (size_t c = 0; c < best.v.size(); ++c)
        if (!close_rel(sup.v[c], best.v[c], 1e-12)) {
          ok = false;
          worst_part = "haar maximal";
        }
    }
  }
  // Luxemburg: bisection residual and the power closed form
  {
    Resolution res(1, 7);
    Cube q0(standard_grid(res), 0, {0, 0});
    auto bump = YoungFunction::power_log_bump(2.0, 1.0);
    double mu = res.cell_measure();
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      SampledFunction f = random_function(res, seed + 1234);
      double lam = luxemburg_average(f, q0, bump);
      double mean = 0.0;
      for (double v : f.v)
        if (std::fabs(v) > 0.0) mean += bump(std::fabs(v) / lam) * mu;
      if (std::fabs(mean - 1.0) > 1e-9) {
        ok = false;
        worst_part = "luxemburg residual";
      }
      for (double p : {1.5, 2.0, 4.0}) {
        double lux = luxemburg_average(f, q0, YoungFunction::power(p));
        double direct = 0.0;
        for (double v : f.v) direct += std::pow(std::fabs(v), p) * mu;
        direct = std::pow(direct, 1.0 / p);
        if (!close_rel(lux, direct, 1e-9)) {
          ok = false;
          worst_part = "luxemburg power form";
        }
      }
    }
  }
  record(8, "adjointness and oracle equivalences at stated tolerances", ok,
         ok ? "adjoint 1e-12, oracles 1e-12, luxemburg 1e-9"
            : "first failure: " + worst_part);
}

// --- 9: dyadic maximal norm ------------------------------------------------

void criterion_md_norm() {
  Resolution res(1, 8);
  bool ok = true;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (double p : {1.5, 2.0, 4.0}) {
    double pp = p / (p - 1.0);
    for (int t = 0; t < 100; ++t) {
      SampledFunction f =
          random_function(res, 2000 + static_cast<uint64_t>(t), 4, 1, true,
                          false);
      double den = lp_norm(f, p);
      if (den <= 0.0) continue;
      double ratio = lp_norm(dyadic_maximal(f), p) / den;
      worst_gap = std::min(worst_gap, pp - ratio);
      if (ratio > pp) ok = false;
    }
  }
  record(9, "||M^d f||_p <= p' ||f||_p for p in {1.5, 2, 4}, exact", ok,
         "300 trials, min gap to p' " + fmt(worst_gap));
}

// --- 10: domination witness --------------------------------------------------

void criterion_domination() {
  ExperimentConfig cfg;
  cfg.name = "dominate";
  cfg.n = 1;
  cfg.seeds = 12;
  cfg.params["L_values"] = "6,8,10";
  auto r = run_domination_suite(cfg);
  record(10, "T# ratio bounded across L in {6,8,10} (witness, not proof)",
         r.pass,
         "slope " + fmt(r.summary["loglog_slope_vs_cells"].get<double>()) +
             ", max ratio " + fmt(r.summary["max_ratio"].get<double>()));
}

// --- 11: the A f against weight inequality ----------------------------------

void criterion_weighted_pairing() {
  Resolution res(1, 8);
  DyadicGrid g = standard_grid(res);
  bool ok = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  double mu = res.cell_measure();
  for (int t = 0; t < 100; ++t) {
    uint64_t seed = 3000 + static_cast<uint64_t>(t);
    SampledFunction f = random_function(res, seed, 4, 1, true, true);
    Weight w = make_weight("random:seed=" + std::to_string(seed + 17) +
                               ",spikes=0",
                           res);
    SampledFunction mf = lattice_maximal(f);
    std::vector<SparseFamily> families{
        cz_sparse_from_maximal(f, g).family,
        random_sparse_family(g, seed, 0)};
    for (double delta : {0.25, 0.5, 1.0}) {
      SampledFunction inner(res);
      for (size_t c = 0; c < inner.v.size(); ++c)
        inner.v[c] = std::pow(mf.v[c], 1.0 - delta) * w.w.v[c];
      SampledFunction m_inner = lattice_maximal(inner);
      double rhs = 0.0;
      for (size_t c = 0; c < m_inner.v.size(); ++c)
        rhs += std::pow(mf.v[c], delta) * m_inner.v[c] * mu;
      rhs *= 2.0;
      for (const SparseFamily& S : families) {
        double lhs = sparse_pairing(S, f, w.w);
        min_ratio = std::min(min_ratio, rhs / lhs);
        if (lhs > rhs) ok = false;  // exact
      }
    }
  }
  record(11,
         "integral (A f) w <= 2 integral (Mf)^d M((Mf)^{1-d} w), exact, "
         "d in {1/4, 1/2, 1}",
         ok, "100 trials x 3 deltas x 2 families, min rhs/lhs " +
                 fmt(min_ratio));
}

// --- 12: determinism ---------------------------------------------------------

void criterion_determinism() {
  namespace fs = std::filesystem;
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  fs::path base = fs::temp_directory_path() / "dyadlab_acceptance_det";
  fs::remove_all(base);
  bool ok = true;
  for (auto run : {run_decomposition_suite, run_bilinear_suite}) {
    ExperimentConfig cfg;
    cfg.name = "det";
    cfg.n = 1;
    cfg.L = 8;
    cfg.seeds = 20;
    cfg.out_dir = (base / "r1").string();
    write_outputs(cfg, run(cfg));
    cfg.out_dir = (base / "r2").string();
    write_outputs(cfg, run(cfg));
    ok = ok && read(base / "r1" / "rows.csv") == read(base / "r2" / "rows.csv");
    fs::remove_all(base);
  }
  record(12, "identical configs produce byte-identical rows.csv", ok,
         "decomposition and bilinear suites, 20 seeds each");
}

}  // namespace

int main() {
  std::printf("dyadlab acceptance suite\n");
  auto t0 = std::chrono::steady_clock::now();
  criterion_decomposition();
  criterion_cz();
  criterion_bilinear();
  criterion_cover();
  criterion_ai_l2();
  criterion_weak11();
  criterion_a2();
  criterion_oracles();
  criterion_md_norm();
  criterion_domination();
  criterion_weighted_pairing();
  criterion_determinism();
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  int failures = 0;
  for (const auto& c : g_results)
    if (!c.pass) ++failures;
  std::printf("%zu criteria, %d failed, %.1f s total\n", g_results.size(),
              failures, secs);
  return failures == 0 ? 0 : 1;
}
