// Constructive local mean oscillation decomposition. One selection step on a
// cube Q: with f1 = f - m_f(Q) and threshold tau = (f1 chi_Q)*(lambda_n |Q|),
// select the maximal subcubes for which some dyadic child has |m_{f1}| > tau.
// Iterating over the selected cubes yields a sparse family realizing
//   |f - m_f(Q0)| <= 4 M^{#,d}_{lambda_n;Q0} f + 2 sum w_{lambda_n}(f;Q_j^k) chi_{Q_j^k}
// cellwise, with lambda_n = 2^{-(n+2)}.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dyadlab/sampled.hpp"
#include "dyadlab/sparse.hpp"

namespace dyad {

inline double oscillation_lambda(int dim) { return std::ldexp(1.0, -(dim + 2)); }

struct OneStepResult {
  Cube q;
  double median_q = 0.0;  // m_f(Q), maximal median
  double tau = 0.0;       // (f1 chi_Q)*(lambda_n |Q|)
  double omega_q = 0.0;   // w_{lambda_n}(f;Q)
  std::vector<Cube> selected;
  std::vector<double> coeffs;  // alpha_j = m_{f1}(Q_j)
  int64_t selected_cells = 0;  // sum of cell counts of the selected cubes
};

/// One selection step (possibly empty). Enforced exactly, throwing on
/// violation rather than special-casing:
///   - sum |Q_j| <= |Q|/2,
///   - |alpha_j| <= tau <= 2 w_{lambda_n}(f;Q),
///   - each Q_j has > |Q_j|/2^{n+1} of its measure where |f1| > tau,
///   - |f1| <= tau on every cell of Q outside the selected cubes.
inline OneStepResult one_step(const SampledFunction& f, const Cube& q,
                              double lambda = 0.0) {
  DYAD_REQUIRE(lattice_aligned(q) && domain_box(f.res).contains(q.box()),
               "one_step: Q must be lattice-aligned inside [0,1)^n");
  int n = f.res.dim;
  if (lambda <= 0.0) lambda = oscillation_lambda(n);
  OneStepResult out;
  out.q = q;
  out.median_q = median(f, q);
  SampledFunction f1 = f;
  for (double& x : f1.v) x -= out.median_q;
  out.tau = rearrangement(f1, q).value_at_frac(q.volume(), int64_t{1} << (n + 2));
  out.omega_q = oscillation(f, q, lambda);
  DYAD_ASSERT(out.tau <= 2.0 * out.omega_q + 1e-12 * (1.0 + out.tau),
              "one_step: tau exceeds 2*omega");

  auto child_median_exceeds = [&](const Cube& p) {
    if (p.level == f.res.depth) return false;
    for (const Cube& c : children(p))
      if (std::fabs(median(f1, c)) > out.tau) return true;
    return false;
  };
  auto scan = [&](auto&& self, const Cube& p) -> void {
    if (child_median_exceeds(p)) {
      out.selected.push_back(p);
      return;
    }
    if (p.level == f.res.depth) return;
    for (const Cube& c : children(p)) self(self, c);
  };
  scan(scan, q);

  int64_t q_cells = q.volume() / (n == 2 ? 9 : 3);
  for (const Cube& sel : out.selected) {
    double alpha = median(f1, sel);
    out.coeffs.push_back(alpha);
    DYAD_ASSERT(!(sel == q), "one_step: Q selected itself");
    DYAD_ASSERT(std::fabs(alpha) <= out.tau, "one_step: |alpha_j| > tau");
    int64_t cells = sel.volume() / (n == 2 ? 9 : 3);
    out.selected_cells += cells;
    // counting step: at least |Q_j|/2^{n+1} of Q_j lies in {|f1| > tau}
    int64_t above = 0;
    for (double v : cell_values(f1, sel.box()))
      if (std::fabs(v) > out.tau) ++above;
    DYAD_ASSERT(above * (int64_t{1} << (n + 1)) >= cells,
                "one_step: counting bound failed");
  }
  DYAD_ASSERT(2 * out.selected_cells <= q_cells,
              "one_step: selected cubes exceed half of Q");

  // remainder bound outside the selected cubes
  std::vector<char> covered(static_cast<size_t>(q_cells), 0);
  auto local_index = [&](int64_t cx, int64_t cy) {
    int64_t w = q.side() / 3;
    int64_t lx = cx - q.box().lo[0] / 3;
    int64_t ly = n == 2 ? cy - q.box().lo[1] / 3 : 0;
    return static_cast<size_t>(lx + w * ly);
  };
  for (const Cube& sel : out.selected) {
    Box b = sel.box();
    for (int64_t cy = (n == 2 ? b.lo[1] / 3 : 0);
         cy < (n == 2 ? b.hi[1] / 3 : 1); ++cy)
      for (int64_t cx = b.lo[0] / 3; cx < b.hi[0] / 3; ++cx)
        covered[local_index(cx, cy)] = 1;
  }
  Box qb = q.box();
  for (int64_t cy = (n == 2 ? qb.lo[1] / 3 : 0); cy < (n == 2 ? qb.hi[1] / 3 : 1);
       ++cy)
    for (int64_t cx = qb.lo[0] / 3; cx < qb.hi[0] / 3; ++cx)
      if (!covered[local_index(cx, cy)])
        DYAD_ASSERT(std::fabs(f1.at(cx, n == 2 ? cy : 0)) <= out.tau,
                    "one_step: remainder exceeds tau off the selected cubes");
  return out;
}

struct Decomposition {
  Cube q0;
  double m0 = 0.0;     // m_f(Q0)
  double lambda = 0.0; // 2^{-(n+2)}
  SparseFamily family; // selected cubes, generation k = k-th iteration
  std::vector<std::vector<double>> oscillations;  // w_lambda(f;Q_j^k)
  struct StepRecord {
    Cube q;
    double tau;
    double omega;
    size_t n_selected;
  };
  std::vector<StepRecord> steps;
};

inline Decomposition decompose(const SampledFunction& f, const Cube& q0) {
  Decomposition d;
  d.q0 = q0;
  d.lambda = oscillation_lambda(f.res.dim);
  d.m0 = median(f, q0);
  d.family.grid = q0.grid;
  // q0 itself is not part of the family; generations start with the cubes
  // selected inside it
  std::vector<Cube> frontier{q0};
  while (!frontier.empty()) {
    std::vector<Cube> next;
    for (const Cube& p : frontier) {
      OneStepResult step = one_step(f, p, d.lambda);
      d.steps.push_back({p, step.tau, step.omega_q, step.selected.size()});
      next.insert(next.end(), step.selected.begin(), step.selected.end());
    }
    if (next.empty()) break;
    d.family.generations.push_back(next);
    std::vector<double> osc;
    osc.reserve(next.size());
    for (const Cube& c : next) osc.push_back(oscillation(f, c, d.lambda));
    d.oscillations.push_back(std::move(osc));
    frontier = next;
  }
  return d;
}

struct DecompositionCheck {
  bool pass = true;
  double min_slack = std::numeric_limits<double>::infinity();
  std::optional<std::pair<int64_t, int64_t>> violating_cell;
};

/// Evaluates |f - m0| <= 4 M^{#,d} f + 2 sum w chi cellwise on Q0. At finite
/// resolution "a.e." has no exceptional set: every cell must satisfy it.
inline DecompositionCheck verify_decomposition(const SampledFunction& f,
                                               const Decomposition& d) {
  SampledFunction msharp = local_sharp_maximal(f, d.q0, d.lambda);
  SampledFunction osc_sum(f.res, 0.0);
  for (size_t k = 0; k < d.family.generations.size(); ++k)
    for (size_t j = 0; j < d.family.generations[k].size(); ++j) {
      const Cube& c = d.family.generations[k][j];
      double w = d.oscillations[k][j];
      Box b = c.box();
      for (int64_t cy = (f.res.dim == 2 ? b.lo[1] / 3 : 0);
           cy < (f.res.dim == 2 ? b.hi[1] / 3 : 1); ++cy)
        for (int64_t cx = b.lo[0] / 3; cx < b.hi[0] / 3; ++cx)
          osc_sum.at(cx, f.res.dim == 2 ? cy : 0) += w;
    }
  DecompositionCheck rep;
  Box qb = d.q0.box();
  for (int64_t cy = (f.res.dim == 2 ? qb.lo[1] / 3 : 0);
       cy < (f.res.dim == 2 ? qb.hi[1] / 3 : 1); ++cy)
    for (int64_t cx = qb.lo[0] / 3; cx < qb.hi[0] / 3; ++cx) {
      int64_t iy = f.res.dim == 2 ? cy : 0;
      double lhs = std::fabs(f.at(cx, iy) - d.m0);
      double rhs = 4.0 * msharp.at(cx, iy) + 2.0 * osc_sum.at(cx, iy);
      double slack = rhs - lhs;
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        if (slack < 0.0 && !rep.violating_cell) rep.violating_cell = {{cx, iy}};
      }
      if (slack < 0.0) rep.pass = false;
    }
  return rep;
}

}  // namespace dyad
