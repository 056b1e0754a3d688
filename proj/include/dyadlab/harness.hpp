// Experiment driver plumbing: configs, result rows, deterministic CSV/JSON
// output, log-log slope fits and the coordinate-ascent norm maximizer.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadlab/generate.hpp"
#include "dyadlab/weights.hpp"

namespace dyad {

struct ExperimentConfig {
  std::string name;
  int n = 1;
  int L = 8;
  int seeds = 50;  // number of trials
  uint64_t base_seed = 1;
  std::string out_dir;  // empty: no files written
  Scope scope = Scope::Dyadic;
  std::map<std::string, std::string> params;

  Resolution resolution() const { return Resolution(n, L); }

  std::string param(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  double param_num(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : std::stod(it->second);
  }
};

// one row per (trial, quantity); the summary must be recomputable from rows
struct ResultRow {
  std::string experiment;
  uint64_t seed = 0;
  int n = 1;
  int L = 8;
  std::string param_json;  // small JSON object with sweep parameters
  std::string quantity;
  double value = 0.0;
};

struct ExperimentResult {
  std::string name;
  std::vector<ResultRow> rows;
  nlohmann::json summary = nlohmann::json::object();
  bool pass = true;
  std::vector<std::string> notes;  // one line per criterion, for the console

  void add_row(uint64_t seed, int n, int L, std::string param_json,
               std::string quantity, double value) {
    rows.push_back({name, seed, n, L, std::move(param_json),
                    std::move(quantity), value});
  }
  void criterion(bool ok, const std::string& text) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "[pass] " : "[FAIL] ") + text);
  }
};

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_rows_csv(const std::string& path,
                           const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  DYAD_REQUIRE(out.good(), "cannot open " + path);
  out << "experiment,seed,n,L,param_json,quantity,value\n";
  for (const auto& r : rows)
    out << r.experiment << ',' << r.seed << ',' << r.n << ',' << r.L << ','
        << csv_quote(r.param_json) << ',' << r.quantity << ','
        << format_value(r.value) << '\n';
}

inline void write_outputs(const ExperimentConfig& cfg,
                          const ExperimentResult& result) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  write_rows_csv(cfg.out_dir + "/rows.csv", result.rows);
  nlohmann::json summary = result.summary;
  summary["experiment"] = result.name;
  summary["pass"] = result.pass;
  summary["notes"] = result.notes;
  std::ofstream out(cfg.out_dir + "/summary.json", std::ios::binary);
  out << summary.dump(2) << '\n';
}

/// least-squares slope of y against x
inline double regression_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
  DYAD_REQUIRE(x.size() == y.size() && x.size() >= 2,
               "regression_slope: need 2+ points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return 0.0;
  return regression_slope(lx, ly);
}

/// Coordinate-ascent maximizer for norm ratios with no matrix form. Returns
/// a lower bound on the supremum; random restarts plus single-cell scalings.
template <typename RatioFn>
double ascent_maximize(Resolution res, RatioFn&& ratio, uint64_t seed,
                       int budget = 1000, int restarts = 4) {
  auto rng = seeded_rng(seed ^ 0xa0761d6478bd642full);
  double best = 0.0;
  int per_restart = budget / std::max(restarts, 1);
  for (int r = 0; r < restarts; ++r) {
    SampledFunction f =
        random_function(res, seed * 131 + static_cast<uint64_t>(r), 4, 1, true,
                        /*nonneg=*/true);
    for (double& x : f.v) x += 1e-6;  // keep norms positive
    double cur = ratio(f);
    best = std::max(best, cur);
    for (int it = 0; it < per_restart; ++it) {
      size_t cell = static_cast<size_t>(rng() % f.v.size());
      static constexpr double kFactors[4] = {0.25, 0.5, 2.0, 4.0};
      double factor = kFactors[rng() % 4];
      double old = f.v[cell];
      f.v[cell] = old * factor;
      double cand = ratio(f);
      if (cand > cur) {
        cur = cand;
        best = std::max(best, cur);
      } else {
        f.v[cell] = old;
      }
    }
  }
  return best;
}

}  // namespace dyad
