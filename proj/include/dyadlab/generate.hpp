// Input mini-language and the seeded random function generator shared by the
// experiment driver and the test suites.
//
//   const:c=1
//   chi:a=0,b=0.5            indicator of [a,b) per axis, lattice-rounded
//   power:a=0.7,center=0.5   max(|x-center|_inf, 2^-L)^a
//   cos:freq=2,amp=0.3       amp*cos(2*pi*freq*(x_1+...+x_n))
//   random:seed=7,bumps=4,spikes=1,smooth=1,nonneg=0
#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "dyadlab/random.hpp"
#include "dyadlab/sampled.hpp"

namespace dyad {

struct InputSpec {
  std::string kind;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

inline InputSpec parse_input_spec(const std::string& text) {
  InputSpec spec;
  auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  DYAD_REQUIRE(!spec.kind.empty(), "input spec: empty kind");
  if (colon == std::string::npos) return spec;
  std::string rest = text.substr(colon + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    std::string item = rest.substr(pos, comma - pos);
    auto eq = item.find('=');
    DYAD_REQUIRE(eq != std::string::npos, "input spec: expected key=value");
    spec.params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    pos = comma + 1;
  }
  return spec;
}

/// Sums of up to 5 scaled indicator bumps, an optional low-frequency cosine,
/// and optional one-cell spikes. Signed unless nonneg is set.
inline SampledFunction random_function(Resolution res, uint64_t seed,
                                       int bumps = 4, int spikes = 1,
                                       bool smooth = true,
                                       bool nonneg = false) {
  auto rng = seeded_rng(seed);
  SampledFunction f(res, 0.0);
  int64_t cells = res.cells_per_axis();
  int64_t rows = res.dim == 2 ? cells : 1;
  for (int b = 0; b < bumps; ++b) {
    int64_t ax = uniform_int(rng, 0, cells - 1);
    int64_t bx = uniform_int(rng, ax + 1, cells);
    int64_t ay = 0, by = 1;
    if (res.dim == 2) {
      ay = uniform_int(rng, 0, cells - 1);
      by = uniform_int(rng, ay + 1, cells);
    }
    double amp = uniform(rng, 0.2, 2.0);
    if (!nonneg && uniform01(rng) < 0.5) amp = -amp;
    for (int64_t y = ay; y < by; ++y)
      for (int64_t x = ax; x < bx; ++x) f.at(x, res.dim == 2 ? y : 0) += amp;
  }
  if (smooth) {
    double freq = static_cast<double>(uniform_int(rng, 1, 4));
    double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    double amp = uniform(rng, 0.2, 1.0);
    for (int64_t y = 0; y < rows; ++y)
      for (int64_t x = 0; x < cells; ++x) {
        double t = (static_cast<double>(x) + 0.5) / static_cast<double>(cells);
        if (res.dim == 2)
          t += (static_cast<double>(y) + 0.5) / static_cast<double>(cells);
        double c = std::cos(2.0 * std::numbers::pi * freq * t + phase);
        f.at(x, res.dim == 2 ? y : 0) += nonneg ? amp * (1.0 + c) / 2.0 : amp * c;
      }
  }
  for (int s = 0; s < spikes; ++s) {
    int64_t x = uniform_int(rng, 0, cells - 1);
    int64_t y = res.dim == 2 ? uniform_int(rng, 0, cells - 1) : 0;
    double amp = uniform(rng, 5.0, 50.0);
    if (!nonneg && uniform01(rng) < 0.5) amp = -amp;
    f.at(x, y) += amp;
  }
  if (nonneg)
    for (double& x : f.v) x = std::fabs(x);
  return f;
}

inline SampledFunction make_function(const InputSpec& spec, Resolution res) {
  int64_t cells = res.cells_per_axis();
  int64_t rows = res.dim == 2 ? cells : 1;
  SampledFunction f(res, 0.0);
  if (spec.kind == "const") {
    double c = spec.get("c", 1.0);
    for (double& x : f.v) x = c;
  } else if (spec.kind == "chi") {
    double a = spec.get("a", 0.0), b = spec.get("b", 0.5);
    for (int64_t y = 0; y < rows; ++y)
      for (int64_t x = 0; x < cells; ++x) {
        bool in = true;
        for (int axis = 0; axis < res.dim; ++axis) {
          double t = (static_cast<double>(axis == 0 ? x : y) + 0.5) /
                     static_cast<double>(cells);
          in = in && t >= a && t < b;
        }
        if (in) f.at(x, res.dim == 2 ? y : 0) = 1.0;
      }
  } else if (spec.kind == "power") {
    double a = spec.get("a", 0.7), center = spec.get("center", 0.5);
    double floor_dist = 1.0 / static_cast<double>(cells);
    for (int64_t y = 0; y < rows; ++y)
      for (int64_t x = 0; x < cells; ++x) {
        double dist = 0.0;
        for (int axis = 0; axis < res.dim; ++axis) {
          double t = (static_cast<double>(axis == 0 ? x : y) + 0.5) /
                     static_cast<double>(cells);
          dist = std::max(dist, std::fabs(t - center));
        }
        f.at(x, res.dim == 2 ? y : 0) = std::pow(std::max(dist, floor_dist), a);
      }
  } else if (spec.kind == "cos") {
    double freq = spec.get("freq", 2.0), amp = spec.get("amp", 0.3);
    for (int64_t y = 0; y < rows; ++y)
      for (int64_t x = 0; x < cells; ++x) {
        double t = (static_cast<double>(x) + 0.5) / static_cast<double>(cells);
        if (res.dim == 2)
          t += (static_cast<double>(y) + 0.5) / static_cast<double>(cells);
        f.at(x, res.dim == 2 ? y : 0) =
            amp * std::cos(2.0 * std::numbers::pi * freq * t);
      }
  } else if (spec.kind == "random") {
    f = random_function(res, static_cast<uint64_t>(spec.get("seed", 1.0)),
                        static_cast<int>(spec.get("bumps", 4.0)),
                        static_cast<int>(spec.get("spikes", 1.0)),
                        spec.get("smooth", 1.0) != 0.0,
                        spec.get("nonneg", 0.0) != 0.0);
  } else {
    DYAD_REQUIRE(false, "input spec: unknown kind '" + spec.kind + "'");
  }
  return f;
}

inline SampledFunction make_function(const std::string& text, Resolution res) {
  return make_function(parse_input_spec(text), res);
}

/// Weight from a spec: positive kinds pass through, signed kinds are mapped
/// through exp() to keep the weight strictly positive.
inline Weight make_weight(const std::string& text, Resolution res) {
  InputSpec spec = parse_input_spec(text);
  SampledFunction f = make_function(spec, res);
  bool positive = spec.kind == "const" || spec.kind == "power";
  if (!positive) {
    double scale = spec.kind == "random" ? 0.5 : 1.0;
    for (double& x : f.v) x = std::exp(scale * x);
  }
  return Weight(std::move(f));
}

}  // namespace dyad
