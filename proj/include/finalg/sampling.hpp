#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "finalg/expr.hpp"

// Seeded sampling utilities. Coordinates are drawn area-uniformly from the
// annulus 0.3 <= |w| <= 1.5, which keeps points away from both the origin
// (metric/log degeneracies) and large-|z| blowup of exp-type data.

namespace finalg {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  uint64_t raw() { return gen_(); }
  cplx annulus(double rlo = 0.3, double rhi = 1.5);

 private:
  std::mt19937_64 gen_;
};

EvalPoint random_point(Rng& rng, int n, int m);
std::vector<EvalPoint> sample_points(int n, int m, int samples, uint64_t seed);

}  // namespace finalg
