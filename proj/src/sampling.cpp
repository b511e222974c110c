#include "finalg/sampling.hpp"

#include <cmath>

namespace finalg {

cplx Rng::annulus(double rlo, double rhi) {
  double r = std::sqrt(uniform(rlo * rlo, rhi * rhi));
  double th = uniform(0.0, 2.0 * M_PI);
  return cplx(r * std::cos(th), r * std::sin(th));
}

EvalPoint random_point(Rng& rng, int n, int m) {
  EvalPoint p;
  p.z.reserve(n);
  p.u.reserve(m);
  for (int k = 0; k < n; k++) p.z.push_back(rng.annulus());
  for (int a = 0; a < m; a++) p.u.push_back(rng.annulus());
  return p;
}

std::vector<EvalPoint> sample_points(int n, int m, int samples, uint64_t seed) {
  Rng rng(seed);
  std::vector<EvalPoint> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; i++) pts.push_back(random_point(rng, n, m));
  return pts;
}

}  // namespace finalg
