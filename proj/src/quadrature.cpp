#include "finalg/quadrature.hpp"

#include <atomic>
#include <cmath>

#include "finalg/sampling.hpp"
#include "finalg/tape.hpp"

namespace finalg {

namespace {
constexpr long long kChunk = 4096;
constexpr long long kBudgetSentinel = (1LL << 62);
}  // namespace

IntegrationDomain IntegrationDomain::box(int n, int m, double lo, double hi,
                                         int grid) {
  IntegrationDomain d;
  d.n = n;
  d.m = m;
  d.bounds.assign(2 * (n + m), {lo, hi});
  d.grid = grid;
  return d;
}

long long IntegrationDomain::total_points() const {
  long long total = 1;
  for (int a = 0; a < axes(); a++) {
    if (total > kBudgetSentinel / grid) return kBudgetSentinel;
    total *= grid;
  }
  return total;
}

void IntegrationDomain::check() const {
  if (n < 1 || m < 1) throw QuadratureError("dimensions must be positive");
  if (static_cast<int>(bounds.size()) != axes())
    throw QuadratureError("expected one bound pair per real axis");
  for (const auto& [lo, hi] : bounds) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw QuadratureError("bounds must be finite");
    if (!(lo < hi)) throw QuadratureError("lower bound must be below upper");
  }
  if (grid < 8) throw QuadratureError("grid must have at least 8 points per axis");
  if (budget < 1) throw QuadratureError("budget must be positive");
  if (total_points() > budget)
    throw QuadratureError("domain exceeds the grid-point budget");
}

namespace {

cplx integrate_impl(const Expr& f, const Expr& weight,
                    const IntegrationDomain& dom, bool parallel) {
  if (!f || !weight) throw QuadratureError("null integrand");
  dom.check();
  if (max_base_index(f) > dom.n || max_fiber_index(f) > dom.m ||
      max_base_index(weight) > dom.n || max_fiber_index(weight) > dom.m)
    throw QuadratureError("integrand uses variables outside the domain");

  CompiledExpr tape(ex_mul(f, weight));
  const int axes = dom.axes();
  const long long total = dom.total_points();
  const long long chunks = (total + kChunk - 1) / kChunk;

  std::vector<double> lo(axes), step(axes);
  double cell = 1.0;
  for (int a = 0; a < axes; a++) {
    lo[a] = dom.bounds[a].first;
    step[a] = (dom.bounds[a].second - dom.bounds[a].first) / dom.grid;
    cell *= step[a];
  }

  std::vector<cplx> chunk_sums(chunks);
  std::atomic<bool> bad{false};

  auto run_chunk = [&](long long c) {
    if (bad.load(std::memory_order_relaxed)) return;
    std::vector<cplx> scratch;
    std::vector<cplx> z(dom.n), u(dom.m);
    long long begin = c * kChunk;
    long long end = std::min(begin + kChunk, total);
    cplx acc(0.0, 0.0);
    for (long long idx = begin; idx < end; idx++) {
      // Mixed-radix decode, last axis fastest.
      long long rem = idx;
      for (int a = axes - 1; a >= 0; a--) {
        int k = static_cast<int>(rem % dom.grid);
        rem /= dom.grid;
        double x = lo[a] + (k + 0.5) * step[a];
        if (a < dom.n)
          z[a] = cplx(x, z[a].imag());
        else if (a < 2 * dom.n)
          z[a - dom.n] = cplx(z[a - dom.n].real(), x);
        else if (a < 2 * dom.n + dom.m)
          u[a - 2 * dom.n] = cplx(x, u[a - 2 * dom.n].imag());
        else
          u[a - 2 * dom.n - dom.m] = cplx(u[a - 2 * dom.n - dom.m].real(), x);
      }
      acc += tape.eval(z.data(), u.data(), scratch);
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
      bad.store(true, std::memory_order_relaxed);
    chunk_sums[c] = acc;
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < chunks; c++) run_chunk(c);
  } else {
    for (long long c = 0; c < chunks; c++) run_chunk(c);
  }
  if (bad.load()) throw EvalError("non-finite value encountered during quadrature");

  // Pairwise tree reduction over the chunk sums, independent of thread count.
  std::size_t len = chunk_sums.size();
  while (len > 1) {
    std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; i++)
      chunk_sums[i] = chunk_sums[2 * i] + chunk_sums[2 * i + 1];
    if (len % 2) {
      chunk_sums[half] = chunk_sums[len - 1];
      len = half + 1;
    } else {
      len = half;
    }
  }
  return chunk_sums[0] * cell;
}

}  // namespace

cplx integrate(const Expr& f, const Expr& weight, const IntegrationDomain& dom) {
  return integrate_impl(f, weight, dom, true);
}

cplx integrate_serial(const Expr& f, const Expr& weight,
                      const IntegrationDomain& dom) {
  return integrate_impl(f, weight, dom, false);
}

namespace {

// Boundary-vs-interior magnitude probe of Σ_a |Z^a| · |weight|.  Decaying
// sections have negligible boundary magnitude relative to the interior.
bool support_plausible(const std::vector<CompiledExpr>& ztapes,
                       const CompiledExpr& wtape, const IntegrationDomain& dom) {
  Rng rng(0x5eed);
  std::vector<cplx> scratch;
  std::vector<cplx> z(dom.n), u(dom.m);
  auto assign_axis = [&](int a, double x) {
    if (a < dom.n)
      z[a] = cplx(x, z[a].imag());
    else if (a < 2 * dom.n)
      z[a - dom.n] = cplx(z[a - dom.n].real(), x);
    else if (a < 2 * dom.n + dom.m)
      u[a - 2 * dom.n] = cplx(x, u[a - 2 * dom.n].imag());
    else
      u[a - 2 * dom.n - dom.m] = cplx(u[a - 2 * dom.n - dom.m].real(), x);
  };
  auto magnitude = [&]() {
    double s = 0.0;
    for (const CompiledExpr& t : ztapes)
      s += std::abs(t.eval(z.data(), u.data(), scratch));
    return s * std::abs(wtape.eval(z.data(), u.data(), scratch));
  };

  double interior_max = 0.0, boundary_max = 0.0;
  for (int probe = 0; probe < 64; probe++) {
    for (int a = 0; a < dom.axes(); a++)
      assign_axis(a, rng.uniform(dom.bounds[a].first, dom.bounds[a].second));
    interior_max = std::max(interior_max, magnitude());
  }
  for (int probe = 0; probe < 64; probe++) {
    for (int a = 0; a < dom.axes(); a++)
      assign_axis(a, rng.uniform(dom.bounds[a].first, dom.bounds[a].second));
    int face = static_cast<int>(rng.raw() % dom.axes());
    bool high = rng.raw() % 2;
    assign_axis(face, high ? dom.bounds[face].second : dom.bounds[face].first);
    boundary_max = std::max(boundary_max, magnitude());
  }
  return boundary_max <= 1e-6 * (1.0 + interior_max);
}

}  // namespace

ValidationReport check_integral_identity(const SectionField& Z,
                                         const AlgebroidSpec& spec,
                                         const FinslerData& fd,
                                         const ConnectionData& cd,
                                         const IntegrationDomain& dom,
                                         double tol) {
  dom.check();
  int m = spec.m;
  if (static_cast<int>(Z.Zh.size()) != m)
    throw QuadratureError("section must have m horizontal components");
  if (dom.n != spec.n || dom.m != m)
    throw QuadratureError("domain dimensions must match the algebroid");

  Expr weight = volume_density(fd).density;

  ValidationReport report;
  auto add_skipped = [&](const char* name, const char* why) {
    report.entries.push_back(CheckEntry::skipped("", name, why));
  };

  {
    std::vector<CompiledExpr> ztapes;
    for (const Expr& e : Z.Zh) ztapes.emplace_back(e);
    CompiledExpr wtape(weight);
    if (!support_plausible(ztapes, wtape, dom)) {
      add_skipped("integral-vanishing", "skipped: support check failed");
      add_skipped("integral-vanishing-conjugate", "skipped: support check failed");
      add_skipped("integral-vanishing-kahler", "skipped: support check failed");
      add_skipped("integral-vanishing-kahler-conjugate",
                  "skipped: support check failed");
      return report;
    }
  }

  // Unbarred route: Σ_a [δ_a Z^a + Σ_e Z^e L^a_{ea}] − Σ_a Z^a L_a.
  std::vector<Expr> trace_terms, plain_terms;
  for (int a = 1; a <= m; a++) {
    trace_terms.push_back(delta_deriv(Z.Zh[a - 1], a, false, cd));
    plain_terms.push_back(delta_deriv(Z.Zh[a - 1], a, false, cd));
    for (int e = 1; e <= m; e++) {
      Expr t = ex_mul(Z.Zh[e - 1], cd.L[a - 1][e - 1][a - 1]);
      trace_terms.push_back(t);
      plain_terms.push_back(t);
    }
  }
  for (int a = 0; a < m; a++)
    trace_terms.push_back(ex_neg(ex_mul(Z.Zh[a], cd.trace_L[a])));
  Expr integrand = ex_sum(std::move(trace_terms));
  Expr integrand_plain = ex_sum(std::move(plain_terms));

  // Conjugate route, built independently from barred derivatives.
  std::vector<Expr> ctrace_terms, cplain_terms;
  for (int a = 1; a <= m; a++) {
    ctrace_terms.push_back(delta_deriv(ex_conj(Z.Zh[a - 1]), a, true, cd));
    cplain_terms.push_back(delta_deriv(ex_conj(Z.Zh[a - 1]), a, true, cd));
    for (int e = 1; e <= m; e++) {
      Expr t = ex_mul(ex_conj(Z.Zh[e - 1]), ex_conj(cd.L[a - 1][e - 1][a - 1]));
      ctrace_terms.push_back(t);
      cplain_terms.push_back(t);
    }
  }
  for (int a = 0; a < m; a++)
    ctrace_terms.push_back(ex_neg(ex_mul(ex_conj(Z.Zh[a]), ex_conj(cd.trace_L[a]))));
  Expr cintegrand = ex_sum(std::move(ctrace_terms));
  Expr cintegrand_plain = ex_sum(std::move(cplain_terms));

  auto add_entry = [&](const char* name, const Expr& e) {
    CheckEntry entry;
    entry.name = name;
    entry.tol = tol;
    entry.samples = dom.grid;
    entry.residual = std::abs(integrate(e, weight, dom));
    entry.pass = entry.residual <= tol;
    report.entries.push_back(entry);
  };

  add_entry("integral-vanishing", integrand);
  add_entry("integral-vanishing-conjugate", cintegrand);
  if (is_kahler(cd, 20, 42, 1e-9)) {
    add_entry("integral-vanishing-kahler", integrand_plain);
    add_entry("integral-vanishing-kahler-conjugate", cintegrand_plain);
  } else {
    add_skipped("integral-vanishing-kahler", "skipped: non-kahler");
    add_skipped("integral-vanishing-kahler-conjugate", "skipped: non-kahler");
  }
  return report;
}

}  // namespace finalg
