#include "finalg/forms.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

namespace finalg {

namespace {

// Sorts v ascending; returns the permutation sign, or 0 if an index repeats.
int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j) {
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    if (v[j] == v[j + 1]) return 0;
  }
  return sign;
}

void check_tuple(const std::vector<int>& t, int m, std::size_t want,
                 const char* what) {
  if (t.size() != want) {
    throw FormError(std::string(what) + ": wrong multi-index length");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 1 || t[i] > m) {
      throw FormError(std::string(what) + ": index out of range");
    }
    if (i + 1 < t.size() && t[i] >= t[i + 1]) {
      throw FormError(std::string(what) +
                      ": multi-index must be strictly increasing");
    }
  }
}

std::vector<int> erase_at(const std::vector<int>& v, std::size_t i) {
  std::vector<int> out = v;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

std::vector<int> prepend(int x, const std::vector<int>& v) {
  std::vector<int> out;
  out.reserve(v.size() + 1);
  out.push_back(x);
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

// Every length-k tuple over 1..m, repeats allowed.
std::vector<std::vector<int>> all_tuples(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(k), 1);
  while (true) {
    out.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == m) {
      cur[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  return out;
}

void require_same_shape(const HorizontalForm& a, const HorizontalForm& b) {
  if (a.m != b.m || a.p != b.p || a.q != b.q) {
    throw FormError("form shapes do not match");
  }
}

void require_valid_degree(const HorizontalForm& a) {
  if (a.m < 1) throw FormError("form rank must be positive");
  if (a.p < 0 || a.q < 0 || a.p > a.m || a.q > a.m) {
    throw FormError("form degree out of range");
  }
}

void require_frame_match(const HorizontalForm& a, const ConnectionData& cd) {
  if (a.m != cd.spec.m) throw FormError("form rank does not match the frame");
}

void require_metric_match(const HorizontalForm& a, const FinslerData& fd) {
  if (a.m != static_cast<int>(fd.h.size())) {
    throw FormError("form rank does not match the metric");
  }
}

void set_if_nonzero(HorizontalForm& out, const std::vector<int>& A,
                    const std::vector<int>& B, std::vector<Expr>&& terms) {
  if (terms.empty()) return;
  Expr v = ex_sum(std::move(terms));
  if (!is_zero(v)) out.set(A, B, v);
}

}  // namespace

HorizontalForm HorizontalForm::scalar(int m, const Expr& f) {
  if (!f) throw FormError("null coefficient");
  HorizontalForm out;
  out.m = m;
  require_valid_degree(out);
  out.coeffs[{{}, {}}] = f;
  return out;
}

HorizontalForm HorizontalForm::zero(int m, int p, int q) {
  HorizontalForm out;
  out.m = m;
  out.p = p;
  out.q = q;
  require_valid_degree(out);
  return out;
}

Expr HorizontalForm::get(const std::vector<int>& A,
                         const std::vector<int>& B) const {
  if (static_cast<int>(A.size()) != p || static_cast<int>(B.size()) != q) {
    throw FormError("component access: wrong multi-index length");
  }
  for (int x : A) {
    if (x < 1 || x > m) throw FormError("component access: index out of range");
  }
  for (int x : B) {
    if (x < 1 || x > m) throw FormError("component access: index out of range");
  }
  std::vector<int> a = A, b = B;
  int sgn = sort_sign(a) * sort_sign(b);
  if (sgn == 0) return ex_const(0.0);
  auto it = coeffs.find({a, b});
  if (it == coeffs.end()) return ex_const(0.0);
  return sgn > 0 ? it->second : ex_neg(it->second);
}

void HorizontalForm::set(const std::vector<int>& A, const std::vector<int>& B,
                         const Expr& e) {
  if (!e) throw FormError("null coefficient");
  check_tuple(A, m, static_cast<std::size_t>(p), "set");
  check_tuple(B, m, static_cast<std::size_t>(q), "set");
  coeffs[{A, B}] = e;
}

void HorizontalForm::check() const {
  require_valid_degree(*this);
  for (const auto& [key, e] : coeffs) {
    if (!e) throw FormError("null coefficient");
    check_tuple(key.first, m, static_cast<std::size_t>(p), "stored key");
    check_tuple(key.second, m, static_cast<std::size_t>(q), "stored key");
  }
}

std::vector<std::vector<int>> increasing_tuples(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > m) return out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    out.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 &&
           cur[static_cast<std::size_t>(pos)] == m - (k - 1 - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) {
      cur[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return out;
}

HorizontalForm form_add(const HorizontalForm& a, const HorizontalForm& b) {
  require_same_shape(a, b);
  HorizontalForm out = a;
  for (const auto& [key, e] : b.coeffs) {
    auto it = out.coeffs.find(key);
    if (it == out.coeffs.end()) {
      out.coeffs[key] = e;
    } else {
      it->second = ex_add(it->second, e);
    }
  }
  return out;
}

HorizontalForm form_scale(const cplx& c, const HorizontalForm& a) {
  HorizontalForm out = a;
  for (auto& [key, e] : out.coeffs) {
    (void)key;
    e = ex_mul(ex_const(c), e);
  }
  return out;
}

HorizontalForm conj_form(const HorizontalForm& a) {
  require_valid_degree(a);
  HorizontalForm out;
  out.m = a.m;
  out.p = a.q;
  out.q = a.p;
  for (const auto& [key, e] : a.coeffs) {
    out.coeffs[{key.second, key.first}] = ex_conj(e);
  }
  return out;
}

HorizontalForm raise_all(const HorizontalForm& a, const FinslerData& fd) {
  require_valid_degree(a);
  require_metric_match(a, fd);
  HorizontalForm out = HorizontalForm::zero(a.m, a.p, a.q);
  const auto Ms = all_tuples(a.m, a.p);
  const auto Ns = all_tuples(a.m, a.q);
  for (const auto& A : increasing_tuples(a.m, a.p)) {
    for (const auto& B : increasing_tuples(a.m, a.q)) {
      std::vector<Expr> terms;
      for (const auto& M : Ms) {
        for (const auto& N : Ns) {
          Expr val = a.get(M, N);
          if (is_zero(val)) continue;
          Expr w = val;
          for (int i = 0; i < a.p; ++i) {
            w = ex_mul(fd.h_inv[A[static_cast<std::size_t>(i)] - 1]
                               [M[static_cast<std::size_t>(i)] - 1],
                       w);
          }
          for (int j = 0; j < a.q; ++j) {
            w = ex_mul(fd.h_inv[N[static_cast<std::size_t>(j)] - 1]
                               [B[static_cast<std::size_t>(j)] - 1],
                       w);
          }
          terms.push_back(w);
        }
      }
      set_if_nonzero(out, A, B, std::move(terms));
    }
  }
  return out;
}

Expr inner_product_pointwise(const HorizontalForm& psi,
                             const HorizontalForm& phi, const FinslerData& fd) {
  require_same_shape(psi, phi);
  require_metric_match(psi, fd);
  HorizontalForm raised = raise_all(phi, fd);
  std::vector<Expr> terms;
  for (const auto& A : increasing_tuples(psi.m, psi.p)) {
    for (const auto& B : increasing_tuples(psi.m, psi.q)) {
      Expr a = psi.get(A, B);
      Expr b = raised.get(A, B);
      if (is_zero(a) || is_zero(b)) continue;
      terms.push_back(ex_mul(a, ex_conj(b)));
    }
  }
  if (terms.empty()) return ex_const(0.0);
  return ex_sum(std::move(terms));
}

cplx global_inner_product(const HorizontalForm& psi, const HorizontalForm& phi,
                          const FinslerData& fd, const IntegrationDomain& dom) {
  Expr inner = inner_product_pointwise(psi, phi, fd);
  return integrate(inner, volume_density(fd).density, dom);
}

HorizontalForm del_h(const HorizontalForm& psi, const ConnectionData& cd) {
  require_valid_degree(psi);
  require_frame_match(psi, cd);
  if (psi.p + 1 > psi.m) throw FormError("degree overflow");
  HorizontalForm out = HorizontalForm::zero(psi.m, psi.p + 1, psi.q);
  for (const auto& A : increasing_tuples(psi.m, psi.p + 1)) {
    for (const auto& B : increasing_tuples(psi.m, psi.q)) {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < A.size(); ++i) {
        Expr inner = psi.get(erase_at(A, i), B);
        if (is_zero(inner)) continue;
        Expr d = delta_deriv(inner, A[i], false, cd);
        terms.push_back(i % 2 == 0 ? d : ex_neg(d));
      }
      set_if_nonzero(out, A, B, std::move(terms));
    }
  }
  return out;
}

HorizontalForm delbar_h(const HorizontalForm& psi, const ConnectionData& cd) {
  require_valid_degree(psi);
  require_frame_match(psi, cd);
  if (psi.q + 1 > psi.m) throw FormError("degree overflow");
  HorizontalForm out = HorizontalForm::zero(psi.m, psi.p, psi.q + 1);
  const bool flip = psi.p % 2 != 0;
  for (const auto& A : increasing_tuples(psi.m, psi.p)) {
    for (const auto& B : increasing_tuples(psi.m, psi.q + 1)) {
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < B.size(); ++j) {
        Expr inner = psi.get(A, erase_at(B, j));
        if (is_zero(inner)) continue;
        Expr d = delta_deriv(inner, B[j], true, cd);
        bool neg = (j % 2 != 0) != flip;
        terms.push_back(neg ? ex_neg(d) : d);
      }
      set_if_nonzero(out, A, B, std::move(terms));
    }
  }
  return out;
}

HorizontalForm delbar_adjoint(const HorizontalForm& phi, const FinslerData& fd,
                              const ConnectionData& cd) {
  require_valid_degree(phi);
  require_frame_match(phi, cd);
  require_metric_match(phi, fd);
  if (phi.q == 0) throw FormError("no barred index to contract");
  HorizontalForm out = HorizontalForm::zero(phi.m, phi.p, phi.q - 1);
  const bool neg = phi.p % 2 == 0;  // overall sign is -1 for even p
  for (const auto& A : increasing_tuples(phi.m, phi.p)) {
    for (const auto& Bpp : increasing_tuples(phi.m, phi.q - 1)) {
      std::vector<Expr> terms;
      for (int eps = 1; eps <= phi.m; ++eps) {
        Expr inner = phi.get(A, prepend(eps, Bpp));
        if (is_zero(inner)) continue;
        for (int gam = 1; gam <= phi.m; ++gam) {
          Expr t = ex_mul(fd.h_inv[eps - 1][gam - 1],
                          delta_deriv(inner, gam, false, cd));
          terms.push_back(neg ? ex_neg(t) : t);
        }
      }
      set_if_nonzero(out, A, Bpp, std::move(terms));
    }
  }
  return out;
}

HorizontalForm delbar_adjoint_via_raising(const HorizontalForm& phi,
                                          const FinslerData& fd,
                                          const ConnectionData& cd) {
  require_valid_degree(phi);
  require_frame_match(phi, cd);
  require_metric_match(phi, fd);
  if (phi.q == 0) throw FormError("no barred index to contract");
  HorizontalForm raised = raise_all(phi, fd);
  Expr log_det = ex_log(fd.det_h);
  const bool neg = phi.p % 2 == 0;

  HorizontalForm theta = HorizontalForm::zero(phi.m, phi.p, phi.q - 1);
  for (const auto& A : increasing_tuples(phi.m, phi.p)) {
    for (const auto& Bpp : increasing_tuples(phi.m, phi.q - 1)) {
      std::vector<Expr> terms;
      for (int b1 = 1; b1 <= phi.m; ++b1) {
        Expr comp = raised.get(A, prepend(b1, Bpp));
        if (is_zero(comp)) continue;
        Expr d = delta_deriv(comp, b1, false, cd);
        Expr corr = ex_mul(ex_mul(ex_real(2.0),
                                  delta_deriv(log_det, b1, false, cd)),
                           comp);
        Expr t = ex_add(d, corr);
        terms.push_back(neg ? ex_neg(t) : t);
      }
      set_if_nonzero(theta, A, Bpp, std::move(terms));
    }
  }

  // Lower every index of theta back through the metric.
  HorizontalForm out = HorizontalForm::zero(phi.m, phi.p, phi.q - 1);
  const auto As = all_tuples(phi.m, phi.p);
  const auto Bs = all_tuples(phi.m, phi.q - 1);
  for (const auto& S : increasing_tuples(phi.m, phi.p)) {
    for (const auto& T : increasing_tuples(phi.m, phi.q - 1)) {
      std::vector<Expr> terms;
      for (const auto& A : As) {
        for (const auto& Bt : Bs) {
          Expr val = theta.get(A, Bt);
          if (is_zero(val)) continue;
          Expr w = val;
          for (std::size_t i = 0; i < S.size(); ++i) {
            w = ex_mul(fd.h[S[i] - 1][A[i] - 1], w);
          }
          for (std::size_t j = 0; j < T.size(); ++j) {
            w = ex_mul(fd.h[Bt[j] - 1][T[j] - 1], w);
          }
          terms.push_back(w);
        }
      }
      set_if_nonzero(out, S, T, std::move(terms));
    }
  }
  return out;
}

HorizontalForm del_adjoint(const HorizontalForm& phi, const FinslerData& fd,
                           const ConnectionData& cd) {
  require_valid_degree(phi);
  if (phi.p == 0) throw FormError("no unbarred index to contract");
  return conj_form(delbar_adjoint(conj_form(phi), fd, cd));
}

namespace {

HorizontalForm box_expanded(const HorizontalForm& phi, const FinslerData& fd,
                            const ConnectionData& cd,
                            bool with_inverse_metric_derivative) {
  require_valid_degree(phi);
  require_frame_match(phi, cd);
  require_metric_match(phi, fd);
  const int m = phi.m;
  HorizontalForm out = HorizontalForm::zero(m, phi.p, phi.q);
  for (const auto& A : increasing_tuples(m, phi.p)) {
    for (const auto& B : increasing_tuples(m, phi.q)) {
      std::vector<Expr> terms;
      Expr base = phi.get(A, B);
      if (!is_zero(base)) {
        for (int eps = 1; eps <= m; ++eps) {
          for (int gam = 1; gam <= m; ++gam) {
            Expr dd = delta_deriv(delta_deriv(base, eps, true, cd), gam,
                                  false, cd);
            terms.push_back(
                ex_neg(ex_mul(fd.h_inv[eps - 1][gam - 1], dd)));
          }
        }
      }
      for (std::size_t i = 0; i < B.size(); ++i) {
        const int bi = B[i];
        const bool pos = i % 2 == 0;  // (-1)^i over 0-based positions
        for (int eps = 1; eps <= m; ++eps) {
          Expr inner = phi.get(A, prepend(eps, erase_at(B, i)));
          if (is_zero(inner)) continue;
          for (int gam = 1; gam <= m; ++gam) {
            Expr comm =
                ex_sub(delta_deriv(delta_deriv(inner, bi, true, cd), gam,
                                   false, cd),
                       delta_deriv(delta_deriv(inner, gam, false, cd), bi,
                                   true, cd));
            Expr t2 = ex_mul(fd.h_inv[eps - 1][gam - 1], comm);
            terms.push_back(pos ? t2 : ex_neg(t2));
            if (with_inverse_metric_derivative) {
              Expr t3 =
                  ex_mul(delta_deriv(fd.h_inv[eps - 1][gam - 1], bi, true, cd),
                         delta_deriv(inner, gam, false, cd));
              terms.push_back(pos ? ex_neg(t3) : t3);
            }
          }
        }
      }
      set_if_nonzero(out, A, B, std::move(terms));
    }
  }
  return out;
}

}  // namespace

HorizontalForm box_h(const HorizontalForm& phi, const FinslerData& fd,
                     const ConnectionData& cd) {
  return box_expanded(phi, fd, cd, true);
}

HorizontalForm box_h_commutator_form(const HorizontalForm& phi,
                                     const FinslerData& fd,
                                     const ConnectionData& cd) {
  return box_expanded(phi, fd, cd, false);
}

HorizontalForm box_h_composition(const HorizontalForm& phi,
                                 const FinslerData& fd,
                                 const ConnectionData& cd) {
  require_valid_degree(phi);
  require_frame_match(phi, cd);
  require_metric_match(phi, fd);
  if (phi.q == 0) return delbar_adjoint(delbar_h(phi, cd), fd, cd);
  if (phi.q == phi.m) return delbar_h(delbar_adjoint(phi, fd, cd), cd);
  HorizontalForm a = delbar_adjoint(delbar_h(phi, cd), fd, cd);
  HorizontalForm b = delbar_h(delbar_adjoint(phi, fd, cd), cd);
  return form_add(a, b);
}

HorizontalForm box_h_kahler(const HorizontalForm& phi, const FinslerData& fd,
                            const ConnectionData& cd) {
  require_valid_degree(phi);
  require_frame_match(phi, cd);
  require_metric_match(phi, fd);
  const int m = phi.m;

  TensorField T = TensorField::zeros(m, phi.p, phi.q, 0, 0);
  const auto Ms = all_tuples(m, phi.p);
  const auto Ns = all_tuples(m, phi.q);
  for (const auto& M : Ms) {
    for (const auto& N : Ns) {
      std::vector<int> idx0;
      idx0.reserve(M.size() + N.size());
      for (int x : M) idx0.push_back(x - 1);
      for (int x : N) idx0.push_back(x - 1);
      T.set(idx0, phi.get(M, N));
    }
  }

  std::vector<TensorField> t_bar, t_un;
  t_bar.reserve(static_cast<std::size_t>(m));
  t_un.reserve(static_cast<std::size_t>(m));
  for (int d = 1; d <= m; ++d) {
    t_bar.push_back(cov_deriv_h(T, d, true, cd));
    t_un.push_back(cov_deriv_h(T, d, false, cd));
  }
  // mixed[g][e] = unbarred-g derivative of the barred-e derivative;
  // mixed_rev[g][e] applies them in the opposite order.
  std::vector<std::vector<TensorField>> mixed(static_cast<std::size_t>(m)),
      mixed_rev(static_cast<std::size_t>(m));
  for (int g = 0; g < m; ++g) {
    for (int e = 0; e < m; ++e) {
      mixed[static_cast<std::size_t>(g)].push_back(
          cov_deriv_h(t_bar[static_cast<std::size_t>(e)], g + 1, false, cd));
      mixed_rev[static_cast<std::size_t>(g)].push_back(
          cov_deriv_h(t_un[static_cast<std::size_t>(g)], e + 1, true, cd));
    }
  }

  HorizontalForm out = HorizontalForm::zero(m, phi.p, phi.q);
  for (const auto& A : increasing_tuples(m, phi.p)) {
    for (const auto& B : increasing_tuples(m, phi.q)) {
      std::vector<int> base_idx0;
      base_idx0.reserve(A.size() + B.size());
      for (int x : A) base_idx0.push_back(x - 1);
      for (int x : B) base_idx0.push_back(x - 1);
      std::vector<Expr> terms;
      for (int e = 0; e < m; ++e) {
        for (int g = 0; g < m; ++g) {
          const Expr& dd = mixed[static_cast<std::size_t>(g)]
                                [static_cast<std::size_t>(e)]
                                    .get(base_idx0);
          if (!is_zero(dd)) {
            terms.push_back(ex_neg(ex_mul(fd.h_inv[e][g], dd)));
          }
        }
      }
      for (std::size_t i = 0; i < B.size(); ++i) {
        const int b = B[i] - 1;
        for (int e = 0; e < m; ++e) {
          std::vector<int> full;
          full.reserve(base_idx0.size());
          for (int x : A) full.push_back(x - 1);
          full.push_back(e);
          for (std::size_t j = 0; j < B.size(); ++j) {
            if (j != i) full.push_back(B[j] - 1);
          }
          for (int g = 0; g < m; ++g) {
            Expr comm = ex_sub(mixed[static_cast<std::size_t>(g)]
                                    [static_cast<std::size_t>(b)]
                                        .get(full),
                               mixed_rev[static_cast<std::size_t>(g)]
                                        [static_cast<std::size_t>(b)]
                                            .get(full));
            if (!is_zero(comm)) {
              terms.push_back(ex_mul(fd.h_inv[e][g], comm));
            }
          }
        }
      }
      set_if_nonzero(out, A, B, std::move(terms));
    }
  }
  return out;
}

}  // namespace finalg
