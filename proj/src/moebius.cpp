#include "coxcount/moebius.hpp"

namespace coxcount {

MoebiusTable::MoebiusTable(const CoxPresentation& cox) : cox_(&cox) {
  const int n = cox.num_generators();
  mu_.assign(1u << n, 0);
  // mu(e) = 1_inc(e) - sum over proper lower sets; filled in popcount order by
  // iterating masks increasingly (all submasks of m are < m).
  for (uint32_t m = 0; m < mu_.size(); ++m) {
    long s = cox.incidence_contains(m) ? 1 : 0;
    for (uint32_t sub = (m - 1) & m;; sub = (sub - 1) & m) {
      s -= mu_[sub];
      if (sub == 0) break;
    }
    if (m == 0) s = 1;
    mu_[m] = s;
  }
}

long MoebiusTable::mu_zero(const ExponentVector& e) const {
  uint32_t m = 0;
  for (size_t k = 0; k < e.size(); ++k) {
    if (e[k] >= 2) return 0;
    if (e[k] == 1) m |= 1u << k;
  }
  return mu_[m];
}

long MoebiusTable::nu_zero_masks(const AdmissibleChoice& ch, uint32_t g_mask,
                                 uint32_t f_supp) const {
  uint32_t gm = 0, fm = 0;
  for (size_t j = 0; j < ch.linear.size(); ++j)
    if (g_mask >> j & 1) gm |= 1u << ch.linear[j];
  for (size_t k = 0; k < ch.I.size(); ++k)
    if (f_supp >> k & 1) fm |= 1u << ch.I[k];
  if (!cox_->incidence_contains(fm)) return 0;  // holds for every g
  long s = 0;
  uint32_t sub = fm;
  while (true) {
    s += mu_[gm | sub];
    if (sub == 0) break;
    sub = (sub - 1) & fm;
  }
  return s;
}

long MoebiusTable::nu_zero(const AdmissibleChoice& ch, const ExponentVector& g,
                           const ExponentVector& f) const {
  uint32_t gm = 0, fs = 0;
  for (size_t j = 0; j < g.size(); ++j) {
    if (g[j] >= 2) return 0;
    if (g[j] == 1) gm |= 1u << j;
  }
  for (size_t k = 0; k < f.size(); ++k)
    if (f[k] >= 1) fs |= 1u << k;  // support reduction
  return nu_zero_masks(ch, gm, fs);
}

Int mu_divisor(const MoebiusTable& t, const std::vector<EffectiveDivisor>& D) {
  EffectiveDivisor support = divisor_sum(D);
  Int prod = 1;
  for (const auto& [v, m] : support.mult) {
    ExponentVector e(D.size());
    for (size_t k = 0; k < D.size(); ++k) e[k] = D[k].multiplicity(v);
    prod *= t.mu_zero(e);
    if (prod == 0) break;
  }
  return prod;
}

Int nu_divisor(const MoebiusTable& t, const AdmissibleChoice& ch,
               const std::vector<EffectiveDivisor>& G,
               const std::vector<EffectiveDivisor>& D) {
  std::vector<EffectiveDivisor> all = G;
  all.insert(all.end(), D.begin(), D.end());
  EffectiveDivisor support = divisor_sum(all);
  Int prod = 1;
  for (const auto& [v, mm] : support.mult) {
    ExponentVector g(G.size()), f(D.size());
    for (size_t j = 0; j < G.size(); ++j) g[j] = G[j].multiplicity(v);
    for (size_t k = 0; k < D.size(); ++k) f[k] = D[k].multiplicity(v);
    prod *= t.nu_zero(ch, g, f);
    if (prod == 0) break;
  }
  return prod;
}

}  // namespace coxcount
