#include "coxcount/count.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "coxcount/genfun.hpp"

namespace coxcount::count {

namespace {

Int ipow(long b, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

Rat qpow(long q, long e) { return e >= 0 ? Rat(ipow(q, e)) : Rat(1) / Rat(ipow(q, e < 0 ? -e : e)); }

long pair_l(const CoxPresentation& cox, const YVec& y, const PicClass& c) {
  Int v = cox.pair(y, c);
  if (!v.fits_slong_p()) throw std::runtime_error("pairing overflow");
  return v.get_si();
}

// Evaluate the relation at a scalar tuple over F_q.
long relation_value(const CoxPresentation& cox, long q, const std::vector<long>& s) {
  long acc = 0;
  for (const auto& term : cox.relation) {
    long v = s[term.linear] % q;
    for (auto [i, b] : term.factors)
      for (long e = 0; e < b; ++e) v = v * s[i] % q;
    acc = (acc + v) % q;
  }
  return acc;
}

}  // namespace

Rat torsor_count_closed(const CoxPresentation& cox, uint32_t e_mask, long q) {
  const AdmissibleChoice& ch = cox.default_choice();
  const int nJ = (int)ch.linear.size();
  Rat prod = 1;
  for (int j = 0; j < nJ; ++j) {
    long v = (e_mask >> ch.linear[j]) & 1;
    for (auto [i, b] : ch.parts[j]) v += (e_mask >> i) & 1;
    if (v != 0) continue;
    const Rat u = Rat(q - 1, q);
    Rat up = 1;
    for (size_t k = 0; k < ch.parts[j].size(); ++k) up *= u;
    prod *= Rat(1) - up;
  }
  const Rat res = (Rat(1) + Rat(q - 1) * prod) / Rat(ipow(q, std::popcount(e_mask)));
  return res;
}

Int torsor_count_brute(const CoxPresentation& cox, uint32_t e_mask, long q, long budget) {
  const int n = cox.num_generators();
  if (cox.relation.empty()) throw std::runtime_error("empty relation");
  double total = 1;
  for (int i = 0; i < n; ++i) total *= (e_mask >> i & 1) ? 1 : q;
  if (total > (double)budget) throw BudgetError("torsor enumeration exceeds budget");
  std::vector<long> s(n, 0);
  std::vector<int> freev;
  for (int i = 0; i < n; ++i)
    if (!(e_mask >> i & 1)) freev.push_back(i);
  Int cnt = 0;
  std::vector<long> idx(freev.size(), 0);
  while (true) {
    if (relation_value(cox, q, s) == 0) ++cnt;
    size_t k = 0;
    for (; k < freev.size(); ++k) {
      if (++s[freev[k]] < q) break;
      s[freev[k]] = 0;
    }
    if (k == freev.size()) break;
  }
  return cnt;
}

Int surface_point_count(const CoxPresentation& cox, long qv) {
  MoebiusTable mt(cox);
  const int n = cox.num_generators();
  Rat sum = 0;
  for (uint32_t e = 0; e < (1u << n); ++e) {
    const long mu = mt.mu_zero_mask(e);
    if (mu == 0) continue;
    sum += Rat(mu) * torsor_count_closed(cox, e, qv);
  }
  Rat scale = Rat(ipow(qv, cox.dim()));
  const Rat u = Rat(qv - 1, qv);
  for (int k = 0; k < cox.picard_rank; ++k) scale /= u;
  const Rat res = scale * sum;
  if (res.get_den() != 1 || res < 0)
    throw std::runtime_error("surface point count is not a nonnegative integer");
  return res.get_num();
}

EffectiveDivisor combined_divisor(const AdmissibleChoice& ch, int j,
                                  const std::vector<EffectiveDivisor>& G,
                                  const std::vector<EffectiveDivisor>& D) {
  EffectiveDivisor out = G[j];
  for (auto [gen, b] : ch.parts[j]) {
    const int pos = ch.index_in_I(gen);
    for (const auto& [p, m] : D[pos].mult) out.add(p, (int)(b * m));
  }
  return out;
}

SectionData phi_psi_theta(const CoxPresentation& cox, const AdmissibleChoice& ch,
                          const YVec& y, const std::vector<EffectiveDivisor>& G,
                          const std::vector<EffectiveDivisor>& D) {
  const int nJ = (int)ch.linear.size();
  const int nI = (int)ch.I.size();
  for (int k = 0; k < nI; ++k)
    if (D[k].degree() != pair_l(cox, y, cox.classes[ch.I[k]]))
      throw std::runtime_error("divisor degree does not match the pairing");
  std::vector<EffectiveDivisor> B(nJ);
  for (int j = 0; j < nJ; ++j) B[j] = combined_divisor(ch, j, G, D);
  const long gcd_all = divisor_gcd(B).degree();
  const PicClass dtot = cox.degree_total();
  SectionData out;
  out.phi.resize(nJ);
  out.psi.resize(nJ);
  bool first = true;
  for (int j0 = 0; j0 < nJ; ++j0) {
    std::vector<EffectiveDivisor> Bo;
    PicClass cls = PicClass::zero(cox.picard_rank);
    long degs = 0;
    for (int j = 0; j < nJ; ++j) {
      if (j == j0) continue;
      Bo.push_back(B[j]);
      cls += cox.classes[ch.linear[j]];
      degs += G[j].degree();
    }
    const long gcd_other = divisor_gcd(Bo).degree();
    out.phi[j0] = pair_l(cox, y, cls - dtot) - degs + gcd_other;
    out.psi[j0] = pair_l(cox, y, cox.classes[ch.linear[j0]]) - G[j0].degree() +
                  gcd_all - gcd_other;
    const long th = out.phi[j0] + out.psi[j0];
    if (first) {
      out.theta = th;
      first = false;
    } else if (th != out.theta) {
      throw std::logic_error("theta depends on the distinguished index");
    }
  }
  return out;
}

SectionCounts count_sections(const CoxPresentation& cox, const AdmissibleChoice& ch,
                             long q, const YVec& y,
                             const std::vector<EffectiveDivisor>& G,
                             const std::vector<EffectiveDivisor>& D) {
  const CurveContext ctx(q);
  const int nJ = (int)ch.linear.size();
  std::vector<std::pair<Section, long>> forms(nJ);
  for (int j = 0; j < nJ; ++j) {
    Section w = section_of(ctx, G[j]);
    for (auto [gen, b] : ch.parts[j]) {
      const int pos = ch.index_in_I(gen);
      w = multiply(ctx, w, power(ctx, section_of(ctx, D[pos]), b));
    }
    long dj = pair_l(cox, y, cox.classes[ch.linear[j]]) - G[j].degree();
    if (dj < 0) dj = -1;
    forms[j] = {w, dj};
  }
  SectionCounts out;
  out.Nj0.resize(nJ);
  std::vector<Int> NS(1u << nJ);
  for (uint32_t S = 0; S < (1u << nJ); ++S) {
    auto fs = forms;
    for (int j = 0; j < nJ; ++j)
      if (S >> j & 1) fs[j].second = -1;
    NS[S] = ipow(q, kernel_count(ctx, fs));
    out.Nstar += (std::popcount(S) % 2 ? -NS[S] : NS[S]);
  }
  out.N = NS[0];
  for (int j = 0; j < nJ; ++j) out.Nj0[j] = NS[1u << j];

  if (nJ == 3) {
    // Closed forms under the genus-0 thresholds, checked on every call.
    const SectionData sd = phi_psi_theta(cox, ch, y, G, D);
    for (int j0 = 0; j0 < nJ; ++j0) {
      if (sd.phi[j0] >= -1 && sd.psi[j0] >= -1) {
        if (out.N != ipow(q, 2 + sd.theta))
          throw std::logic_error("section count disagrees with the closed form");
        if (out.Nj0[j0] != ipow(q, 1 + sd.phi[j0]))
          throw std::logic_error("vanishing-component count disagrees with the closed form");
      }
      if (sd.psi[j0] < 0 && out.Nstar != 0)
        throw std::logic_error("nonvanishing count must vanish under a negative psi");
    }
  }
  return out;
}

std::vector<EffectiveDivisor> squarefree_divisors(const CurveContext& ctx, int max_degree) {
  std::vector<EffectiveDivisor> out;
  for (int d = 0; d <= max_degree; ++d)
    for (const auto& dv : effective_divisors(ctx, d))
      if (dv.squarefree()) out.push_back(dv);
  return out;
}

namespace {

// Odometer over a product of divisor lists; calls fn for each tuple.
void product_loop(const std::vector<std::vector<EffectiveDivisor>>& lists,
                  const std::function<void(const std::vector<EffectiveDivisor>&)>& fn) {
  const size_t n = lists.size();
  for (const auto& l : lists)
    if (l.empty()) return;
  std::vector<size_t> idx(n, 0);
  std::vector<EffectiveDivisor> cur(n);
  for (size_t k = 0; k < n; ++k) cur[k] = lists[k][0];
  while (true) {
    fn(cur);
    size_t k = 0;
    for (; k < n; ++k) {
      if (++idx[k] < lists[k].size()) {
        cur[k] = lists[k][idx[k]];
        break;
      }
      idx[k] = 0;
      cur[k] = lists[k][0];
    }
    if (k == n) break;
  }
}

double product_size(const std::vector<std::vector<EffectiveDivisor>>& lists) {
  double t = 1;
  for (const auto& l : lists) t *= (double)l.size();
  return t;
}

// Enumerate (G, D) in the y-sum domain, calling fn for each tuple with
// nonzero nu.
void for_each_gd(const CoxPresentation& cox, const MoebiusTable& mt,
                 const AdmissibleChoice& ch, long q, const YVec& y, long budget,
                 const std::function<void(const std::vector<EffectiveDivisor>&,
                                          const std::vector<EffectiveDivisor>&, const Int&)>& fn) {
  const CurveContext ctx(q);
  const int nJ = (int)ch.linear.size();
  const int nI = (int)ch.I.size();
  std::vector<std::vector<EffectiveDivisor>> Gs(nJ), Ds(nI);
  for (int j = 0; j < nJ; ++j) {
    const long b = pair_l(cox, y, cox.classes[ch.linear[j]]);
    if (b < 0) return;
    Gs[j] = squarefree_divisors(ctx, (int)b);
  }
  for (int k = 0; k < nI; ++k) {
    const long d = pair_l(cox, y, cox.classes[ch.I[k]]);
    if (d < 0) return;
    Ds[k] = effective_divisors(ctx, (int)d);
  }
  if (product_size(Gs) * product_size(Ds) > (double)budget)
    throw BudgetError("divisor enumeration exceeds budget");
  product_loop(Gs, [&](const std::vector<EffectiveDivisor>& G) {
    product_loop(Ds, [&](const std::vector<EffectiveDivisor>& D) {
      const Int nu = nu_divisor(mt, ch, G, D);
      if (nu != 0) fn(G, D, nu);
    });
  });
}

}  // namespace

bool in_dual_cone(const CoxPresentation& cox, const YVec& y) {
  for (const auto& g : cox.effective_cone)
    if (cox.pair(y, g) < 0) return false;
  return true;
}

Int hom_count(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
              const YVec& y, long budget) {
  if (!in_dual_cone(cox, y)) return 0;
  MoebiusTable mt(cox);
  Int total = 0;
  for_each_gd(cox, mt, ch, q, y, budget,
              [&](const auto& G, const auto& D, const Int& nu) {
                total += nu * count_sections(cox, ch, q, y, G, D).Nstar;
              });
  if (total < 0) throw std::logic_error("negative morphism count");
  return total;
}

NTerms n_terms(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
               const YVec& y, long budget) {
  NTerms out;
  if (!in_dual_cone(cox, y)) return out;
  MoebiusTable mt(cox);
  for_each_gd(cox, mt, ch, q, y, budget,
              [&](const auto& G, const auto& D, const Int& nu) {
                const SectionData sd = phi_psi_theta(cox, ch, y, G, D);
                const SectionCounts sc = count_sections(cox, ch, q, y, G, D);
                const Rat main = Rat(nu) * qpow(q, 2 + sd.theta);
                out.n0 += main;
                bool psi_neg = false, phi_ge = false;
                for (size_t j = 0; j < sd.psi.size(); ++j) {
                  psi_neg = psi_neg || sd.psi[j] < 0;
                  phi_ge = phi_ge || sd.phi[j] >= -1;
                }
                if (psi_neg) {
                  out.n1 -= main;
                } else if (phi_ge) {
                  out.n1 -= main - Rat(nu) * Rat(sc.Nstar);
                } else {
                  out.n2 -= main - Rat(nu) * Rat(sc.Nstar);
                }
              });
  return out;
}

Int M_sum(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
          const std::vector<int>& d, const std::vector<EffectiveDivisor>& G,
          long budget) {
  for (const auto& g : G)
    if (!g.squarefree()) return 0;
  const CurveContext ctx(q);
  const int nI = (int)ch.I.size();
  const int nJ = (int)ch.linear.size();
  std::vector<std::vector<EffectiveDivisor>> Ds(nI);
  for (int k = 0; k < nI; ++k) Ds[k] = effective_divisors(ctx, d[k]);
  if (product_size(Ds) > (double)budget) throw BudgetError("divisor enumeration exceeds budget");
  Int total = 0;
  product_loop(Ds, [&](const std::vector<EffectiveDivisor>& D) {
    const Int nu = nu_divisor(mt, ch, G, D);
    if (nu == 0) return;
    std::vector<EffectiveDivisor> B(nJ);
    for (int j = 0; j < nJ; ++j) B[j] = combined_divisor(ch, j, G, D);
    total += nu * ipow(q, divisor_gcd(B).degree());
  });
  return total;
}

double M_j0_eta(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
                const std::vector<int>& d, const std::vector<EffectiveDivisor>& G,
                int j0, const Rat& eta, long budget) {
  for (const auto& g : G)
    if (!g.squarefree()) return 0;
  const CurveContext ctx(q);
  const int nI = (int)ch.I.size();
  const int nJ = (int)ch.linear.size();
  std::vector<std::vector<EffectiveDivisor>> Ds(nI);
  for (int k = 0; k < nI; ++k) Ds[k] = effective_divisors(ctx, d[k]);
  if (product_size(Ds) > (double)budget) throw BudgetError("divisor enumeration exceeds budget");
  const double etad = eta.get_d();
  double total = 0;
  product_loop(Ds, [&](const std::vector<EffectiveDivisor>& D) {
    Int nu = nu_divisor(mt, ch, G, D);
    if (nu == 0) return;
    if (nu < 0) nu = -nu;
    std::vector<EffectiveDivisor> B(nJ), Bo;
    for (int j = 0; j < nJ; ++j) {
      B[j] = combined_divisor(ch, j, G, D);
      if (j != j0) Bo.push_back(B[j]);
    }
    const double expo = divisor_gcd(B).degree() + etad * divisor_gcd(Bo).degree();
    total += nu.get_d() * std::pow((double)q, expo);
  });
  return total;
}

Rat M_sum_via_euler(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
                    const std::vector<int>& d, const std::vector<EffectiveDivisor>& G) {
  const CoxPresentation& cox = mt.cox();
  const CurveContext ctx(q);
  const int nI = (int)ch.I.size();
  const int nJ = (int)ch.linear.size();
  int maxd = 0;
  for (int k = 0; k < nI; ++k) maxd = std::max(maxd, d[k]);
  int maxg = 0;
  for (const auto& g : G) {
    if (!g.squarefree()) return 0;
    for (const auto& [p, m] : g.mult) maxg = std::max(maxg, p.degree());
  }
  std::map<std::vector<int>, Rat> prod;
  prod[std::vector<int>(nI, 0)] = 1;
  for (const auto& v : closed_points(ctx, std::max(maxd, maxg))) {
    uint32_t g_mask = 0;
    for (int j = 0; j < nJ; ++j)
      if (G[j].multiplicity(v) > 0) g_mask |= 1u << j;
    const int f = v.degree();
    const int capv = maxd / f;
    if (capv == 0 && g_mask == 0) continue;
    const auto F = genfun::local_F_series(mt, ch, g_mask, capv).F;
    const auto local = F.eval_rho_tau(Rat(q), Rat(1));
    std::map<std::vector<int>, Rat> next;
    for (const auto& [pe, pc] : prod)
      for (const auto& [le, lc] : local) {
        std::vector<int> e = pe;
        bool ok = true;
        for (int k = 0; k < nI; ++k) {
          e[k] += le[k] * f;
          if (e[k] > d[k]) { ok = false; break; }
        }
        if (ok) next[e] += pc * lc;
      }
    prod = std::move(next);
  }
  auto it = prod.find(d);
  return it == prod.end() ? Rat(0) : it->second;
}

Rat n0_via_M(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
             const YVec& y, long budget) {
  if (!in_dual_cone(cox, y)) return 0;
  MoebiusTable mt(cox);
  const CurveContext ctx(q);
  const int nJ = (int)ch.linear.size();
  const int nI = (int)ch.I.size();
  std::vector<int> d(nI);
  long dsum = 0;
  for (int k = 0; k < nI; ++k) {
    const long dk = pair_l(cox, y, cox.classes[ch.I[k]]);
    if (dk < 0) return 0;
    d[k] = (int)dk;
    dsum += dk;
  }
  std::vector<std::vector<EffectiveDivisor>> Gs(nJ);
  for (int j = 0; j < nJ; ++j) {
    const long b = pair_l(cox, y, cox.classes[ch.linear[j]]);
    if (b < 0) return 0;
    Gs[j] = squarefree_divisors(ctx, (int)b);
  }
  const long ky = pair_l(cox, y, anticanonical(cox));
  Rat total = 0;
  product_loop(Gs, [&](const std::vector<EffectiveDivisor>& G) {
    long gdeg = 0;
    for (const auto& g : G) gdeg += g.degree();
    const Int m = M_sum(mt, ch, q, d, G, budget);
    if (m != 0) total += Rat(m) * qpow(q, -dsum - gdeg);
  });
  return qpow(q, 2 + ky) * total;
}

Int hom_count_oracle(const CoxPresentation& cox, long q, const YVec& y, long budget) {
  if (!in_dual_cone(cox, y)) return 0;
  const CurveContext ctx(q);
  const int n = cox.num_generators();
  std::vector<long> deg(n);
  double total = 1;
  for (int i = 0; i < n; ++i) {
    deg[i] = pair_l(cox, y, cox.classes[i]);
    if (deg[i] < 0) return 0;
    total *= std::pow((double)q, (double)(deg[i] + 1));
  }
  if (total > (double)budget) throw BudgetError("form enumeration exceeds budget");

  // Minimal non-faces: checking these suffices for the incidence condition.
  std::vector<uint32_t> min_nonfaces;
  for (uint32_t m = 1; m < (1u << n); ++m) {
    if (std::popcount(m) < 2 || cox.incidence_contains(m)) continue;
    bool minimal = true;
    for (int i = 0; i < n && minimal; ++i)
      if ((m >> i & 1) && !cox.incidence_contains(m & ~(1u << i))) minimal = false;
    if (minimal) min_nonfaces.push_back(m);
  }

  std::vector<Section> s(n);
  for (int i = 0; i < n; ++i) {
    s[i].degree = (int)deg[i];
    s[i].coeffs.assign(deg[i] + 1, 0);
  }
  auto advance = [&]() {
    for (int i = 0; i < n; ++i)
      for (long c = 0; c <= deg[i]; ++c) {
        if (++s[i].coeffs[c] < q) return true;
        s[i].coeffs[c] = 0;
      }
    return false;
  };
  const int reldeg = (int)pair_l(cox, y, cox.degree_total());
  Int cnt = 0;
  do {
    bool nz = true;
    for (int i = 0; i < n && nz; ++i) nz = !s[i].is_zero();
    if (!nz) continue;
    std::vector<int> acc(reldeg + 1, 0);
    for (const auto& term : cox.relation) {
      Section w = s[term.linear];
      for (auto [i, b] : term.factors) w = multiply(ctx, w, power(ctx, s[i], b));
      for (int c = 0; c <= w.degree; ++c) acc[c] = (acc[c] + w.coeffs[c]) % (int)q;
    }
    bool zero = true;
    for (int c = 0; c <= reldeg && zero; ++c) zero = acc[c] == 0;
    if (!zero) continue;
    bool ok = true;
    for (uint32_t m : min_nonfaces) {
      std::vector<Section> sub;
      for (int i = 0; i < n; ++i)
        if (m >> i & 1) sub.push_back(s[i]);
      if (form_gcd_degree(ctx, sub) > 0) { ok = false; break; }
    }
    if (ok) ++cnt;
  } while (advance());
  const Int torus = ipow(q - 1, cox.picard_rank);
  if (cnt % torus != 0) throw std::logic_error("torsor count not divisible by the torus order");
  return cnt / torus;
}

long closed_point_count(long q, int degree) {
  if (degree == 1) return q + 1;
  // (1/f) sum_{e|f} mu(e) q^{f/e}
  long total = 0;
  for (int e = 1; e <= degree; ++e) {
    if (degree % e) continue;
    int m = 1, x = e;
    for (int p = 2; p * p <= x; ++p)
      if (x % p == 0) {
        x /= p;
        if (x % p == 0) { m = 0; break; }
        m = -m;
      }
    if (x > 1 && m != 0) m = -m;
    if (m == 0) continue;
    Int term = ipow(q, degree / e);
    total += m * (long)term.get_si();
  }
  return total / degree;
}

Rat euler_factor(const MoebiusTable& mt, const AdmissibleChoice& ch, long qv) {
  const int nJ = (int)ch.linear.size();
  Rat sum = 0;
  for (uint32_t g = 0; g < (1u << nJ); ++g)
    sum += genfun::H_g_eval(mt, ch, g, Rat(qv)) * qpow(qv, -std::popcount(g));
  return sum;
}

namespace {

GammaReport assemble_gamma(const CoxPresentation& cox, long q, int B,
                           const std::function<Rat(long qv)>& factor) {
  GammaReport rep;
  double val = std::pow((double)q / (double)(q - 1), cox.picard_rank) *
               std::pow((double)q, cox.dim());
  rep.partials.push_back(val);
  double prev_t = 0;
  for (int f = 1; f <= B; ++f) {
    long qv = 1;
    for (int i = 0; i < f; ++i) qv *= q;
    const long nf = closed_point_count(q, f);
    const double lf = std::log(factor(qv).get_d());
    val *= std::exp(nf * lf);
    rep.partials.push_back(val);
    const double t = std::abs(nf * lf);
    if (f == B && prev_t > 0 && t < prev_t) {
      const double r = t / prev_t;
      rep.tail_bound = t * r / (1 - r);
    }
    prev_t = t;
  }
  rep.value = val;
  return rep;
}

}  // namespace

GammaReport gamma_truncated(const CoxPresentation& cox, long q, int B) {
  return assemble_gamma(cox, q, B, [&](long qv) {
    Rat u = Rat(qv - 1, qv);
    Rat f = Rat(surface_point_count(cox, qv)) / Rat(ipow(qv, cox.dim()));
    for (int k = 0; k < cox.picard_rank; ++k) f *= u;
    return f;
  });
}

GammaReport gamma_via_cprinc(const CoxPresentation& cox, long q, int B) {
  MoebiusTable mt(cox);
  const AdmissibleChoice& ch = cox.default_choice();
  return assemble_gamma(cox, q, B, [&](long qv) { return euler_factor(mt, ch, qv); });
}

std::vector<YVec> lattice_points_at_height(const CoxPresentation& cox, long s) {
  const int rho = cox.picard_rank;
  const PicClass mk = anticanonical(cox);
  // When the F-basis classes all generate the effective cone the dual cone
  // sits in the nonnegative orthant and [0, s]^rho suffices; otherwise scan a
  // symmetric box.
  bool orthant = true;
  const AdmissibleChoice& ch = cox.default_choice();
  for (int k = 0; k < rho && orthant; ++k) {
    bool found = false;
    for (const auto& g : cox.effective_cone)
      if (g == cox.classes[ch.I[k]]) found = true;
    orthant = found;
  }
  const long lo = orthant ? 0 : -2 * s;
  const long hi = orthant ? s : 2 * s;
  std::vector<YVec> out;
  YVec y(rho, lo);
  while (true) {
    if (cox.pair(y, mk) == s && in_dual_cone(cox, y)) out.push_back(y);
    int k = 0;
    for (; k < rho; ++k) {
      if (++y[k] <= hi) break;
      y[k] = lo;
    }
    if (k == rho) break;
  }
  return out;
}

RecordsReport count_records(const CoxPresentation& cox, const AdmissibleChoice& ch,
                            long q, long bound, double gamma, bool with_oracle,
                            long budget, int jobs) {
  RecordsReport rep;
  std::vector<YVec> ys;
  for (long s = 0; s <= bound; ++s)
    for (auto& y : lattice_points_at_height(cox, s)) ys.push_back(y);
  std::vector<CountRecord> recs(ys.size());
  std::atomic<bool> truncated{false};
  auto work = [&](size_t k) {
    CountRecord r;
    try {
      r.y = ys[k];
      const NTerms nt = n_terms(cox, ch, q, ys[k], budget);
      r.hom = hom_count(cox, ch, q, ys[k], budget);
      r.n0 = nt.n0;
      r.n1 = nt.n1;
      r.n2 = nt.n2;
      if (Rat(r.hom) != nt.n0 + nt.n1 + nt.n2)
        throw std::logic_error("decomposition does not sum to the morphism count");
      const long s = pair_l(cox, ys[k], anticanonical(cox));
      r.predicted = gamma * std::pow((double)q, (double)s);
      r.ratio = r.predicted > 0 ? r.hom.get_d() / r.predicted : 0;
      if (with_oracle) {
        r.oracle = hom_count_oracle(cox, q, ys[k], budget);
        r.has_oracle = true;
        if (r.oracle != r.hom) throw std::logic_error("oracle disagrees with the lifted count");
      }
    } catch (const BudgetError&) {
      truncated = true;
      r.y.clear();
    }
    recs[k] = std::move(r);
  };
  if (jobs <= 1) {
    for (size_t k = 0; k < ys.size(); ++k) work(k);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&]() {
        for (size_t k = next++; k < ys.size(); k = next++) work(k);
      });
    for (auto& t : pool) t.join();
  }
  rep.truncated = truncated;
  for (auto& r : recs)
    if (!r.y.empty()) rep.records.push_back(std::move(r));
  return rep;
}

std::string records_csv(const RecordsReport& rep) {
  std::ostringstream os;
  if (rep.records.empty()) return "";
  const size_t rho = rep.records[0].y.size();
  for (size_t k = 0; k < rho; ++k) os << "y" << k + 1 << ",";
  os << "hom,n0,n1,n2,predicted,ratio";
  if (rep.records[0].has_oracle) os << ",oracle";
  os << "\n";
  for (const auto& r : rep.records) {
    for (const auto& c : r.y) os << c << ",";
    os << r.hom << "," << r.n0 << "," << r.n1 << "," << r.n2 << "," << r.predicted << ","
       << r.ratio;
    if (r.has_oracle) os << "," << r.oracle;
    os << "\n";
  }
  return os.str();
}

ManinReport manin_report(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
                         int d_max, double alpha, double gamma, long budget, int jobs) {
  ManinReport rep;
  const long delta = kx_divisibility(cox);
  for (int d = 0; d <= d_max; ++d) {
    ManinRow row;
    row.d = d;
    try {
      for (const auto& y : lattice_points_at_height(cox, delta * d))
        row.total += hom_count(cox, ch, q, y, budget);
    } catch (const BudgetError&) {
      rep.truncated = true;
      break;
    }
    row.predicted = d == 0 ? 0
                           : alpha * gamma * std::pow((double)d, cox.picard_rank - 1) *
                                 std::pow((double)q, (double)(delta * d));
    row.ratio = row.predicted > 0 ? row.total.get_d() / row.predicted : 0;
    rep.rows.push_back(row);
  }
  (void)jobs;
  return rep;
}

std::string manin_csv(const ManinReport& rep) {
  std::ostringstream os;
  os << "d,total,predicted,ratio\n";
  for (const auto& r : rep.rows)
    os << r.d << "," << r.total << "," << r.predicted << "," << r.ratio << "\n";
  if (rep.truncated) os << "# truncated: budget exceeded\n";
  return os.str();
}

}  // namespace coxcount::count
