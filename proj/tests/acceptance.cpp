// Acceptance gate: one pass/fail line per criterion; nonzero exit on failure.
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "coxcount/cones.hpp"
#include "coxcount/count.hpp"
#include "coxcount/genfun.hpp"
#include "fixtures.hpp"

using namespace coxcount;
using namespace coxcount::count;

namespace {

int failures = 0;

void report(int num, const char* what, bool ok) {
  std::printf("criterion %2d: %s  [%s]\n", num, ok ? "PASS" : "FAIL", what);
  if (!ok) ++failures;
}

Int ipow(long b, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

long eval_relation(const CoxPresentation& cox, long q, const std::vector<long>& s) {
  long acc = 0;
  for (const auto& term : cox.relation) {
    long v = s[term.linear] % q;
    for (auto [i, b] : term.factors)
      for (long e = 0; e < b; ++e) v = v * s[i] % q;
    acc = (acc + v) % q;
  }
  return acc;
}

// 1. Moebius partition of unity over e in {0,1,2}^7.
bool c1() {
  const CoxPresentation cox = builtin_sextic_a1();
  const MoebiusTable mt(cox);
  const int n = cox.num_generators();
  std::vector<long> e(n, 0);
  while (true) {
    uint32_t supp = 0;
    for (int i = 0; i < n; ++i)
      if (e[i] > 0) supp |= 1u << i;
    // mu vanishes off {0,1}^n, so the partial sum collapses to subsets of
    // the support.
    long sum = 0;
    uint32_t sub = supp;
    while (true) {
      sum += mt.mu_zero_mask(sub);
      if (sub == 0) break;
      sub = (sub - 1) & supp;
    }
    if (sum != (cox.incidence_contains(supp) ? 1 : 0)) return false;
    int k = 0;
    for (; k < n; ++k) {
      if (++e[k] <= 2) break;
      e[k] = 0;
    }
    if (k == n) break;
  }
  return true;
}

// 2. Torsor closed form vs brute force; spot value 72 at q = 2.
bool c2() {
  const CoxPresentation cox = builtin_sextic_a1();
  const int n = cox.num_generators();
  for (long q : {2L, 3L, 5L})
    for (uint32_t e = 0; e < (1u << n); ++e) {
      const Rat closed = torsor_count_closed(cox, e, q) * Rat(ipow(q, n - 1));
      if (closed.get_den() != 1) return false;
      if (closed.get_num() != torsor_count_brute(cox, e, q)) return false;
    }
  return torsor_count_brute(cox, 0, 2) == 72;
}

// 3. Section-count closed forms and bounds on >= 500 random instances.
bool c3() {
  const CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  MoebiusTable mt(cox);
  const int nJ = (int)ch.linear.size();
  const int nI = (int)ch.I.size();
  std::mt19937 rng(17);
  int tested = 0;
  for (long q : {2L, 3L}) {
    const CurveContext ctx(q);
    std::vector<std::vector<EffectiveDivisor>> by_deg;
    for (int d = 0; d <= 3; ++d) by_deg.push_back(effective_divisors(ctx, d));
    while (tested < (q == 2 ? 300 : 550)) {
      YVec y(cox.picard_rank);
      for (auto& c : y) c = (long)(rng() % 3);
      std::vector<EffectiveDivisor> G(nJ), D(nI);
      bool ok = true;
      for (int j = 0; j < nJ && ok; ++j) {
        const Int b = cox.pair(y, cox.classes[ch.linear[j]]);
        if (b < 0) { ok = false; break; }
        const int dd = (int)(rng() % (std::min<long>(b.get_si(), 3) + 1));
        G[j] = by_deg[dd][rng() % by_deg[dd].size()];
        if (!G[j].squarefree()) ok = false;
      }
      for (int k = 0; k < nI && ok; ++k) {
        const Int dk = cox.pair(y, cox.classes[ch.I[k]]);
        if (dk < 0 || dk > 3) { ok = false; break; }
        D[k] = by_deg[(int)dk.get_si()][rng() % by_deg[(int)dk.get_si()].size()];
      }
      if (!ok) continue;
      if (nu_divisor(mt, ch, G, D) == 0) continue;  // outside the summation domain
      SectionCounts sc;
      try {
        // closed forms (including the corrected N_{j0} exponent) are asserted
        // inside count_sections whenever the thresholds hold
        sc = count_sections(cox, ch, q, y, G, D);
      } catch (const std::exception&) {
        return false;
      }
      const SectionData sd = phi_psi_theta(cox, ch, y, G, D);
      for (int j0 = 0; j0 < nJ; ++j0) {
        if (sd.phi[j0] >= 0 && sc.Nj0[j0] > ipow(q, 2 + sd.phi[j0])) return false;
        if (sd.psi[j0] < 0 && sc.Nstar != 0) return false;
        if (sd.phi[j0] <= -2 && sd.psi[j0] >= 0 && sc.Nstar > ipow(q, sd.psi[j0]))
          return false;
        if (sd.phi[j0] >= 0 && sd.psi[j0] >= 0 && sc.Nstar > ipow(q, 2 + sd.theta))
          return false;
      }
      ++tested;
    }
  }
  return tested >= 500;
}

// 4. hom = n0 + n1 + n2 for every y with height <= 6, q in {2,3}.
bool c4() {
  const CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  const int jobs = (int)std::max(1u, std::thread::hardware_concurrency());
  for (long q : {2L, 3L}) {
    RecordsReport rep;
    try {
      rep = count_records(cox, ch, q, 6, 1.0, false, 400'000'000, jobs);
    } catch (const std::exception&) {
      return false;
    }
    if (rep.truncated || rep.records.empty()) return false;
    for (const auto& r : rep.records)
      if (r.n0 + r.n1 + r.n2 != Rat(r.hom)) return false;
  }
  return true;
}

// 5. Moebius-formula count equals the brute-force torsor oracle.
bool c5() {
  const CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  const YVec y0(cox.picard_rank, 0);
  if (hom_count(cox, ch, 3, y0) != 2 || hom_count_oracle(cox, 3, y0) != 2) return false;
  for (long q : {2L, 3L}) {
    const long bound = q == 2 ? 3 : 2;
    for (long s = 0; s <= bound; ++s)
      for (const auto& y : lattice_points_at_height(cox, s))
        if (hom_count(cox, ch, q, y) != hom_count_oracle(cox, q, y)) return false;
  }
  return true;
}

// 6. Cleared-series polynomiality on the parameter grid; closed forms.
bool c6() {
  using namespace coxcount::genfun;
  auto expect = [](int nt, std::vector<std::pair<std::vector<int>, long>> terms) {
    MultiPoly p(nt);
    for (auto& [e, c] : terms) {
      Expo key(2 + nt, 0);
      for (int k = 0; k < nt; ++k) key[2 + k] = e[k];
      p.add_term(key, Int(c));
    }
    return p;
  };
  if (numerator_Ftilde({{{0}}, {1}, {0}}) != expect(1, {{{0}, 1}, {{1}, -1}})) return false;
  if (numerator_Ftilde({{{0, 1}}, {1, 1}, {0}}) !=
      expect(2, {{{0, 0}, 1}, {{1, 0}, -1}, {{0, 1}, -1}, {{1, 1}, 1}}))
    return false;
  if (numerator_Ftilde({{{0}, {1}}, {1, 1}, {0, 0}}) !=
      expect(2, {{{0, 0}, 1}, {{1, 1}, -1}}))
    return false;

  std::vector<std::vector<int>> shapes{{1}, {2}, {1, 1}, {1, 2}, {2, 2},
                                       {1, 1, 1}, {1, 1, 2}, {1, 2, 2}, {2, 2, 2}};
  std::mt19937 rng(7);
  int tested = 0;
  for (const auto& shape : shapes) {
    const int nv = 0 + [&] { int s = 0; for (int v : shape) s += v; return s; }();
    std::vector<std::vector<long>> apats;
    for (long v : {1L, 2L, 3L}) apats.push_back(std::vector<long>(nv, v));
    for (int s = 0; s < 5; ++s) {
      std::vector<long> a(nv);
      for (auto& x : a) x = 1 + rng() % 3;
      apats.push_back(a);
    }
    std::vector<std::vector<long>> nupats;
    nupats.push_back(std::vector<long>(shape.size(), 0));
    for (int s = 0; s < 3; ++s) {
      std::vector<long> nu(shape.size());
      for (auto& x : nu) x = rng() % 3;
      nupats.push_back(nu);
    }
    for (const auto& a : apats)
      for (const auto& nu : nupats) {
        Instance inst;
        inst.a = a;
        inst.nu = nu;
        int at = 0;
        for (int sz : shape) {
          std::vector<int> part;
          for (int k = 0; k < sz; ++k) part.push_back(at++);
          inst.parts.push_back(part);
        }
        double box = 1;
        for (int i = 0; i < nv; ++i) box *= ftilde_support_bound(inst, i) + 3;
        if (box > 3e5) continue;
        MultiPoly ft;
        try {
          ft = numerator_Ftilde(inst);  // raises beyond the support bound
        } catch (const std::exception&) {
          return false;
        }
        const int cap = ft.max_t_degree() + 2;
        if (!(ft == Ftilde_by_coefficient_formula(inst, cap).truncate(cap))) return false;
        ++tested;
      }
  }
  // inverse-degree bound on the assembled local polynomials
  for (const CoxPresentation& cox : {builtin_sextic_a1(), toy_presentation()}) {
    MoebiusTable mt(cox);
    const auto& ch = cox.default_choice();
    for (uint32_t g = 1; g < 8; ++g) {
      const auto ls = local_F_series(mt, ch, g, 6);
      if (deg_inverse(ls.H1.set_tau_one(), Rat(0)) > Rat((long)std::popcount(g) - 2))
        return false;
    }
  }
  return tested >= 150;
}

// 7. Local closed forms, H2 cancellation, appendix decomposition.
bool c7() {
  using namespace coxcount::genfun;
  for (const CoxPresentation& cox : {builtin_sextic_a1(), toy_presentation()}) {
    MoebiusTable mt(cox);
    const auto& ch = cox.default_choice();
    const int nJ = (int)ch.linear.size();
    const int nI = (int)ch.I.size();
    for (long qv : {2L, 3L}) {
      Rat total = 0;
      std::vector<Rat> t(nI, Rat(1, qv));
      for (uint32_t g = 0; g < (1u << nJ); ++g) {
        LocalSeries ls;
        try {
          ls = local_F_series(mt, ch, g, 6);  // closed-form mismatches raise
        } catch (const std::exception&) {
          return false;
        }
        if (!(ls.H2_closed.expand(6) == ls.H2_trunc)) return false;
        Rat hv = ls.H2_closed.terms.empty() ? Rat(0) : ls.H2_closed.eval(Rat(qv), Rat(1), t);
        Rat w = 1;
        for (int k = 0; k < std::popcount(g); ++k) w /= qv;
        total += hv * w;
      }
      if (total != 0) return false;
    }
    for (uint32_t g = 0; g < (1u << nJ); ++g)
      for (int j0 = 0; j0 < nJ; ++j0) {
        const auto ap = appendix_decomposition(mt, ch, j0, g, 6);
        if (!ap.sum_matches || !ap.closed_matches || !ap.certificate.ok) return false;
      }
  }
  return true;
}

// 8. Euler-factor identity and surface counts with torsor-quotient crosscheck.
bool c8() {
  const CoxPresentation cox = builtin_sextic_a1();
  MoebiusTable mt(cox);
  const auto& ch = cox.default_choice();
  for (long qv : {2L, 3L, 4L, 5L, 8L, 9L}) {
    Rat rhs = Rat(surface_point_count(cox, qv)) / Rat(ipow(qv, 2));
    for (int k = 0; k < cox.picard_rank; ++k) rhs *= Rat(qv - 1, qv);
    if (euler_factor(mt, ch, qv) != rhs) return false;
  }
  if (surface_point_count(cox, 2) != 13 || surface_point_count(cox, 3) != 22) return false;
  const int n = cox.num_generators();
  for (long q : {2L, 3L}) {
    Int cnt = 0;
    std::vector<long> s(n, 0);
    while (true) {
      if (eval_relation(cox, q, s) == 0) {
        uint32_t zeros = 0;
        for (int i = 0; i < n; ++i)
          if (s[i] == 0) zeros |= 1u << i;
        if (cox.incidence_contains(zeros)) ++cnt;
      }
      int k = 0;
      for (; k < n; ++k) {
        if (++s[k] < q) break;
        s[k] = 0;
      }
      if (k == n) break;
    }
    const Int torus = ipow(q - 1, cox.picard_rank);
    if (cnt % torus != 0 || cnt / torus != surface_point_count(cox, q)) return false;
  }
  return true;
}

// 9. Two gamma routes agree at B = 8, q = 5 within the geometric tail bound.
bool c9() {
  const CoxPresentation cox = builtin_sextic_a1();
  const GammaReport a = gamma_truncated(cox, 5, 8);
  const GammaReport b = gamma_via_cprinc(cox, 5, 8);
  const double rel = std::abs(a.value - b.value) / std::abs(a.value);
  return rel <= 1e-4 && rel <= a.tail_bound + b.tail_bound + 1e-12;
}

// 10. Cone coverage and alpha; exact volume vs Monte-Carlo.  The external
// cone-data rows are conditional and not exercised without input files.
bool c10() {
  using namespace coxcount::cones;
  const CoxPresentation cox = builtin_sextic_a1();
  if (coverage_ratio(cox, Rat(0)).ratio != 1) return false;
  const HPolytope sec = dual_cone_section(cox);
  const Rat alpha = volume(sec);
  if (alpha != Rat(1, 144)) return false;
  const double mc = mc_volume(sec, 1000000, 99);
  return std::abs(mc - alpha.get_d()) < 0.01 * alpha.get_d();
}

// 11. Trend report: emits and is positive; the asymptotic limit itself is
// out of reach at this scale.
bool c11() {
  using namespace coxcount::cones;
  const CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  const double alpha = volume(dual_cone_section(cox)).get_d();
  const double gamma = gamma_truncated(cox, 2, 8).value;
  const int jobs = (int)std::max(1u, std::thread::hardware_concurrency());
  ManinReport mr;
  try {
    mr = manin_report(cox, ch, 2, 6, alpha, gamma, 400'000'000, jobs);
  } catch (const std::exception&) {
    return false;
  }
  if (mr.truncated || mr.rows.size() != 7) return false;
  const std::string csv = manin_csv(mr);
  if (csv.empty()) return false;
  bool some_positive = false;
  for (const auto& r : mr.rows)
    if (r.d > 0 && r.total > 0 && r.ratio > 0) some_positive = true;
  std::printf("  trend (q=2): asymptotic ratio -> 1 not verifiable at desk scale\n");
  return some_positive;
}

}  // namespace

int main() {
  report(1, "Moebius partition of unity over {0,1,2}^7", c1());
  report(2, "torsor closed form = brute force, q in {2,3,5}; #T(F_2) = 72", c2());
  report(3, "section-count closed forms and bounds, >= 500 random instances", c3());
  report(4, "hom = n0+n1+n2 for all heights <= 6, q in {2,3}", c4());
  report(5, "Moebius formula = torsor oracle (<=3 at q=2, <=2 at q=3)", c5());
  report(6, "cleared-series polynomiality and closed forms on the grid", c6());
  report(7, "local closed forms, cancellation, appendix decomposition", c7());
  report(8, "Euler-factor identity; #X(F_2)=13, #X(F_3)=22 crosschecked", c8());
  report(9, "constant: two routes within tail bound at B=8, q=5", c9());
  report(10, "cones: ratio(0)=1, alpha=1/144, Monte-Carlo within 1%", c10());
  report(11, "trend report emits with positive ratios", c11());
  if (failures) std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  else std::printf("acceptance: all criteria passed\n");
  return failures ? 1 : 0;
}
