#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "coxcount/ff1.hpp"

using namespace coxcount;

static Int zeta_count(long q, int d) {
  // Number of effective divisors of degree d on P^1: (q^{d+1}-1)/(q-1).
  Int num = 1;
  for (int k = 0; k <= d; ++k) num *= q;
  return (num - 1) / (q - 1);
}

TEST_CASE("closed points") {
  CurveContext ctx(2);
  auto pts = closed_points(ctx, 3);
  int by_deg[4] = {0, 0, 0, 0};
  for (const auto& p : pts) by_deg[p.degree()]++;
  CHECK(by_deg[1] == 3);  // infinity, z, z+1
  CHECK(by_deg[2] == 1);  // z^2+z+1
  CHECK(by_deg[3] == 2);
}

TEST_CASE("effective divisor counts match the zeta function") {
  for (long q : {2L, 3L})
    for (int d = 0; d <= 4; ++d) {
      CurveContext ctx(q);
      CHECK(Int((long)effective_divisors(ctx, d).size()) == zeta_count(q, d));
    }
}

TEST_CASE("section and vanishing divisor round-trip") {
  for (long q : {2L, 3L, 5L}) {
    CurveContext ctx(q);
    for (int d = 0; d <= 4; ++d)
      for (const auto& dv : effective_divisors(ctx, d)) {
        Section s = section_of(ctx, dv);
        CHECK(s.degree == d);
        CHECK(vanishing_divisor(ctx, s) == dv);
      }
  }
}

TEST_CASE("vanishing divisor of a scaled form") {
  CurveContext ctx(5);
  Section s{3, {2, 0, 0, 3}};  // 2 V^3 + 3 U^3
  auto dv = vanishing_divisor(ctx, s);
  CHECK(dv.degree() == 3);
  Section back = section_of(ctx, dv);
  auto dv2 = vanishing_divisor(ctx, back);
  CHECK(dv == dv2);
}

TEST_CASE("gcd degree") {
  CurveContext ctx(2);
  Section a{2, {0, 1, 0}};  // U V
  Section b{2, {0, 0, 1}};  // U^2
  CHECK(form_gcd_degree(ctx, {a, b}) == 1);
  Section c{2, {1, 0, 0}};  // V^2
  CHECK(form_gcd_degree(ctx, {a, c}) == 1);  // share the infinity zero
  CHECK(form_gcd_degree(ctx, {b, c}) == 0);
  CHECK(form_gcd_degree(ctx, {a}) == 2);
}

TEST_CASE("divisor gcd and sum") {
  CurveContext ctx(3);
  EffectiveDivisor d1, d2;
  d1.add(ClosedPoint::at_infinity(), 2);
  d1.add(ClosedPoint::finite({0, 1}), 1);
  d2.add(ClosedPoint::at_infinity(), 1);
  d2.add(ClosedPoint::finite({1, 1}), 3);
  auto g = divisor_gcd({d1, d2});
  CHECK(g.degree() == 1);
  CHECK(g.multiplicity(ClosedPoint::at_infinity()) == 1);
  CHECK(divisor_sum({d1, d2}).degree() == 7);
}

// Brute-force the kernel dimension by enumerating all coefficient tuples.
static long kernel_brute(const CurveContext& ctx,
                         const std::vector<std::pair<Section, long>>& forms) {
  std::vector<long> dims;
  long total = 1;
  for (const auto& [w, d] : forms) {
    if (d < 0) continue;
    dims.push_back(d + 1);
    for (long k = 0; k <= d; ++k) total *= ctx.q;
  }
  long common = -1;
  for (const auto& [w, d] : forms)
    if (d >= 0) common = w.degree + d;
  long solutions = 0;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> acc(common + 1, 0);
    for (const auto& [w, d] : forms) {
      if (d < 0) continue;
      for (long k = 0; k <= d; ++k) {
        const int coef = (int)(c % ctx.q);
        c /= ctx.q;
        if (!coef) continue;
        for (int t = 0; t <= w.degree; ++t)
          acc[k + t] = (int)((acc[k + t] + (long)coef * w.coeffs[t]) % ctx.q);
      }
    }
    bool zero = true;
    for (int v : acc)
      if (v) zero = false;
    if (zero) ++solutions;
  }
  long kappa = 0;
  while (solutions > 1) {
    solutions /= ctx.q;
    ++kappa;
  }
  return kappa;
}

TEST_CASE("kernel dimension vs brute force") {
  std::mt19937 rng(20240817);
  int done = 0;
  while (done < 220) {
    const long q = (rng() % 2) ? 2 : 3;
    CurveContext ctx(q);
    const int nforms = 2 + (int)(rng() % 2);
    const int common = 2 + (int)(rng() % 3);
    std::vector<std::pair<Section, long>> forms;
    bool ok = true;
    for (int j = 0; j < nforms; ++j) {
      const int dw = (int)(rng() % (common + 1));
      Section w{dw, std::vector<int>(dw + 1, 0)};
      for (int k = 0; k <= dw; ++k) w.coeffs[k] = (int)(rng() % q);
      if (w.is_zero()) { ok = false; break; }
      forms.emplace_back(w, common - dw);
    }
    if (!ok) continue;
    CHECK(kernel_count(ctx, forms) == kernel_brute(ctx, forms));
    ++done;
  }
}

TEST_CASE("kernel degree mismatch raises") {
  CurveContext ctx(2);
  Section w{1, {1, 0}};
  CHECK_THROWS(kernel_count(ctx, {{w, 1}, {w, 2}}));
}
