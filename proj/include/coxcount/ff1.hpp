#pragma once

#include <compare>
#include <map>
#include <vector>

#include "coxcount/linalg.hpp"

namespace coxcount {

// P^1 over a prime field F_q.
struct CurveContext {
  long q;
  explicit CurveContext(long q_) : q(q_) {}
};

// Either the point at infinity or a monic irreducible polynomial over F_q
// (coefficients low->high, leading coefficient 1, in the affine coordinate).
struct ClosedPoint {
  bool infinity = false;
  std::vector<int> poly;  // empty when infinity

  int degree() const { return infinity ? 1 : (int)poly.size() - 1; }
  auto operator<=>(const ClosedPoint&) const = default;

  static ClosedPoint at_infinity() { return {true, {}}; }
  static ClosedPoint finite(std::vector<int> p) { return {false, std::move(p)}; }
};

struct EffectiveDivisor {
  std::map<ClosedPoint, int> mult;

  int degree() const {
    int d = 0;
    for (const auto& [p, m] : mult) d += p.degree() * m;
    return d;
  }
  int multiplicity(const ClosedPoint& p) const {
    auto it = mult.find(p);
    return it == mult.end() ? 0 : it->second;
  }
  bool squarefree() const {
    for (const auto& [p, m] : mult)
      if (m > 1) return false;
    return true;
  }
  void add(const ClosedPoint& p, int m = 1) {
    if (m != 0 && (mult[p] += m) == 0) mult.erase(p);
  }
  auto operator<=>(const EffectiveDivisor&) const = default;
};

// Binary form of degree d: coeffs[k] multiplies U^k V^(d-k), so the affine
// dehomogenization is the polynomial sum coeffs[k] z^k and the multiplicity of
// infinity is d minus its degree. The zero form has all coefficients zero.
struct Section {
  int degree = 0;
  std::vector<int> coeffs;  // length degree+1

  bool is_zero() const {
    for (int c : coeffs)
      if (c) return false;
    return true;
  }
};

inline long h0(long d) { return d >= 0 ? d + 1 : 0; }

std::vector<ClosedPoint> closed_points(const CurveContext& ctx, int max_degree);
std::vector<EffectiveDivisor> effective_divisors(const CurveContext& ctx, int degree);

EffectiveDivisor divisor_gcd(const std::vector<EffectiveDivisor>& ds);
EffectiveDivisor divisor_sum(const std::vector<EffectiveDivisor>& ds);

Section section_of(const CurveContext& ctx, const EffectiveDivisor& d);
EffectiveDivisor vanishing_divisor(const CurveContext& ctx, const Section& s);

Section multiply(const CurveContext& ctx, const Section& a, const Section& b);
Section power(const CurveContext& ctx, const Section& a, long e);

// Degree of gcd of nonzero forms as a divisor degree (counts infinity).
int form_gcd_degree(const CurveContext& ctx, const std::vector<Section>& forms);

// Dimension kappa of the solution space {(t_j) : sum t_j w_j = 0} where t_j
// ranges over forms of degree d_j (d_j = -1 means the zero space). All nonzero
// products t_j w_j must share one degree.
long kernel_count(const CurveContext& ctx, const std::vector<std::pair<Section, long>>& forms);

}  // namespace coxcount
