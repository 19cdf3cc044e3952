#include "coxcount/ff1.hpp"

#include <cassert>
#include <mutex>
#include <stdexcept>

namespace coxcount {

namespace {

// Monic polynomial arithmetic over F_q, coefficients low->high.
using Poly = std::vector<int>;

int pdeg(const Poly& p) {
  for (int k = (int)p.size() - 1; k >= 0; --k)
    if (p[k]) return k;
  return -1;
}

Poly ptrim(Poly p) {
  p.resize(pdeg(p) + 1);
  return p;
}

Poly pmul(const Poly& a, const Poly& b, long q) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (int)((c[i + j] + (long)a[i] * b[j]) % q);
  return c;
}

long inv_mod(long a, long q) {
  long r = 1, e = q - 2, base = a % q;
  while (e) {
    if (e & 1) r = r * base % q;
    base = base * base % q;
    e >>= 1;
  }
  return r;
}

// Remainder of a by monic-normalized b.
Poly pmod(Poly a, const Poly& b, long q) {
  const int db = pdeg(b);
  assert(db >= 0);
  const long lead_inv = inv_mod(b[db], q);
  int da = pdeg(a);
  while (da >= db) {
    const long f = (long)a[da] * lead_inv % q;
    for (int k = 0; k <= db; ++k)
      a[da - db + k] = (int)(((a[da - db + k] - f * b[k]) % q + q) % q);
    da = pdeg(a);
  }
  a.resize(db);
  return a;
}

Poly pgcd(Poly a, Poly b, long q) {
  a = ptrim(a);
  b = ptrim(b);
  while (pdeg(b) >= 0) {
    Poly r = pmod(a, b, q);
    a = b;
    b = ptrim(r);
  }
  // normalize monic
  const int d = pdeg(a);
  if (d >= 0) {
    const long f = inv_mod(a[d], q);
    for (auto& c : a) c = (int)((long)c * f % q);
  }
  return a;
}

std::vector<std::vector<Poly>> irreducibles_upto(long q, int max_degree) {
  static std::mutex mu;
  static std::map<long, std::vector<std::vector<Poly>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& table = cache[q];  // table[e] = monic irreducibles of degree e (e >= 1 at index e)
  if (table.empty()) table.resize(1);
  while ((int)table.size() <= max_degree) {
    const int e = (int)table.size();
    std::vector<Poly> irr;
    Poly p(e + 1, 0);
    p[e] = 1;
    while (true) {
      bool divisible = false;
      for (int f = 1; f <= e / 2 && !divisible; ++f)
        for (const Poly& d : table[f]) {
          if (pdeg(pmod(p, d, q)) < 0) { divisible = true; break; }
        }
      if (!divisible) irr.push_back(p);
      int k = 0;
      for (; k < e; ++k) {
        if (++p[k] < q) break;
        p[k] = 0;
      }
      if (k == e) break;
    }
    table.push_back(std::move(irr));
  }
  return table;
}

}  // namespace

std::vector<ClosedPoint> closed_points(const CurveContext& ctx, int max_degree) {
  std::vector<ClosedPoint> out{ClosedPoint::at_infinity()};
  const auto& table = irreducibles_upto(ctx.q, max_degree);
  for (int e = 1; e <= max_degree; ++e)
    for (const Poly& p : table[e]) out.push_back(ClosedPoint::finite(p));
  return out;
}

std::vector<EffectiveDivisor> effective_divisors(const CurveContext& ctx, int degree) {
  std::vector<EffectiveDivisor> out;
  if (degree < 0) return out;
  auto points = closed_points(ctx, degree == 0 ? 1 : degree);
  EffectiveDivisor cur;
  // Lexicographic recursion over the point list.
  auto rec = [&](auto&& self, size_t idx, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    if (idx == points.size()) return;
    const int pd = points[idx].degree();
    for (int m = 0; m * pd <= remaining; ++m) {
      if (m) cur.add(points[idx], 1);
      self(self, idx + 1, remaining - m * pd);
    }
    cur.add(points[idx], -cur.multiplicity(points[idx]));
  };
  rec(rec, 0, degree);
  return out;
}

EffectiveDivisor divisor_gcd(const std::vector<EffectiveDivisor>& ds) {
  if (ds.empty()) throw std::invalid_argument("divisor_gcd: empty list");
  EffectiveDivisor g;
  for (const auto& [p, m] : ds.front().mult) {
    int mn = m;
    for (size_t k = 1; k < ds.size(); ++k) mn = std::min(mn, ds[k].multiplicity(p));
    if (mn > 0) g.add(p, mn);
  }
  return g;
}

EffectiveDivisor divisor_sum(const std::vector<EffectiveDivisor>& ds) {
  EffectiveDivisor s;
  for (const auto& d : ds)
    for (const auto& [p, m] : d.mult) s.add(p, m);
  return s;
}

Section multiply(const CurveContext& ctx, const Section& a, const Section& b) {
  Section c;
  c.degree = a.degree + b.degree;
  c.coeffs.assign(c.degree + 1, 0);
  for (int i = 0; i <= a.degree; ++i)
    for (int j = 0; j <= b.degree; ++j)
      c.coeffs[i + j] = (int)((c.coeffs[i + j] + (long)a.coeffs[i] * b.coeffs[j]) % ctx.q);
  return c;
}

Section power(const CurveContext& ctx, const Section& a, long e) {
  Section r{0, {1}};
  for (long k = 0; k < e; ++k) r = multiply(ctx, r, a);
  return r;
}

Section section_of(const CurveContext& ctx, const EffectiveDivisor& d) {
  Section s{0, {1}};
  int inf_mult = 0;
  for (const auto& [p, m] : d.mult) {
    if (p.infinity) {
      inf_mult = m;
      continue;
    }
    Section f{(int)p.poly.size() - 1, p.poly};
    for (int k = 0; k < m; ++k) s = multiply(ctx, s, f);
  }
  // Each infinity factor multiplies by V: degree up, coefficients unchanged.
  s.degree += inf_mult;
  s.coeffs.resize(s.degree + 1, 0);
  return s;
}

EffectiveDivisor vanishing_divisor(const CurveContext& ctx, const Section& s) {
  if (s.is_zero()) throw std::invalid_argument("vanishing_divisor: zero form");
  EffectiveDivisor d;
  Poly p = ptrim(s.coeffs);
  const int inf_mult = s.degree - pdeg(p);
  if (inf_mult > 0) d.add(ClosedPoint::at_infinity(), inf_mult);
  // make monic
  {
    const long f = inv_mod(p[pdeg(p)], ctx.q);
    for (auto& c : p) c = (int)((long)c * f % ctx.q);
  }
  const auto& table = irreducibles_upto(ctx.q, std::max(1, pdeg(p)));
  for (int e = 1; pdeg(p) > 0; ++e) {
    assert(e <= (int)table.size());
    for (const Poly& irr : table[e]) {
      while (pdeg(p) >= e && pdeg(pmod(p, irr, ctx.q)) < 0) {
        // exact division
        Poly quot(pdeg(p) - e + 1, 0);
        Poly rem = p;
        for (int k = pdeg(rem); k >= e; k = pdeg(rem)) {
          quot[k - e] = rem[k];
          for (int t = 0; t <= e; ++t)
            rem[k - e + t] = (int)(((rem[k - e + t] - (long)rem[k] * irr[t]) % ctx.q + ctx.q) % ctx.q);
        }
        p = ptrim(quot);
        d.add(ClosedPoint::finite(irr), 1);
      }
      if (pdeg(p) == 0) break;
    }
  }
  return d;
}

int form_gcd_degree(const CurveContext& ctx, const std::vector<Section>& forms) {
  assert(!forms.empty());
  int inf = forms[0].degree - pdeg(forms[0].coeffs);
  Poly g = ptrim(forms[0].coeffs);
  for (size_t k = 1; k < forms.size(); ++k) {
    inf = std::min(inf, forms[k].degree - pdeg(forms[k].coeffs));
    g = pgcd(g, forms[k].coeffs, ctx.q);
  }
  return pdeg(g) + inf;
}

long kernel_count(const CurveContext& ctx, const std::vector<std::pair<Section, long>>& forms) {
  long common = -1;
  long cols = 0;
  for (const auto& [w, d] : forms) {
    if (d < 0) continue;
    if (w.is_zero()) throw std::invalid_argument("kernel_count: zero form");
    const long deg = w.degree + d;
    if (common < 0) common = deg;
    else if (common != deg) throw std::invalid_argument("kernel_count: degree mismatch");
    cols += d + 1;
  }
  if (cols == 0) return 0;
  // Matrix (common+1) x cols over F_q; column (j,k) is z^k * w_j.
  std::vector<std::vector<int>> m(common + 1, std::vector<int>(cols, 0));
  long col = 0;
  for (const auto& [w, d] : forms) {
    if (d < 0) continue;
    for (long k = 0; k <= d; ++k, ++col)
      for (int t = 0; t <= w.degree; ++t) m[k + t][col] = w.coeffs[t];
  }
  // rank via Gaussian elimination mod q
  long rank = 0;
  const long q = ctx.q;
  for (long c = 0; c < cols && rank <= common; ++c) {
    long piv = -1;
    for (long r = rank; r <= common; ++r)
      if (m[r][c]) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    const long f = inv_mod(m[rank][c], q);
    for (long k = c; k < cols; ++k) m[rank][k] = (int)((long)m[rank][k] * f % q);
    for (long r = 0; r <= common; ++r) {
      if (r == rank || !m[r][c]) continue;
      const long g = m[r][c];
      for (long k = c; k < cols; ++k)
        m[r][k] = (int)(((m[r][k] - g * m[rank][k]) % q + q) % q);
    }
    ++rank;
  }
  return cols - rank;
}

}  // namespace coxcount
