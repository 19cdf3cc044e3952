#include "coxcount/cones.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace coxcount::cones {

namespace {

Rat dot(const QVec& a, const QVec& b) {
  Rat s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

Rat factorial(int n) {
  Rat f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Determinant of the matrix with the given vertex rows.
Rat vertex_det(const std::vector<QVec>& V, const std::vector<int>& idx) {
  QMat m;
  for (int i : idx) m.push_back(V[i]);
  return det(m);
}

int affine_rank(const std::vector<QVec>& V, const std::vector<int>& idx) {
  if (idx.size() <= 1) return 0;
  QMat m;
  for (size_t k = 1; k < idx.size(); ++k) {
    QVec row = V[idx[k]];
    for (size_t c = 0; c < row.size(); ++c) row[c] -= V[idx[0]][c];
    m.push_back(row);
  }
  return rank(m);
}

// Triangulate the face spanned by idx (affine dimension adim) into
// (adim+1)-tuples of vertex indices, recursing through its facets.
void simplexify(const std::vector<QVec>& V, const HPolytope& P, std::vector<int> idx,
                int adim, std::vector<std::vector<int>>& out) {
  if ((int)idx.size() == adim + 1) {
    out.push_back(std::move(idx));
    return;
  }
  const int v0 = idx[0];
  std::set<std::vector<int>> facets;
  for (const auto& [a, b] : P.ineqs) {
    std::vector<int> tight;
    for (int i : idx)
      if (dot(a, V[i]) == b) tight.push_back(i);
    if (tight.size() == idx.size()) continue;
    if (std::find(tight.begin(), tight.end(), v0) != tight.end()) continue;
    if (affine_rank(V, tight) != adim - 1) continue;
    facets.insert(tight);
  }
  for (const auto& f : facets) {
    std::vector<std::vector<int>> sub;
    simplexify(V, P, f, adim - 1, sub);
    for (auto& s : sub) {
      s.insert(s.begin(), v0);
      out.push_back(std::move(s));
    }
  }
}

void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> c(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      fn(c);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      c[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

bool HPolytope::contains(const QVec& y) const {
  for (const auto& [a, b] : ineqs)
    if (dot(a, y) < b) return false;
  for (const auto& [a, b] : eqs)
    if (dot(a, y) != b) return false;
  return true;
}

std::vector<QVec> vertices(const HPolytope& P) {
  const int n = P.dim;
  const int ne = (int)P.eqs.size();
  const int pick = n - ne;
  std::vector<QVec> out;
  if (pick < 0) return out;
  combinations((int)P.ineqs.size(), pick, [&](const std::vector<int>& c) {
    QMat m;
    QVec b;
    for (const auto& [a, v] : P.eqs) {
      m.push_back(a);
      b.push_back(v);
    }
    for (int i : c) {
      m.push_back(P.ineqs[i].first);
      b.push_back(P.ineqs[i].second);
    }
    auto x = solve(m, b);
    if (!x) return;
    if (!P.contains(*x)) return;
    if (std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(*x);
  });
  return out;
}

bool is_bounded(const HPolytope& P) {
  // Nontrivial recession direction <=> the recession cone clipped to a box
  // has a nonzero vertex.
  HPolytope rec;
  rec.dim = P.dim;
  for (const auto& [a, b] : P.ineqs) rec.add_ineq(a, Rat(0));
  for (const auto& [a, b] : P.eqs) {
    rec.add_ineq(a, Rat(0));
    QVec neg = a;
    for (auto& c : neg) c = -c;
    rec.add_ineq(neg, Rat(0));
  }
  for (int k = 0; k < P.dim; ++k) {
    QVec e(P.dim, 0), f(P.dim, 0);
    e[k] = 1;
    f[k] = -1;
    rec.add_ineq(e, Rat(-1));
    rec.add_ineq(f, Rat(-1));
  }
  for (const auto& v : vertices(rec))
    for (const auto& c : v)
      if (c != 0) return false;
  return true;
}

Rat volume(const HPolytope& P) {
  if (P.eqs.size() != 1) throw std::runtime_error("volume needs exactly one equality");
  if (!is_bounded(P)) throw std::runtime_error("polytope is unbounded");
  const int n = P.dim;
  const auto V = vertices(P);
  std::vector<int> all(V.size());
  for (size_t k = 0; k < V.size(); ++k) all[k] = (int)k;
  if (affine_rank(V, all) < n - 1) return 0;
  std::vector<std::vector<int>> simp;
  simplexify(V, P, all, n - 1, simp);
  // Each hyperplane simplex spans a cone over the origin; the equality form
  // scales the quotient measure.
  Rat vol = 0;
  for (const auto& s : simp) {
    Rat d = vertex_det(V, s);
    if (d < 0) d = -d;
    vol += d;
  }
  Rat b = P.eqs[0].second;
  if (b == 0) throw std::runtime_error("equality level must be nonzero");
  if (b < 0) b = -b;
  return vol / (factorial(n - 1) * b);
}

double mc_volume(const HPolytope& P, long samples, unsigned seed) {
  if (P.eqs.size() != 1) throw std::runtime_error("volume needs exactly one equality");
  const int n = P.dim;
  const auto& [c, level] = P.eqs[0];
  int k0 = -1;
  for (int k = 0; k < n; ++k)
    if (c[k] != 0) k0 = k;
  const auto V = vertices(P);
  if (V.empty()) return 0;
  std::vector<double> lo(n, 1e300), hi(n, -1e300);
  for (const auto& v : V)
    for (int k = 0; k < n; ++k) {
      lo[k] = std::min(lo[k], v[k].get_d());
      hi[k] = std::max(hi[k], v[k].get_d());
    }
  double box = 1;
  for (int k = 0; k < n; ++k)
    if (k != k0) box *= std::max(hi[k] - lo[k], 0.0);
  if (box == 0) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  long hits = 0;
  std::vector<double> x(n);
  std::vector<std::pair<std::vector<double>, double>> di;
  for (const auto& [a, b] : P.ineqs) {
    std::vector<double> ad(n);
    for (int k = 0; k < n; ++k) ad[k] = a[k].get_d();
    di.push_back({ad, b.get_d()});
  }
  std::vector<double> cd(n);
  for (int k = 0; k < n; ++k) cd[k] = c[k].get_d();
  for (long s = 0; s < samples; ++s) {
    double acc = level.get_d();
    for (int k = 0; k < n; ++k) {
      if (k == k0) continue;
      x[k] = lo[k] + (hi[k] - lo[k]) * uni(rng);
      acc -= cd[k] * x[k];
    }
    x[k0] = acc / cd[k0];
    bool ok = true;
    for (const auto& [a, b] : di) {
      double v = 0;
      for (int k = 0; k < n; ++k) v += a[k] * x[k];
      if (v < b - 1e-12) { ok = false; break; }
    }
    if (ok) ++hits;
  }
  return box * (double)hits / (double)samples / std::abs(cd[k0]);
}

HPolytope dual_cone_section(const CoxPresentation& cox) {
  HPolytope P;
  P.dim = cox.picard_rank;
  for (const auto& g : cox.effective_cone) {
    const auto co = cox.dual_coords(g);
    QVec a(P.dim);
    for (int k = 0; k < P.dim; ++k) a[k] = Rat(co[k]);
    P.add_ineq(std::move(a), Rat(0));
  }
  const auto kk = cox.dual_coords(anticanonical(cox));
  QVec a(P.dim);
  for (int k = 0; k < P.dim; ++k) a[k] = Rat(kk[k]);
  P.add_eq(std::move(a), Rat(1));
  if (!is_bounded(P))
    throw std::runtime_error("anticanonical section is unbounded");
  return P;
}

namespace {

std::pair<QVec, Rat> lambda_cut(const CoxPresentation& cox, const AdmissibleChoice& ch,
                                int j0, const Rat& lambda) {
  PicClass sum = PicClass::zero(cox.picard_rank);
  for (int j = 0; j < (int)ch.linear.size(); ++j)
    if (j != j0) sum += cox.classes[ch.linear[j]];
  const auto gsum = cox.dual_coords(sum);
  const auto dtot = cox.dual_coords(cox.degree_total());
  QVec a(cox.picard_rank);
  for (int k = 0; k < cox.picard_rank; ++k)
    a[k] = (Rat(1) - lambda) * Rat(gsum[k]) - Rat(dtot[k]);
  return {a, Rat(0)};
}

}  // namespace

HPolytope c_lambda(const CoxPresentation& cox, const AdmissibleChoice& ch, int j0,
                   const Rat& lambda) {
  HPolytope P = dual_cone_section(cox);
  auto [a, b] = lambda_cut(cox, ch, j0, lambda);
  P.add_ineq(std::move(a), std::move(b));
  return P;
}

Rat union_volume(const HPolytope& base, const std::vector<std::pair<QVec, Rat>>& cuts) {
  // Deduplicate up to positive scaling: normalize by the first nonzero
  // coefficient's absolute value.
  std::vector<std::pair<QVec, Rat>> uniq;
  for (auto cut : cuts) {
    Rat lead = 0;
    for (const auto& c : cut.first)
      if (c != 0) { lead = c < 0 ? -c : c; break; }
    if (lead != 0) {
      for (auto& c : cut.first) c /= lead;
      cut.second /= lead;
    }
    if (std::find(uniq.begin(), uniq.end(), cut) == uniq.end()) uniq.push_back(cut);
  }
  const size_t m = uniq.size();
  std::vector<char> empty(1u << m, 0);
  Rat total = 0;
  for (uint32_t S = 1; S < (1u << m); ++S) {
    bool skip = false;
    for (size_t k = 0; k < m && !skip; ++k)
      if ((S >> k & 1) && empty[S & ~(1u << k)] && (S & ~(1u << k))) skip = true;
    if (skip) {
      empty[S] = 1;
      continue;
    }
    HPolytope inter = base;
    for (size_t k = 0; k < m; ++k)
      if (S >> k & 1) inter.add_ineq(uniq[k].first, uniq[k].second);
    const Rat v = volume(inter);
    if (v == 0) empty[S] = 1;
    total += (std::popcount(S) % 2 ? v : -v);
  }
  return total;
}

CoverageRow coverage_ratio(const CoxPresentation& cox, const Rat& lambda,
                           bool all_labelings) {
  const HPolytope base = dual_cone_section(cox);
  std::vector<std::pair<QVec, Rat>> cuts;
  for (const auto& ch : admissible_choices(cox)) {
    const int nJ = (int)ch.linear.size();
    for (int j0 = 0; j0 < (all_labelings ? nJ : 1); ++j0)
      cuts.push_back(lambda_cut(cox, ch, j0, lambda));
  }
  CoverageRow row;
  row.lambda = lambda;
  row.vol_full = volume(base);
  row.vol_covered = union_volume(base, cuts);
  row.ratio = row.vol_full == 0 ? Rat(0) : row.vol_covered / row.vol_full;
  return row;
}

std::vector<CoverageRow> coverage_table(const CoxPresentation& cox,
                                        const std::vector<Rat>& grid, bool all_labelings) {
  std::vector<CoverageRow> rows;
  for (const auto& l : grid) rows.push_back(coverage_ratio(cox, l, all_labelings));
  return rows;
}

Rat coverage_sup(const CoxPresentation& cox, const std::vector<Rat>& grid) {
  Rat best = 0;
  for (const auto& l : grid) {
    const Rat r = coverage_ratio(cox, l).ratio;
    if (r > best) best = r;
  }
  return best;
}

std::string coverage_csv(const std::string& surface, const std::vector<CoverageRow>& rows) {
  std::ostringstream os;
  os << "surface,lambda,vol_full,vol_covered,ratio\n";
  for (const auto& r : rows)
    os << surface << "," << r.lambda << "," << r.vol_full << "," << r.vol_covered << ","
       << r.ratio << "\n";
  return os.str();
}

Rat boundary_distance(const Region& R, const QVec& y) {
  // Squared distances compare exactly; the root is taken exactly when the
  // ratio is a perfect square and approximated otherwise.
  // For a union: the distance is at least the best single-piece clearance.
  bool inside = false;
  Rat best2 = 0;
  for (const auto& P : R) {
    if (!P.contains(y)) continue;
    bool have = false;
    Rat piece2 = 0;
    for (const auto& [a, b] : P.ineqs) {
      Rat n2 = 0;
      for (const auto& c : a) n2 += c * c;
      if (n2 == 0) continue;
      const Rat diff = dot(a, y) - b;
      const Rat d2 = diff * diff / n2;
      if (!have || d2 < piece2) {
        piece2 = d2;
        have = true;
      }
    }
    if (!have) continue;
    inside = true;
    if (piece2 > best2) best2 = piece2;
  }
  if (!inside) return 0;
  const Int num = best2.get_num(), den = best2.get_den();
  Int rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  if (rn * rn == num && rd * rd == den) return Rat(rn) / Rat(rd);
  const double approx = std::sqrt(best2.get_d());
  return Rat(approx);
}

}  // namespace coxcount::cones
