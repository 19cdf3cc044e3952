#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "coxcount/cones.hpp"
#include "fixtures.hpp"

using namespace coxcount;
using namespace coxcount::cones;

// {x >= 0, sum c_i x_i = b} as an HPolytope.
static HPolytope simplex(const std::vector<long>& c, long b = 1) {
  HPolytope P;
  P.dim = (int)c.size();
  for (int k = 0; k < P.dim; ++k) {
    QVec e(P.dim, 0);
    e[k] = 1;
    P.add_ineq(std::move(e), Rat(0));
  }
  QVec a(P.dim);
  for (int k = 0; k < P.dim; ++k) a[k] = Rat(c[k]);
  P.add_eq(std::move(a), Rat(b));
  return P;
}

TEST_CASE("standard simplex volumes") {
  for (int d = 2; d <= 6; ++d) {
    std::vector<long> ones(d, 1);
    Rat fact = 1;
    for (int k = 2; k <= d - 1; ++k) fact *= k;
    CHECK(volume(simplex(ones)) == Rat(1) / fact);
  }
}

TEST_CASE("scaled simplex volumes") {
  // {x >= 0, sum c_i x_i = 1} has volume 1/((d-1)! prod c_i).
  CHECK(volume(simplex({2, 2, 2, 3})) == Rat(1, 144));
  CHECK(volume(simplex({1, 2, 3})) == Rat(1, 12));
  CHECK(volume(simplex({5, 7})) == Rat(1, 35));
  // Level b scales by b^{d-1}.
  CHECK(volume(simplex({1, 1, 1}, 2)) == Rat(2));
  CHECK(volume(simplex({2, 3}, 6)) == Rat(1));
}

TEST_CASE("cube section and vertex enumeration") {
  // [0,1]^3 cut by x+y+z = 3/2: a regular hexagon with 6 vertices.
  HPolytope P;
  P.dim = 3;
  for (int k = 0; k < 3; ++k) {
    QVec e(3, 0), f(3, 0);
    e[k] = 1;
    f[k] = -1;
    P.add_ineq(std::move(e), Rat(0));
    P.add_ineq(std::move(f), Rat(-1));
  }
  P.add_eq(QVec{1, 1, 1}, Rat(3, 2));
  auto V = vertices(P);
  CHECK(V.size() == 6);
  // Prism volume between levels: total cube volume 1 = integral over levels,
  // and by symmetry the middle level has the largest section.  Exact value:
  // the hexagon section has Leray volume 3/4 here.
  CHECK(volume(P) == Rat(3, 4));
}

TEST_CASE("boundedness detection") {
  HPolytope P;
  P.dim = 2;
  P.add_ineq(QVec{1, 0}, Rat(0));
  P.add_eq(QVec{1, 0}, Rat(1));  // {x = 1, y free}
  CHECK(!is_bounded(P));
  CHECK_THROWS(volume(P));
  P.add_ineq(QVec{0, 1}, Rat(0));
  P.add_ineq(QVec{0, -1}, Rat(-2));
  CHECK(is_bounded(P));
  CHECK(volume(P) == Rat(2));
}

TEST_CASE("unimodular change of basis preserves volume") {
  HPolytope P = simplex({1, 2, 3});
  // x -> U x with det U = 1 maps ineq (a, b) to (U^T a, b).
  const std::vector<std::vector<long>> Ut = {{1, 0, 1}, {2, 1, 3}, {0, 0, 1}};
  HPolytope Q;
  Q.dim = 3;
  auto apply = [&](const QVec& a) {
    QVec out(3, 0);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out[r] += Rat(Ut[r][c]) * a[c];
    return out;
  };
  for (const auto& [a, b] : P.ineqs) Q.add_ineq(apply(a), b);
  for (const auto& [a, b] : P.eqs) Q.add_eq(apply(a), b);
  CHECK(volume(Q) == volume(P));
}

TEST_CASE("sextic anticanonical section") {
  CoxPresentation cox = builtin_sextic_a1();
  HPolytope P = dual_cone_section(cox);
  auto V = vertices(P);
  CHECK(V.size() == 4);
  std::vector<QVec> want = {
      {Rat(1, 2), 0, 0, 0}, {0, Rat(1, 2), 0, 0}, {0, 0, Rat(1, 2), 0}, {0, 0, 0, Rat(1, 3)}};
  for (const auto& w : want) CHECK(std::find(V.begin(), V.end(), w) != V.end());
  CHECK(volume(P) == Rat(1, 144));  // alpha(X)
}

TEST_CASE("monte carlo agrees with exact volume") {
  CoxPresentation cox = builtin_sextic_a1();
  HPolytope P = dual_cone_section(cox);
  const double exact = volume(P).get_d();
  const double mc = mc_volume(P, 1000000, 12345);
  CHECK(std::abs(mc - exact) < 0.01 * exact);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + (int)(rng() % 3);
    std::vector<long> c(d);
    for (auto& v : c) v = 1 + rng() % 5;
    HPolytope S = simplex(c);
    const double ex = volume(S).get_d();
    const double est = mc_volume(S, 1000000, 1000 + trial);
    CHECK(std::abs(est - ex) < 0.01 * ex);
  }
}

TEST_CASE("union volume by inclusion-exclusion") {
  HPolytope base = simplex({1, 1});  // segment from (1,0) to (0,1), length measure 1
  SUBCASE("duplicate and scaled cuts collapse") {
    // x >= y listed three times at different scales.
    std::vector<std::pair<QVec, Rat>> cuts = {
        {{1, -1}, 0}, {{2, -2}, 0}, {{Rat(1, 2), Rat(-1, 2)}, 0}};
    CHECK(union_volume(base, cuts) == Rat(1, 2));
  }
  SUBCASE("two halves cover the whole") {
    std::vector<std::pair<QVec, Rat>> cuts = {{{1, -1}, 0}, {{-1, 1}, 0}};
    CHECK(union_volume(base, cuts) == volume(base));
  }
  SUBCASE("empty cut contributes nothing") {
    std::vector<std::pair<QVec, Rat>> cuts = {{{1, -1}, 0}, {{1, 1}, 5}};
    CHECK(union_volume(base, cuts) == Rat(1, 2));
  }
}

TEST_CASE("lambda cuts and coverage") {
  CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  HPolytope base = dual_cone_section(cox);
  const Rat full = volume(base);

  SUBCASE("lambda = 0 covers the whole section") {
    auto row = coverage_ratio(cox, Rat(0));
    CHECK(row.vol_full == full);
    CHECK(row.ratio == Rat(1));
    // Even a single piece suffices at lambda = 0: the cut <y, G_1+G_2-D_tot>
    // is y_3 + y_4 >= 0, slack on the whole section.
    CHECK(volume(c_lambda(cox, ch, 0, Rat(0))) == full);
  }

  SUBCASE("small lambda gives a proper nonempty piece") {
    const Rat v = volume(c_lambda(cox, ch, 0, Rat(1, 10)));
    CHECK(v > 0);
    CHECK(v < full);
  }

  SUBCASE("coverage is non-increasing and dies at lambda = 1") {
    std::vector<Rat> grid = {Rat(0), Rat(1, 10), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
    auto rows = coverage_table(cox, grid);
    REQUIRE(rows.size() == grid.size());
    for (size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].ratio <= rows[k - 1].ratio);
    CHECK(rows.front().ratio == Rat(1));
    CHECK(rows.back().ratio == Rat(0));
    CHECK(coverage_sup(cox, grid) == Rat(1));
  }

  SUBCASE("complement crosscheck") {
    // covered + (intersection of the complements) = full, up to boundary.
    const Rat lambda(1, 2);
    std::vector<std::pair<QVec, Rat>> cuts;
    for (const auto& c : admissible_choices(cox))
      for (int j0 = 0; j0 < (int)c.linear.size(); ++j0) {
        HPolytope piece = c_lambda(cox, c, j0, lambda);
        cuts.push_back(piece.ineqs.back());
      }
    const Rat covered = union_volume(base, cuts);
    HPolytope comp = base;
    for (const auto& [a, b] : cuts) {
      QVec neg = a;
      for (auto& v : neg) v = -v;
      comp.add_ineq(std::move(neg), -b);
    }
    CHECK(covered + volume(comp) == full);
    auto row = coverage_ratio(cox, lambda);
    CHECK(row.vol_covered == covered);
  }

  SUBCASE("csv shape") {
    auto rows = coverage_table(cox, {Rat(0)});
    auto csv = coverage_csv("sextic_a1", rows);
    CHECK(csv.rfind("surface,lambda,vol_full,vol_covered,ratio\n", 0) == 0);
    CHECK(csv.find("sextic_a1,0,") != std::string::npos);
  }
}

TEST_CASE("unbounded section is rejected") {
  CoxPresentation cox = builtin_sextic_a1();
  cox.effective_cone.pop_back();  // drop the lambda generator
  CHECK_THROWS(dual_cone_section(cox));
}

TEST_CASE("boundary distance") {
  // Positive quadrant in the plane.
  HPolytope quad;
  quad.dim = 2;
  quad.add_ineq(QVec{1, 0}, Rat(0));
  quad.add_ineq(QVec{0, 1}, Rat(0));
  Region R = {quad};
  CHECK(boundary_distance(R, {1, 1}) == Rat(1));
  CHECK(boundary_distance(R, {3, 4}) == Rat(3));
  CHECK(boundary_distance(R, {0, 5}) == Rat(0));
  CHECK(boundary_distance(R, {-1, 2}) == Rat(0));

  // Irrational distance: halfplane x + y >= 0, point (1,1) at distance sqrt 2.
  HPolytope half;
  half.dim = 2;
  half.add_ineq(QVec{1, 1}, Rat(0));
  const double d = boundary_distance({half}, {1, 1}).get_d();
  CHECK(std::abs(d - std::sqrt(2.0)) < 1e-9);

  // Union: overlapping quadrants give the larger clearance.
  HPolytope shift;
  shift.dim = 2;
  shift.add_ineq(QVec{1, 0}, Rat(-2));
  shift.add_ineq(QVec{0, 1}, Rat(-2));
  Region U = {quad, shift};
  CHECK(boundary_distance(U, {1, 1}) == Rat(3));
}
