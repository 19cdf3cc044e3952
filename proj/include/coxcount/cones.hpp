#pragma once

#include <string>
#include <vector>

#include "coxcount/surface.hpp"

namespace coxcount::cones {

// Intersection of rational halfspaces a.x >= b with optional equalities.
struct HPolytope {
  int dim = 0;
  std::vector<std::pair<QVec, Rat>> ineqs;
  std::vector<std::pair<QVec, Rat>> eqs;

  void add_ineq(QVec a, Rat b) { ineqs.push_back({std::move(a), std::move(b)}); }
  void add_eq(QVec a, Rat b) { eqs.push_back({std::move(a), std::move(b)}); }
  bool contains(const QVec& y) const;
};

using Region = std::vector<HPolytope>;

// All vertices by solving the maximal-rank active subsystems.
std::vector<QVec> vertices(const HPolytope& P);

bool is_bounded(const HPolytope& P);

// Exact volume of P lying in its single equality hyperplane c.x = b,
// normalized so the lattice measure equals the hyperplane measure times
// d(c.x): the standard simplex {x >= 0, sum c_i x_i = 1} has volume
// 1/((d-1)! prod c_i).
Rat volume(const HPolytope& P);

// Monte-Carlo rejection estimate of the same volume (test oracle).
double mc_volume(const HPolytope& P, long samples, unsigned seed);

// {y : <y, g> >= 0 for the cone generators, <y, -K> = 1}.
HPolytope dual_cone_section(const CoxPresentation& cox);

// Section cut by <y, (1-lambda)(G_{j1}+G_{j2}) - D_tot> >= 0.
HPolytope c_lambda(const CoxPresentation& cox, const AdmissibleChoice& ch, int j0,
                   const Rat& lambda);

// Union volume by inclusion-exclusion over the added halfspaces.
Rat union_volume(const HPolytope& base, const std::vector<std::pair<QVec, Rat>>& cuts);

struct CoverageRow {
  Rat lambda;
  Rat vol_full, vol_covered, ratio;
};
// Vol(P_lambda section) / Vol(section), union over all admissible choices
// and all labelings of the distinguished index.
CoverageRow coverage_ratio(const CoxPresentation& cox, const Rat& lambda,
                           bool all_labelings = true);
std::vector<CoverageRow> coverage_table(const CoxPresentation& cox,
                                        const std::vector<Rat>& grid,
                                        bool all_labelings = true);
Rat coverage_sup(const CoxPresentation& cox, const std::vector<Rat>& grid);
std::string coverage_csv(const std::string& surface, const std::vector<CoverageRow>& rows);

// Euclidean distance from y to the boundary of the region (0 outside).
Rat boundary_distance(const Region& R, const QVec& y);

}  // namespace coxcount::cones
