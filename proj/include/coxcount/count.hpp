#pragma once

#include <string>
#include <vector>

#include "coxcount/ff1.hpp"
#include "coxcount/moebius.hpp"
#include "coxcount/surface.hpp"

namespace coxcount::count {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degree vector in the dual basis of the default choice's {F_i}.
using YVec = std::vector<Int>;

// #T_{X,e}(F_q) / q^{dim T_X} by the closed product formula.
Rat torsor_count_closed(const CoxPresentation& cox, uint32_t e_mask, long q);
// Literal enumeration of tuples with the masked coordinates zero.
Int torsor_count_brute(const CoxPresentation& cox, uint32_t e_mask, long q,
                       long budget = 20'000'000);

// #X(F_{qv}) recovered from the mu-weighted torsor counts; qv may be any
// prime power. Throws when the inversion is not a nonnegative integer.
Int surface_point_count(const CoxPresentation& cox, long qv);

// The combined divisor G_j + sum_{i in I_j} b_{i,j} D_i.
EffectiveDivisor combined_divisor(const AdmissibleChoice& ch, int j,
                                  const std::vector<EffectiveDivisor>& G,
                                  const std::vector<EffectiveDivisor>& D);

// phi/psi per distinguished index (dim X = 2 only) plus their common sum.
struct SectionData {
  std::vector<long> phi, psi;
  long theta = 0;
};
SectionData phi_psi_theta(const CoxPresentation& cox, const AdmissibleChoice& ch,
                          const YVec& y, const std::vector<EffectiveDivisor>& G,
                          const std::vector<EffectiveDivisor>& D);

// Section counts N (all tuples), N_* (all components nonzero), N_{j0}
// (component j0 zero), from exact kernel dimensions. When the phi/psi
// thresholds hold the closed forms are asserted against the kernel values.
struct SectionCounts {
  Int N = 0, Nstar = 0;
  std::vector<Int> Nj0;
};
SectionCounts count_sections(const CoxPresentation& cox, const AdmissibleChoice& ch,
                             long q, const YVec& y,
                             const std::vector<EffectiveDivisor>& G,
                             const std::vector<EffectiveDivisor>& D);

// Sum over divisor tuples D of exact degree d of nu * q^{deg gcd}.
Int M_sum(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
          const std::vector<int>& d, const std::vector<EffectiveDivisor>& G,
          long budget = 20'000'000);
// |nu|-weighted variant with the eta-weighted secondary gcd.
double M_j0_eta(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
                const std::vector<int>& d, const std::vector<EffectiveDivisor>& G,
                int j0, const Rat& eta, long budget = 20'000'000);
// Independent route: coefficient of t^d in the product of local series.
Rat M_sum_via_euler(const MoebiusTable& mt, const AdmissibleChoice& ch, long q,
                    const std::vector<int>& d, const std::vector<EffectiveDivisor>& G);

bool in_dual_cone(const CoxPresentation& cox, const YVec& y);

// #Hom_{X_0}(P^1, X, y)(F_q) by the lifted Moebius sum.
Int hom_count(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
              const YVec& y, long budget = 50'000'000);
// Direct torsor enumeration over tuples of binary forms; the oracle.
Int hom_count_oracle(const CoxPresentation& cox, long q, const YVec& y,
                     long budget = 50'000'000);

struct NTerms {
  Rat n0 = 0, n1 = 0, n2 = 0;
};
NTerms n_terms(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
               const YVec& y, long budget = 50'000'000);
// Second route for n0 through the M-sums.
Rat n0_via_M(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
             const YVec& y, long budget = 50'000'000);

// Number of closed points of P^1 over F_q of given degree.
long closed_point_count(long q, int degree);

// Exact local Euler factor sum_g H_g(qv, 1/qv) qv^{-|g|}.
Rat euler_factor(const MoebiusTable& mt, const AdmissibleChoice& ch, long qv);

struct GammaReport {
  double value = 0;
  double tail_bound = 0;            // bound on |log| of the omitted tail
  std::vector<double> partials;     // partial product per degree cutoff
};
// Truncated Euler product from the local point counts.
GammaReport gamma_truncated(const CoxPresentation& cox, long q, int B);
// Same constant through the local H-series evaluations.
GammaReport gamma_via_cprinc(const CoxPresentation& cox, long q, int B);

struct CountRecord {
  YVec y;
  Int hom = 0;
  Rat n0 = 0, n1 = 0, n2 = 0;
  double predicted = 0;
  double ratio = 0;
  bool has_oracle = false;
  Int oracle = 0;
};
std::vector<YVec> lattice_points_at_height(const CoxPresentation& cox, long s);
struct RecordsReport {
  std::vector<CountRecord> records;
  bool truncated = false;  // budget hit; remaining rows omitted
};
RecordsReport count_records(const CoxPresentation& cox, const AdmissibleChoice& ch,
                            long q, long bound, double gamma, bool with_oracle,
                            long budget = 50'000'000, int jobs = 1);
std::string records_csv(const RecordsReport& rep);

struct ManinRow {
  long d = 0;
  Int total = 0;
  double predicted = 0;
  double ratio = 0;
};
struct ManinReport {
  std::vector<ManinRow> rows;
  bool truncated = false;  // budget hit; remaining rows omitted
};
ManinReport manin_report(const CoxPresentation& cox, const AdmissibleChoice& ch, long q,
                         int d_max, double alpha, double gamma,
                         long budget = 50'000'000, int jobs = 1);
std::string manin_csv(const ManinReport& rep);

std::vector<EffectiveDivisor> squarefree_divisors(const CurveContext& ctx, int max_degree);

}  // namespace coxcount::count
