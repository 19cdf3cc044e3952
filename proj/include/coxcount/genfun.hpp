#pragma once

#include <map>
#include <string>
#include <vector>

#include "coxcount/moebius.hpp"
#include "coxcount/surface.hpp"

namespace coxcount::genfun {

// Exponent key layout: [rho, tau, t_0, ..., t_{nt-1}].
using Expo = std::vector<int>;

struct MultiPoly {
  int nt = 0;
  std::map<Expo, Int> terms;

  explicit MultiPoly(int nt_ = 0) : nt(nt_) {}
  static MultiPoly one(int nt) {
    MultiPoly p(nt);
    p.terms[Expo(2 + nt, 0)] = 1;
    return p;
  }
  static MultiPoly monomial(int nt, int rho, int tau, const std::vector<int>& t, Int c = 1);

  void add_term(const Expo& e, const Int& c);
  bool is_zero() const { return terms.empty(); }
  bool operator==(const MultiPoly& o) const { return nt == o.nt && terms == o.terms; }

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator-() const;
  // Product; cap < 0 means untruncated, otherwise drop monomials with some
  // t-exponent above cap.
  MultiPoly mul(const MultiPoly& o, int cap = -1) const;
  MultiPoly truncate(int cap) const;
  bool has_nonnegative_coeffs() const;
  int max_t_degree() const;

  MultiPoly rho_to_tau() const;  // moves the rho exponent onto tau
  MultiPoly set_tau_one() const;
  // Exact evaluation at rational rho, tau, t_i.
  Rat eval(const Rat& rho, const Rat& tau, const std::vector<Rat>& t) const;
  // Evaluate rho,tau only; returns map t-expo -> value.
  std::map<std::vector<int>, Rat> eval_rho_tau(const Rat& rho, const Rat& tau) const;

  std::string str(const std::vector<std::string>& tnames = {}) const;
};

// One denominator factor 1 - rho^m tau^n prod t_i^{d_i}.
struct DenomFactor {
  int m = 0, n = 0;
  std::vector<int> d;
};

struct ControlledTerm {
  MultiPoly numerator;
  std::vector<DenomFactor> denominators;
};

// Finite sum of P / prod(1 - rho^m tau^n t^d).
struct ControlledForm {
  int nt = 0;
  std::vector<ControlledTerm> terms;

  MultiPoly expand(int cap) const;  // truncated series
  Rat eval(const Rat& rho, const Rat& tau, const std::vector<Rat>& t) const;
};

// Abstract instance of the cleared-series setup: t-variables 0..nt-1
// partitioned into I_j, with positive weights a_i and shifts nu_j.
struct Instance {
  std::vector<std::vector<int>> parts;  // I_j as t-variable indices
  std::vector<long> a;                  // size nt
  std::vector<long> nu;                 // size parts.size()
  int nt() const { return (int)a.size(); }
};

MultiPoly series_F(const Instance& inst, int cap);
// The cleared numerator; raises when a coefficient survives beyond the
// support bound.
MultiPoly numerator_Ftilde(const Instance& inst);
long ftilde_support_bound(const Instance& inst, int i0);
// Independent route: alternating-sum coefficient formula.
MultiPoly Ftilde_by_coefficient_formula(const Instance& inst, int cap);

// G-series over variables indexed by J (a_j > 0, nu_j >= 0).
MultiPoly series_G(int j0, const std::vector<long>& a, const std::vector<long>& nu, int cap);
MultiPoly numerator_Gtilde(int j0, const std::vector<long>& a, const std::vector<long>& nu);

Rat deg_inverse(const MultiPoly& p, const Rat& eta);

struct CertifyReport {
  bool ok = false;
  bool nonnegative = false;
  Rat eta_witness = 0;
  std::string detail;
};
CertifyReport certify_M_controlled(const ControlledForm& cf, long M);

// Local series of a surface/choice at a point pattern g in {0,1}^J.
struct LocalSeries {
  MultiPoly F, F1, F2;      // direct truncated sums
  MultiPoly H1;             // closed form, exact polynomial
  MultiPoly H2_trunc;       // (prod(1-t_i)) F2 truncated
  ControlledForm H2_closed; // exact rational form of H2
};
LocalSeries local_F_series(const MoebiusTable& mt, const AdmissibleChoice& ch,
                           uint32_t g_mask, int cap);

struct LocalJ0Series {
  MultiPoly Fj0, Fj0_1, Fj0_2;
  // Majorant polynomial per the two/three-term case split; dominates the
  // clamped series times prod(1-t_i) as a function on [0,1)^I.
  MultiPoly Hj0_1;
  // Tight variant: exactly prod(1-t_i) times the mu-majorant series (checked
  // internally on the truncation); Hj0_1 - Hj0_1_tight is nonnegative on
  // [0,1)^I for positive rho, tau.
  MultiPoly Hj0_1_tight;
};
LocalJ0Series local_Fj0_series(const MoebiusTable& mt, const AdmissibleChoice& ch, int j0,
                               uint32_t g_mask, int cap);

struct AppendixReport {
  MultiPoly A, B, C;            // direct truncations of the three series
  ControlledForm A_closed, B_closed, C_closed;
  bool sum_matches = false;     // A+B+C == Fj0_2 on the cap
  bool closed_matches = false;  // each closed form matches its direct series
  CertifyReport certificate;    // M = |g| certification of the assembled form
  std::string detail;
};
AppendixReport appendix_decomposition(const MoebiusTable& mt, const AdmissibleChoice& ch,
                                      int j0, uint32_t g_mask, int cap);

// Exact evaluation of H_g = H_{1,g} + H_{2,g} at (rho, t_i) = (qv, 1/qv).
Rat H_g_eval(const MoebiusTable& mt, const AdmissibleChoice& ch, uint32_t g_mask,
             const Rat& qv);

}  // namespace coxcount::genfun
