#pragma once

#include <cstdint>
#include <vector>

#include "coxcount/ff1.hpp"
#include "coxcount/surface.hpp"

namespace coxcount {

// Finitely supported exponent vector over the generator set.
using ExponentVector = std::vector<long>;

// Memoized mu/nu tables for one presentation (and one admissible choice for
// the nu side). Values over {0,1}^J fit machine words but products are kept in
// arbitrary precision by callers.
class MoebiusTable {
 public:
  explicit MoebiusTable(const CoxPresentation& cox);

  const CoxPresentation& cox() const { return *cox_; }

  // mu over N^J: zero when some component is >= 2.
  long mu_zero(const ExponentVector& e) const;
  long mu_zero_mask(uint32_t mask) const { return mu_[mask]; }

  // nu for an admissible choice: g over the choice's J (by term order), f over
  // its I (by position in choice.I).
  long nu_zero(const AdmissibleChoice& ch, const ExponentVector& g,
               const ExponentVector& f) const;
  long nu_zero_masks(const AdmissibleChoice& ch, uint32_t g_mask, uint32_t f_supp) const;

 private:
  const CoxPresentation* cox_;
  std::vector<long> mu_;  // over {0,1}^J as bitmasks
};

// Pointwise products over closed points.
Int mu_divisor(const MoebiusTable& t, const std::vector<EffectiveDivisor>& D);
Int nu_divisor(const MoebiusTable& t, const AdmissibleChoice& ch,
               const std::vector<EffectiveDivisor>& G,
               const std::vector<EffectiveDivisor>& D);

}  // namespace coxcount
