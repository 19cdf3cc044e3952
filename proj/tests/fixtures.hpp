#pragma once

#include "coxcount/surface.hpp"

// A rank-5 presentation with one exponent-2 factor, a generator outside the
// relation, and nonempty transversal face set; exercises branches the sextic
// never reaches (type-2 supports, extension elements, a_i > 1).
inline coxcount::CoxPresentation toy_presentation() {
  using namespace coxcount;
  CoxPresentation cox;
  cox.name = "toy_rank5";
  cox.picard_rank = 5;
  cox.basis_labels = {"e1", "e2", "e3", "e4", "e5"};
  cox.labels = {"s1", "s2", "s3", "u1", "u1p", "u2", "u3", "w"};
  auto cls = [](std::vector<long> v) {
    std::vector<Int> c(v.begin(), v.end());
    return PicClass(std::move(c));
  };
  // D_tot = e1+e2+e3+e4; s-classes make each relation monomial graded to D_tot.
  cox.classes = {
      cls({-1, 0, 1, 1, 0}),  // s1 = D_tot - 2 e1 - e2
      cls({1, 1, 0, 1, 0}),   // s2 = D_tot - e3
      cls({1, 1, 1, 0, 0}),   // s3 = D_tot - e4
      cls({1, 0, 0, 0, 0}),   // u1
      cls({0, 1, 0, 0, 0}),   // u1p
      cls({0, 0, 1, 0, 0}),   // u2
      cls({0, 0, 0, 1, 0}),   // u3
      cls({0, 0, 0, 0, 1}),   // w
  };
  cox.relation = {
      RelationTerm{0, {{3, 2}, {4, 1}}},  // s1 u1^2 u1p
      RelationTerm{1, {{5, 1}}},          // s2 u2
      RelationTerm{2, {{6, 1}}},          // s3 u3
  };
  auto mask = [&](std::initializer_list<int> gens) {
    uint32_t m = 0;
    for (int g : gens) m |= 1u << g;
    return m;
  };
  cox.incidence_maximal = {
      mask({3, 5, 6}),  // u1 u2 u3
      mask({4, 5, 6}),  // u1p u2 u3
      mask({3, 4, 5}),  // u1 u1p u2
      mask({5, 6, 7}),  // u2 u3 w
      mask({0}), mask({1}), mask({2}),
  };
  cox.effective_cone = {cls({1, 0, 0, 0, 0}), cls({0, 1, 0, 0, 0}), cls({0, 0, 1, 0, 0}),
                        cls({0, 0, 0, 1, 0}), cls({0, 0, 0, 0, 1})};
  cox.finalize();
  return cox;
}
