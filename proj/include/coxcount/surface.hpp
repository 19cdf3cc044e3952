#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coxcount/linalg.hpp"

namespace coxcount {

// Integer vector in a fixed basis of Pic(X).
struct PicClass {
  std::vector<Int> coords;

  PicClass() = default;
  explicit PicClass(std::vector<Int> c) : coords(std::move(c)) {}
  static PicClass zero(int rho) { return PicClass(std::vector<Int>(rho, 0)); }

  PicClass& operator+=(const PicClass& o) {
    for (size_t k = 0; k < coords.size(); ++k) coords[k] += o.coords[k];
    return *this;
  }
  PicClass& operator-=(const PicClass& o) {
    for (size_t k = 0; k < coords.size(); ++k) coords[k] -= o.coords[k];
    return *this;
  }
  PicClass& operator*=(const Int& s) {
    for (auto& c : coords) c *= s;
    return *this;
  }
  friend PicClass operator+(PicClass a, const PicClass& b) { return a += b; }
  friend PicClass operator-(PicClass a, const PicClass& b) { return a -= b; }
  friend PicClass operator*(const Int& s, PicClass a) { return a *= s; }
  bool operator==(const PicClass& o) const { return coords == o.coords; }
};

struct RelationTerm {
  int linear = -1;                            // generator index of s_j
  std::vector<std::pair<int, long>> factors;  // (generator index i, exponent b_{i,j} >= 1)
};

// A choice J of linear variables with complement basis {F_i}.
struct AdmissibleChoice {
  std::vector<int> linear;                // per relation term, generator index playing s_j
  std::vector<std::vector<std::pair<int, long>>> parts;  // per term, remaining factors (i, b)
  std::vector<int> I;                     // complement generator indices, sorted
  std::vector<std::vector<Int>> a;        // a[j][k]: G_j = sum_k a[j][k] F_{I[k]}
  std::vector<std::vector<Int>> basis_inverse;  // rho x rho; class coords -> F-basis coords

  int index_in_I(int gen) const {
    for (size_t k = 0; k < I.size(); ++k)
      if (I[k] == gen) return (int)k;
    return -1;
  }
};

struct SurfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoxPresentation {
  std::string name;
  int picard_rank = 0;
  std::vector<std::string> basis_labels;
  std::vector<std::string> labels;   // generator labels
  std::vector<PicClass> classes;     // generator classes, same order
  std::vector<RelationTerm> relation;
  std::vector<uint32_t> incidence_maximal;  // bitmasks over generator indices
  std::vector<PicClass> effective_cone;

  int num_generators() const { return (int)labels.size(); }
  int dim() const { return (int)relation.size() - 1; }
  int index_of(const std::string& label) const;

  bool incidence_contains(uint32_t mask) const {
    for (uint32_t f : incidence_maximal)
      if ((mask & ~f) == 0) return true;
    return mask == 0;
  }

  PicClass degree_total() const;  // class of any relation monomial
  const AdmissibleChoice& default_choice() const { return default_choice_; }

  // Pairing <y, c> with y in the dual basis of the default choice's {F_i}.
  Int pair(const std::vector<Int>& y, const PicClass& c) const;
  std::vector<Int> dual_coords(const PicClass& c) const;  // F-basis coordinates of c

  void finalize();  // validates invariants, builds the default choice; throws SurfaceError

 private:
  AdmissibleChoice default_choice_;
};

// Schema-checked ingestion of a surface document (JSON text).
CoxPresentation load_surface(const std::string& json_text);
CoxPresentation load_surface_file(const std::string& path);

CoxPresentation builtin_sextic_a1();

PicClass anticanonical(const CoxPresentation& cox);
long kx_divisibility(const CoxPresentation& cox);

std::vector<AdmissibleChoice> admissible_choices(const CoxPresentation& cox);

struct FaceHypothesisReport {
  bool ok = true;
  std::vector<uint32_t> violations_size;        // faces breaking the size bound
  std::vector<uint32_t> violations_transversal; // transversal faces with all exponents >= 2
};
FaceHypothesisReport check_face_hypothesis(const CoxPresentation& cox);

// Faces K in C_inc with K subset of I meeting each I_j exactly once (the class S).
std::vector<uint32_t> transversal_faces(const CoxPresentation& cox, const AdmissibleChoice& ch);

}  // namespace coxcount
