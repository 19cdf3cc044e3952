#include "coxcount/surface.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coxcount {

int CoxPresentation::index_of(const std::string& label) const {
  for (int k = 0; k < (int)labels.size(); ++k)
    if (labels[k] == label) return k;
  return -1;
}

PicClass CoxPresentation::degree_total() const {
  const RelationTerm& t = relation.front();
  PicClass d = classes[t.linear];
  for (auto [i, b] : t.factors) d += Int(b) * classes[i];
  return d;
}

std::vector<Int> CoxPresentation::dual_coords(const PicClass& c) const {
  const auto& inv = default_choice_.basis_inverse;
  std::vector<Int> out(picard_rank, 0);
  for (int r = 0; r < picard_rank; ++r)
    for (int k = 0; k < picard_rank; ++k) out[r] += inv[r][k] * c.coords[k];
  return out;
}

Int CoxPresentation::pair(const std::vector<Int>& y, const PicClass& c) const {
  auto fc = dual_coords(c);
  Int s = 0;
  for (int k = 0; k < picard_rank; ++k) s += y[k] * fc[k];
  return s;
}

namespace {

// Build the a-matrix and basis inverse for a candidate choice; false when the
// complement classes are not a lattice basis.
bool complete_choice(const CoxPresentation& cox, AdmissibleChoice& ch) {
  const int rho = cox.picard_rank;
  ch.I.clear();
  std::vector<bool> in_choice(cox.num_generators(), false);
  for (size_t j = 0; j < ch.linear.size(); ++j) in_choice[ch.linear[j]] = true;
  for (int g = 0; g < cox.num_generators(); ++g)
    if (!in_choice[g]) ch.I.push_back(g);
  if ((int)ch.I.size() != rho) return false;

  std::vector<std::vector<Int>> basis(rho, std::vector<Int>(rho));
  for (int r = 0; r < rho; ++r)
    for (int k = 0; k < rho; ++k) basis[r][k] = cox.classes[ch.I[k]].coords[r];
  try {
    ch.basis_inverse = unimodular_inverse(basis);
  } catch (const std::runtime_error&) {
    return false;
  }
  ch.a.assign(ch.linear.size(), std::vector<Int>(rho, 0));
  for (size_t j = 0; j < ch.linear.size(); ++j) {
    const PicClass& gj = cox.classes[ch.linear[j]];
    for (int k = 0; k < rho; ++k)
      for (int r = 0; r < rho; ++r) ch.a[j][k] += ch.basis_inverse[k][r] * gj.coords[r];
  }
  return true;
}

std::string face_to_string(const CoxPresentation& cox, uint32_t mask) {
  std::string s = "{";
  bool first = true;
  for (int g = 0; g < cox.num_generators(); ++g)
    if (mask >> g & 1) {
      if (!first) s += ",";
      s += cox.labels[g];
      first = false;
    }
  return s + "}";
}

}  // namespace

void CoxPresentation::finalize() {
  std::ostringstream err;
  const int n = num_generators();
  if (picard_rank <= 0) throw SurfaceError("picard_rank: must be positive");
  if ((int)basis_labels.size() != picard_rank)
    throw SurfaceError("basis_labels: expected " + std::to_string(picard_rank) + " entries");
  if (n == 0 || n > 31) throw SurfaceError("generators: need between 1 and 31 entries");
  for (int g = 0; g < n; ++g) {
    if ((int)classes[g].coords.size() != picard_rank)
      throw SurfaceError("generators[" + std::to_string(g) + "].class: wrong length");
    for (int h = g + 1; h < n; ++h)
      if (labels[g] == labels[h])
        throw SurfaceError("generators: duplicate label '" + labels[g] + "'");
  }
  if (relation.empty()) throw SurfaceError("relation: empty");

  // I_j nonempty, pairwise disjoint, avoiding J; exponents >= 1.
  std::vector<int> seen(n, 0);  // 1 = linear, 2 = factor
  for (size_t j = 0; j < relation.size(); ++j) {
    const auto& term = relation[j];
    const std::string at = "relation[" + std::to_string(j) + "]";
    if (term.linear < 0 || term.linear >= n) throw SurfaceError(at + ".linear: bad index");
    if (seen[term.linear]) throw SurfaceError(at + ".linear: generator reused across terms");
    seen[term.linear] = 1;
    if (term.factors.empty()) throw SurfaceError(at + ".factors: I_j must be nonempty");
    for (auto [i, b] : term.factors) {
      if (i < 0 || i >= n) throw SurfaceError(at + ".factors: bad index");
      if (b < 1) throw SurfaceError(at + ".factors[" + labels[i] + "]: exponent must be >= 1");
      if (seen[i]) throw SurfaceError(at + ".factors: generator '" + labels[i] + "' reused");
      seen[i] = 2;
    }
  }

  // Graded relation: all monomials share one degree.
  {
    PicClass d0;
    for (size_t j = 0; j < relation.size(); ++j) {
      PicClass d = classes[relation[j].linear];
      for (auto [i, b] : relation[j].factors) d += Int(b) * classes[i];
      if (j == 0) d0 = d;
      else if (!(d == d0))
        throw SurfaceError("relation[" + std::to_string(j) +
                           "]: monomial degree differs from relation[0]");
    }
  }

  // Incidence: masks within range; singletons must be faces (every divisor is
  // nonempty, and the Moebius recursion relies on it).
  for (size_t f = 0; f < incidence_maximal.size(); ++f)
    if (incidence_maximal[f] >> n)
      throw SurfaceError("incidence_maximal[" + std::to_string(f) + "]: index out of range");
  for (int g = 0; g < n; ++g)
    if (!incidence_contains(1u << g))
      throw SurfaceError("incidence_maximal: singleton {" + labels[g] + "} missing");

  if (effective_cone.empty()) throw SurfaceError("effective_cone: empty");
  for (size_t k = 0; k < effective_cone.size(); ++k)
    if ((int)effective_cone[k].coords.size() != picard_rank)
      throw SurfaceError("effective_cone[" + std::to_string(k) + "]: wrong length");

  // Default admissible choice = the relation as written.
  AdmissibleChoice ch;
  for (const auto& term : relation) {
    ch.linear.push_back(term.linear);
    ch.parts.push_back(term.factors);
  }
  if (!complete_choice(*this, ch))
    throw SurfaceError("relation: complement classes of the written split are not a "
                       "unimodular basis of Pic");
  default_choice_ = std::move(ch);
}

PicClass anticanonical(const CoxPresentation& cox) {
  PicClass s = PicClass::zero(cox.picard_rank);
  for (const auto& c : cox.classes) s += c;
  return s - cox.degree_total();
}

long kx_divisibility(const CoxPresentation& cox) {
  PicClass k = anticanonical(cox);
  Int g = 0;
  for (const auto& c : k.coords) g = gcd(g, c);
  if (g == 0) throw SurfaceError("anticanonical is zero");
  return (long)g.get_si();
}

std::vector<AdmissibleChoice> admissible_choices(const CoxPresentation& cox) {
  // From each monomial select one exponent-1 variable as the linear one.
  std::vector<std::vector<int>> candidates;
  for (const auto& term : cox.relation) {
    std::vector<int> c{term.linear};
    for (auto [i, b] : term.factors)
      if (b == 1) c.push_back(i);
    candidates.push_back(c);
  }
  std::vector<AdmissibleChoice> out;
  std::vector<int> pick(cox.relation.size(), 0);
  while (true) {
    AdmissibleChoice ch;
    for (size_t j = 0; j < cox.relation.size(); ++j) {
      const auto& term = cox.relation[j];
      const int lin = candidates[j][pick[j]];
      ch.linear.push_back(lin);
      std::vector<std::pair<int, long>> part;
      if (lin != term.linear) part.emplace_back(term.linear, 1);
      for (auto [i, b] : term.factors)
        if (i != lin) part.emplace_back(i, b);
      ch.parts.push_back(std::move(part));
    }
    if (complete_choice(cox, ch)) out.push_back(std::move(ch));
    size_t j = 0;
    for (; j < pick.size(); ++j) {
      if (++pick[j] < (int)candidates[j].size()) break;
      pick[j] = 0;
    }
    if (j == pick.size()) break;
  }
  return out;
}

std::vector<uint32_t> transversal_faces(const CoxPresentation& cox, const AdmissibleChoice& ch) {
  std::vector<uint32_t> out;
  std::vector<uint32_t> acc{0};
  for (const auto& part : ch.parts) {
    std::vector<uint32_t> next;
    for (uint32_t m : acc)
      for (auto [i, b] : part) next.push_back(m | (1u << i));
    acc = std::move(next);
  }
  for (uint32_t m : acc)
    if (cox.incidence_contains(m)) out.push_back(m);
  return out;
}

FaceHypothesisReport check_face_hypothesis(const CoxPresentation& cox) {
  FaceHypothesisReport rep;
  const int bound = cox.dim() + 1;
  for (uint32_t f : cox.incidence_maximal)
    if (std::popcount(f) > bound) {
      rep.ok = false;
      rep.violations_size.push_back(f);
    }
  const AdmissibleChoice& ch = cox.default_choice();
  for (uint32_t k : transversal_faces(cox, ch)) {
    bool has_unit = false;
    for (const auto& part : ch.parts)
      for (auto [i, b] : part)
        if ((k >> i & 1) && b == 1) has_unit = true;
    if (!has_unit) {
      rep.ok = false;
      rep.violations_transversal.push_back(k);
    }
  }
  return rep;
}

namespace {

CoxPresentation parse_surface(const nlohmann::json& doc) {
  using nlohmann::json;
  CoxPresentation cox;
  auto need = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw SurfaceError(std::string(key) + ": missing");
    return doc.at(key);
  };
  cox.name = need("name").get<std::string>();
  cox.picard_rank = need("picard_rank").get<int>();
  for (const auto& b : need("basis_labels")) cox.basis_labels.push_back(b.get<std::string>());
  for (const auto& g : need("generators")) {
    if (!g.contains("label") || !g.contains("class"))
      throw SurfaceError("generators: each entry needs label and class");
    cox.labels.push_back(g.at("label").get<std::string>());
    std::vector<Int> coords;
    for (const auto& c : g.at("class")) coords.emplace_back(c.get<long>());
    cox.classes.emplace_back(std::move(coords));
  }
  auto index = [&](const std::string& label, const std::string& at) {
    int k = cox.index_of(label);
    if (k < 0) throw SurfaceError(at + ": unknown label '" + label + "'");
    return k;
  };
  for (size_t j = 0; j < need("relation").size(); ++j) {
    const auto& t = doc.at("relation").at(j);
    const std::string at = "relation[" + std::to_string(j) + "]";
    RelationTerm term;
    term.linear = index(t.at("linear").get<std::string>(), at + ".linear");
    for (const auto& f : t.at("factors"))
      term.factors.emplace_back(index(f.at("label").get<std::string>(), at + ".factors"),
                                f.at("exponent").get<long>());
    cox.relation.push_back(std::move(term));
  }
  for (size_t f = 0; f < need("incidence_maximal").size(); ++f) {
    uint32_t mask = 0;
    for (const auto& lab : doc.at("incidence_maximal").at(f))
      mask |= 1u << index(lab.get<std::string>(),
                          "incidence_maximal[" + std::to_string(f) + "]");
    cox.incidence_maximal.push_back(mask);
  }
  for (const auto& v : need("effective_cone")) {
    std::vector<Int> coords;
    for (const auto& c : v) coords.emplace_back(c.get<long>());
    cox.effective_cone.emplace_back(std::move(coords));
  }
  cox.finalize();
  return cox;
}

}  // namespace

CoxPresentation load_surface(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SurfaceError(std::string("schema: not valid JSON: ") + e.what());
  }
  try {
    return parse_surface(doc);
  } catch (const nlohmann::json::exception& e) {
    throw SurfaceError(std::string("schema: ") + e.what());
  }
}

CoxPresentation load_surface_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SurfaceError("cannot open surface file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_surface(ss.str());
}

CoxPresentation builtin_sextic_a1() {
  // Degree-6 generalized del Pezzo surface: P^2 blown up at three collinear
  // points. Pic basis (h, e1, e2, e3).
  CoxPresentation cox;
  cox.name = "sextic_a1";
  cox.picard_rank = 4;
  cox.basis_labels = {"h", "e1", "e2", "e3"};
  auto cls = [](long a, long b, long c, long d) {
    return PicClass({Int(a), Int(b), Int(c), Int(d)});
  };
  // 0..2: eta_i (exceptional), 3: lambda (strict transform of the common
  // line), 4..6: m_i (lines through p_i).
  cox.labels = {"eta1", "eta2", "eta3", "lambda", "m1", "m2", "m3"};
  cox.classes = {cls(0, 1, 0, 0), cls(0, 0, 1, 0), cls(0, 0, 0, 1),
                 cls(1, -1, -1, -1),
                 cls(1, -1, 0, 0), cls(1, 0, -1, 0), cls(1, 0, 0, -1)};
  for (int j = 0; j < 3; ++j) {
    RelationTerm t;
    t.linear = 4 + j;
    t.factors = {{j, 1}};
    cox.relation.push_back(t);
  }
  auto mask = [&](std::initializer_list<const char*> labs) {
    uint32_t m = 0;
    for (const char* l : labs) m |= 1u << cox.index_of(l);
    return m;
  };
  cox.incidence_maximal = {
      mask({"m1", "m2", "m3"}),
      mask({"m1", "eta1"}), mask({"m2", "eta2"}), mask({"m3", "eta3"}),
      mask({"eta1", "lambda"}), mask({"eta2", "lambda"}), mask({"eta3", "lambda"}),
  };
  cox.effective_cone = {cls(0, 1, 0, 0), cls(0, 0, 1, 0), cls(0, 0, 0, 1),
                        cls(1, -1, -1, -1)};
  cox.finalize();
  return cox;
}

}  // namespace coxcount
