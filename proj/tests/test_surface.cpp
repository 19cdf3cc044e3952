#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coxcount/surface.hpp"
#include "fixtures.hpp"

using namespace coxcount;

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("sextic basic invariants") {
  CoxPresentation cox = builtin_sextic_a1();
  CHECK(cox.picard_rank == 4);
  CHECK(cox.num_generators() == 7);
  CHECK(cox.dim() == 2);
  CHECK(cox.degree_total() == PicClass({1, 0, 0, 0}));
  PicClass k = anticanonical(cox);
  CHECK(k == PicClass({3, -1, -1, -1}));
  auto dual = cox.dual_coords(k);
  CHECK(dual == std::vector<Int>{2, 2, 2, 3});
  CHECK(kx_divisibility(cox) == 1);
}

TEST_CASE("sextic default choice and pairing") {
  CoxPresentation cox = builtin_sextic_a1();
  const auto& ch = cox.default_choice();
  CHECK(ch.linear == std::vector<int>{4, 5, 6});
  CHECK(ch.I == std::vector<int>{0, 1, 2, 3});
  // <y, G_j> = y_k + y_l + y_4 for the two other indices k, l.
  std::vector<Int> y{1, 2, 3, 5};
  CHECK(cox.pair(y, cox.classes[4]) == 2 + 3 + 5);
  CHECK(cox.pair(y, cox.classes[5]) == 1 + 3 + 5);
  CHECK(cox.pair(y, cox.classes[6]) == 1 + 2 + 5);
  CHECK(cox.pair(y, cox.degree_total()) == 1 + 2 + 3 + 5);
  CHECK(cox.pair(y, anticanonical(cox)) == 2 * (1 + 2 + 3) + 3 * 5);
}

TEST_CASE("sextic admissible choices and hypothesis") {
  CoxPresentation cox = builtin_sextic_a1();
  // 8 candidate selections of one linear variable per monomial; exactly the
  // ones using zero or two exceptional curves give a unimodular complement.
  auto choices = admissible_choices(cox);
  CHECK(choices.size() == 4);
  for (const auto& ch : choices) {
    CHECK(ch.linear.size() == 3);
    CHECK(ch.I.size() == 4);
  }
  CHECK(check_face_hypothesis(cox).ok);
  CHECK(transversal_faces(cox, cox.default_choice()).empty());
}

TEST_CASE("catalog document matches the builtin") {
  const char* dir = std::getenv("COXCOUNT_DATA");
  std::string path = dir ? std::string(dir) + "/sextic_a1.json" : "data/sextic_a1.json";
  CoxPresentation cox = load_surface(slurp(path));
  CoxPresentation ref = builtin_sextic_a1();
  CHECK(cox.name == ref.name);
  CHECK(cox.labels == ref.labels);
  for (int k = 0; k < 7; ++k) CHECK(cox.classes[k] == ref.classes[k]);
  CHECK(cox.incidence_maximal == ref.incidence_maximal);
}

TEST_CASE("validation failures") {
  CoxPresentation ref = builtin_sextic_a1();
  SUBCASE("non-graded relation") {
    CoxPresentation bad = ref;
    bad.relation[1].factors[0].second = 2;
    CHECK_THROWS_AS(bad.finalize(), SurfaceError);
  }
  SUBCASE("missing singleton face") {
    CoxPresentation bad = ref;
    bad.incidence_maximal.erase(bad.incidence_maximal.begin() + 4);  // {eta1, lambda}
    // eta1 still covered by {m1, eta1}; drop that too
    bad.incidence_maximal.erase(bad.incidence_maximal.begin() + 1);
    CHECK_THROWS_AS(bad.finalize(), SurfaceError);
  }
  SUBCASE("exponent zero") {
    CoxPresentation bad = ref;
    bad.relation[0].factors[0].second = 0;
    CHECK_THROWS_AS(bad.finalize(), SurfaceError);
  }
  SUBCASE("schema error carries a path") {
    try {
      load_surface("{\"name\": \"x\"}");
      FAIL("expected SurfaceError");
    } catch (const SurfaceError& e) {
      CHECK(std::string(e.what()).find("picard_rank") != std::string::npos);
    }
  }
}

TEST_CASE("toy fixture is a valid presentation") {
  CoxPresentation cox = toy_presentation();
  CHECK(cox.dim() == 2);
  CHECK(cox.picard_rank == 5);
  CHECK(check_face_hypothesis(cox).ok);
  const auto& ch = cox.default_choice();
  CHECK(ch.I == std::vector<int>{3, 4, 5, 6, 7});
  auto faces = transversal_faces(cox, ch);
  CHECK(faces.size() == 2);  // {u1,u2,u3} and {u1p,u2,u3}
  auto choices = admissible_choices(cox);
  CHECK(!choices.empty());
}
