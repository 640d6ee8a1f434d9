#include "doctest.h"

#include <fstream>

#include "e7forge/manivel_e7.hpp"

using namespace e7forge;
namespace fp = e7forge::fano;

namespace {
const E7Assembly& split_assembly() {
  static E7Assembly A = assemble(split_labeling());
  return A;
}
}  // namespace

TEST_CASE("split assembly: dim 133, jacobi, killing, block containments") {
  const auto& A = split_assembly();
  CHECK(A.algebra.dim == 133);
  // jacobi and killing already certified inside assemble(); re-check killing
  auto kr = killing(A.algebra);
  CHECK(kr.nondegenerate);
  // block containment sparsity facts
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) {
      int g = fp::third_line(a, b);
      for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n)
          for (const auto& [k, v] : A.algebra.upper_bracket(v_idx(a, m), v_idx(b, n))) {
            auto br = block_of(k);
            CHECK(br.is_line);
            CHECK(br.which == g);
          }
    }
  // nonzero constants everywhere
  for (int l = 0; l < 7; ++l)
    for (int t = 0; t < 4; ++t) CHECK(!A.line_constants[l][t].is_zero());
  for (const auto& [ab, b] : A.cross_constants) CHECK(!b.is_zero());
}

TEST_CASE("hamilton assembly over Q: jacobi and killing") {
  auto A = assemble(hamilton_labeling());
  CHECK(A.algebra.dim == 133);
  auto kr = killing(A.algebra);
  CHECK(kr.nondegenerate);
}

TEST_CASE("split roots: 126 one-dimensional root spaces, type E7") {
  const auto& A = split_assembly();
  std::vector<SparseVec<Rational>> cartan;
  for (int p = 0; p < 7; ++p) cartan.push_back(sv_unit<Rational>(sl_idx(p, 1), Rational(1)));
  // h_p for split (1,1) is i... placeholder: use the split sl2 triple h = i
  auto datum = roots(A.algebra, cartan);
  CHECK(datum.roots.size() == 126);
  auto id = identify_type(datum);
  CHECK(id.label == "E7");
}

TEST_CASE("line subalgebras: closed dim 37 with 28-dim ideal, D4 type") {
  const auto& A = split_assembly();
  for (int line = 0; line < 7; ++line) {
    auto rep = line_subalgebra_check(A, line);
    CHECK(rep.pass());
    CHECK(rep.closed_dim_37);
    CHECK(rep.vv_in_quadruple_blocks);
    CHECK(rep.ideal_28_ok);
    CHECK(rep.centralizer_ok);
    CHECK(rep.ideal_dim == 28);
  }
  // the 28-dimensional ideal of the first line has nondegenerate Killing and
  // identifies as D4 via its own root datum
  auto quad = fp::quadruple(0);
  std::vector<SparseVec<Rational>> basis;
  for (int t = 0; t < 4; ++t)
    for (int g = 0; g < 3; ++g) basis.push_back(sv_unit<Rational>(sl_idx(quad[t], g), Rational(1)));
  for (int k = 0; k < 16; ++k) basis.push_back(sv_unit<Rational>(v_idx(0, k), Rational(1)));
  auto sub = subalgebra(A.algebra, basis);
  CHECK(sub.dim == 28);
  CHECK(killing(sub).nondegenerate);
  // cartan: the h of each quadruple point, i.e. sl1 generator "i" at local
  // coordinates 3*t within the sub-basis
  std::vector<SparseVec<Rational>> cartan;
  for (int t = 0; t < 4; ++t) cartan.push_back(sv_unit<Rational>(3 * t, Rational(1)));
  auto datum = roots(sub, cartan);
  CHECK(datum.roots.size() == 24);
  CHECK(identify_type(datum).label == "D4");
}

TEST_CASE("rejected labeling: assembly refuses before any computation") {
  auto L = split_labeling();
  L.class_rank = 1;
  for (auto& pl : L.points) pl.cls = {0};
  L.points[fp::Q1] = PointLabel{Rational(-1), Rational(-1), false, {1}};
  CHECK_THROWS_AS(assemble(L), ValidationFailed);
}

TEST_CASE("gauge invariance: rescaling a line block preserves jacobi and type") {
  const auto& A = split_assembly();
  auto rescaled = rescale_block(A.algebra, 2, Rational(3));
  CHECK(jacobi_check_full(rescaled).pass);
  std::vector<SparseVec<Rational>> cartan;
  for (int p = 0; p < 7; ++p) cartan.push_back(sv_unit<Rational>(sl_idx(p, 0), Rational(1)));
  auto datum = roots(rescaled, cartan);
  CHECK(datum.roots.size() == 126);
  CHECK(identify_type(datum).label == "E7");
}

TEST_CASE("sign-flipped intertwiner generator is absorbed into the constants") {
  AssemblyOverrides ov;
  ov.cross_scale[{0, 1}] = Rational(-1);
  auto A = assemble(split_labeling(), ov);  // assemble() certifies Jacobi
  CHECK(A.algebra.dim == 133);
  const auto& ref = split_assembly();
  CHECK(A.cross_constants.at({0, 1}) == -ref.cross_constants.at({0, 1}));
  // gauge-invariant fingerprints agree
  CHECK(gauge_invariants(A) == gauge_invariants(ref));
}

TEST_CASE("pairing orientation: swapped order gives identical verdicts") {
  auto L = split_labeling();
  auto quad = fp::quadruple(0);
  L.pairings[0] = LinePairing{{{quad[1], quad[0]}, {quad[3], quad[2]}}};
  auto A = assemble(L);
  CHECK(A.algebra.dim == 133);
  auto kr = killing(A.algebra);
  CHECK(kr.nondegenerate);
  std::vector<SparseVec<Rational>> cartan;
  for (int p = 0; p < 7; ++p) cartan.push_back(sv_unit<Rational>(sl_idx(p, 0), Rational(1)));
  auto datum = roots(A.algebra, cartan);
  CHECK(datum.roots.size() == 126);
  CHECK(identify_type(datum).label == "E7");
}

TEST_CASE("re-solved constants match the frozen golden invariants up to gauge") {
  std::ifstream in(std::string(E7FORGE_SOURCE_DIR) + "/fixtures/golden/split.invariants.json");
  REQUIRE(in.good());
  nlohmann::json frozen;
  in >> frozen;
  CHECK(gauge_invariants(split_assembly()) == frozen);

  std::ifstream in2(std::string(E7FORGE_SOURCE_DIR) + "/fixtures/golden/hamilton.invariants.json");
  REQUIRE(in2.good());
  nlohmann::json frozen2;
  in2 >> frozen2;
  auto H = assemble(hamilton_labeling());
  CHECK(gauge_invariants(H) == frozen2);
}

TEST_CASE("six of the seven h_v are not a Cartan subalgebra") {
  const auto& A = split_assembly();
  std::vector<SparseVec<Rational>> six;
  for (int p = 1; p < 7; ++p) six.push_back(sv_unit<Rational>(sl_idx(p, 0), Rational(1)));
  CHECK_THROWS_AS(roots(A.algebra, six), NotCartan);
}

TEST_CASE("root data: negation closure, dimension count, cartan permutation invariance") {
  const auto& A = split_assembly();
  std::vector<SparseVec<Rational>> cartan;
  for (int p = 0; p < 7; ++p) cartan.push_back(sv_unit<Rational>(sl_idx(p, 0), Rational(1)));
  auto datum = roots(A.algebra, cartan);
  CHECK(datum.roots.size() + cartan.size() == 133);
  std::set<std::vector<Rational>> rset(datum.roots.begin(), datum.roots.end());
  for (const auto& r : datum.roots) {
    std::vector<Rational> neg;
    for (const auto& c : r) neg.push_back(-c);
    CHECK(rset.count(neg) == 1);
  }
  // permuting the cartan family permutes weight coordinates but not the type
  std::vector<SparseVec<Rational>> permuted;
  for (int p : {3, 5, 0, 6, 1, 4, 2}) permuted.push_back(cartan[static_cast<std::size_t>(p)]);
  auto datum2 = roots(A.algebra, permuted);
  CHECK(identify_type(datum2).label == "E7");
}
