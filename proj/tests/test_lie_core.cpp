#include "doctest.h"

#include "e7forge/lie_core.hpp"

using namespace e7forge;

namespace {

/// sl2 with basis (e, f, h): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
SCAlgebra<Rational> sl2() {
  SCAlgebra<Rational> L(3, {"e", "f", "h"});
  L.set_bracket(2, 0, sv_unit(0, Rational(2)));   // [h,e] = 2e
  L.set_bracket(2, 1, sv_unit(1, Rational(-2)));  // [h,f] = -2f
  L.set_bracket(0, 1, sv_unit(2, Rational(1)));   // [e,f] = h
  return L;
}

SCAlgebra<Rational> direct_sum(const SCAlgebra<Rational>& a, const SCAlgebra<Rational>& b) {
  std::vector<std::string> names;
  for (const auto& n : a.names) names.push_back("L." + n);
  for (const auto& n : b.names) names.push_back("R." + n);
  SCAlgebra<Rational> s(a.dim + b.dim, names);
  for (int i = 0; i < a.dim; ++i)
    for (int j = i + 1; j < a.dim; ++j) s.set_bracket(i, j, a.upper_bracket(i, j));
  for (int i = 0; i < b.dim; ++i)
    for (int j = i + 1; j < b.dim; ++j) {
      SparseVec<Rational> shifted;
      for (const auto& [k, v] : b.upper_bracket(i, j)) shifted.push_back({k + a.dim, v});
      s.set_bracket(i + a.dim, j + a.dim, std::move(shifted));
    }
  return s;
}

}  // namespace

TEST_CASE("jacobi: sl2 passes, broken constants fail with witness") {
  auto L = sl2();
  auto rep = jacobi_check_full(L);
  CHECK(rep.pass);
  CHECK(rep.triples_checked == 1);

  // rescaling [e,f] alone only re-normalizes sl2; Jacobi still holds
  auto rescaled = sl2();
  rescaled.set_bracket(0, 1, sv_unit(2, Rational(2)));
  CHECK(jacobi_check_full(rescaled).pass);

  // a genuinely broken tensor: [h,e] = e with [e,f] = h leaves J(e,f,h) = -h
  auto broken = sl2();
  broken.set_bracket(2, 0, sv_unit(0, Rational(1)));
  auto brep = jacobi_check_full(broken);
  CHECK(!brep.pass);
  REQUIRE(brep.witness.has_value());
  CHECK(brep.witness->i == 0);  // the unique triple (e, f, h) in basis order
  CHECK(brep.witness->j == 1);
  CHECK(brep.witness->k == 2);
  CHECK(brep.witness->residual == sv_unit<Rational>(2, Rational(-1)));

  auto srep = jacobi_check_sampled(broken, 200, 7);
  CHECK(!srep.pass);
}

TEST_CASE("killing form of sl2 and an abelian algebra") {
  auto L = sl2();
  auto kr = killing(L);
  CHECK(kr.matrix[2][2] == Rational(8));  // K(h,h)
  CHECK(kr.matrix[0][1] == Rational(4));  // K(e,f)
  CHECK(kr.matrix[2][0] == Rational(0));  // K(h,e)
  CHECK(kr.matrix[0][0] == Rational(0));
  CHECK(kr.nondegenerate);
  CHECK(kr.certificate_prime > (1ULL << 20));

  SCAlgebra<Rational> ab(2, {"x", "y"});
  auto akr = killing(ab);
  CHECK(!akr.nondegenerate);
  for (const auto& row : akr.matrix)
    for (const auto& v : row) CHECK(v.is_zero());
}

TEST_CASE("killing form invariance on random triples") {
  auto L = sl2();
  auto km = killing_matrix(L);
  Rng rng(5150);
  auto rand_vec = [&] {
    SparseVec<Rational> v;
    for (int i = 0; i < 3; ++i) {
      Rational c(rng.range(-5, 5), rng.range(1, 3));
      if (!c.is_zero()) v.push_back({i, c});
    }
    return v;
  };
  auto kform = [&](const SparseVec<Rational>& x, const SparseVec<Rational>& y) {
    Rational acc(0);
    for (const auto& [i, xi] : x)
      for (const auto& [j, yj] : y)
        acc += xi * yj * km[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return acc;
  };
  for (int t = 0; t < 40; ++t) {
    auto x = rand_vec(), y = rand_vec(), z = rand_vec();
    // K([x,y],z) + K(y,[x,z]) = 0
    CHECK(kform(L.bracket(x, y), z) + kform(y, L.bracket(x, z)) == Rational(0));
  }
}

TEST_CASE("base change preserves constants, jacobi, killing rank") {
  auto L = sl2();
  auto Lx = base_change(L, -1);
  CHECK(jacobi_check_full(Lx).pass);
  auto kr = killing(Lx);
  CHECK(kr.nondegenerate);
  CHECK(kr.matrix[2][2] == QuadExt(Rational(8)));
}

TEST_CASE("ad eigendecomposition of sl2") {
  auto L = sl2();
  auto eig = ad_eigendecomposition(L, sv_unit<Rational>(2, Rational(1)));
  REQUIRE(eig.size() == 3);
  CHECK(eig[0].eigenvalue == Rational(-2));
  CHECK(eig[0].basis.size() == 1);
  CHECK(eig[0].basis[0] == sv_unit<Rational>(1, Rational(1)));  // f
  CHECK(eig[1].eigenvalue == Rational(0));
  CHECK(eig[1].basis[0] == sv_unit<Rational>(2, Rational(1)));  // h
  CHECK(eig[2].eigenvalue == Rational(2));
  CHECK(eig[2].basis[0] == sv_unit<Rational>(0, Rational(1)));  // e

  // nilpotent ad e is not semisimple
  CHECK_THROWS_AS(ad_eigendecomposition(L, sv_unit<Rational>(0, Rational(1))),
                  NotSemisimpleOverField);
}

TEST_CASE("roots of sl2 and type A1") {
  auto L = sl2();
  auto datum = roots(L, {sv_unit<Rational>(2, Rational(1))});
  REQUIRE(datum.roots.size() == 2);
  CHECK(datum.roots[0] == std::vector<Rational>{Rational(-2)});
  CHECK(datum.roots[1] == std::vector<Rational>{Rational(2)});
  auto id = identify_type(datum);
  CHECK(id.label == "A1");
  CHECK(id.root_count == 2);
  CHECK(id.rank == 1);
}

TEST_CASE("roots rejects a non-cartan family") {
  // sl2 + sl2 with only one h supplied: zero-weight space is too big
  auto S = direct_sum(sl2(), sl2());
  CHECK_THROWS_AS(roots(S, {sv_unit<Rational>(2, Rational(1))}), NotCartan);
  // and with both h's it identifies each factor
  auto datum = roots(S, {sv_unit<Rational>(2, Rational(1)), sv_unit<Rational>(5, Rational(1))});
  CHECK(datum.roots.size() == 4);
}

TEST_CASE("killing complement: direct sum splits off, degenerate S rejected") {
  auto S = direct_sum(sl2(), sl2());
  std::vector<SparseVec<Rational>> first{sv_unit<Rational>(0, Rational(1)),
                                         sv_unit<Rational>(1, Rational(1)),
                                         sv_unit<Rational>(2, Rational(1))};
  auto comp = killing_complement(S, first);
  REQUIRE(comp.size() == 3);
  Echelon<Rational> span(6);
  for (const auto& v : comp) {
    for (const auto& [i, val] : v) CHECK(i >= 3);  // second factor only
    span.add_row(v);
  }
  CHECK(span.rank() == 3);
  // complement is an ideal: [S, comp] stays in comp
  for (int i = 0; i < 6; ++i)
    for (const auto& v : comp) {
      auto br = S.bracket(sv_unit<Rational>(i, Rational(1)), v);
      if (!br.empty()) CHECK(span.in_row_space(br));
    }

  // span of a root vector is Killing-degenerate in sl2
  auto L = sl2();
  CHECK_THROWS_AS(killing_complement(L, {sv_unit<Rational>(0, Rational(1))}), DegenerateOnS);
}

TEST_CASE("subalgebra extraction") {
  auto S = direct_sum(sl2(), sl2());
  std::vector<SparseVec<Rational>> first{sv_unit<Rational>(0, Rational(1)),
                                         sv_unit<Rational>(1, Rational(1)),
                                         sv_unit<Rational>(2, Rational(1))};
  auto sub = subalgebra(S, first, {"e", "f", "h"});
  CHECK(sub.dim == 3);
  CHECK(sub.bracket_basis(0, 1) == sv_unit<Rational>(2, Rational(1)));
  CHECK(jacobi_check_full(sub).pass);

  std::vector<SparseVec<Rational>> not_closed{sv_unit<Rational>(0, Rational(1)),
                                              sv_unit<Rational>(1, Rational(1))};
  CHECK_THROWS(subalgebra(S, not_closed));
}

TEST_CASE("identify_type is stable across seeds") {
  auto L = sl2();
  auto datum = roots(L, {sv_unit<Rational>(2, Rational(1))});
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL})
    CHECK(identify_type(datum, seed).label == "A1");
}

TEST_CASE("structure constants JSON round trip and corruption rejection") {
  auto L = sl2();
  auto j = scalgebra_to_json(L);
  auto L2 = scalgebra_from_json(j);
  CHECK(L2.dim == 3);
  CHECK(L2.names == L.names);
  CHECK(L2.upper == L.upper);
  CHECK(jacobi_check_full(L2).pass);

  // antisymmetry corruption: c[0][1][2] = 1 but c[1][0][2] = 1 (should be -1)
  nlohmann::json bad = j;
  bad["c"].push_back({1, 0, 2, "1"});
  CHECK_THROWS_AS(scalgebra_from_json(bad), IoError);

  nlohmann::json diag = j;
  diag["c"].push_back({1, 1, 2, "1"});
  CHECK_THROWS_AS(scalgebra_from_json(diag), IoError);
}

TEST_CASE("jacobi verdicts are independent of the worker count") {
  auto L = sl2();
  setenv("E7FORGE_THREADS", "1", 1);
  auto one = jacobi_check_full(L);
  setenv("E7FORGE_THREADS", "2", 1);
  auto two = jacobi_check_full(L);
  unsetenv("E7FORGE_THREADS");
  CHECK(one.pass == two.pass);
  CHECK(one.triples_checked == two.triples_checked);
}

TEST_CASE("identify_type raises Unrecognized for a non-simple root datum") {
  // A1 x A1 has Cartan matrix diag(2, 2), which matches no connected
  // simply-laced rank-2 diagram in the tables
  auto S = direct_sum(sl2(), sl2());
  auto datum = roots(S, {sv_unit<Rational>(2, Rational(1)), sv_unit<Rational>(5, Rational(1))});
  CHECK_THROWS_AS(identify_type(datum), Unrecognized);
}
