#include "doctest.h"

#include "e7forge/tensor_split.hpp"

using namespace e7forge;
namespace fp = e7forge::fano;

namespace {

struct Built {
  FanoLabeling L;
  ValidationReport rep;
  std::vector<VAlphaModule<Rational>> mods;
};

Built build_all(FanoLabeling L) {
  Built b{std::move(L), {}, {}};
  b.rep = validate_labeling(b.L);
  REQUIRE(b.rep.accepted());
  for (int l = 0; l < 7; ++l)
    b.mods.push_back(build_valpha(b.L, *b.rep.resolved_pairings[static_cast<std::size_t>(l)], l));
  return b;
}

const Built& split_built() {
  static Built b = build_all(split_labeling());
  return b;
}

const Built& hamilton_built() {
  static Built b = build_all(hamilton_labeling());
  return b;
}

}  // namespace

TEST_CASE("split V_alpha: commuting actions, Lie homs, full joint algebra") {
  const auto& b = split_built();
  for (const auto& m : b.mods) {
    CHECK(m.space.dim == 16);
    CHECK_NOTHROW(verify_valpha(b.L, m));
    // points on the line do not act
    for (int p = 0; p < 7; ++p) {
      bool in_quad = false;
      for (int q : m.pts) in_quad |= (p == q);
      CHECK(static_cast<bool>(m.space.act[static_cast<std::size_t>(p)]) == in_quad);
    }
  }
}

TEST_CASE("hamilton V_alpha: M2-presentation tensor Hamilton, dim 16") {
  const auto& b = hamilton_built();
  int l = fp::line_index("Q1-H2-Q3");
  const auto& m = b.mods[static_cast<std::size_t>(l)];
  CHECK(m.space.dim == 16);
  CHECK(m.pts == std::array<int, 4>{fp::Q, fp::H3, fp::Q2, fp::H1});
  CHECK_NOTHROW(verify_valpha(b.L, m));
  for (const auto& mod : b.mods) CHECK_NOTHROW(verify_valpha(b.L, mod));
}

TEST_CASE("self-intertwiners of V_alpha are scalars") {
  for (const auto* b : {&split_built(), &hamilton_built()}) {
    const auto& m = b->mods[0];
    auto basis = equivariant_map_space(m.space, m.space);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == SparseMat<Rational>::identity(16));
  }
}

TEST_CASE("wedge-square to sl1 intertwiners are one-dimensional") {
  const auto& b = split_built();
  const auto& m = b.mods[3];  // line Q1-H2-Q3
  auto wedge = wedge_space(m.space);
  CHECK(wedge.dim == 120);
  for (int v : m.pts) {
    auto target = sl1_space(b.L, v);
    auto basis = equivariant_map_space(wedge, target);
    CHECK(basis.size() == 1);
  }
  // a point on the line acts by zero on both sides; no intertwiner survives
  auto z_target = sl1_space(b.L, fp::Q1);  // Q1 lies on line 3
  auto basis_z = equivariant_map_space(wedge, z_target);
  CHECK(basis_z.empty());
}

TEST_CASE("cross-line intertwiners V_a (x) V_b -> V_{a+b} are one-dimensional") {
  const auto& b = split_built();
  int alpha = 0, beta = 1;
  int gamma = fp::third_line(alpha, beta);
  auto source = tensor_space(b.mods[static_cast<std::size_t>(alpha)].space,
                             b.mods[static_cast<std::size_t>(beta)].space);
  auto basis = equivariant_map_space(source, b.mods[static_cast<std::size_t>(gamma)].space);
  CHECK(basis.size() == 1);
  // wrong target line: no intertwiner
  int delta = 3;
  REQUIRE(delta != gamma);
  auto none = equivariant_map_space(source, b.mods[static_cast<std::size_t>(delta)].space);
  CHECK(none.empty());
}

TEST_CASE("equivariant generator normalization is primitive") {
  const auto& b = hamilton_built();
  auto wedge = wedge_space(b.mods[0].space);
  auto basis = equivariant_map_space(wedge, sl1_space(b.L, b.mods[0].pts[0]));
  REQUIRE(basis.size() == 1);
  Int content(0);
  bool first_positive = false;
  bool seen = false;
  for (const auto& row : basis[0].row)
    for (const auto& [c, v] : row) {
      CHECK(v.is_integer());
      content = Int::gcd(content, v.num());
      if (!seen) {
        first_positive = v.sign() > 0;
        seen = true;
      }
    }
  CHECK(content == Int(1));
  CHECK(first_positive);
}

TEST_CASE("build_valpha rejects a pairing with mismatched symbols") {
  auto L = hamilton_labeling();
  // line Q1-H2-Q3 has quadruple (Q, Q2, H1, H3); Q is split, Q2 is Hamilton
  LinePairing bad{{{fp::Q, fp::Q2}, {fp::H1, fp::H3}}};
  CHECK_THROWS_AS(build_valpha(L, bad, fp::line_index("Q1-H2-Q3")), PairingUnavailable);
}
