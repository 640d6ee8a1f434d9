#include "doctest.h"

#include <map>
#include <set>

#include "e7forge/fano.hpp"

using namespace e7forge;
namespace fp = e7forge::fano;

TEST_CASE("canonical plane combinatorics") {
  // 7 points, 7 lines, every pair of points on exactly one line
  for (int p = 0; p < 7; ++p)
    for (int q = p + 1; q < 7; ++q) {
      int count = 0;
      for (int l = 0; l < 7; ++l)
        if (fp::on_line(l, p) && fp::on_line(l, q)) ++count;
      CHECK(count == 1);
    }
  // every pair of lines meets in exactly one point
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) {
      int count = 0;
      for (int p = 0; p < 7; ++p)
        if (fp::on_line(a, p) && fp::on_line(b, p)) ++count;
      CHECK(count == 1);
    }
  // quadruple is a bijection onto 4-subsets disjoint from the line
  std::set<std::set<int>> images;
  for (int l = 0; l < 7; ++l) {
    auto q = fp::quadruple(l);
    CHECK(std::set<int>(q.begin(), q.end()).size() == 4);
    for (int p : q) CHECK(!fp::on_line(l, p));
    images.insert(std::set<int>(q.begin(), q.end()));
  }
  CHECK(images.size() == 7);
}

TEST_CASE("quadruple canonical orders from the figure") {
  CHECK(fp::quadruple(fp::line_index("Q1-H2-Q3")) ==
        std::array<int, 4>{fp::Q, fp::Q2, fp::H1, fp::H3});
  CHECK(fp::quadruple(fp::line_index("H1-H2-H3")) ==
        std::array<int, 4>{fp::Q1, fp::Q2, fp::Q3, fp::Q});
  CHECK_THROWS_AS(fp::quadruple(9), UnknownLine);
  CHECK_THROWS_AS(fp::line_index("Q-Q1-Q2"), UnknownLine);
  CHECK(fp::line_index("H2-Q1-Q3") == fp::line_index("Q1-H2-Q3"));  // permuted id accepted
}

TEST_CASE("third_line: symmetry, involution, concurrency") {
  for (int a = 0; a < 7; ++a) {
    CHECK_THROWS_AS(fp::third_line(a, a), EqualLines);
    for (int b = 0; b < 7; ++b) {
      if (a == b) continue;
      int c = fp::third_line(a, b);
      CHECK(c != a);
      CHECK(c != b);
      CHECK(fp::third_line(b, a) == c);  // commutative
      CHECK(fp::third_line(a, c) == b);  // involution property
      // quadruple rule: shared pair drops out, the rest concatenates
      auto qa = fp::quadruple(a), qb = fp::quadruple(b), qc = fp::quadruple(c);
      std::set<int> sym;
      for (int p : qa) sym.insert(p);
      for (int p : qb) sym.count(p) ? (void)sym.erase(p) : (void)sym.insert(p);
      CHECK(sym == std::set<int>(qc.begin(), qc.end()));
      // concurrency, brute force over the incidence table
      int common = -1;
      for (int p = 0; p < 7; ++p)
        if (fp::on_line(a, p) && fp::on_line(b, p) && fp::on_line(c, p)) common = p;
      CHECK(common >= 0);
      CHECK(common == fp::meet(a, b));
    }
  }
}

TEST_CASE("validate: all-split labeling accepted") {
  auto rep = validate_labeling(split_labeling());
  CHECK(rep.accepted());
  for (int l = 0; l < 7; ++l) {
    REQUIRE(rep.resolved_pairings[static_cast<std::size_t>(l)].has_value());
    // auto-derived pairing is the first partition for the all-split case
    auto quad = fp::quadruple(l);
    auto pr = *rep.resolved_pairings[static_cast<std::size_t>(l)];
    CHECK(pr[0][0] == quad[0]);
    CHECK(pr[0][1] == quad[1]);
  }
}

TEST_CASE("validate: hamilton labeling accepted with forced pairings") {
  auto L = hamilton_labeling();
  auto rep = validate_labeling(L);
  CHECK(rep.accepted());
  // line Q1-H2-Q3 has quadruple (Q, Q2, H1, H3); the only class-respecting
  // pairing is (Q,H3),(Q2,H1)
  int l = fp::line_index("Q1-H2-Q3");
  auto pr = *rep.resolved_pairings[static_cast<std::size_t>(l)];
  CHECK(pr == LinePairing{{{fp::Q, fp::H3}, {fp::Q2, fp::H1}}});
}

TEST_CASE("validate: single non-split point rejected on every line through it") {
  auto L = split_labeling();
  L.class_rank = 1;
  for (auto& pl : L.points) pl.cls = {0};
  L.points[fp::Q1] = PointLabel{Rational(-1), Rational(-1), false, {1}};
  auto rep = validate_labeling(L);
  CHECK(!rep.accepted());
  int line_sum_violations = 0;
  for (const auto& v : rep.violations)
    if (v.code == "line-class-sum") ++line_sum_violations;
  CHECK(line_sum_violations == 3);  // the three lines through Q1
}

TEST_CASE("validate: bad declared pairing flagged") {
  auto L = hamilton_labeling();
  int l = fp::line_index("Q1-H2-Q3");
  L.pairings[static_cast<std::size_t>(l)] = LinePairing{{{fp::Q, fp::Q2}, {fp::H1, fp::H3}}};
  auto rep = validate_labeling(L);
  CHECK(!rep.accepted());
  CHECK(rep.violations.front().code == "pairing-compatibility");
}

TEST_CASE("accepted labeling quadruples have even class multiplicity") {
  for (const auto& L : {split_labeling(), hamilton_labeling()}) {
    auto rep = validate_labeling(L);
    REQUIRE(rep.accepted());
    for (int l = 0; l < 7; ++l) {
      std::map<std::vector<std::uint8_t>, int> counts;
      for (int p : fp::quadruple(l)) counts[L.at(p).cls]++;
      for (const auto& [cls, n] : counts) CHECK(n % 2 == 0);
    }
  }
}

TEST_CASE("labeling JSON round trip") {
  auto L = hamilton_labeling();
  auto j = labeling_to_json(L);
  auto L2 = labeling_from_json(j);
  CHECK(L2.class_rank == 1);
  for (int p = 0; p < 7; ++p) {
    CHECK(L2.at(p).a == L.at(p).a);
    CHECK(L2.at(p).b == L.at(p).b);
    CHECK(L2.at(p).cls == L.at(p).cls);
    CHECK(L2.at(p).declared_split == L.at(p).declared_split);
  }
  CHECK_THROWS_AS(labeling_from_json(nlohmann::json::array()), IoError);
}
