#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "e7forge/quaternion.hpp"

namespace e7forge {
namespace fano {

/// Canonical point numbering, matching the figure the construction uses:
/// Q at the center, Q1..Q3 on the outer triangle, H1..H3 at edge midpoints.
inline constexpr int kNumPoints = 7;
inline constexpr int kNumLines = 7;
inline constexpr const char* kPointNames[kNumPoints] = {"Q", "Q1", "Q2", "Q3", "H1", "H2", "H3"};

inline constexpr int Q = 0, Q1 = 1, Q2 = 2, Q3 = 3, H1 = 4, H2 = 5, H3 = 6;

/// Canonical lines: three medians through Q, three triangle edges, the circle.
inline constexpr std::array<std::array<int, 3>, kNumLines> kLines{{
    {Q1, Q, H1},   // 0
    {Q2, Q, H2},   // 1
    {Q3, Q, H3},   // 2
    {Q1, H2, Q3},  // 3
    {Q1, H3, Q2},  // 4
    {Q3, H1, Q2},  // 5
    {H1, H2, H3},  // 6
}};

/// Frozen complementary quadruples in canonical order (the order is a fixed
/// convention of the artifact; the circle line reads the triangle first).
inline constexpr std::array<std::array<int, 4>, kNumLines> kQuadruples{{
    {Q2, Q3, H2, H3},  // 0: complement of {Q1, Q, H1}
    {Q1, Q3, H1, H3},  // 1
    {Q1, Q2, H1, H2},  // 2
    {Q, Q2, H1, H3},   // 3
    {Q, Q3, H1, H2},   // 4
    {Q, Q1, H2, H3},   // 5
    {Q1, Q2, Q3, Q},   // 6
}};

inline int point_index(const std::string& name) {
  for (int i = 0; i < kNumPoints; ++i)
    if (name == kPointNames[i]) return i;
  throw IoError("unknown Fano point name: " + name);
}

inline std::string line_name(int line) {
  const auto& l = kLines[static_cast<std::size_t>(line)];
  return std::string(kPointNames[l[0]]) + "-" + kPointNames[l[1]] + "-" + kPointNames[l[2]];
}

inline int line_index(const std::string& name) {
  for (int l = 0; l < kNumLines; ++l)
    if (name == line_name(l)) return l;
  // also accept any permutation of the three point names
  auto dash1 = name.find('-');
  auto dash2 = name.rfind('-');
  if (dash1 == std::string::npos || dash2 == dash1) throw UnknownLine("bad line id: " + name);
  std::set<int> pts{point_index(name.substr(0, dash1)),
                    point_index(name.substr(dash1 + 1, dash2 - dash1 - 1)),
                    point_index(name.substr(dash2 + 1))};
  for (int l = 0; l < kNumLines; ++l) {
    const auto& cl = kLines[static_cast<std::size_t>(l)];
    if (pts == std::set<int>{cl[0], cl[1], cl[2]}) return l;
  }
  throw UnknownLine("not a line of the canonical plane: " + name);
}

inline bool on_line(int line, int pt) {
  const auto& l = kLines[static_cast<std::size_t>(line)];
  return l[0] == pt || l[1] == pt || l[2] == pt;
}

/// The 4 points not incident to the line, in the frozen canonical order.
inline std::array<int, 4> quadruple(int line) {
  if (line < 0 || line >= kNumLines) throw UnknownLine("line index out of range");
  return kQuadruples[static_cast<std::size_t>(line)];
}

/// Third line concurrent with the two given ones; the quadruple of the result
/// is the symmetric difference of the two given quadruples.
inline int third_line(int alpha, int beta) {
  if (alpha == beta) throw EqualLines();
  auto qa = quadruple(alpha), qb = quadruple(beta);
  std::set<int> sym;
  for (int p : qa) sym.insert(p);
  for (int p : qb) {
    if (sym.count(p))
      sym.erase(p);
    else
      sym.insert(p);
  }
  for (int l = 0; l < kNumLines; ++l) {
    auto ql = quadruple(l);
    if (sym == std::set<int>(ql.begin(), ql.end())) return l;
  }
  throw Error("third_line: symmetric difference is not a quadruple (broken tables)");
}

/// Unique intersection point of two distinct lines.
inline int meet(int alpha, int beta) {
  if (alpha == beta) throw EqualLines();
  for (int p : kLines[static_cast<std::size_t>(alpha)])
    if (on_line(beta, p)) return p;
  throw Error("lines do not meet (broken tables)");
}

inline std::vector<int> lines_through(int pt) {
  std::vector<int> ls;
  for (int l = 0; l < kNumLines; ++l)
    if (on_line(l, pt)) ls.push_back(l);
  return ls;
}

/// Lines whose quadruple contains the point (the point is off those lines).
inline std::vector<int> lines_with_point_in_quadruple(int pt) {
  std::vector<int> ls;
  for (int l = 0; l < kNumLines; ++l)
    if (!on_line(l, pt)) ls.push_back(l);
  return ls;
}

}  // namespace fano

/// One point of a labeling: quaternion symbol, GF(2) class vector, split flag.
struct PointLabel {
  Rational a{1}, b{1};
  bool declared_split = true;
  std::vector<std::uint8_t> cls;  // length = class_rank
};

using LinePairing = std::array<std::array<int, 2>, 2>;  // two ordered point pairs

/// Assignment of quaternion symbols to the 7 points, with user-declared
/// Brauer classes over GF(2) and per-line pairing data.
struct FanoLabeling {
  int class_rank = 0;
  std::array<PointLabel, fano::kNumPoints> points;
  std::array<std::optional<LinePairing>, fano::kNumLines> pairings;

  const PointLabel& at(int pt) const { return points[static_cast<std::size_t>(pt)]; }
};

struct Violation {
  std::string code;     // e.g. "line-class-sum"
  std::string subject;  // offending line / point
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Pairings actually used per line (given or auto-derived); only meaningful
  /// when accepted().
  std::array<std::optional<LinePairing>, fano::kNumLines> resolved_pairings;
  bool accepted() const { return violations.empty(); }
};

namespace detail {

inline bool equal_class(const FanoLabeling& L, int p, int q) {
  return L.at(p).cls == L.at(q).cls;
}

inline bool identical_symbol(const FanoLabeling& L, int p, int q) {
  return L.at(p).a == L.at(q).a && L.at(p).b == L.at(q).b;
}

/// The three partitions of a quadruple into two pairs, in canonical order.
inline std::array<LinePairing, 3> pair_partitions(const std::array<int, 4>& q) {
  return {LinePairing{{{q[0], q[1]}, {q[2], q[3]}}},
          LinePairing{{{q[0], q[2]}, {q[1], q[3]}}},
          LinePairing{{{q[0], q[3]}, {q[1], q[2]}}}};
}

inline bool pairing_valid(const FanoLabeling& L, const LinePairing& pr) {
  for (const auto& pair : pr) {
    if (!equal_class(L, pair[0], pair[1])) return false;
    if (!identical_symbol(L, pair[0], pair[1])) return false;
  }
  return true;
}

}  // namespace detail

/// Validate all FanoLabeling invariants; failures are data, not errors.
inline ValidationReport validate_labeling(const FanoLabeling& L) {
  ValidationReport rep;
  auto flag = [&](std::string code, std::string subject, std::string msg) {
    rep.violations.push_back({std::move(code), std::move(subject), std::move(msg)});
  };

  for (int p = 0; p < fano::kNumPoints; ++p) {
    const auto& pl = L.at(p);
    if (static_cast<int>(pl.cls.size()) != L.class_rank)
      flag("class-vector-length", fano::kPointNames[p],
           "class vector length differs from class_rank");
    for (auto bit : pl.cls)
      if (bit > 1) flag("class-vector-bits", fano::kPointNames[p], "class entries must be 0/1");
    if (pl.a.is_zero() || pl.b.is_zero())
      flag("zero-symbol", fano::kPointNames[p], "symbol entries must be nonzero");
    if (pl.declared_split && !pl.a.is_one())
      flag("split-presentation", fano::kPointNames[p],
           "declared_split requires the canonical presentation a = 1");
  }
  if (!rep.violations.empty()) return rep;  // later checks assume well-formed vectors

  // points with equal class vectors carry identical symbols, or both split
  for (int p = 0; p < fano::kNumPoints; ++p)
    for (int q = p + 1; q < fano::kNumPoints; ++q) {
      if (!detail::equal_class(L, p, q)) continue;
      if (detail::identical_symbol(L, p, q)) continue;
      if (L.at(p).declared_split && L.at(q).declared_split) continue;
      flag("class-symbol-consistency",
           std::string(fano::kPointNames[p]) + "," + fano::kPointNames[q],
           "equal class vectors with different symbols and not both split");
    }

  // line sums over GF(2)
  for (int l = 0; l < fano::kNumLines; ++l) {
    const auto& line = fano::kLines[static_cast<std::size_t>(l)];
    for (int bit = 0; bit < L.class_rank; ++bit) {
      int s = 0;
      for (int p : line) s ^= L.at(p).cls[static_cast<std::size_t>(bit)];
      if (s != 0) {
        flag("line-class-sum", fano::line_name(l),
             "collinear class vectors do not sum to zero over GF(2)");
        break;
      }
    }
  }

  // pairings: validate given ones, derive missing ones
  for (int l = 0; l < fano::kNumLines; ++l) {
    auto quad = fano::quadruple(l);
    if (L.pairings[static_cast<std::size_t>(l)]) {
      const auto& pr = *L.pairings[static_cast<std::size_t>(l)];
      std::set<int> seen;
      for (const auto& pair : pr)
        for (int p : pair) seen.insert(p);
      if (seen != std::set<int>(quad.begin(), quad.end())) {
        flag("pairing-points", fano::line_name(l),
             "pairing does not partition the complementary quadruple");
        continue;
      }
      if (!detail::pairing_valid(L, pr))
        flag("pairing-compatibility", fano::line_name(l),
             "a declared pair joins points of different class or symbol");
      else
        rep.resolved_pairings[static_cast<std::size_t>(l)] = pr;
    } else {
      bool found = false;
      for (const auto& pr : detail::pair_partitions(quad)) {
        if (detail::pairing_valid(L, pr)) {
          rep.resolved_pairings[static_cast<std::size_t>(l)] = pr;
          found = true;
          break;
        }
      }
      if (!found)
        flag("pairing-unavailable", fano::line_name(l),
             "no partition of the quadruple into identical-symbol pairs of equal class");
    }
  }
  if (!rep.accepted())
    for (auto& pr : rep.resolved_pairings) pr.reset();
  return rep;
}

// --- JSON schema ---
// {"class_rank": r,
//  "points": {"<name>": {"symbol": ["a","b"], "class": [bits], "split": bool}},
//  "pairings": {"<line>": [["p","q"],["r","s"]]}}   (pairings optional)

inline FanoLabeling labeling_from_json(const nlohmann::json& j) {
  FanoLabeling L;
  if (!j.is_object() || !j.contains("class_rank") || !j.contains("points"))
    throw IoError("labeling: expected object with class_rank and points");
  L.class_rank = j.at("class_rank").get<int>();
  const auto& pts = j.at("points");
  for (int p = 0; p < fano::kNumPoints; ++p) {
    const char* name = fano::kPointNames[p];
    if (!pts.contains(name)) throw IoError(std::string("labeling: missing point ") + name);
    const auto& jp = pts.at(name);
    PointLabel pl;
    const auto& sym = jp.at("symbol");
    if (!sym.is_array() || sym.size() != 2) throw IoError("labeling: symbol must be [a, b]");
    auto scalar_of = [](const nlohmann::json& v) {
      return v.is_string() ? Rational::from_string(v.get<std::string>())
                           : Rational(v.get<long long>());
    };
    pl.a = scalar_of(sym[0]);
    pl.b = scalar_of(sym[1]);
    pl.declared_split = jp.value("split", false);
    pl.cls.clear();
    if (jp.contains("class"))
      for (const auto& bit : jp.at("class")) pl.cls.push_back(bit.get<std::uint8_t>());
    L.points[static_cast<std::size_t>(p)] = pl;
  }
  if (j.contains("pairings")) {
    for (const auto& [key, val] : j.at("pairings").items()) {
      int l = fano::line_index(key);
      if (!val.is_array() || val.size() != 2) throw IoError("labeling: pairing must be two pairs");
      LinePairing pr{};
      for (int t = 0; t < 2; ++t) {
        if (!val[static_cast<std::size_t>(t)].is_array() || val[static_cast<std::size_t>(t)].size() != 2)
          throw IoError("labeling: each pairing entry must be a pair of points");
        for (int s = 0; s < 2; ++s)
          pr[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] =
              fano::point_index(val[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)].get<std::string>());
      }
      L.pairings[static_cast<std::size_t>(l)] = pr;
    }
  }
  return L;
}

inline nlohmann::json labeling_to_json(const FanoLabeling& L) {
  nlohmann::json pts = nlohmann::json::object();
  for (int p = 0; p < fano::kNumPoints; ++p) {
    const auto& pl = L.at(p);
    nlohmann::json jp;
    jp["symbol"] = {pl.a.to_string(), pl.b.to_string()};
    jp["class"] = pl.cls;
    jp["split"] = pl.declared_split;
    pts[fano::kPointNames[p]] = jp;
  }
  nlohmann::json j;
  j["class_rank"] = L.class_rank;
  j["points"] = pts;
  nlohmann::json prs = nlohmann::json::object();
  for (int l = 0; l < fano::kNumLines; ++l)
    if (L.pairings[static_cast<std::size_t>(l)]) {
      const auto& pr = *L.pairings[static_cast<std::size_t>(l)];
      prs[fano::line_name(l)] = {{fano::kPointNames[pr[0][0]], fano::kPointNames[pr[0][1]]},
                                 {fano::kPointNames[pr[1][0]], fano::kPointNames[pr[1][1]]}};
    }
  if (!prs.empty()) j["pairings"] = prs;
  return j;
}

/// The two labelings shipped as fixtures, also available programmatically.
inline FanoLabeling split_labeling() {
  FanoLabeling L;
  L.class_rank = 0;
  for (auto& pl : L.points) pl = PointLabel{Rational(1), Rational(1), true, {}};
  return L;
}

inline FanoLabeling hamilton_labeling() {
  FanoLabeling L;
  L.class_rank = 1;
  for (int p : {fano::Q, fano::Q3, fano::H3})
    L.points[static_cast<std::size_t>(p)] = PointLabel{Rational(1), Rational(1), true, {0}};
  for (int p : {fano::Q1, fano::Q2, fano::H1, fano::H2})
    L.points[static_cast<std::size_t>(p)] = PointLabel{Rational(-1), Rational(-1), false, {1}};
  return L;
}

}  // namespace e7forge
