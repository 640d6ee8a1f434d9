// Acceptance suite: runs every acceptance criterion at its stated tolerance
// (all tolerances are exact-zero / exact-count) and prints one line per
// criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "e7forge/pipeline.hpp"

using namespace e7forge;
namespace fs = std::filesystem;
namespace fp = e7forge::fano;

namespace {

int failures = 0;

void line(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

FanoLabeling load_fixture(const std::string& rel) {
  std::ifstream in(std::string(E7FORGE_SOURCE_DIR) + "/fixtures/" + rel);
  nlohmann::json j;
  in >> j;
  return labeling_from_json(j);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

int main() {
  Timer total;

  // ---- criterion 1: split build -------------------------------------------
  Timer t1;
  FanoLabeling split = load_fixture("split.json");
  E7Assembly A = assemble(split);
  auto jrep = jacobi_check_full(A.algebra);
  std::uint64_t prime = 0;
  bool killing_ok = false;
  {
    auto km = killing_matrix(A.algebra);
    killing_ok = killing_nondegenerate(km, &prime);
  }
  bool c1 = A.algebra.dim == 133 && jrep.pass && jrep.triples_checked == 383306 && killing_ok;
  {
    std::ostringstream os;
    os << "split build: dim " << A.algebra.dim << ", jacobi exact on " << jrep.triples_checked
       << " triples, killing rank 133 mod " << prime << "  (" << t1.seconds() << " s)";
    line(1, c1, os.str());
  }

  // ---- criterion 2: type identification -----------------------------------
  Timer t2;
  bool c2 = false;
  std::string c2_msg;
  try {
    std::vector<SparseVec<Rational>> cartan = detail::seven_cartan<Rational>(split, 0);
    auto datum = roots(A.algebra, cartan);
    bool dims_one = true;
    for (const auto& rs : datum.root_spaces) dims_one &= rs.size() == 1;
    auto id = identify_type(datum, 20240801);
    bool stable = true;
    for (std::uint64_t s = 1; s <= 4; ++s)
      stable &= identify_type(datum, 20240801 + s).label == id.label;
    // permutation equivalence against the shipped Bourbaki table
    std::ifstream in(std::string(E7FORGE_SOURCE_DIR) + "/fixtures/bourbaki.json");
    nlohmann::json bb;
    in >> bb;
    auto expected = bb["E7"]["cartan_matrix"].get<std::vector<std::vector<int>>>();
    bool cartan_match = detail::cartan_permutation_equivalent(id.cartan_matrix, expected);
    c2 = datum.roots.size() == 126 && dims_one && id.label == "E7" && stable && cartan_match;
    std::ostringstream os;
    os << "type identification: " << datum.roots.size() << " one-dimensional root spaces, type "
       << id.label << ", Bourbaki match, stable over 5 functionals  (" << t2.seconds() << " s)";
    c2_msg = os.str();
  } catch (const std::exception& e) {
    c2_msg = std::string("type identification threw: ") + e.what();
  }
  line(2, c2, c2_msg);

  // ---- criterion 3: twisted build ------------------------------------------
  Timer t3;
  bool c3 = false;
  std::string c3_msg;
  FanoLabeling hamilton = load_fixture("hamilton.json");
  E7Assembly H = assemble(hamilton);
  try {
    auto hj = jacobi_check_full(H.algebra);
    std::uint64_t hprime = 0;
    bool hkill = killing_nondegenerate(killing_matrix(H.algebra), &hprime);
    auto Hx = base_change(H.algebra, -1);
    auto xj = jacobi_check_full(Hx);
    auto xkill = killing(Hx);
    auto cartan = detail::seven_cartan<QuadExt>(hamilton, -1);
    auto datum = roots(Hx, cartan);
    auto id = identify_type(datum, 20240801);
    bool stable = true;
    for (std::uint64_t s = 1; s <= 4; ++s)
      stable &= identify_type(datum, 20240801 + s).label == id.label;
    c3 = H.algebra.dim == 133 && hj.pass && hkill && xj.pass && xj.triples_checked == 383306 &&
         xkill.nondegenerate && datum.roots.size() == 126 && id.label == "E7" && stable;
    std::ostringstream os;
    os << "twisted build: exact jacobi over Q (killing mod " << hprime
       << "), after base change sqrt(-1): jacobi exact, killing nondegenerate, "
       << datum.roots.size() << " roots of type " << id.label << "  (" << t3.seconds() << " s)";
    c3_msg = os.str();
  } catch (const std::exception& e) {
    c3_msg = std::string("twisted build threw: ") + e.what();
  }
  line(3, c3, c3_msg);

  // ---- criterion 4: grading -------------------------------------------------
  Timer t4;
  bool c4 = false;
  std::string c4_msg;
  try {
    auto GS = grade_at_point(A.algebra, A.labeling, fp::Q);
    auto GH = grade_at_point(H.algebra, H.labeling, fp::Q);
    auto dims_of = [](const GradedE7<Rational>& G) {
      std::array<std::size_t, 5> d{};
      for (int deg = -2; deg <= 2; ++deg) d[static_cast<std::size_t>(deg + 2)] = G.layer(deg).size();
      return d;
    };
    std::array<std::size_t, 5> want{1, 32, 67, 32, 1};
    c4 = dims_of(GS) == want && dims_of(GH) == want;
    std::ostringstream os;
    os << "grading at the split center: layer dims (1, 32, 67, 32, 1) for both fixtures  ("
       << t4.seconds() << " s)";
    c4_msg = os.str();
    line(4, c4, c4_msg);

    // ---- criterion 5: LTS axioms -------------------------------------------
    Timer t5;
    auto TS = lts_extract(GS);
    auto TH = lts_extract(GH);
    auto a1 = lts_verify(TS, 20240801);
    auto a2 = lts_verify(TH, 20240801);
    bool c5 = a1.pass() && a2.pass() && a1.basis_triples_checked == 41664;
    {
      std::ostringstream os5;
      os5 << "LTS axioms: all three hold exactly on all basis triples, both fixtures ("
          << a1.basis_triples_checked << " cyclic triples each)  (" << t5.seconds() << " s)";
      line(5, c5, os5.str());
    }

    // ---- criterion 6: formula (*) ------------------------------------------
    Timer t6;
    auto gdS = faulkner_data(GS, TS);
    auto gdH = faulkner_data(GH, TH);
    auto fsS = verify_formula_star(GS, TS, gdS);
    auto fsH = verify_formula_star(GH, TH, gdH);
    bool pi_perturbation_fails = false, phi_perturbation_fails = false;
    std::string pi_witness, phi_witness;
    try {
      verify_formula_star(GS, TS, gdS, Rational(2), Rational(1), std::optional(fsS.gauge_t));
    } catch (const GaugeInconsistent& e) {
      pi_perturbation_fails = true;
      pi_witness = e.what();
    }
    try {
      verify_formula_star(GS, TS, gdS, Rational(1), Rational(-1));
    } catch (const GaugeInconsistent& e) {
      phi_perturbation_fails = true;
      phi_witness = e.what();
    } catch (const NoConsistentGauge& e) {
      phi_perturbation_fails = true;
      phi_witness = e.what();
    }
    bool c6 = fsS.pass && fsS.pairs_checked == 2016 && fsH.pass && fsH.pairs_checked == 2016 &&
              pi_perturbation_fails && phi_perturbation_fails;
    {
      std::ostringstream os6;
      os6 << "formula (*): exact on all 2016 pairs, gauge t = " << fsS.gauge_t.to_string()
          << " (split) and t = " << fsH.gauge_t.to_string()
          << " (twisted); perturbations fail with witnesses  (" << t6.seconds() << " s)";
      line(6, c6, os6.str());
    }

    // ---- criterion 7: embedding roundtrip ----------------------------------
    Timer t7;
    auto erS = embedding_roundtrip(TS);
    auto erH = embedding_roundtrip(TH);
    bool c7 = erS.pass() && erH.pass() && erS.modular_ranks == std::vector<int>{69, 69, 69};
    {
      std::ostringstream os7;
      os7 << "embedding roundtrip: span{D(u,v)} = 69 (exact + mod 3 primes), full jacobi, "
             "bijective homomorphism, both fixtures  ("
          << t7.seconds() << " s)";
      line(7, c7, os7.str());
    }

    // ---- criterion 8: D6 + A1 structure ------------------------------------
    Timer t8;
    auto dr = d6a1_structure(GS);
    bool c8 = dr.pass() && dr.d6_dim == 66 && dr.d6_label == "D6" && dr.d6_root_count == 60 &&
              dr.distinct_weights == 32 && dr.multiplicity_two && dr.minuscule && dr.single_orbit;
    {
      std::ostringstream os8;
      os8 << "D6+A1: 66-dimensional D6 ideal (60 roots), A1 ideal, odd part = 32 doubled "
             "minuscule weights in a single reflection orbit  ("
          << t8.seconds() << " s)";
      line(8, c8, os8.str());
    }
  } catch (const std::exception& e) {
    line(4, false, std::string("grading pipeline threw: ") + e.what());
    line(5, false, "skipped: grading pipeline threw");
    line(6, false, "skipped: grading pipeline threw");
    line(7, false, "skipped: grading pipeline threw");
    line(8, false, "skipped: grading pipeline threw");
  }

  // ---- criterion 9: Schur uniqueness ---------------------------------------
  Timer t9;
  bool c9 = true;
  int spaces = 0;
  for (const FanoLabeling* L : {&split, &hamilton}) {
    auto rep = validate_labeling(*L);
    std::vector<VAlphaModule<Rational>> mods;
    for (int l = 0; l < 7; ++l)
      mods.push_back(build_valpha(*L, *rep.resolved_pairings[static_cast<std::size_t>(l)], l));
    for (int l = 0; l < 7; ++l) {
      auto wedge = wedge_space(mods[static_cast<std::size_t>(l)].space);
      for (int pt : fp::quadruple(l)) {
        c9 &= equivariant_map_space(wedge, sl1_space(*L, pt)).size() == 1;
        ++spaces;
      }
    }
    for (int a = 0; a < 7; ++a)
      for (int b = a + 1; b < 7; ++b) {
        auto src = tensor_space(mods[static_cast<std::size_t>(a)].space,
                                mods[static_cast<std::size_t>(b)].space);
        c9 &= equivariant_map_space(src, mods[static_cast<std::size_t>(fp::third_line(a, b))].space)
                  .size() == 1;
        ++spaces;
      }
  }
  {
    std::ostringstream os;
    os << "Schur uniqueness: all " << spaces
       << " intertwiner spaces (28 wedge + 21 cross per fixture) are exactly one-dimensional  ("
       << t9.seconds() << " s)";
    line(9, c9 && spaces == 98, os.str());
  }

  // ---- criterion 10: line subalgebras --------------------------------------
  Timer t10;
  bool c10 = true;
  for (int l = 0; l < 7; ++l) {
    auto rep = line_subalgebra_check(A, l);
    c10 &= rep.pass() && rep.ideal_dim == 28;
    // D4 identification of the 28-dimensional ideal
    auto quad = fp::quadruple(l);
    std::vector<SparseVec<Rational>> basis;
    for (int t = 0; t < 4; ++t)
      for (int g = 0; g < 3; ++g)
        basis.push_back(sv_unit<Rational>(sl_idx(quad[static_cast<std::size_t>(t)], g), Rational(1)));
    for (int k = 0; k < 16; ++k) basis.push_back(sv_unit<Rational>(v_idx(l, k), Rational(1)));
    auto sub = subalgebra(A.algebra, basis);
    c10 &= killing(sub).nondegenerate;
    std::vector<SparseVec<Rational>> cartan;
    for (int t = 0; t < 4; ++t) cartan.push_back(sv_unit<Rational>(3 * t, Rational(1)));
    auto datum = roots(sub, cartan);
    c10 &= identify_type(datum).label == "D4" && datum.roots.size() == 24;
  }
  {
    std::ostringstream os;
    os << "line subalgebras: all 7 lines close at dimension 37 with a 28-dimensional D4 ideal  ("
       << t10.seconds() << " s)";
    line(10, c10, os.str());
  }

  // ---- criterion 11: determinism -------------------------------------------
  Timer t11;
  bool c11 = true;
  {
    auto dir = fs::temp_directory_path() / "e7forge_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    PipelineConfig cfg;
    cfg.labeling_path = std::string(E7FORGE_SOURCE_DIR) + "/fixtures/hamilton.json";
    cfg.commands = {"validate", "build", "verify-killing", "grade:Q"};
    cfg.seed = 424242;
    cfg.output_dir = (dir / "run_a").string();
    auto ra = run_pipeline(cfg);
    cfg.output_dir = (dir / "run_b").string();
    auto rb = run_pipeline(cfg);
    c11 &= ra.exit_code == 0 && rb.exit_code == 0 && ra.report_files.size() == rb.report_files.size();
    for (std::size_t i = 0; c11 && i < ra.report_files.size(); ++i) {
      std::ifstream fa(ra.report_files[i]), fb(rb.report_files[i]);
      nlohmann::json ja, jb;
      fa >> ja;
      fb >> jb;
      ja.erase("meta");
      jb.erase("meta");
      c11 &= ja.dump() == jb.dump();
    }
    emit_golden_file(cfg, (dir / "golden_a.json").string());
    emit_golden_file(cfg, (dir / "golden_b.json").string());
    auto bytes = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    c11 &= !bytes(dir / "golden_a.json").empty() &&
           bytes(dir / "golden_a.json") == bytes(dir / "golden_b.json");
  }
  {
    std::ostringstream os;
    os << "determinism: identical config and seed give byte-identical golden files and reports "
          "(metadata excluded)  ("
       << t11.seconds() << " s)";
    line(11, c11, os.str());
  }

  std::printf("\n%d/11 criteria passed in %.1f s\n", 11 - failures, total.seconds());
  return failures;
}
