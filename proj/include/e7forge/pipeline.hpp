#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "e7forge/lts_gift.hpp"

namespace e7forge {

/// Batch pipeline configuration. Commands run in the given order; commands
/// with arguments use ":" (grade:Q, base-change:-1). Dependency order is a
/// config invariant: build before the verify commands, grade before
/// lts/gift/formula-star/d6a1.
struct PipelineConfig {
  std::string labeling_path;
  std::vector<std::string> commands;
  std::string output_dir;
  std::uint64_t seed = 20240801;
  int prime_count = 8;
};

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  if (!j.is_object()) throw IoError("config: expected a JSON object");
  if (!j.contains("labeling_path")) throw IoError("config: missing field labeling_path");
  cfg.labeling_path = j.at("labeling_path").get<std::string>();
  if (!j.contains("commands")) throw IoError("config: missing field commands");
  for (const auto& c : j.at("commands")) cfg.commands.push_back(c.get<std::string>());
  cfg.output_dir = j.value("output_dir", std::string("."));
  cfg.seed = j.value("seed", std::uint64_t{20240801});
  cfg.prime_count = j.value("prime_count", 8);
  if (cfg.prime_count < 1 || cfg.prime_count > 64)
    throw IoError("config: prime_count out of range");
  return cfg;
}

struct PipelineResult {
  int exit_code = 0;
  nlohmann::json summary;
  std::vector<std::string> report_files;
};

namespace detail {

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

/// Everything the commands thread through the pipeline.
struct PipelineState {
  FanoLabeling labeling;
  std::optional<ValidationReport> validation;
  std::optional<E7Assembly> assembly;
  std::optional<SCAlgebra<QuadExt>> extended;  // after base-change
  long long ambient_d = 0;
  std::optional<GradedE7<Rational>> graded_q;
  std::optional<GradedE7<QuadExt>> graded_x;
  std::optional<LieTripleSystem<Rational>> lts_q;
  std::optional<LieTripleSystem<QuadExt>> lts_x;
  std::optional<GiftData<Rational>> gift_q;
  std::optional<GiftData<QuadExt>> gift_x;
  bool on_extension = false;
};

template <class K>
std::vector<SparseVec<K>> seven_cartan(const FanoLabeling& L, long long ambient_d) {
  std::vector<SparseVec<K>> cartan;
  for (int p = 0; p < fano::kNumPoints; ++p) {
    QuatAlgebra<K> qa(K(L.at(p).a), K(L.at(p).b), L.at(p).declared_split);
    auto mu = split_matrix_units(qa, ambient_d);
    cartan.push_back(detail::embed_sl1(detail::matrix_unit_h(mu), p));
  }
  return cartan;
}

}  // namespace detail

/// Golden-file payload: the sparse structure constants plus the constants
/// table and the labeling; byte-stable for a fixed config and seed.
inline nlohmann::json golden_to_json(const E7Assembly& A) {
  nlohmann::json j;
  j["format"] = "e7forge-golden-v1";
  j["labeling"] = labeling_to_json(A.labeling);
  j["algebra"] = scalgebra_to_json(A.algebra);
  j["constants"] = constants_to_json(A);
  return j;
}

struct GoldenFile {
  FanoLabeling labeling;
  SCAlgebra<Rational> algebra;
  nlohmann::json constants;
};

inline GoldenFile golden_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "e7forge-golden-v1")
    throw IoError("golden file: bad or missing format tag");
  GoldenFile g;
  g.labeling = labeling_from_json(j.at("labeling"));
  g.algebra = scalgebra_from_json(j.at("algebra"));
  g.constants = j.value("constants", nlohmann::json::object());
  return g;
}

/// Execute the configured commands, writing one JSON report per command plus
/// a summary. Exit code 0 = all checks pass, 1 = config/validation failure,
/// 2 = mathematical verification failure (with witness in the report).
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult result;
  nlohmann::json summary;
  summary["seed"] = cfg.seed;
  auto pool = default_prime_pool(cfg.prime_count);
  summary["primes"] = pool;
  summary["commands"] = cfg.commands;

  std::filesystem::create_directories(cfg.output_dir);
  detail::PipelineState st;

  // schema errors are config failures (exit 1)
  {
    std::ifstream in(cfg.labeling_path);
    if (!in) {
      summary["error"] = "cannot open labeling file: " + cfg.labeling_path;
      result.exit_code = 1;
      result.summary = summary;
      return result;
    }
    nlohmann::json j;
    try {
      in >> j;
      st.labeling = labeling_from_json(j);
    } catch (const std::exception& e) {
      summary["error"] = std::string("labeling parse error: ") + e.what();
      result.exit_code = 1;
      result.summary = summary;
      return result;
    }
  }

  // dependency-order invariant of the command list
  {
    bool built = false, graded = false, lts_done = false, gift_done = false;
    for (const auto& cmd : cfg.commands) {
      std::string op = cmd.substr(0, cmd.find(':'));
      if (op == "build") built = true;
      if (op == "grade") {
        if (!built) {
          summary["error"] = "config: grade requires build earlier in commands";
          result.exit_code = 1;
          result.summary = summary;
          return result;
        }
        graded = true;
      }
      if (op == "verify-jacobi" || op == "verify-killing" || op == "verify-roots" ||
          op == "base-change") {
        if (!built) {
          summary["error"] = "config: " + op + " requires build earlier in commands";
          result.exit_code = 1;
          result.summary = summary;
          return result;
        }
      }
      if (op == "lts") {
        if (!graded) {
          summary["error"] = "config: lts requires grade earlier in commands";
          result.exit_code = 1;
          result.summary = summary;
          return result;
        }
        lts_done = true;
      }
      if (op == "gift" || op == "formula-star") {
        if (!lts_done) {
          summary["error"] = "config: " + op + " requires lts earlier in commands";
          result.exit_code = 1;
          result.summary = summary;
          return result;
        }
        if (op == "gift") gift_done = true;
      }
      if (op == "formula-star" && !gift_done) {
        summary["error"] = "config: formula-star requires gift earlier in commands";
        result.exit_code = 1;
        result.summary = summary;
        return result;
      }
      if (op == "d6a1" && !graded) {
        summary["error"] = "config: d6a1 requires grade earlier in commands";
        result.exit_code = 1;
        result.summary = summary;
        return result;
      }
    }
  }

  bool math_failed = false;
  int index = 0;
  for (const auto& cmd : cfg.commands) {
    ++index;
    std::string op = cmd.substr(0, cmd.find(':'));
    std::string arg = cmd.find(':') == std::string::npos ? "" : cmd.substr(cmd.find(':') + 1);
    nlohmann::json rep;
    rep["check"] = cmd;
    rep["seed"] = cfg.seed;
    rep["primes"] = pool;
    rep["status"] = "pass";
    rep["witnesses"] = nlohmann::json::array();

    auto record_failure = [&](const std::string& witness) {
      rep["status"] = "fail";
      rep["witnesses"].push_back(witness);
      math_failed = true;
    };

    if (math_failed) {
      rep["status"] = "skipped";
      rep["witnesses"].push_back("skipped: an earlier check failed");
    } else {
      try {
        if (op == "validate") {
          st.validation = validate_labeling(st.labeling);
          nlohmann::json viols = nlohmann::json::array();
          for (const auto& v : st.validation->violations)
            viols.push_back({{"code", v.code}, {"subject", v.subject}, {"message", v.message}});
          rep["violations"] = viols;
          if (!st.validation->accepted()) {
            rep["status"] = "rejected";
            summary["validate"] = "rejected";
            // validation rejection is a config-level failure (exit 1)
            std::ofstream out(std::filesystem::path(cfg.output_dir) /
                              (std::to_string(index) + "_" + op + ".json"));
            rep["meta"] = {{"timestamp", detail::iso_timestamp()}};
            out << rep.dump(2) << "\n";
            result.exit_code = 1;
            summary["error"] = "labeling rejected; see report " + std::to_string(index);
            result.summary = summary;
            return result;
          }
          summary["validate"] = "accepted";
        } else if (op == "build") {
          st.graded_q.reset();
          st.lts_q.reset();
          st.gift_q.reset();
          st.extended.reset();
          st.on_extension = false;
          st.assembly = assemble(st.labeling);
          rep["dims"] = {{"dim", st.assembly->algebra.dim},
                         {"h", kHDim},
                         {"lines", 7},
                         {"tensor_nnz", st.assembly->algebra.tensor_nnz()}};
          rep["gauge"] = {{"free_unknowns", st.assembly->gauge.free_unknowns},
                          {"notes", st.assembly->gauge.notes}};
          rep["schur"] = "all intertwiner spaces one-dimensional";
          rep["trace_map_note"] =
              "cross-line generators are solver-computed intertwiner bases; no identification "
              "with the trace contraction is asserted";
          {
            nlohmann::json quads = nlohmann::json::object();
            for (int l = 0; l < 7; ++l) {
              nlohmann::json q = nlohmann::json::array();
              for (int pt : fano::quadruple(l)) q.push_back(fano::kPointNames[pt]);
              quads[fano::line_name(l)] = q;
            }
            rep["conventions"] = {
                {"quadruple_order",
                 "frozen artifact convention: complement sorted by canonical point index, circle "
                 "line reads the outer triangle first"},
                {"quadruples", quads}};
          }
          summary["dim"] = st.assembly->algebra.dim;
        } else if (op == "verify-jacobi") {
          if (st.on_extension) {
            auto jrep = jacobi_check_full(*st.extended);
            rep["triples"] = jrep.triples_checked;
            if (!jrep.pass) record_failure("jacobi fails over the extension");
          } else {
            auto jrep = jacobi_check_full(st.assembly->algebra);
            rep["triples"] = jrep.triples_checked;
            if (!jrep.pass) {
              record_failure("jacobi fails at (" + std::to_string(jrep.witness->i) + "," +
                             std::to_string(jrep.witness->j) + "," + std::to_string(jrep.witness->k) +
                             ")");
            }
          }
          if (rep["status"] == "pass") summary["jacobi"] = "exact";
        } else if (op == "verify-killing") {
          bool nondeg;
          std::uint64_t prime = 0;
          if (st.on_extension) {
            // entries of the base-changed Killing matrix stay rational
            auto km = killing_matrix(*st.extended);
            std::vector<std::vector<Rational>> kq(km.size());
            for (std::size_t i = 0; i < km.size(); ++i)
              for (const auto& v : km[i]) kq[i].push_back(expect_rational(v, "Killing entry"));
            nondeg = killing_nondegenerate(kq, &prime, pool);
          } else {
            nondeg = killing_nondegenerate(killing_matrix(st.assembly->algebra), &prime, pool);
          }
          rep["certificate_prime"] = prime;
          if (!nondeg) record_failure("killing form is degenerate");
          else summary["killing"] = "nondegenerate";
        } else if (op == "verify-roots") {
          int root_count = 0;
          std::string label;
          bool stable = true;
          if (st.on_extension) {
            auto cartan = detail::seven_cartan<QuadExt>(st.labeling, st.ambient_d);
            auto datum = roots(*st.extended, cartan);
            root_count = static_cast<int>(datum.roots.size());
            label = identify_type(datum, cfg.seed).label;
            for (int t = 1; t < 5; ++t)
              if (identify_type(datum, cfg.seed + static_cast<std::uint64_t>(t)).label != label)
                stable = false;
          } else {
            auto cartan = detail::seven_cartan<Rational>(st.labeling, 0);
            auto datum = roots(st.assembly->algebra, cartan);
            root_count = static_cast<int>(datum.roots.size());
            label = identify_type(datum, cfg.seed).label;
            for (int t = 1; t < 5; ++t)
              if (identify_type(datum, cfg.seed + static_cast<std::uint64_t>(t)).label != label)
                stable = false;
          }
          rep["roots"] = root_count;
          rep["type"] = label;
          rep["stable_over_functionals"] = stable;
          if (root_count != 126 || label != "E7" || !stable)
            record_failure("expected 126 roots of type E7, stable over functionals");
          else {
            summary["roots"] = root_count;
            summary["type"] = label;
          }
        } else if (op == "grade") {
          int p = fano::point_index(arg.empty() ? "Q" : arg);
          nlohmann::json dims = nlohmann::json::array();
          if (st.on_extension) {
            st.graded_x = grade_at_point(*st.extended, st.labeling, p, st.ambient_d);
            for (int d = -2; d <= 2; ++d) dims.push_back(st.graded_x->layer(d).size());
          } else {
            st.graded_q = grade_at_point(st.assembly->algebra, st.labeling, p);
            for (int d = -2; d <= 2; ++d) dims.push_back(st.graded_q->layer(d).size());
          }
          rep["dims"] = dims;
          summary["grade"] = dims;
        } else if (op == "lts") {
          nlohmann::json axioms;
          if (st.on_extension) {
            st.lts_x = lts_extract(*st.graded_x);
            auto arep = lts_verify(*st.lts_x, cfg.seed);
            axioms = {{"axiom1", arep.axiom1}, {"axiom2", arep.axiom2}, {"axiom3", arep.axiom3},
                      {"basis_triples", arep.basis_triples_checked},
                      {"random_triples", arep.random_triples_checked}};
            if (!arep.pass()) record_failure(arep.witness);
          } else {
            st.lts_q = lts_extract(*st.graded_q);
            auto arep = lts_verify(*st.lts_q, cfg.seed);
            axioms = {{"axiom1", arep.axiom1}, {"axiom2", arep.axiom2}, {"axiom3", arep.axiom3},
                      {"basis_triples", arep.basis_triples_checked},
                      {"random_triples", arep.random_triples_checked}};
            if (!arep.pass()) record_failure(arep.witness);
          }
          rep["axioms"] = axioms;
          if (rep["status"] == "pass") summary["lts"] = "pass";
        } else if (op == "gift") {
          auto run_gift = [&](auto& graded, auto& lts, auto& slot) {
            using KK = std::decay_t<decltype(graded->e.front().second)>;
            slot = faulkner_data(*graded, *lts);
            rep["pairing_rank"] = 32;
            rep["hermitian_sign"] = slot->hermitian_sign;
            // pi well-definedness on seeded random pairs
            Rng rng(cfg.seed);
            int checked = 0;
            for (int t = 0; t < 500; ++t) {
              SparseVec<KK> u, v;
              for (int i = 0; i < 32; ++i) {
                long long cu = rng.range(-2, 2), cv = rng.range(-2, 2);
                if (cu) u = sv_add(u, sv_unit(i, KK(cu)));
                if (cv) v = sv_add(v, sv_unit(i, KK(cv)));
              }
              // matrix of <.,u>v against pi of it vs matrix of <u,v,.>
              SparseMat<KK> r1(32, 32);
              for (int c = 0; c < 32; ++c) {
                KK coeff = slot->pair(sv_unit(c, KK(1)), u);
                if (coeff.is_zero()) continue;
                for (const auto& [r, val] : v) r1.set(r, c, val * coeff);
              }
              SparseMat<KK> lhs = slot->pi_apply(r1);
              SparseMat<KK> rhs(32, 32);
              for (const auto& [i, iu] : u)
                for (const auto& [j, jv] : v)
                  rhs = sm_add(rhs, sm_scale(slot->ternary_op[static_cast<std::size_t>(i)]
                                                             [static_cast<std::size_t>(j)],
                                             iu * jv));
              if (!(lhs == rhs)) {
                record_failure("pi well-definedness fails on random pair " + std::to_string(t));
                break;
              }
              ++checked;
            }
            rep["pi_welldefined_pairs"] = checked;
          };
          if (st.on_extension) run_gift(st.graded_x, st.lts_x, st.gift_x);
          else run_gift(st.graded_q, st.lts_q, st.gift_q);
          if (rep["status"] == "pass") summary["gift"] = "pass";
        } else if (op == "formula-star") {
          auto run_star = [&](auto& graded, auto& lts, auto& gift) {
            auto fs = verify_formula_star(*graded, *lts, *gift);
            rep["gauge"] = {{"t", fs.gauge_t.to_string()}};
            rep["pairs"] = fs.pairs_checked;
            summary["formula_star"] = "exact";
            summary["formula_star_t"] = fs.gauge_t.to_string();
          };
          if (st.on_extension) run_star(st.graded_x, st.lts_x, st.gift_x);
          else run_star(st.graded_q, st.lts_q, st.gift_q);
        } else if (op == "d6a1") {
          auto run_d6a1 = [&](auto& graded) {
            auto dr = d6a1_structure(*graded);
            rep["d6"] = {{"dim", dr.d6_dim}, {"label", dr.d6_label}, {"roots", dr.d6_root_count}};
            rep["a1"] = dr.a1_label;
            rep["weights"] = {{"distinct", dr.distinct_weights},
                              {"multiplicity_two", dr.multiplicity_two},
                              {"equal_norms", dr.equal_norms},
                              {"minuscule", dr.minuscule},
                              {"single_orbit", dr.single_orbit}};
            if (!dr.pass())
              for (const auto& f : dr.failures) record_failure(f);
            else
              summary["d6a1"] = "pass";
          };
          if (st.on_extension) run_d6a1(st.graded_x);
          else run_d6a1(st.graded_q);
        } else if (op == "base-change") {
          long long d = std::stoll(arg.empty() ? "-1" : arg);
          if (d == 0 || d == 1) throw IoError("base-change: d must be a nonsquare square-free integer");
          for (long long q = 2; q * q <= std::llabs(d); ++q)
            if (d % (q * q) == 0) throw IoError("base-change: d must be square-free");
          st.extended = base_change(st.assembly->algebra, d);
          st.ambient_d = d;
          st.on_extension = true;
          st.graded_x.reset();
          st.lts_x.reset();
          st.gift_x.reset();
          rep["d"] = d;
          rep["dims"] = {{"dim", st.extended->dim}};
          summary["base_change_d"] = d;
        } else {
          summary["error"] = "config: unknown command " + cmd;
          result.exit_code = 1;
          result.summary = summary;
          return result;
        }
      } catch (const NoConsistentGauge& e) {
        record_failure(e.what());
      } catch (const GaugeInconsistent& e) {
        record_failure(e.what());
      } catch (const NoSolution& e) {
        record_failure(e.what());
      } catch (const NotSplitHere& e) {
        record_failure(e.what());
      } catch (const CenterNotSplit& e) {
        record_failure(e.what());
      } catch (const NotCartan& e) {
        record_failure(e.what());
      } catch (const NotSplit& e) {
        record_failure(e.what());
      } catch (const NotSemisimpleOverField& e) {
        record_failure(e.what());
      } catch (const Unrecognized& e) {
        record_failure(e.what());
      } catch (const DegeneratePairing& e) {
        record_failure(e.what());
      } catch (const ValidationFailed& e) {
        summary["error"] = e.what();
        result.exit_code = 1;
        result.summary = summary;
        return result;
      } catch (const IoError& e) {
        summary["error"] = e.what();
        result.exit_code = 1;
        result.summary = summary;
        return result;
      } catch (const Error& e) {
        record_failure(e.what());
      }
    }

    rep["meta"] = {{"timestamp", detail::iso_timestamp()}};
    auto path = std::filesystem::path(cfg.output_dir) / (std::to_string(index) + "_" + op + ".json");
    std::ofstream out(path);
    out << rep.dump(2) << "\n";
    result.report_files.push_back(path.string());
  }

  result.exit_code = math_failed ? 2 : 0;
  summary["exit_code"] = result.exit_code;
  result.summary = summary;
  {
    nlohmann::json with_meta = summary;
    with_meta["meta"] = {{"timestamp", detail::iso_timestamp()}};
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "summary.json");
    out << with_meta.dump(2) << "\n";
    result.report_files.push_back((std::filesystem::path(cfg.output_dir) / "summary.json").string());
  }
  return result;
}

/// Build from a config's labeling and write the golden file (structure
/// constants + constants table); byte-stable for fixed config and seed.
inline int emit_golden_file(const PipelineConfig& cfg, const std::string& out_path) {
  std::ifstream in(cfg.labeling_path);
  if (!in) throw IoError("cannot open labeling file: " + cfg.labeling_path);
  nlohmann::json j;
  in >> j;
  auto labeling = labeling_from_json(j);
  auto A = assemble(labeling);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open output file: " + out_path);
  out << golden_to_json(A).dump(2) << "\n";
  return 0;
}

}  // namespace e7forge
