#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tetra/dilation.hpp"
#include "tetra/domain.hpp"
#include "tetra/fundamental.hpp"
#include "tetra/generators.hpp"
#include "tetra/io.hpp"
#include "tetra/report.hpp"
#include "tetra/verify.hpp"

namespace tetra {

struct RunConfig {
  double tol = 1e-9;
  double rank_tol = 1e-10;
  int k_max = 4;
  int samples = 200;
  int angular_grid = 720;
  int depth = 4;
};

inline void validate(const RunConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.rank_tol <= 0.0)
    throw std::invalid_argument("RunConfig: tolerances must be positive");
  if (cfg.k_max < 1 || cfg.samples < 1 || cfg.angular_grid < 8 || cfg.depth < 1)
    throw std::invalid_argument("RunConfig: counts must be positive (angular_grid >= 8)");
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["tol"] = cfg.tol;
  j["rank_tol"] = cfg.rank_tol;
  j["k_max"] = cfg.k_max;
  j["samples"] = cfg.samples;
  j["angular_grid"] = cfg.angular_grid;
  j["depth"] = cfg.depth;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config: expected an object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "tol")
      cfg.tol = value.get<double>();
    else if (key == "rank_tol")
      cfg.rank_tol = value.get<double>();
    else if (key == "k_max")
      cfg.k_max = value.get<int>();
    else if (key == "samples")
      cfg.samples = value.get<int>();
    else if (key == "angular_grid")
      cfg.angular_grid = value.get<int>();
    else if (key == "depth")
      cfg.depth = value.get<int>();
    else
      throw Error("config: unknown key " + key);
  }
  validate(cfg);
  return cfg;
}

/// Recipe for one verification subject: either a generated instance
/// (scalar, diagonal, unitary, compressed) or a triple loaded from a file.
struct InstanceSpec {
  std::string kind;
  std::vector<TetraPoint> points;
  int dim = 2;
  int levels = 3;
  std::uint64_t seed = 1;
  std::string path;

  std::string describe() const {
    std::ostringstream out;
    out << kind;
    if (kind == "scalar" || kind == "diagonal") {
      out << "(";
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) out << "; ";
        out << points[i].x1 << "," << points[i].x2 << "," << points[i].x3;
      }
      out << ")";
    } else if (kind == "unitary") {
      out << "(dim=" << dim << ", seed=" << seed << ")";
    } else if (kind == "compressed") {
      out << "(dim=" << dim << ", levels=" << levels << ", seed=" << seed << ")";
    } else if (kind == "file") {
      out << "(" << path << ")";
    }
    return out.str();
  }
};

inline OperatorTriple realize_instance(const InstanceSpec& spec, const RunConfig& cfg) {
  if (spec.kind == "scalar") {
    if (spec.points.size() != 1)
      throw Error("scalar instance needs exactly one point");
    return generate_scalar_instance(spec.points.front(), cfg.tol);
  }
  if (spec.kind == "diagonal") return generate_diagonal_instance(spec.points, cfg.tol);
  if (spec.kind == "unitary") return generate_tetrablock_unitary(spec.dim, spec.seed);
  if (spec.kind == "compressed")
    return random_compressed_instance(spec.dim, spec.levels, spec.seed, cfg.tol, cfg.rank_tol);
  if (spec.kind == "file") return load_triple(spec.path);
  throw Error("unknown instance kind: " + spec.kind);
}

/// Full certification pipeline for one triple. Stages that depend on a
/// failed prerequisite are marked skipped rather than silently dropped, so
/// the report always answers for every stage.
inline VerificationReport run_suite(const OperatorTriple& t, const RunConfig& cfg,
                                    std::uint64_t seed = 1,
                                    const std::string& description = "") {
  validate(cfg);
  require_triple_shapes(t, "run_suite");

  VerificationReport report;
  report.set_config("tol", cfg.tol);
  report.set_config("rank_tol", cfg.rank_tol);
  report.set_config("k_max", cfg.k_max);
  report.set_config("samples", cfg.samples);
  report.set_config("angular_grid", cfg.angular_grid);
  report.set_config("depth", cfg.depth);
  report.set_config("seed", seed);
  if (!description.empty()) report.set_config("instance", description);

  report.merge(necessary_checks(t, cfg.tol), "triple.");

  const double scale = std::max(1.0, operator_norm(t.a) + operator_norm(t.b));
  const char* dependent_stages[] = {
      "identity.defect-action",   "identity.adjoint-link", "identity.defect-transport",
      "identity.cross-defect",    "pair.f-pair-condition", "pair.g-pair-condition",
      "pair.equivalence",         "radius.f-family",       "radius.g-family",
      "dilation.hypothesis",
  };
  const char* dilation_stages[] = {
      "dilation.equality",       "unitary.conditions", "schaffer.structure",
      "blocks.identities",       "uniqueness.blocks",  "structure.triangular",
      "minimality.orbit",
  };

  FundamentalData data;
  try {
    data = analyze_triple(t, cfg.tol, cfg.rank_tol, cfg.angular_grid);
  } catch (const Error& e) {
    report.record_verdict("fundamental.solve", Verdict::fail, 0.0, 0.0, e.what());
    for (const char* name : dependent_stages) report.skip(name, "fundamental solve failed");
    for (const char* name : dilation_stages) report.skip(name, "fundamental solve failed");
    return report;
  }
  report.record("fundamental.residual-f", std::max(data.f.residual1, data.f.residual2),
                cfg.tol * scale);
  report.record("fundamental.residual-g", std::max(data.g.residual1, data.g.residual2),
                cfg.tol * scale);
  report.record("fundamental.radius-f", std::max(data.f.radius1, data.f.radius2), 1.0 + cfg.tol);
  report.record("fundamental.radius-g", std::max(data.g.radius1, data.g.radius2), 1.0 + cfg.tol);

  auto record_pair = [&](const char* name, std::pair<double, double> r) {
    report.record(name, std::max(r.first, r.second), cfg.tol * scale);
  };
  record_pair("identity.defect-action", verify_defect_action(t, data.dp, data.f));
  record_pair("identity.adjoint-link", verify_adjoint_link(t, data.dp, data.dps, data.f, data.g));
  record_pair("identity.defect-transport",
              verify_defect_transport(t, data.dp, data.dps, data.f, data.g));
  record_pair("identity.cross-defect",
              verify_cross_defect_link(t, data.dp, data.dps, data.f, data.g));

  report.merge(check_adjoint_pair_equivalence(data.f, data.g, cfg.tol), "pair.");
  report.merge(radius_certificates(data.f, data.g, 16, cfg.tol, cfg.angular_grid), "radius.");

  const PairCondition hyp = commutation_defects(data.f);
  const double hyp_defect = std::max(hyp.commutator, hyp.selfcommutator_gap);
  report.record("dilation.hypothesis", hyp_defect, cfg.tol);
  if (hyp_defect > cfg.tol) {
    for (const char* name : dilation_stages)
      report.skip(name, "dilation hypothesis not satisfied");
    return report;
  }

  const UnitaryDilation dil = build_unitary_dilation(data, cfg.tol);
  report.merge(verify_dilation_equality(dil, cfg.k_max, cfg.tol), "dilation.");
  report.merge(verify_unitary_triple_conditions(dil, cfg.samples, cfg.tol, seed), "unitary.");
  report.merge(verify_schaffer_structure(dil), "schaffer.");
  report.merge(verify_block_commutation_identities(dil, cfg.tol), "blocks.");
  report.merge(reconstruct_uniqueness(dil, cfg.tol, 6), "uniqueness.");
  report.merge(verify_triangular_structure(dil), "structure.");
  report.merge(minimality_rank_check(dil, cfg.depth), "minimality.");
  return report;
}

inline VerificationReport run_suite(const InstanceSpec& spec, const RunConfig& cfg) {
  const OperatorTriple t = realize_instance(spec, cfg);
  return run_suite(t, cfg, spec.seed, spec.describe());
}

}  // namespace tetra
