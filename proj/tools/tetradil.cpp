#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "tetra/io.hpp"
#include "tetra/suite.hpp"

namespace {

using namespace tetra;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

TetraPoint parse_point(const std::string& text) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw Error("cannot parse point component: " + piece);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (vals.size() == 3) return {Complex(vals[0], 0), Complex(vals[1], 0), Complex(vals[2], 0)};
  if (vals.size() == 6)
    return {Complex(vals[0], vals[1]), Complex(vals[2], vals[3]), Complex(vals[4], vals[5])};
  throw Error("a point needs 3 real or 6 interleaved re,im components");
}

int emit_report(const VerificationReport& report, bool json_out, const std::string& out_path) {
  const nlohmann::json j = report.to_json();
  if (!out_path.empty()) write_json_file(out_path, j);
  if (json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << report.to_text();
  return report.all_passed() ? kExitPass : kExitFail;
}

nlohmann::json fundamental_to_json(const FundamentalData& data) {
  nlohmann::json j;
  j["F1"] = matrix_to_json(data.f.f1);
  j["F2"] = matrix_to_json(data.f.f2);
  j["G1"] = matrix_to_json(data.g.f1);
  j["G2"] = matrix_to_json(data.g.f2);
  j["residuals"] = {{"f1", data.f.residual1},
                    {"f2", data.f.residual2},
                    {"g1", data.g.residual1},
                    {"g2", data.g.residual2}};
  j["radii"] = {{"f1", data.f.radius1},
                {"f2", data.f.radius2},
                {"g1", data.g.radius1},
                {"g2", data.g.radius2}};
  j["certified"] = data.f.certified && data.g.certified;
  j["defect_rank_p"] = data.dp.dim;
  j["defect_rank_pstar"] = data.dps.dim;
  return j;
}

void print_fundamental_text(const FundamentalData& data) {
  const Eigen::IOFormat fmt(9, 0, ", ", "\n", "  [", "]");
  std::cout << "defect rank of P: " << data.dp.dim
            << ", of P*: " << data.dps.dim << "\n";
  std::cout << "F1 =\n" << data.f.f1.format(fmt) << "\n";
  std::cout << "F2 =\n" << data.f.f2.format(fmt) << "\n";
  std::cout << "G1 =\n" << data.g.f1.format(fmt) << "\n";
  std::cout << "G2 =\n" << data.g.f2.format(fmt) << "\n";
  std::cout << "equation residuals: f " << std::max(data.f.residual1, data.f.residual2) << ", g "
            << std::max(data.g.residual1, data.g.residual2) << "\n";
  std::cout << "numerical radii: f " << std::max(data.f.radius1, data.f.radius2) << ", g "
            << std::max(data.g.radius1, data.g.radius2) << "\n";
  std::cout << (data.f.certified && data.g.certified ? "radius bound certified"
                                                     : "radius bound NOT certified")
            << "\n";
}

nlohmann::json truncation_to_json(const TruncatedOperator& trunc, const char* kind) {
  nlohmann::json j;
  j["kind"] = kind;
  j["levels"] = trunc.levels;
  j["matrix"] = matrix_to_json(trunc.matrix);
  j["edge_defect"] = trunc.edge_defect;
  j["dims"] = {{"h", trunc.dim_h}, {"defect_p", trunc.dim_p}, {"defect_pstar", trunc.dim_ps}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construct and numerically certify tetrablock unitary dilations"};
  app.require_subcommand(1);

  RunConfig cfg;
  try {
    if (const char* env = std::getenv("TETRADIL_CONFIG")) cfg = config_from_json(read_json_file(env));
  } catch (const std::exception& e) {
    std::cerr << "error: bad TETRADIL_CONFIG: " << e.what() << "\n";
    return kExitInput;
  }

  bool json_out = false;
  std::string out_path;
  std::string triple_path;
  InstanceSpec spec;
  std::vector<std::string> point_texts;
  int levels = 3;

  auto add_config_flags = [&](CLI::App* cmd) {
    cmd->add_option("--tol", cfg.tol, "residual tolerance");
    cmd->add_option("--rank-tol", cfg.rank_tol, "defect rank cutoff");
    cmd->add_option("--kmax", cfg.k_max, "max total power in the dilation equality");
    cmd->add_option("--samples", cfg.samples, "random vectors for sampled checks");
    cmd->add_option("--grid", cfg.angular_grid, "angles for numerical radius scans");
    cmd->add_option("--depth", cfg.depth, "tail depth for the minimality check");
  };
  auto add_output_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--json", json_out, "print JSON instead of text");
    cmd->add_option("--out", out_path, "also write the JSON report to this path");
  };
  auto add_instance_flags = [&](CLI::App* cmd, bool kind_required) {
    auto* kind = cmd->add_option("--kind", spec.kind,
                                 "instance kind: scalar | diagonal | unitary | compressed");
    if (kind_required) kind->required();
    cmd->add_option("--point", point_texts,
                    "tetrablock point x1,x2,x3 (3 reals, or 6 interleaved re,im); repeatable");
    cmd->add_option("--dim", spec.dim, "matrix dimension for generated kinds");
    cmd->add_option("--levels", spec.levels, "tail levels for the compressed kind");
    cmd->add_option("--seed", spec.seed, "generator seed");
  };

  CLI::App* check = app.add_subcommand("check", "structural checks for a triple file");
  check->add_option("file", triple_path, "triple JSON file")->required();
  add_config_flags(check);
  add_output_flags(check);

  CLI::App* fundamental =
      app.add_subcommand("fundamental", "solve the fundamental equations of a triple file");
  fundamental->add_option("file", triple_path, "triple JSON file")->required();
  add_config_flags(fundamental);
  fundamental->add_flag("--json", json_out, "print JSON instead of text");
  fundamental->add_option("--out", out_path, "also write the JSON result to this path");

  CLI::App* dilate = app.add_subcommand("dilate", "build the dilation and write truncations");
  dilate->add_option("file", triple_path, "triple JSON file")->required();
  dilate->add_option("--levels", levels, "tail positions kept in the truncation")->required();
  std::string dilate_dir;
  dilate->add_option("--out", dilate_dir, "output directory")->required();
  add_config_flags(dilate);

  CLI::App* verify = app.add_subcommand("verify", "run the full certification suite");
  verify->add_option("file", triple_path, "triple JSON file (or use --kind)");
  add_instance_flags(verify, false);
  add_config_flags(verify);
  add_output_flags(verify);

  CLI::App* generate = app.add_subcommand("generate", "write a generated instance to a file");
  add_instance_flags(generate, true);
  std::string generate_out;
  generate->add_option("--out", generate_out, "output triple file")->required();
  add_config_flags(generate);

  CLI::App* report_cmd = app.add_subcommand("report", "re-render a saved JSON report");
  std::string report_path;
  report_cmd->add_option("file", report_path, "report JSON file")->required();
  bool report_text = false;
  report_cmd->add_flag("--json", json_out, "print JSON");
  report_cmd->add_flag("--text", report_text, "print text (default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitInput;
  }

  try {
    for (const std::string& text : point_texts) spec.points.push_back(parse_point(text));
    validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (check->parsed()) {
    OperatorTriple t;
    try {
      t = load_triple(triple_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    return emit_report(necessary_checks(t, cfg.tol), json_out, out_path);
  }

  if (fundamental->parsed()) {
    OperatorTriple t;
    try {
      t = load_triple(triple_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    try {
      const FundamentalData data = analyze_triple(t, cfg.tol, cfg.rank_tol, cfg.angular_grid);
      const nlohmann::json j = fundamental_to_json(data);
      if (!out_path.empty()) write_json_file(out_path, j);
      if (json_out)
        std::cout << j.dump(2) << "\n";
      else
        print_fundamental_text(data);
      return (data.f.certified && data.g.certified) ? kExitPass : kExitFail;
    } catch (const Error& e) {
      std::cerr << "certification failed: " << e.what() << "\n";
      return kExitFail;
    }
  }

  if (dilate->parsed()) {
    OperatorTriple t;
    try {
      t = load_triple(triple_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    try {
      const FundamentalData data = analyze_triple(t, cfg.tol, cfg.rank_tol, cfg.angular_grid);
      const UnitaryDilation dil = build_unitary_dilation(data, cfg.tol);
      std::filesystem::create_directories(dilate_dir);
      const TruncatedOperator r1 = truncate_to_matrix(dil.r1(), levels);
      const TruncatedOperator r2 = truncate_to_matrix(dil.r2(), levels);
      const TruncatedOperator u = truncate_to_matrix(dil.u(), levels);
      write_json_file(dilate_dir + "/r1.json", truncation_to_json(r1, "r1"));
      write_json_file(dilate_dir + "/r2.json", truncation_to_json(r2, "r2"));
      write_json_file(dilate_dir + "/u.json", truncation_to_json(u, "u"));
      nlohmann::json summary;
      summary["levels"] = levels;
      summary["dims"] = {{"h", r1.dim_h}, {"defect_p", r1.dim_p}, {"defect_pstar", r1.dim_ps}};
      summary["edge_defects"] = {
          {"r1", r1.edge_defect}, {"r2", r2.edge_defect}, {"u", u.edge_defect}};
      write_json_file(dilate_dir + "/summary.json", summary);
      std::cout << "wrote r1.json, r2.json, u.json, summary.json to " << dilate_dir << "\n";
      return kExitPass;
    } catch (const Error& e) {
      std::cerr << "certification failed: " << e.what() << "\n";
      return kExitFail;
    }
  }

  if (verify->parsed()) {
    try {
      if (!triple_path.empty()) {
        if (!spec.kind.empty()) throw Error("give either a file or --kind, not both");
        spec.kind = "file";
        spec.path = triple_path;
      } else if (spec.kind.empty()) {
        throw Error("verify needs a triple file or --kind");
      }
      const OperatorTriple t = realize_instance(spec, cfg);
      return emit_report(run_suite(t, cfg, spec.seed, spec.describe()), json_out, out_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
  }

  if (generate->parsed()) {
    try {
      const OperatorTriple t = realize_instance(spec, cfg);
      save_triple(generate_out, t);
      std::cout << "wrote " << generate_out << "\n";
      return kExitPass;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
  }

  if (report_cmd->parsed()) {
    nlohmann::json j;
    try {
      j = read_json_file(report_path);
      if (!j.is_object() || !j.contains("checks") || !j["checks"].is_object())
        throw Error("not a report file: missing checks object");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    if (json_out) {
      std::cout << j.dump(2) << "\n";
    } else {
      for (const auto& [name, check_json] : j["checks"].items()) {
        std::cout << name << "  " << check_json.value("verdict", "?");
        if (check_json.contains("residual"))
          std::cout << "  residual " << check_json["residual"].dump() << "  threshold "
                    << check_json["threshold"].dump();
        if (check_json.contains("note")) std::cout << "  (" << check_json["note"].get<std::string>() << ")";
        std::cout << "\n";
      }
      std::cout << (j.value("all_passed", false) ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    }
    return j.value("all_passed", false) ? kExitPass : kExitFail;
  }

  return kExitInput;
}
