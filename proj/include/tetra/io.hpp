#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tetra/fundamental.hpp"
#include "tetra/linalg.hpp"

namespace tetra {

/// Interchange format for a complex matrix:
///   {"rows": r, "cols": c, "data": [[re, im], ...]}
/// with data in row-major order.
inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::move(data);
  return j;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw Error("matrix_from_json: expected an object with rows, cols, data");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw Error("matrix_from_json: rows and cols must be integers");
  const auto rows = j["rows"].get<Eigen::Index>();
  const auto cols = j["cols"].get<Eigen::Index>();
  if (rows < 0 || cols < 0) throw Error("matrix_from_json: negative dimension");
  const nlohmann::json& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw Error("matrix_from_json: data must hold rows*cols entries");
  ComplexMatrix m(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const nlohmann::json& e = data[idx];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw Error("matrix_from_json: each entry must be a [re, im] pair");
      m(i, j2) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  if (!is_finite(m)) throw Error("matrix_from_json: non-finite entry");
  return m;
}

inline nlohmann::json triple_to_json(const OperatorTriple& t) {
  nlohmann::json j;
  j["A"] = matrix_to_json(t.a);
  j["B"] = matrix_to_json(t.b);
  j["P"] = matrix_to_json(t.p);
  return j;
}

inline OperatorTriple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("A") || !j.contains("B") || !j.contains("P"))
    throw Error("triple_from_json: expected an object with A, B, P");
  OperatorTriple t;
  t.a = matrix_from_json(j["A"]);
  t.b = matrix_from_json(j["B"]);
  t.p = matrix_from_json(j["P"]);
  if (t.a.rows() != t.a.cols() || t.a.rows() != t.b.rows() || t.b.rows() != t.b.cols() ||
      t.a.rows() != t.p.rows() || t.p.rows() != t.p.cols())
    throw Error("triple_from_json: A, B, P must be square matrices of one size");
  return t;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path);
}

inline OperatorTriple load_triple(const std::string& path) {
  return triple_from_json(read_json_file(path));
}

inline void save_triple(const std::string& path, const OperatorTriple& t) {
  write_json_file(path, triple_to_json(t));
}

}  // namespace tetra
