#pragma once

// File formats: matrix text (first line n, then n whitespace-separated rows)
// and the instance JSON schema.

#include <Eigen/Dense>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "isinglab/instances.hpp"

namespace isinglab {

inline Eigen::MatrixXd read_matrix(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 1)
    throw std::runtime_error("read_matrix: bad or missing dimension line");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(in >> m(i, j)))
        throw std::runtime_error("read_matrix: truncated matrix data");
  return m;
}

inline Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matrix file: " + path);
  return read_matrix(f);
}

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      out << m(i, j);
    }
    out << "\n";
  }
}

// {"n","N","beta","gamma","seed","ys":[[row-major reals]],"spike":[+-1]|null}
// Each entry of "ys" is one observation vector of length n.
inline nlohmann::json instance_to_json(const SpikedInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["N"] = inst.N;
  j["beta"] = inst.beta;
  j["gamma"] = inst.gamma;
  j["seed"] = inst.seed;
  nlohmann::json ys = nlohmann::json::array();
  for (int c = 0; c < inst.N; ++c) {
    nlohmann::json row = nlohmann::json::array();
    for (int r = 0; r < inst.n; ++r) row.push_back(inst.ys(r, c));
    ys.push_back(row);
  }
  j["ys"] = ys;
  if (inst.spike) {
    nlohmann::json sp = nlohmann::json::array();
    for (int r = 0; r < inst.n; ++r) sp.push_back(int((*inst.spike)(r)));
    j["spike"] = sp;
  } else {
    j["spike"] = nullptr;
  }
  return j;
}

inline SpikedInstance instance_from_json(const nlohmann::json& j) {
  SpikedInstance inst;
  inst.n = j.at("n").get<int>();
  inst.N = j.at("N").get<int>();
  inst.beta = j.at("beta").get<double>();
  inst.gamma = j.at("gamma").get<double>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  const auto& ys = j.at("ys");
  if (int(ys.size()) != inst.N)
    throw std::runtime_error("instance_from_json: ys count != N");
  inst.ys.resize(inst.n, inst.N);
  for (int c = 0; c < inst.N; ++c) {
    if (int(ys[c].size()) != inst.n)
      throw std::runtime_error("instance_from_json: vector dimension != n");
    for (int r = 0; r < inst.n; ++r) inst.ys(r, c) = ys[c][r].get<double>();
  }
  if (!j.at("spike").is_null()) {
    Eigen::VectorXd sp(inst.n);
    for (int r = 0; r < inst.n; ++r) {
      const double v = j["spike"][r].get<double>();
      if (v != 1.0 && v != -1.0)
        throw std::runtime_error("instance_from_json: spike entries must be +-1");
      sp(r) = v;
    }
    inst.spike = sp;
  }
  return inst;
}

inline SpikedInstance read_instance_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  f >> j;
  return instance_from_json(j);
}

}  // namespace isinglab
