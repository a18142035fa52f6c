#include "profil/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace modchain {

namespace {

constexpr const char* kMagic = "profil-arrays 1";

Eigen::MatrixXd scalar(double x) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = x;
  return m;
}

const Eigen::MatrixXd& get(const NamedArrays& arrays, const std::string& name) {
  const auto it = arrays.find(name);
  if (it == arrays.end())
    throw std::runtime_error("checkpoint: missing array '" + name + "'");
  return it->second;
}

}  // namespace

void save_arrays(const std::string& path, const NamedArrays& arrays) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("save_arrays: cannot open '" + tmp + "'");
    out << kMagic << "\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& [name, m] : arrays) {
      out << name << " " << m.rows() << " " << m.cols() << "\n";
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (c) out << " ";
          out << m(r, c);
        }
        out << "\n";
      }
    }
    if (!out) throw std::runtime_error("save_arrays: write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("save_arrays: rename to '" + path + "' failed");
}

NamedArrays load_arrays(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_arrays: cannot open '" + path + "'");
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic)
    throw std::runtime_error("load_arrays: '" + path + "' has unexpected header");
  NamedArrays arrays;
  std::string name;
  Eigen::Index rows, cols;
  while (in >> name >> rows >> cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> m(r, c)))
          throw std::runtime_error("load_arrays: truncated array '" + name + "' in '" +
                                   path + "'");
    arrays[name] = std::move(m);
  }
  return arrays;
}

void save_policy(const std::string& path, const PolicyParams& p) {
  NamedArrays arrays;
  arrays["W1"] = p.W1;
  arrays["b1"] = p.b1;
  arrays["W2"] = p.W2;
  arrays["b2"] = p.b2;
  arrays["W3"] = p.W3;
  arrays["b3"] = p.b3;
  save_arrays(path, arrays);
}

PolicyParams load_policy(const std::string& path) {
  const NamedArrays arrays = load_arrays(path);
  PolicyParams p;
  p.W1 = get(arrays, "W1");
  p.b1 = get(arrays, "b1");
  p.W2 = get(arrays, "W2");
  p.b2 = get(arrays, "b2");
  p.W3 = get(arrays, "W3");
  p.b3 = get(arrays, "b3");
  return p;
}

void save_probe(const std::string& path, const Probe& probe, double held_out_auroc) {
  NamedArrays arrays;
  arrays["H"] = scalar(probe.H);
  arrays["d_h"] = scalar(probe.d_h);
  arrays["gain1"] = probe.gain1;
  arrays["offset1"] = probe.offset1;
  arrays["gain2"] = probe.gain2;
  arrays["offset2"] = probe.offset2;
  arrays["K1"] = probe.K1;
  arrays["V1"] = probe.V1;
  arrays["K2"] = probe.K2;
  arrays["V2"] = probe.V2;
  arrays["Q"] = probe.Q;
  arrays["gamma"] = probe.gamma;
  arrays["w_o"] = probe.w_o;
  arrays["b_o"] = scalar(probe.b_o);
  arrays["held_out_auroc"] = scalar(held_out_auroc);
  save_arrays(path, arrays);
}

Probe load_probe(const std::string& path, double* held_out_auroc) {
  const NamedArrays arrays = load_arrays(path);
  Probe p;
  p.H = static_cast<int>(get(arrays, "H")(0, 0));
  p.d_h = static_cast<int>(get(arrays, "d_h")(0, 0));
  p.gain1 = get(arrays, "gain1");
  p.offset1 = get(arrays, "offset1");
  p.gain2 = get(arrays, "gain2");
  p.offset2 = get(arrays, "offset2");
  p.K1 = get(arrays, "K1");
  p.V1 = get(arrays, "V1");
  p.K2 = get(arrays, "K2");
  p.V2 = get(arrays, "V2");
  p.Q = get(arrays, "Q");
  p.gamma = get(arrays, "gamma");
  p.w_o = get(arrays, "w_o");
  p.b_o = get(arrays, "b_o")(0, 0);
  if (held_out_auroc) *held_out_auroc = get(arrays, "held_out_auroc")(0, 0);
  return p;
}

}  // namespace modchain
