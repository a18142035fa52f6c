#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "profil/policy.hpp"
#include "profil/probe.hpp"

namespace modchain {

// Flat named-array text format: a header line, then per array a "name rows
// cols" line followed by row-major values at full double precision.
using NamedArrays = std::map<std::string, Eigen::MatrixXd>;

void save_arrays(const std::string& path, const NamedArrays& arrays);
NamedArrays load_arrays(const std::string& path);

void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

// held_out_auroc rides along as a scalar entry.
void save_probe(const std::string& path, const Probe& probe, double held_out_auroc);
Probe load_probe(const std::string& path, double* held_out_auroc = nullptr);

}  // namespace modchain
