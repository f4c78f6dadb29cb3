#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixcop/marginals.hpp"
#include "mixcop/mcmc.hpp"
#include "mixcop/measures.hpp"

namespace mixcop {

using json = nlohmann::json;

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

// Panel CSV: one header row of variable names, one numeric row per
// individual, no missing values. Parse errors carry the line number.
Table read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

std::string fingerprint_file(const std::string& path);  // FNV-1a 64, hex

json load_config(const std::string& path);

// configuration sections (missing keys fall back to defaults; malformed
// entries raise UsageError naming the key)
ModelSpec parse_model(const json& cfg);
PriorConfig parse_priors(const json& cfg, int n_components);
RunConfig parse_run(const json& cfg);
std::vector<std::vector<double>> parse_atom_candidates(
    const json& cfg, const std::vector<std::string>& columns);
std::vector<FunctionalSpec> parse_measures(const json& cfg, int m);

// fully specified generative model for the simulate command
struct SimulationModel {
  std::vector<MixedMarginal> margins;
  std::shared_ptr<const Copula> copula;
};
SimulationModel parse_simulation_model(const json& cfg);

json manifest_skeleton(const std::string& command, const json& config_echo);
void write_manifest(const std::string& path, const json& manifest);

}  // namespace mixcop
