#pragma once

#include <string>

#include "mixcop/io.hpp"

namespace mixcop {

// Command entry points shared by the CLI binary and the test suites. Each
// writes its outputs plus a manifest into `out_dir` and throws typed errors
// (UsageError/DataError/NumericalError) on failure.

struct CommonOptions {
  std::string data_path;
  std::string config_path;
  std::string out_dir;
  // flag overrides; negative / empty means "use the config value"
  long long seed = -1;
  int workers = -1;
  int burnin = -1;
  int keep = -1;
};

void cmd_fit(const CommonOptions& opt);
void cmd_compare(const CommonOptions& opt);

struct MeasureOptions : CommonOptions {
  std::string draws_path;  // draws.csv from a previous fit
};
void cmd_measures(const MeasureOptions& opt);

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  long long n = -1;
};
void cmd_simulate(const SimulateOptions& opt);

// resolve the worker count: explicit flag > config > MIXCOP_WORKERS > cores
int resolve_workers(int flag_value, int config_value);

// reconstruct PosteriorDraws from a draws.csv written by cmd_fit
PosteriorDraws read_draws_csv(const std::string& path);

}  // namespace mixcop
