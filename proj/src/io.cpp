#include "mixcop/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixcop/errors.hpp"

namespace mixcop {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim spaces and a trailing carriage return
    std::size_t b = cell.find_first_not_of(" \t\r");
    std::size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  Table t;
  t.header = split_csv_line(line);
  if (t.header.empty()) throw DataError(path + ": empty header row");
  const std::size_t m = t.header.size();

  std::vector<double> values;
  long lineno = 1;
  long rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != m)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(m) + " cells, got " +
                      std::to_string(cells.size()));
    for (const std::string& c : cells) {
      if (c.empty())
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": missing value (incomplete individuals must be "
                        "dropped before ingestion)");
      char* end = nullptr;
      double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0' || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": non-numeric cell '" + c + "'");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError(path + ": no data rows");
  t.values.resize(rows, m);
  for (long r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < m; ++c) t.values(r, c) = values[r * m + c];
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path);
  for (std::size_t c = 0; c < header.size(); ++c)
    std::fprintf(f, "%s%s", header[c].c_str(),
                 c + 1 < header.size() ? "," : "\n");
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      std::fprintf(f, "%.17g%s", values(r, c),
                   c + 1 < values.cols() ? "," : "\n");
  std::fclose(f);
}

std::string fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

ModelSpec parse_model(const json& cfg) {
  ModelSpec spec;
  if (!cfg.contains("model") || !cfg["model"].contains("components"))
    throw UsageError("config: missing key model.components");
  for (const auto& item : cfg["model"]["components"])
    spec.components.push_back(family_from_name(item.get<std::string>()));
  spec.validate();
  return spec;
}

namespace {

double get_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw UsageError("config: key '" + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

PriorConfig parse_priors(const json& cfg, int n_components) {
  PriorConfig p;
  const json j = cfg.contains("priors") ? cfg["priors"] : json::object();
  if (j.contains("dirichlet_phi")) {
    const auto& arr = j["dirichlet_phi"];
    p.dirichlet_phi.resize(arr.size());
    for (std::size_t k = 0; k < arr.size(); ++k)
      p.dirichlet_phi[k] = arr[k].get<double>();
  } else {
    p.dirichlet_phi = Eigen::VectorXd::Ones(n_components);
  }
  p.clayton_shape = get_num(j, "clayton_shape", p.clayton_shape);
  p.clayton_rate = get_num(j, "clayton_rate", p.clayton_rate);
  p.gumbel_shape = get_num(j, "gumbel_shape", p.gumbel_shape);
  p.gumbel_rate = get_num(j, "gumbel_rate", p.gumbel_rate);
  p.step_theta_cl = get_num(j, "step_theta_cl", p.step_theta_cl);
  p.step_theta_gu = get_num(j, "step_theta_gu", p.step_theta_gu);
  p.step_r = get_num(j, "step_r", p.step_r);
  p.validate(n_components);
  return p;
}

RunConfig parse_run(const json& cfg) {
  RunConfig r;
  const json j = cfg.contains("run") ? cfg["run"] : json::object();
  r.burnin = static_cast<int>(get_num(j, "burnin", r.burnin));
  r.keep = static_cast<int>(get_num(j, "keep", r.keep));
  r.thin = static_cast<int>(get_num(j, "thin", r.thin));
  r.seed = static_cast<std::uint64_t>(get_num(j, "seed", 1.0));
  r.adapt_target = get_num(j, "adapt_target", r.adapt_target);
  r.folds = static_cast<int>(get_num(j, "folds", r.folds));
  r.workers = static_cast<int>(get_num(j, "workers", 1.0));
  if (j.contains("latent_kernel")) {
    std::string k = j["latent_kernel"].get<std::string>();
    if (k == "mh_block")
      r.latent_kernel = RunConfig::LatentKernel::mh_block;
    else if (k == "gibbs_single")
      r.latent_kernel = RunConfig::LatentKernel::gibbs_single;
    else
      throw UsageError("config: run.latent_kernel must be mh_block or "
                       "gibbs_single, got '" + k + "'");
  }
  if (j.contains("likelihood_off"))
    r.likelihood_off = j["likelihood_off"].get<bool>();
  r.validate();
  return r;
}

std::vector<std::vector<double>> parse_atom_candidates(
    const json& cfg, const std::vector<std::string>& columns) {
  std::vector<std::vector<double>> out(columns.size());
  if (!cfg.contains("atoms")) return out;
  const json& j = cfg["atoms"];
  if (!j.is_object())
    throw UsageError("config: 'atoms' must map column names to value lists");
  std::vector<double> wildcard;
  if (j.contains("*"))
    for (const auto& v : j["*"]) wildcard.push_back(v.get<double>());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out[c] = wildcard;
    if (j.contains(columns[c]))
      for (const auto& v : j[columns[c]]) out[c].push_back(v.get<double>());
  }
  for (const auto& [key, val] : j.items()) {
    if (key == "*") continue;
    if (std::find(columns.begin(), columns.end(), key) == columns.end())
      throw UsageError("config: atoms refers to unknown column '" + key + "'");
    (void)val;
  }
  return out;
}

std::vector<FunctionalSpec> parse_measures(const json& cfg, int m) {
  std::vector<FunctionalSpec> out;
  if (!cfg.contains("measures") || !cfg["measures"].contains("list"))
    return out;
  for (const auto& j : cfg["measures"]["list"]) {
    FunctionalSpec f;
    if (!j.contains("name"))
      throw UsageError("config: each measure needs a 'name'");
    f.name = j["name"].get<std::string>();
    f.i = static_cast<int>(get_num(j, "i", 0));
    f.j = static_cast<int>(get_num(j, "j", 1));
    f.classes = static_cast<int>(get_num(j, "classes", 5));
    if (j.contains("which")) f.which = j["which"].get<std::string>();
    f.z = get_num(j, "z", 0.0);
    f.tau = get_num(j, "tau", 0.5);
    f.alpha = static_cast<int>(get_num(j, "alpha", 0));
    f.column = static_cast<int>(get_num(j, "column", 0));
    f.first_col = static_cast<int>(get_num(j, "first_col", 0));
    f.last_col = static_cast<int>(get_num(j, "last_col", -1));
    f.validate(m);
    out.push_back(std::move(f));
  }
  return out;
}

SimulationModel parse_simulation_model(const json& cfg) {
  if (!cfg.contains("simulate"))
    throw UsageError("config: missing key 'simulate'");
  const json& sim = cfg["simulate"];
  if (!sim.contains("margins"))
    throw UsageError("config: missing key simulate.margins");
  if (!sim.contains("copula"))
    throw UsageError("config: missing key simulate.copula");

  SimulationModel model;
  for (const auto& mj : sim["margins"]) {
    std::vector<Atom> atoms;
    double atom_mass = 0.0;
    if (mj.contains("atoms")) {
      for (const auto& aj : mj["atoms"]) {
        Atom a;
        a.location = aj.at("location").get<double>();
        a.mass = aj.at("mass").get<double>();
        atom_mass += a.mass;
        atoms.push_back(a);
      }
    }
    std::shared_ptr<const ContinuousDist> cont;
    double weight = 1.0 - atom_mass;
    if (mj.contains("continuous")) {
      const json& cj = mj["continuous"];
      std::string type = cj.at("type").get<std::string>();
      if (type == "normal")
        cont = make_normal(get_num(cj, "mu", 0.0), get_num(cj, "sigma", 1.0));
      else if (type == "lognormal")
        cont = make_lognormal(get_num(cj, "mu", 0.0), get_num(cj, "sigma", 1.0));
      else if (type == "exponential")
        cont = make_exponential(get_num(cj, "rate", 1.0));
      else if (type == "uniform")
        cont = make_uniform(get_num(cj, "lo", 0.0), get_num(cj, "hi", 1.0));
      else
        throw UsageError("config: unknown continuous type '" + type + "'");
    } else {
      weight = 0.0;
    }
    model.margins.emplace_back(std::move(atoms), weight, std::move(cont));
  }

  const int m = static_cast<int>(model.margins.size());
  if (m < 2) throw UsageError("config: simulate needs at least 2 margins");
  const json& cop = sim["copula"];
  if (!cop.contains("components"))
    throw UsageError("config: missing key simulate.copula.components");
  std::vector<MixtureCopula::Component> comps;
  for (const auto& cj : cop["components"]) {
    Family f = family_from_name(cj.at("family").get<std::string>());
    double w = cj.at("weight").get<double>();
    std::shared_ptr<const Copula> c;
    if (f == Family::gaussian) {
      const auto& rows = cj.at("correlation");
      Eigen::MatrixXd gamma(m, m);
      if (static_cast<int>(rows.size()) != m)
        throw UsageError("config: correlation must be m x m");
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gamma(i, j) = rows[i][j].get<double>();
      c = std::make_shared<GaussianCopula>(gamma);
    } else if (f == Family::clayton) {
      c = std::make_shared<ClaytonCopula>(cj.at("theta").get<double>(), m);
    } else {
      c = std::make_shared<GumbelCopula>(cj.at("theta").get<double>(), m);
    }
    comps.push_back({w, std::move(c)});
  }
  model.copula = std::make_shared<MixtureCopula>(std::move(comps));
  return model;
}

json manifest_skeleton(const std::string& command, const json& config_echo) {
  json m;
  m["tool"] = "mixcop";
  m["version"] = "0.1.0";
  m["command"] = command;
  m["config"] = config_echo;
  return m;
}

void write_manifest(const std::string& path, const json& manifest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << manifest.dump(2) << "\n";
}

}  // namespace mixcop
