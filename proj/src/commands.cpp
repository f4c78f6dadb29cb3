#include "mixcop/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "mixcop/errors.hpp"
#include "mixcop/selection.hpp"

namespace mixcop {

namespace fs = std::filesystem;

int resolve_workers(int flag_value, int config_value) {
  if (flag_value > 0) return flag_value;
  if (config_value > 0) return config_value;
  if (const char* env = std::getenv("MIXCOP_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace {

struct LoadedData {
  Table table;
  std::vector<MixedMarginal> margs;
  std::vector<std::vector<double>> atom_candidates;
};

LoadedData load_and_fit(const std::string& data_path, const json& cfg) {
  LoadedData d;
  d.table = read_csv(data_path);
  d.atom_candidates = parse_atom_candidates(cfg, d.table.header);
  const int m = static_cast<int>(d.table.header.size());
  for (int j = 0; j < m; ++j) {
    std::vector<double> col(d.table.values.rows());
    for (Eigen::Index r = 0; r < d.table.values.rows(); ++r)
      col[r] = d.table.values(r, j);
    d.margs.push_back(fit_empirical(col, d.atom_candidates[j]));
  }
  return d;
}

RunConfig effective_run(const json& cfg, const CommonOptions& opt) {
  RunConfig run = parse_run(cfg);
  if (opt.seed >= 0) run.seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.burnin >= 0) run.burnin = opt.burnin;
  if (opt.keep >= 0) run.keep = opt.keep;
  run.workers = resolve_workers(opt.workers, run.workers);
  run.validate();
  return run;
}

std::vector<std::string> draws_header(const ModelSpec& spec, int m) {
  std::vector<std::string> h{"sweep"};
  for (std::size_t k = 0; k < spec.components.size(); ++k)
    h.push_back("w" + std::to_string(k + 1));
  if (spec.has(Family::clayton)) h.push_back("theta_cl");
  if (spec.has(Family::gumbel)) h.push_back("theta_gu");
  if (spec.has(Family::gaussian))
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        h.push_back("gamma_" + std::to_string(i + 1) + "_" +
                    std::to_string(j + 1));
  h.push_back("loglik");
  return h;
}

Eigen::MatrixXd draws_matrix(const PosteriorDraws& d) {
  const int T = d.n_kept();
  const int K = static_cast<int>(d.components.size());
  int cols = 1 + K + (d.theta_cl.size() ? 1 : 0) + (d.theta_gu.size() ? 1 : 0) +
             static_cast<int>(d.gamma_upper.cols()) + 1;
  Eigen::MatrixXd out(T, cols);
  for (int t = 0; t < T; ++t) {
    int c = 0;
    out(t, c++) = t + 1;
    for (int k = 0; k < K; ++k) out(t, c++) = d.weights(t, k);
    if (d.theta_cl.size()) out(t, c++) = d.theta_cl[t];
    if (d.theta_gu.size()) out(t, c++) = d.theta_gu[t];
    for (int e = 0; e < d.gamma_upper.cols(); ++e)
      out(t, c++) = d.gamma_upper(t, e);
    out(t, c++) = d.loglik[t];
  }
  return out;
}

json diagnostics_json() {
  json j;
  j["rectangle_clamped"] = diagnostics().rectangle_clamped.load();
  j["mvn_low_accuracy"] = diagnostics().mvn_low_accuracy.load();
  j["latent_degenerate"] = diagnostics().latent_degenerate.load();
  j["latent_zero_ratio"] = diagnostics().latent_zero_ratio.load();
  return j;
}

json acceptance_json(const AcceptanceRates& a) {
  json j;
  j["theta_cl"] = a.theta_cl;
  j["theta_gu"] = a.theta_gu;
  j["correlation"] = a.correlation;
  j["latent"] = a.latent;
  return j;
}

struct SummaryRow {
  std::string name;
  double mean, lo, hi;
};

std::vector<SummaryRow> summarize_draws(const PosteriorDraws& d) {
  std::vector<SummaryRow> rows;
  auto add = [&rows](const std::string& name, const Eigen::VectorXd& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    auto q = [&s](double p) {
      double pos = p * (s.size() - 1.0);
      std::size_t lo = static_cast<std::size_t>(pos);
      std::size_t hi = std::min(s.size() - 1, lo + 1);
      double t = pos - lo;
      return (1 - t) * s[lo] + t * s[hi];
    };
    rows.push_back({name, v.mean(), q(0.025), q(0.975)});
  };
  for (std::size_t k = 0; k < d.components.size(); ++k)
    add("w_" + family_name(d.components[k]), d.weights.col(k));
  if (d.theta_cl.size()) add("theta_cl", d.theta_cl);
  if (d.theta_gu.size()) add("theta_gu", d.theta_gu);
  int e = 0;
  for (int i = 0; i < d.m; ++i)
    for (int j = i + 1; j < d.m; ++j, ++e)
      if (d.gamma_upper.size())
        add("gamma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
            d.gamma_upper.col(e));
  return rows;
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path);
  std::fprintf(f, "%-16s %12s %12s %12s\n", "parameter", "mean", "2.5%",
               "97.5%");
  for (const auto& r : rows)
    std::fprintf(f, "%-16s %12.4f %12.4f %12.4f\n", r.name.c_str(), r.mean,
                 r.lo, r.hi);
  std::fclose(f);
}

}  // namespace

void cmd_fit(const CommonOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  diagnostics().reset();
  json cfg = load_config(opt.config_path);
  LoadedData data = load_and_fit(opt.data_path, cfg);
  ModelSpec spec = parse_model(cfg);
  PriorConfig prior = parse_priors(cfg, static_cast<int>(spec.components.size()));
  RunConfig run = effective_run(cfg, opt);

  PosteriorDraws draws =
      run_chain(data.table.values, data.margs, spec, prior, run);

  fs::create_directories(opt.out_dir);
  const std::string draws_path = opt.out_dir + "/draws.csv";
  write_csv(draws_path, draws_header(spec, draws.m), draws_matrix(draws));
  write_summary(opt.out_dir + "/summary.txt", summarize_draws(draws));

  json manifest = manifest_skeleton("fit", cfg);
  manifest["data_file"] = opt.data_path;
  manifest["data_fingerprint"] = fingerprint_file(opt.data_path);
  manifest["seed"] = run.seed;
  manifest["workers"] = run.workers;
  manifest["model"] = spec.describe();
  manifest["acceptance_rates"] = acceptance_json(draws.acceptance);
  manifest["diagnostics"] = diagnostics_json();
  manifest["outputs"] = {draws_path, opt.out_dir + "/summary.txt"};
  manifest["wall_clock_sec"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_manifest(opt.out_dir + "/manifest.json", manifest);
}

void cmd_compare(const CommonOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  diagnostics().reset();
  json cfg = load_config(opt.config_path);
  LoadedData data = load_and_fit(opt.data_path, cfg);
  RunConfig run = effective_run(cfg, opt);

  // default list: the three singles, the three pairs, and the full mixture
  std::vector<ModelSpec> models;
  if (cfg.contains("compare") && cfg["compare"].contains("models")) {
    for (const auto& mj : cfg["compare"]["models"]) {
      ModelSpec s;
      for (const auto& f : mj)
        s.components.push_back(family_from_name(f.get<std::string>()));
      s.validate();
      models.push_back(std::move(s));
    }
  } else {
    using F = Family;
    models = {ModelSpec{{F::clayton}},
              ModelSpec{{F::gumbel}},
              ModelSpec{{F::gaussian}},
              ModelSpec{{F::gaussian, F::clayton}},
              ModelSpec{{F::gaussian, F::gumbel}},
              ModelSpec{{F::clayton, F::gumbel}},
              ModelSpec{{F::gaussian, F::clayton, F::gumbel}}};
  }
  if (models.empty()) throw UsageError("compare: empty model list");

  std::vector<std::string> names;
  Eigen::MatrixXd table(models.size(), 4);
  for (std::size_t r = 0; r < models.size(); ++r) {
    const ModelSpec& spec = models[r];
    PriorConfig prior =
        parse_priors(cfg, static_cast<int>(spec.components.size()));
    PosteriorDraws draws =
        run_chain(data.table.values, data.margs, spec, prior, run);
    ModelScore score = lpds_cv(data.table.values, data.atom_candidates, spec,
                               prior, run, run.folds);
    names.push_back(spec.describe());
    table(r, 0) = dic3(draws);
    table(r, 1) = score.lpds_cv;
  }
  Eigen::Index best_dic, best_lpds;
  table.col(0).minCoeff(&best_dic);
  table.col(1).maxCoeff(&best_lpds);
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    table(r, 2) = (r == best_dic) ? 1 : 0;
    table(r, 3) = (r == best_lpds) ? 1 : 0;
  }

  fs::create_directories(opt.out_dir);
  const std::string out_path = opt.out_dir + "/model_comparison.csv";
  {
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (!f) throw DataError("cannot write " + out_path);
    std::fprintf(f, "model,dic3,lpds_cv,best_dic3,best_lpds\n");
    for (std::size_t r = 0; r < names.size(); ++r)
      std::fprintf(f, "%s,%.17g,%.17g,%d,%d\n", names[r].c_str(), table(r, 0),
                   table(r, 1), static_cast<int>(table(r, 2)),
                   static_cast<int>(table(r, 3)));
    std::fclose(f);
  }

  json manifest = manifest_skeleton("compare", cfg);
  manifest["data_file"] = opt.data_path;
  manifest["data_fingerprint"] = fingerprint_file(opt.data_path);
  manifest["seed"] = run.seed;
  manifest["diagnostics"] = diagnostics_json();
  manifest["outputs"] = {out_path};
  manifest["wall_clock_sec"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_manifest(opt.out_dir + "/manifest.json", manifest);
}

PosteriorDraws read_draws_csv(const std::string& path) {
  Table t = read_csv(path);
  PosteriorDraws d;
  const int T = static_cast<int>(t.values.rows());
  int c = 0;
  if (t.header.empty() || t.header[0] != "sweep")
    throw DataError(path + ": not a draws file (missing 'sweep' column)");
  ++c;
  int K = 0;
  while (c + K < static_cast<int>(t.header.size()) &&
         t.header[c + K].rfind("w", 0) == 0 &&
         t.header[c + K].size() == 2)
    ++K;
  if (K == 0) throw DataError(path + ": no weight columns");
  d.weights = t.values.middleCols(c, K);
  c += K;
  bool has_cl = false, has_gu = false;
  if (c < static_cast<int>(t.header.size()) && t.header[c] == "theta_cl") {
    d.theta_cl = t.values.col(c++);
    has_cl = true;
  }
  if (c < static_cast<int>(t.header.size()) && t.header[c] == "theta_gu") {
    d.theta_gu = t.values.col(c++);
    has_gu = true;
  }
  int n_gamma = 0;
  while (c + n_gamma < static_cast<int>(t.header.size()) &&
         t.header[c + n_gamma].rfind("gamma_", 0) == 0)
    ++n_gamma;
  bool has_gauss = n_gamma > 0;
  if (has_gauss) {
    d.gamma_upper = t.values.middleCols(c, n_gamma);
    c += n_gamma;
    d.m = static_cast<int>(std::lround(0.5 + std::sqrt(0.25 + 2.0 * n_gamma)));
  }
  if (c >= static_cast<int>(t.header.size()) || t.header[c] != "loglik")
    throw DataError(path + ": missing loglik column");
  d.loglik = t.values.col(c);

  // component order matches the writer: gaussian, clayton, gumbel subsets
  int expected_K = (has_gauss ? 1 : 0) + (has_cl ? 1 : 0) + (has_gu ? 1 : 0);
  if (expected_K != K)
    throw DataError(path + ": weight columns do not match parameters");
  if (has_gauss) d.components.push_back(Family::gaussian);
  if (has_cl) d.components.push_back(Family::clayton);
  if (has_gu) d.components.push_back(Family::gumbel);
  d.keep = T;
  return d;
}

void cmd_measures(const MeasureOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  diagnostics().reset();
  json cfg = load_config(opt.config_path);
  LoadedData data = load_and_fit(opt.data_path, cfg);
  const int m = static_cast<int>(data.table.header.size());

  PosteriorDraws draws = read_draws_csv(opt.draws_path);
  if (draws.m == 0) draws.m = m;
  if (draws.m != m)
    throw DataError("measures: draws dimension does not match the data");

  std::vector<FunctionalSpec> specs = parse_measures(cfg, m);
  int n_mc = 100000;
  std::uint64_t mseed = 7;
  if (cfg.contains("measures")) {
    const json& mj = cfg["measures"];
    if (mj.contains("n_mc")) n_mc = mj["n_mc"].get<int>();
    if (mj.contains("seed")) mseed = mj["seed"].get<std::uint64_t>();
  }
  int workers = resolve_workers(opt.workers, 0);

  fs::create_directories(opt.out_dir);
  std::vector<std::string> sum_names;
  Eigen::MatrixXd per_draw(draws.n_kept(), specs.size());
  Eigen::MatrixXd summary(specs.size(), 3);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    PosteriorSummary ps =
        posterior_functional(draws, specs[s], data.margs, n_mc, mseed, workers);
    per_draw.col(s) = ps.per_draw;
    summary(s, 0) = ps.mean;
    summary(s, 1) = ps.lo;
    summary(s, 2) = ps.hi;
    std::string label = specs[s].name;
    if (specs[s].name == "spearman" || specs[s].name == "shorrocks" ||
        specs[s].name == "zero_transition")
      label += "_" + data.table.header[specs[s].i] + "_" +
               data.table.header[specs[s].j];
    if (specs[s].name == "zero_transition") label += "_" + specs[s].which;
    if (specs[s].name == "fgt")
      label += "_" + data.table.header[specs[s].column] + "_a" +
               std::to_string(specs[s].alpha);
    if (specs[s].name == "foster") label += "_a" + std::to_string(specs[s].alpha);
    sum_names.push_back(label);
  }

  const std::string sum_path = opt.out_dir + "/measures_summary.csv";
  {
    std::FILE* f = std::fopen(sum_path.c_str(), "w");
    if (!f) throw DataError("cannot write " + sum_path);
    std::fprintf(f, "measure,mean,lo2.5,hi97.5\n");
    for (std::size_t s = 0; s < sum_names.size(); ++s)
      std::fprintf(f, "%s,%.17g,%.17g,%.17g\n", sum_names[s].c_str(),
                   summary(s, 0), summary(s, 1), summary(s, 2));
    std::fclose(f);
  }
  // per-draw values, one row per kept draw, for external density plotting
  const std::string pd_path = opt.out_dir + "/measures_draws.csv";
  {
    std::vector<std::string> h{"draw"};
    for (const auto& nme : sum_names) h.push_back(nme);
    Eigen::MatrixXd with_idx(per_draw.rows(), per_draw.cols() + 1);
    for (Eigen::Index r = 0; r < per_draw.rows(); ++r) with_idx(r, 0) = r + 1;
    with_idx.rightCols(per_draw.cols()) = per_draw;
    write_csv(pd_path, h, with_idx);
  }

  json manifest = manifest_skeleton("measures", cfg);
  manifest["data_file"] = opt.data_path;
  manifest["data_fingerprint"] = fingerprint_file(opt.data_path);
  manifest["draws_file"] = opt.draws_path;
  manifest["draws_fingerprint"] = fingerprint_file(opt.draws_path);
  manifest["seed"] = mseed;
  manifest["n_mc"] = n_mc;
  manifest["diagnostics"] = diagnostics_json();
  manifest["outputs"] = {sum_path, pd_path};
  manifest["wall_clock_sec"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_manifest(opt.out_dir + "/manifest.json", manifest);
}

void cmd_simulate(const SimulateOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  diagnostics().reset();
  json cfg = load_config(opt.config_path);
  SimulationModel model = parse_simulation_model(cfg);
  long long n = opt.n;
  std::uint64_t seed = 1;
  if (cfg.contains("simulate")) {
    const json& sj = cfg["simulate"];
    if (n < 0 && sj.contains("n")) n = sj["n"].get<long long>();
    if (sj.contains("seed")) seed = sj["seed"].get<std::uint64_t>();
  }
  if (opt.seed >= 0) seed = static_cast<std::uint64_t>(opt.seed);
  if (n <= 0) throw UsageError("simulate: sample size n must be positive");

  Rng rng = Rng::derive(seed, 0x51a1, 0);
  Eigen::MatrixXd X = simulate_panel(*model.copula, model.margins,
                                     static_cast<int>(n), rng);
  fs::create_directories(opt.out_dir);
  std::vector<std::string> header;
  for (int j = 0; j < X.cols(); ++j) header.push_back("y" + std::to_string(j + 1));
  const std::string data_path = opt.out_dir + "/panel.csv";
  write_csv(data_path, header, X);

  // the manifest doubles as the ground-truth record for recovery studies
  json manifest = manifest_skeleton("simulate", cfg);
  manifest["seed"] = seed;
  manifest["n"] = n;
  manifest["outputs"] = {data_path};
  manifest["wall_clock_sec"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_manifest(opt.out_dir + "/manifest.json", manifest);
}

}  // namespace mixcop
