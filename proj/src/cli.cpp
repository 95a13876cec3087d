#include "snbclust/cli.hpp"

#include "snbclust/benchmark.hpp"
#include "snbclust/fused.hpp"
#include "snbclust/io.hpp"
#include "snbclust/metrics.hpp"
#include "snbclust/model_select.hpp"
#include "snbclust/nb_model.hpp"
#include "snbclust/normalize.hpp"
#include "snbclust/simulate.hpp"
#include "snbclust/sparse_kmeans.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace snbclust::cli {

namespace {

namespace fs = std::filesystem;

// Settings live in a string map so precedence is uniform:
// built-in defaults < manifest file < command-line flags.
using Settings = std::map<std::string, std::string>;

Settings read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest: " + path);
  Settings s;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ": line " + std::to_string(row) +
                       " is not key=value");
    s[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return s;
}

double to_double(const Settings& s, const std::string& key) {
  const auto& v = s.at(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("option " + key + ": cannot parse number \"" + v + "\"");
  }
}

long to_long(const Settings& s, const std::string& key) {
  const auto& v = s.at(key);
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("option " + key + ": cannot parse integer \"" + v + "\"");
  }
}

std::uint64_t to_u64(const Settings& s, const std::string& key) {
  const auto& v = s.at(key);
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("option " + key + ": cannot parse integer \"" + v + "\"");
  }
}

std::vector<double> to_double_list(const Settings& s, const std::string& key) {
  std::vector<double> out;
  std::istringstream ss(s.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(d);
    } catch (const std::exception&) {
      throw ParseError("option " + key + ": cannot parse list entry \"" + item + "\"");
    }
  }
  if (out.empty()) throw ParseError("option " + key + ": empty list");
  return out;
}

bool has(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  return it != s.end() && !it->second.empty();
}

void require(const Settings& s, const std::string& key) {
  if (!has(s, key)) throw ValidationError("missing required option --" + key);
}

void check_input_file(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw ParseError("cannot open input file: " + path);
}

fs::path ensure_out_dir(const Settings& s) {
  const fs::path dir = s.at("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ValidationError("output directory not writable: " + dir.string());
  return dir;
}

void print_config(const Settings& s) {
  for (const auto& [k, v] : s) std::cout << k << '=' << v << '\n';
}

SimScheme scheme_from_name(const std::string& name) {
  if (name == "sim1") return SimScheme::sim1;
  if (name == "sim2") return SimScheme::sim2;
  if (name == "sim3") return SimScheme::sim3;
  throw ParseError("unknown scheme: " + name);
}

SimulationConfig sim_config_from(const Settings& s) {
  const SimScheme scheme = scheme_from_name(s.at("scheme"));
  SimulationConfig cfg;
  switch (scheme) {
    case SimScheme::sim1:
      cfg = make_sim1(to_double(s, "gamma"), to_u64(s, "seed"));
      break;
    case SimScheme::sim2: {
      auto lb = to_double_list(s, "lib-bounds");
      if (lb.size() != 2) throw ParseError("lib-bounds needs two values");
      cfg = make_sim2(to_double(s, "gamma"), lb[0], lb[1], to_u64(s, "seed"));
      break;
    }
    case SimScheme::sim3: {
      cfg = make_sim3(to_double(s, "alpha"), to_u64(s, "seed"));
      cfg.gamma = to_double(s, "gamma");
      auto lb = to_double_list(s, "lib-bounds");
      if (lb.size() != 2) throw ParseError("lib-bounds needs two values");
      cfg.lib_lb = lb[0];
      cfg.lib_ub = lb[1];
      break;
    }
  }
  return cfg;
}

struct LoadedData {
  CountMatrix counts;
  NormalizationProfile prof;
};

LoadedData load_data(const Settings& s) {
  require(s, "counts");
  check_input_file(s.at("counts"));
  const auto fmt = s.at("counts").size() > 4 &&
                           s.at("counts").substr(s.at("counts").size() - 4) == ".csv"
                       ? TableFormat::csv
                       : TableFormat::tsv;
  LoadedData d;
  d.counts = load_counts(s.at("counts"), fmt);

  if (has(s, "size-factors")) {
    check_input_file(s.at("size-factors"));
    d.prof.size_factors = read_id_value_csv(s.at("size-factors"), d.counts.sample_ids);
    if (d.prof.size_factors.minCoeff() <= 0.0)
      throw ValidationError("size factor overrides must be positive");
  } else {
    auto sf = estimate_size_factors(d.counts, SizeFactorMethod::median_of_ratios);
    d.prof.size_factors = std::move(sf.size_factors);
    d.prof.size_factor_fallback = sf.fell_back;
  }
  if (has(s, "dispersions")) {
    check_input_file(s.at("dispersions"));
    d.prof.dispersions = read_id_value_csv(s.at("dispersions"), d.counts.gene_ids);
    if (d.prof.dispersions.minCoeff() <= 0.0)
      throw ValidationError("dispersion overrides must be positive");
  } else {
    d.prof.dispersions = estimate_dispersions(d.counts, d.prof.size_factors);
  }
  d.prof.log_cpm = log_cpm(d.counts);
  d.prof.validate(d.counts.n_genes(), d.counts.n_samples());
  return d;
}

FitConfig fit_config_from(const Settings& s) {
  FitConfig fc;
  fc.K = static_cast<int>(to_long(s, "k"));
  fc.lambda = to_double(s, "lambda");
  fc.n_restarts = static_cast<int>(to_long(s, "restarts"));
  fc.seed = to_u64(s, "seed");
  fc.threads = static_cast<int>(to_long(s, "threads"));
  return fc;
}

Vector max_posterior_of(const Matrix& z) {
  Vector mp(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) mp[i] = z.row(i).maxCoeff();
  return mp;
}

void write_count_fit_artifacts(const fs::path& dir, const CountMatrix& m,
                               const MixtureFit& f,
                               std::vector<std::pair<std::string, std::string>> meta) {
  const Vector mp = max_posterior_of(f.responsibilities);
  write_labels_csv((dir / "labels.csv").string(), m.sample_ids, map_labels(f), &mp);
  write_params_csv((dir / "params.csv").string(), m.gene_ids, f.beta_star, f.beta);
  meta.emplace_back("k", std::to_string(f.K));
  meta.emplace_back("lambda", fmt_double(f.lambda));
  meta.emplace_back("iterations", std::to_string(f.iterations));
  meta.emplace_back("converged", f.converged ? "1" : "0");
  meta.emplace_back("restarts_used", std::to_string(f.restarts_used));
  meta.emplace_back("penalized_loglik", fmt_double(f.penalized_loglik));
  meta.emplace_back("loglik", fmt_double(f.loglik));
  meta.emplace_back("n_shrunk", std::to_string(f.n_shrunk));
  const auto mask = selected_genes(f);
  meta.emplace_back("n_selected",
                    std::to_string(std::count(mask.begin(), mask.end(), char(1))));
  write_metadata((dir / "run_meta.txt").string(), meta);
}

void write_profile_sidecars(const fs::path& dir, const LoadedData& data) {
  write_id_value_csv((dir / "size_factors.csv").string(), "size_factor",
                     data.counts.sample_ids, data.prof.size_factors);
  write_id_value_csv((dir / "dispersions.csv").string(), "dispersion",
                     data.counts.gene_ids, data.prof.dispersions);
}

int cmd_fit(const Settings& s) {
  require(s, "method");
  require(s, "k");
  const auto dir = ensure_out_dir(s);
  const Method method = method_from_name(s.at("method"));
  auto data = load_data(s);
  write_profile_sidecars(dir, data);
  FitConfig fc = fit_config_from(s);

  std::vector<std::pair<std::string, std::string>> meta{
      {"command", "fit"},
      {"method", method_name(method)},
      {"counts", s.at("counts")},
      {"seed", s.at("seed")}};

  switch (method) {
    case Method::snbclust: {
      auto gm = fit_null_means(data.counts, data.prof);
      MixtureFit f = fit(data.counts, data.prof, gm, fc);
      write_count_fit_artifacts(dir, data.counts, f, meta);
      break;
    }
    case Method::snbclust_fused: {
      auto gm = fit_null_means(data.counts, data.prof);
      FusedConfig fcfg;
      fcfg.lambda = fc.lambda;
      MixtureFit f = fit_fused(data.counts, data.prof, gm, fc, fcfg);
      write_count_fit_artifacts(dir, data.counts, f, meta);
      std::vector<std::vector<int>> groups;
      groups.reserve(f.beta.rows());
      for (Eigen::Index j = 0; j < f.beta.rows(); ++j)
        groups.push_back(gene_groups(f.beta.row(j), fcfg.group_tol));
      write_groups_csv((dir / "groups.csv").string(), data.counts.gene_ids, groups);
      break;
    }
    case Method::sgclust: {
      GaussianMixtureFit f = fit_sgclust(data.prof.log_cpm, fc.K, fc.lambda, fc);
      Vector mp = max_posterior_of(f.responsibilities);
      write_labels_csv((dir / "labels.csv").string(), data.counts.sample_ids,
                       map_labels(f), &mp);
      write_params_csv((dir / "params.csv").string(), data.counts.gene_ids,
                       Vector::Zero(data.counts.n_genes()), f.mu);
      meta.emplace_back("k", std::to_string(f.K));
      meta.emplace_back("lambda", fmt_double(f.lambda));
      meta.emplace_back("iterations", std::to_string(f.iterations));
      meta.emplace_back("converged", f.converged ? "1" : "0");
      meta.emplace_back("restarts_used", std::to_string(f.restarts_used));
      meta.emplace_back("penalized_loglik", fmt_double(f.penalized_loglik));
      meta.emplace_back("loglik", fmt_double(f.loglik));
      meta.emplace_back("n_zero", std::to_string(f.n_zero));
      write_metadata((dir / "run_meta.txt").string(), meta);
      break;
    }
    case Method::skmeans: {
      const double s_bound =
          has(s, "s") ? to_double(s, "s")
                      : std::sqrt(static_cast<double>(data.counts.n_genes()));
      SparseKmeansConfig sc;
      sc.seed = fc.seed;
      if (fc.K > data.counts.n_samples())
        throw ValidationError("fit: K exceeds the number of samples");
      auto f = fit_skmeans(data.prof.log_cpm, fc.K, s_bound, sc);
      write_labels_csv((dir / "labels.csv").string(), data.counts.sample_ids,
                       f.labels);
      // Per-gene cluster means of log-CPM as the component columns.
      Matrix comp = Matrix::Zero(data.counts.n_genes(), fc.K);
      std::vector<double> nk(fc.K, 0.0);
      for (std::size_t i = 0; i < f.labels.size(); ++i) nk[f.labels[i] - 1] += 1.0;
      for (Eigen::Index j = 0; j < data.counts.n_genes(); ++j)
        for (std::size_t i = 0; i < f.labels.size(); ++i)
          comp(j, f.labels[i] - 1) +=
              data.prof.log_cpm(j, static_cast<Eigen::Index>(i)) /
              nk[f.labels[i] - 1];
      write_params_csv((dir / "params.csv").string(), data.counts.gene_ids,
                       Vector::Zero(data.counts.n_genes()), comp);
      write_weights_csv((dir / "weights.csv").string(), data.counts.gene_ids,
                        f.weights);
      meta.emplace_back("k", std::to_string(fc.K));
      meta.emplace_back("s", fmt_double(f.s));
      meta.emplace_back("iterations", std::to_string(f.iterations));
      meta.emplace_back("converged", f.converged ? "1" : "0");
      meta.emplace_back("objective", fmt_double(f.objective));
      write_metadata((dir / "run_meta.txt").string(), meta);
      break;
    }
  }
  return kExitOk;
}

int cmd_path(const Settings& s) {
  require(s, "method");
  require(s, "k");
  const auto dir = ensure_out_dir(s);
  const Method method = method_from_name(s.at("method"));
  auto data = load_data(s);
  FitConfig fc = fit_config_from(s);

  std::vector<std::pair<std::string, std::string>> meta{
      {"command", "path"},
      {"method", method_name(method)},
      {"counts", s.at("counts")},
      {"seed", s.at("seed")}};

  switch (method) {
    case Method::snbclust: {
      auto gm = fit_null_means(data.counts, data.prof);
      const auto grid = has(s, "lambda-grid")
                            ? to_double_list(s, "lambda-grid")
                            : default_lambda_grid(data.counts, data.prof, gm,
                                                  fc.K, fc);
      auto path = run_lambda_path(data.counts, data.prof, gm, fc.K, grid, fc);
      write_path_csv((dir / "path.csv").string(), path.entries, path.chosen_index);
      meta.emplace_back("chosen_lambda", fmt_double(path.lambdas[path.chosen_index]));
      write_count_fit_artifacts(dir, data.counts, path.chosen(), meta);
      break;
    }
    case Method::sgclust: {
      const auto grid = has(s, "lambda-grid")
                            ? to_double_list(s, "lambda-grid")
                            : default_sg_lambda_grid(data.prof.log_cpm, fc.K, fc);
      auto path = run_sg_lambda_path(data.prof.log_cpm, fc.K, grid, fc);
      write_path_csv((dir / "path.csv").string(), path.entries, path.chosen_index);
      const auto& f = path.chosen();
      Vector mp = max_posterior_of(f.responsibilities);
      write_labels_csv((dir / "labels.csv").string(), data.counts.sample_ids,
                       map_labels(f), &mp);
      write_params_csv((dir / "params.csv").string(), data.counts.gene_ids,
                       Vector::Zero(data.counts.n_genes()), f.mu);
      meta.emplace_back("chosen_lambda", fmt_double(path.lambdas[path.chosen_index]));
      write_metadata((dir / "run_meta.txt").string(), meta);
      break;
    }
    case Method::skmeans: {
      const auto grid = has(s, "s-grid")
                            ? to_double_list(s, "s-grid")
                            : default_s_grid(data.counts.n_genes());
      SparseKmeansConfig sc;
      sc.seed = fc.seed;
      auto gap = gap_statistic_s(data.prof.log_cpm, fc.K, grid,
                                 static_cast<int>(to_long(s, "gap-perms")), fc.seed,
                                 sc);
      write_gap_csv((dir / "gap.csv").string(), gap);
      auto f = fit_skmeans(data.prof.log_cpm, fc.K, gap.chosen_s, sc);
      write_labels_csv((dir / "labels.csv").string(), data.counts.sample_ids,
                       f.labels);
      write_weights_csv((dir / "weights.csv").string(), data.counts.gene_ids,
                        f.weights);
      meta.emplace_back("chosen_s", fmt_double(gap.chosen_s));
      write_metadata((dir / "run_meta.txt").string(), meta);
      break;
    }
    default:
      throw ValidationError("path: method must be snbclust, sgclust or skmeans");
  }
  return kExitOk;
}

int cmd_simulate(const Settings& s) {
  const auto dir = ensure_out_dir(s);
  SimulationConfig cfg = sim_config_from(s);
  EmpiricalMeanDist dist;
  if (has(s, "source-counts")) {
    check_input_file(s.at("source-counts"));
    dist = build_empirical_dist(load_counts(s.at("source-counts"), TableFormat::tsv));
  } else {
    dist = default_surrogate_dist(Rng::fork(cfg.seed, 99).next_u64());
  }
  auto ds = generate(cfg, dist);
  write_counts(ds.counts, (dir / "counts.tsv").string(), TableFormat::tsv);
  write_truth_labels_csv((dir / "truth_labels.csv").string(), ds);
  write_truth_genes_csv((dir / "truth_genes.csv").string(), ds);
  write_id_value_csv((dir / "true_dispersions.csv").string(), "dispersion",
                     ds.counts.gene_ids, ds.true_phi);
  write_metadata((dir / "run_meta.txt").string(),
                 {{"command", "simulate"},
                  {"scheme", s.at("scheme")},
                  {"gamma", fmt_double(cfg.gamma)},
                  {"alpha", fmt_double(cfg.alpha)},
                  {"lib_lb", fmt_double(cfg.lib_lb)},
                  {"lib_ub", fmt_double(cfg.lib_ub)},
                  {"seed", s.at("seed")},
                  {"genes", std::to_string(cfg.G)},
                  {"samples", std::to_string(cfg.K * cfg.n_per_cluster)}});
  return kExitOk;
}

int cmd_benchmark(const Settings& s) {
  const auto dir = ensure_out_dir(s);
  BenchmarkConfig cfg;
  cfg.sim = sim_config_from(s);
  cfg.replicates = static_cast<int>(to_long(s, "replicates"));
  cfg.seed = to_u64(s, "seed");
  cfg.threads = static_cast<int>(to_long(s, "threads"));
  cfg.n_restarts = static_cast<int>(to_long(s, "restarts"));
  cfg.gap_permutations = static_cast<int>(to_long(s, "gap-perms"));
  cfg.methods.clear();
  {
    std::istringstream ss(s.at("methods"));
    std::string item;
    while (std::getline(ss, item, ',')) cfg.methods.push_back(method_from_name(item));
  }
  auto result = run_benchmark(cfg);
  write_benchmark_csv((dir / "replicates.csv").string(),
                      (dir / "summary.csv").string(), result, cfg);
  const int total = static_cast<int>(result.records.size());
  if (result.n_failed * 5 > total) {  // >20% failures
    std::cerr << "benchmark: " << result.n_failed << "/" << total
              << " replicate fits failed\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_evaluate(const Settings& s) {
  const auto dir = ensure_out_dir(s);
  std::vector<std::pair<std::string, std::string>> rows;

  std::optional<ParamsFile> params;
  if (has(s, "params")) {
    check_input_file(s.at("params"));
    params = read_params_csv(s.at("params"));
  }

  if (has(s, "labels") && has(s, "truth")) {
    check_input_file(s.at("labels"));
    check_input_file(s.at("truth"));
    const auto pred = read_labels_csv(s.at("labels"));
    const auto truth = read_labels_csv(s.at("truth"));
    if (pred.sample_ids != truth.sample_ids)
      throw ValidationError("evaluate: label files cover different samples");
    rows.emplace_back("ari",
                      fmt_double(adjusted_rand_index(pred.labels, truth.labels)));
  }

  if (params && has(s, "truth-genes")) {
    check_input_file(s.at("truth-genes"));
    const auto truth = read_truth_genes_csv(s.at("truth-genes"));
    if (truth.gene_ids != params->gene_ids)
      throw ValidationError("evaluate: params and gene truth cover different genes");
    rows.emplace_back("auc", fmt_double(roc_auc(params->score, truth.informative)));
  }

  if (params && has(s, "gene-sets")) {
    check_input_file(s.at("gene-sets"));
    const auto sets = read_gene_sets(s.at("gene-sets"), params->gene_ids);
    auto enr = fisher_enrichment(params->selected, sets);
    for (const auto& r : enr)
      if (r.empty_set)
        std::cerr << "warning: gene set \"" << r.set << "\" is empty in this universe\n";
    write_enrichment_csv((dir / "enrichment.csv").string(), enr);
    rows.emplace_back("enrichment_sets", std::to_string(enr.size()));
  }

  if (rows.empty())
    throw ValidationError(
        "evaluate: provide --labels/--truth, --params/--truth-genes, or "
        "--params/--gene-sets");
  {
    std::ofstream out(dir / "evaluation.csv");
    if (!out) throw ParseError("cannot open for writing: " + (dir / "evaluation.csv").string());
    out << "metric,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  }
  for (const auto& [k, v] : rows) std::cout << k << "=" << v << '\n';
  return kExitOk;
}

void add_common_options(CLI::App* cmd, Settings& flags,
                        std::vector<std::string>& provided) {
  static const std::vector<std::string> keys = {
      "counts",      "method",     "k",          "lambda",     "lambda-grid",
      "s",           "s-grid",     "scheme",     "gamma",      "alpha",
      "lib-bounds",  "replicates", "seed",       "threads",    "out",
      "gene-sets",   "truth",      "truth-genes", "labels",    "params",
      "size-factors", "dispersions", "restarts",  "gap-perms", "methods",
      "source-counts", "manifest"};
  for (const auto& key : keys) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&flags, &provided, key](const std::string& v) {
          flags[key] = v;
          provided.push_back(key);
        });
  }
  cmd->add_flag("--print-config", "print the resolved configuration and exit");
}

Settings defaults() {
  return {{"lambda", "0"},     {"seed", "0"},        {"threads", "1"},
          {"out", "."},        {"restarts", "10"},   {"gap-perms", "10"},
          {"replicates", "25"}, {"gamma", "1"},      {"alpha", "0.25"},
          {"lib-bounds", "0.9,1.1"},
          {"methods", "snbclust,sgclust,skmeans"}};
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Sparse negative-binomial mixture clustering for RNA-seq counts"};
  app.require_subcommand(1);

  Settings flags;
  std::vector<std::string> provided;
  std::map<std::string, CLI::App*> cmds;
  for (const char* name : {"fit", "path", "simulate", "benchmark", "evaluate"}) {
    cmds[name] = app.add_subcommand(name);
    add_common_options(cmds[name], flags, provided);
  }

  std::vector<const char*> argv;
  argv.push_back("snbclust");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {  // --help
        std::cout << app.help();
        return kExitOk;
      }
      std::cerr << e.what() << '\n';
      return kExitParse;
    }

    CLI::App* sub = app.get_subcommands().front();
    Settings resolved = defaults();
    if (flags.count("manifest")) {
      for (const auto& [k, v] : read_manifest_file(flags.at("manifest")))
        resolved[k] = v;
    }
    for (const auto& key : provided) resolved[key] = flags[key];
    resolved["command"] = sub->get_name();

    if (sub->count("--print-config") > 0) {
      print_config(resolved);
      return kExitOk;
    }

    const std::string& command = resolved.at("command");
    if (command == "fit") return cmd_fit(resolved);
    if (command == "path") return cmd_path(resolved);
    if (command == "simulate") return cmd_simulate(resolved);
    if (command == "benchmark") return cmd_benchmark(resolved);
    if (command == "evaluate") return cmd_evaluate(resolved);
    throw ValidationError("unknown command: " + command);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace snbclust::cli
