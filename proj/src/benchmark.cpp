#include "snbclust/benchmark.hpp"

#include "snbclust/fused.hpp"
#include "snbclust/io.hpp"
#include "snbclust/metrics.hpp"
#include "snbclust/model_select.hpp"
#include "snbclust/nb_model.hpp"
#include "snbclust/normalize.hpp"
#include "snbclust/parallel.hpp"
#include "snbclust/sparse_kmeans.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace snbclust {

std::string method_name(Method m) {
  switch (m) {
    case Method::snbclust: return "snbclust";
    case Method::snbclust_fused: return "snbclust-fused";
    case Method::sgclust: return "sgclust";
    case Method::skmeans: return "skmeans";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "snbclust") return Method::snbclust;
  if (name == "snbclust-fused") return Method::snbclust_fused;
  if (name == "sgclust") return Method::sgclust;
  if (name == "skmeans") return Method::skmeans;
  throw ParseError("unknown method: " + name);
}

namespace {

double safe_auc(const Vector& scores, const std::vector<char>& truth) {
  bool has_pos = false, has_neg = false;
  for (char t : truth) (t ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) return std::numeric_limits<double>::quiet_NaN();
  return roc_auc(scores, truth);
}

struct ReplicateContext {
  SimulatedDataset ds;
  NormalizationProfile prof;
  GlobalMeans gm;
};

ReplicateContext prepare_replicate(const BenchmarkConfig& cfg, int r,
                                   const EmpiricalMeanDist& dist) {
  ReplicateContext ctx;
  SimulationConfig sim = cfg.sim;
  sim.seed = Rng::fork(cfg.seed, static_cast<std::uint64_t>(r)).next_u64();
  ctx.ds = generate(sim, dist);

  auto sf = estimate_size_factors(ctx.ds.counts, SizeFactorMethod::median_of_ratios);
  ctx.prof.size_factors = std::move(sf.size_factors);
  ctx.prof.size_factor_fallback = sf.fell_back;
  ctx.prof.dispersions =
      cfg.use_true_phi ? ctx.ds.true_phi
                       : estimate_dispersions(ctx.ds.counts, ctx.prof.size_factors);
  ctx.prof.log_cpm = log_cpm(ctx.ds.counts);
  ctx.gm = fit_null_means(ctx.ds.counts, ctx.prof);
  return ctx;
}

ReplicateRecord run_method(const BenchmarkConfig& cfg, const ReplicateContext& ctx,
                           int r, Method method) {
  ReplicateRecord rec;
  rec.replicate = r;
  rec.method = method;
  const bool sim1 = cfg.sim.scheme == SimScheme::sim1;
  const auto G = ctx.ds.counts.n_genes();

  FitConfig fc;
  fc.K = cfg.sim.K;
  fc.n_restarts = cfg.n_restarts;
  fc.seed = Rng::fork(cfg.seed, 7000u + static_cast<std::uint64_t>(r)).next_u64();

  try {
    std::vector<int> labels;
    Vector scores;
    switch (method) {
      case Method::snbclust: {
        if (sim1) {
          fc.lambda = 0.0;
          MixtureFit f = fit(ctx.ds.counts, ctx.prof, ctx.gm, fc);
          labels = map_labels(f);
          scores = gene_scores(f);
          const auto mask = selected_genes(f);
          rec.n_selected = std::count(mask.begin(), mask.end(), char(1));
        } else {
          auto grid = default_lambda_grid(ctx.ds.counts, ctx.prof, ctx.gm, fc.K, fc,
                                          cfg.lambda_grid_points);
          auto path = run_lambda_path(ctx.ds.counts, ctx.prof, ctx.gm, fc.K, grid, fc);
          const MixtureFit& f = path.chosen();
          labels = map_labels(f);
          scores = gene_scores(f);
          rec.n_selected = path.entries[path.chosen_index].n_selected;
          rec.chosen_tuning = path.entries[path.chosen_index].lambda;
        }
        break;
      }
      case Method::snbclust_fused: {
        FusedConfig fcfg;
        fcfg.lambda = sim1 ? 0.0 : 1.0;
        MixtureFit f = fit_fused(ctx.ds.counts, ctx.prof, ctx.gm, fc, fcfg);
        labels = map_labels(f);
        scores = gene_scores(f);
        const auto mask = fused_selected_genes(f, fcfg.group_tol);
        rec.n_selected = std::count(mask.begin(), mask.end(), char(1));
        rec.chosen_tuning = fcfg.lambda;
        break;
      }
      case Method::sgclust: {
        if (sim1) {
          GaussianMixtureFit f = fit_sgclust(ctx.prof.log_cpm, fc.K, 0.0, fc);
          labels = map_labels(f);
          scores = gene_scores(f);
        } else {
          auto grid = default_sg_lambda_grid(ctx.prof.log_cpm, fc.K, fc,
                                             cfg.lambda_grid_points);
          auto path = run_sg_lambda_path(ctx.prof.log_cpm, fc.K, grid, fc);
          const GaussianMixtureFit& f = path.chosen();
          labels = map_labels(f);
          scores = gene_scores(f);
          rec.n_selected = path.entries[path.chosen_index].n_selected;
          rec.chosen_tuning = path.entries[path.chosen_index].lambda;
        }
        break;
      }
      case Method::skmeans: {
        SparseKmeansConfig sc;
        sc.seed = fc.seed;
        if (sim1) {
          const double s = std::sqrt(static_cast<double>(G));
          auto f = fit_skmeans(ctx.prof.log_cpm, fc.K, s, sc);
          labels = f.labels;
          scores = f.weights;
          rec.chosen_tuning = s;
        } else {
          auto grid = default_s_grid(G, cfg.s_grid_points);
          auto gap = gap_statistic_s(ctx.prof.log_cpm, fc.K, grid,
                                     cfg.gap_permutations, fc.seed, sc);
          auto f = fit_skmeans(ctx.prof.log_cpm, fc.K, gap.chosen_s, sc);
          labels = f.labels;
          scores = f.weights;
          rec.chosen_tuning = gap.chosen_s;
          rec.n_selected = (f.weights.array() > 0.0).count();
        }
        break;
      }
    }
    rec.ari = adjusted_rand_index(labels, ctx.ds.labels);
    rec.auc = safe_auc(scores, ctx.ds.informative_mask);
    rec.ok = true;
  } catch (const std::exception& ex) {
    rec.ok = false;
    rec.error = ex.what();
  }
  return rec;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.replicates < 1) throw ValidationError("benchmark: need >= 1 replicate");
  if (cfg.methods.empty()) throw ValidationError("benchmark: no methods requested");
  const EmpiricalMeanDist dist = default_surrogate_dist(Rng::fork(cfg.seed, 99).next_u64());

  BenchmarkResult res;
  res.records.resize(static_cast<std::size_t>(cfg.replicates) * cfg.methods.size());
  parallel_for(cfg.replicates, cfg.threads, [&](int r) {
    try {
      auto ctx = prepare_replicate(cfg, r, dist);
      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        res.records[static_cast<std::size_t>(r) * cfg.methods.size() + mi] =
            run_method(cfg, ctx, r, cfg.methods[mi]);
    } catch (const std::exception& ex) {
      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        auto& rec = res.records[static_cast<std::size_t>(r) * cfg.methods.size() + mi];
        rec.replicate = r;
        rec.method = cfg.methods[mi];
        rec.ok = false;
        rec.error = ex.what();
      }
    }
  });

  const double param =
      cfg.sim.scheme == SimScheme::sim3 ? cfg.sim.alpha : cfg.sim.gamma;
  for (Method m : cfg.methods) {
    BenchmarkSummaryRow row;
    row.method = m;
    row.param = param;
    double ari_sum = 0.0, ari_sq = 0.0, auc_sum = 0.0, auc_sq = 0.0;
    int n_auc = 0;
    for (const auto& rec : res.records) {
      if (rec.method != m) continue;
      if (!rec.ok) {
        ++res.n_failed;
        continue;
      }
      ++row.n_ok;
      ari_sum += rec.ari;
      ari_sq += rec.ari * rec.ari;
      if (std::isfinite(rec.auc)) {
        ++n_auc;
        auc_sum += rec.auc;
        auc_sq += rec.auc * rec.auc;
      }
    }
    if (row.n_ok > 0) {
      row.ari_mean = ari_sum / row.n_ok;
      const double var =
          std::max(ari_sq / row.n_ok - row.ari_mean * row.ari_mean, 0.0);
      row.ari_se = row.n_ok > 1 ? std::sqrt(var * row.n_ok / (row.n_ok - 1.0)) /
                                      std::sqrt(static_cast<double>(row.n_ok))
                                : 0.0;
    }
    if (n_auc > 0) {
      row.auc_mean = auc_sum / n_auc;
      const double var = std::max(auc_sq / n_auc - row.auc_mean * row.auc_mean, 0.0);
      row.auc_se = n_auc > 1 ? std::sqrt(var * n_auc / (n_auc - 1.0)) /
                                   std::sqrt(static_cast<double>(n_auc))
                             : 0.0;
    } else {
      row.auc_mean = std::numeric_limits<double>::quiet_NaN();
      row.auc_se = std::numeric_limits<double>::quiet_NaN();
    }
    res.summary.push_back(row);
  }
  return res;
}

void write_benchmark_csv(const std::string& replicates_path,
                         const std::string& summary_path,
                         const BenchmarkResult& result, const BenchmarkConfig& cfg) {
  {
    std::ofstream out(replicates_path);
    if (!out) throw ParseError("cannot open for writing: " + replicates_path);
    out << "method,replicate,ok,ari,auc,n_selected,chosen_tuning,error\n";
    for (const auto& rec : result.records) {
      out << method_name(rec.method) << ',' << rec.replicate << ','
          << (rec.ok ? 1 : 0) << ',';
      if (rec.ok) {
        out << fmt_double(rec.ari) << ','
            << (std::isfinite(rec.auc) ? fmt_double(rec.auc) : "NA") << ','
            << rec.n_selected << ',' << fmt_double(rec.chosen_tuning) << ',';
      } else {
        out << "NA,NA,NA,NA,";
      }
      out << rec.error << '\n';
    }
  }
  {
    std::ofstream out(summary_path);
    if (!out) throw ParseError("cannot open for writing: " + summary_path);
    const char* param_name =
        cfg.sim.scheme == SimScheme::sim3 ? "alpha" : "gamma";
    out << "method," << param_name << ",n_ok,ari_mean,ari_se,auc_mean,auc_se\n";
    for (const auto& row : result.summary) {
      out << method_name(row.method) << ',' << fmt_double(row.param) << ','
          << row.n_ok << ',' << fmt_double(row.ari_mean) << ','
          << fmt_double(row.ari_se) << ','
          << (std::isfinite(row.auc_mean) ? fmt_double(row.auc_mean) : "NA") << ','
          << (std::isfinite(row.auc_se) ? fmt_double(row.auc_se) : "NA") << '\n';
    }
  }
}

}  // namespace snbclust
