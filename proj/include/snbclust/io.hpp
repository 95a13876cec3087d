#ifndef SNBCLUST_IO_HPP
#define SNBCLUST_IO_HPP

#include "snbclust/common.hpp"
#include "snbclust/count_matrix.hpp"
#include "snbclust/em_fit.hpp"
#include "snbclust/gaussian_mixture.hpp"
#include "snbclust/metrics.hpp"
#include "snbclust/model_select.hpp"
#include "snbclust/simulate.hpp"
#include "snbclust/sparse_kmeans.hpp"

#include <map>
#include <string>
#include <vector>

namespace snbclust {

/// Full-precision, locale-independent formatting (%.17g).
std::string fmt_double(double v);

/// labels CSV: sample_id,label,max_posterior
void write_labels_csv(const std::string& path,
                      const std::vector<std::string>& sample_ids,
                      const std::vector<int>& labels,
                      const Vector* max_posterior = nullptr);

struct LabelFile {
  std::vector<std::string> sample_ids;
  std::vector<int> labels;
};
LabelFile read_labels_csv(const std::string& path);

/// params CSV: gene_id,beta_star,beta_1..beta_K. beta_star is the shrinkage
/// baseline (0 for the Gaussian baseline and sparse K-means cluster means).
void write_params_csv(const std::string& path,
                      const std::vector<std::string>& gene_ids,
                      const Vector& beta_star, const Matrix& components);

/// Sparse K-means feature weights: gene_id,weight.
void write_weights_csv(const std::string& path,
                       const std::vector<std::string>& gene_ids,
                       const Vector& weights);

/// Either file above. For a params CSV the per-gene score is
/// max_k |beta_k - beta_star| and a gene is selected iff some beta_k differs
/// from beta_star; for a weights CSV the weight is the score and positive
/// weights are selected.
struct ParamsFile {
  std::vector<std::string> gene_ids;
  Vector baseline;
  Matrix components;  // empty for a weights file
  Vector score;
  std::vector<char> selected;
};
ParamsFile read_params_csv(const std::string& path);

/// Line-oriented key=value run metadata.
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

/// id,value sidecar used for size factors and dispersions.
void write_id_value_csv(const std::string& path, const std::string& value_name,
                        const std::vector<std::string>& ids, const Vector& values);
Vector read_id_value_csv(const std::string& path,
                         const std::vector<std::string>& expected_ids);

/// PathResult CSV: lambda,loglik,penalized_loglik,q,n_selected,bic,chosen
void write_path_csv(const std::string& path, const std::vector<PathEntry>& entries,
                    int chosen_index);

/// Gap CSV: s,objective,gap,se,chosen
void write_gap_csv(const std::string& path, const GapResult& gap);

/// Enrichment CSV: set,a,b,c,d,p,fdr
void write_enrichment_csv(const std::string& path,
                          const std::vector<EnrichmentRow>& rows);

/// Per-gene fused group labels: gene_id,group_1..group_K
void write_groups_csv(const std::string& path,
                      const std::vector<std::string>& gene_ids,
                      const std::vector<std::vector<int>>& groups);

/// Gene sets, one per line: name <tab> comma-separated gene ids. Ids not in
/// the universe are ignored.
std::vector<GeneSet> read_gene_sets(const std::string& path,
                                    const std::vector<std::string>& gene_universe);

/// Truth sidecars for simulated data.
void write_truth_labels_csv(const std::string& path, const SimulatedDataset& ds);
void write_truth_genes_csv(const std::string& path, const SimulatedDataset& ds);

struct GeneTruthFile {
  std::vector<std::string> gene_ids;
  std::vector<char> informative;
};
GeneTruthFile read_truth_genes_csv(const std::string& path);

}  // namespace snbclust

#endif
