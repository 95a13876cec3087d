#ifndef SNBCLUST_COUNT_MATRIX_HPP
#define SNBCLUST_COUNT_MATRIX_HPP

#include "snbclust/common.hpp"

#include <string>
#include <vector>

namespace snbclust {

enum class TableFormat { tsv, csv };

/// Genes x samples matrix of non-negative integer counts. Values are stored
/// as doubles but must be integral; validate() enforces that plus distinct
/// identifiers and G >= 1, n >= 2.
struct CountMatrix {
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
  Matrix counts;  // G x n

  Eigen::Index n_genes() const { return counts.rows(); }
  Eigen::Index n_samples() const { return counts.cols(); }

  void validate() const;
};

/// Reads a delimited counts table: header row of sample ids, first column
/// gene ids, integer cells. Parse failures name the offending row/column.
CountMatrix load_counts(const std::string& path, TableFormat format);

/// Writes the same dialect load_counts reads.
void write_counts(const CountMatrix& m, const std::string& path, TableFormat format);

/// Keeps genes with row mean >= min_mean and row variance >= the
/// min_variance_quantile quantile of all row variances. Order preserved.
/// Throws ValidationError if nothing survives.
CountMatrix filter_genes(const CountMatrix& m, double min_mean,
                         double min_variance_quantile);

}  // namespace snbclust

#endif
