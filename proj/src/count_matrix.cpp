#include "snbclust/count_matrix.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace snbclust {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

void check_distinct(const std::vector<std::string>& ids, const std::string& what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second)
      throw ValidationError("duplicate " + what + " id \"" + id + "\"");
  }
}

// Strict non-negative integer: digits only, no sign, no decimals.
bool parse_count(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  double v = 0.0;
  for (char c : cell) {
    if (c < '0' || c > '9') return false;
    v = v * 10.0 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

void CountMatrix::validate() const {
  const auto G = counts.rows();
  const auto n = counts.cols();
  if (G < 1) throw ValidationError("count matrix needs at least one gene");
  if (n < 2) throw ValidationError("count matrix needs at least two samples");
  if (static_cast<Eigen::Index>(gene_ids.size()) != G ||
      static_cast<Eigen::Index>(sample_ids.size()) != n)
    throw ValidationError("id lists inconsistent with matrix dimensions");
  check_distinct(gene_ids, "gene");
  check_distinct(sample_ids, "sample");
  for (Eigen::Index j = 0; j < G; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = counts(j, i);
      if (!(v >= 0.0) || v != std::floor(v) || !std::isfinite(v))
        throw ValidationError("count at gene " + gene_ids[j] + ", sample " +
                              sample_ids[i] + " is not a non-negative integer");
    }
}

CountMatrix load_counts(const std::string& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open counts file: " + path);
  const char delim = format == TableFormat::tsv ? '\t' : ',';

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line, delim);
  if (header.size() < 3)
    throw ParseError(path + ": header needs a gene-id column and at least two samples");

  CountMatrix m;
  m.sample_ids.assign(header.begin() + 1, header.end());
  const std::size_t n = m.sample_ids.size();

  std::vector<double> values;
  std::size_t row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line, delim);
    if (fields.size() != n + 1)
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(n + 1));
    m.gene_ids.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v;
      if (!parse_count(fields[c], v))
        throw ParseError(path + ": row " + std::to_string(row) + ", column " +
                         std::to_string(c + 1) + ": cell \"" + fields[c] +
                         "\" is not a non-negative integer");
      values.push_back(v);
    }
  }
  const std::size_t G = m.gene_ids.size();
  if (G == 0) throw ParseError(path + ": no data rows");
  m.counts.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < G; ++j)
    for (std::size_t i = 0; i < n; ++i)
      m.counts(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          values[j * n + i];
  m.validate();
  return m;
}

void write_counts(const CountMatrix& m, const std::string& path, TableFormat format) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  const char delim = format == TableFormat::tsv ? '\t' : ',';
  out << "gene_id";
  for (const auto& s : m.sample_ids) out << delim << s;
  out << '\n';
  for (Eigen::Index j = 0; j < m.n_genes(); ++j) {
    out << m.gene_ids[j];
    for (Eigen::Index i = 0; i < m.n_samples(); ++i)
      out << delim << static_cast<long long>(m.counts(j, i));
    out << '\n';
  }
  if (!out) throw ParseError("write failed: " + path);
}

CountMatrix filter_genes(const CountMatrix& m, double min_mean,
                         double min_variance_quantile) {
  if (min_mean < 0.0) throw ValidationError("filter_genes: min_mean must be >= 0");
  if (min_variance_quantile < 0.0 || min_variance_quantile > 1.0)
    throw ValidationError("filter_genes: variance quantile must lie in [0,1]");
  const auto G = m.n_genes();
  const auto n = m.n_samples();

  std::vector<double> means(G), vars(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double mu = m.counts.row(j).mean();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = m.counts(j, i) - mu;
      ss += d * d;
    }
    means[j] = mu;
    vars[j] = ss / static_cast<double>(n - 1);
  }
  const double var_cut = quantile(vars, min_variance_quantile);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < G; ++j)
    if (means[j] >= min_mean && vars[j] >= var_cut) keep.push_back(j);
  if (keep.empty()) throw ValidationError("filter_genes: no genes pass the thresholds");

  CountMatrix out;
  out.sample_ids = m.sample_ids;
  out.counts.resize(static_cast<Eigen::Index>(keep.size()), n);
  out.gene_ids.reserve(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.gene_ids.push_back(m.gene_ids[keep[r]]);
    out.counts.row(static_cast<Eigen::Index>(r)) = m.counts.row(keep[r]);
  }
  return out;
}

}  // namespace snbclust
