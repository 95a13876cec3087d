#include "snbclust/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace snbclust {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse number \"" + s + "\"");
  }
}

long parse_long(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse integer \"" + s + "\"");
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_labels_csv(const std::string& path,
                      const std::vector<std::string>& sample_ids,
                      const std::vector<int>& labels, const Vector* max_posterior) {
  auto out = open_out(path);
  out << "sample_id,label,max_posterior\n";
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    const double post =
        max_posterior ? (*max_posterior)[static_cast<Eigen::Index>(i)] : 1.0;
    out << sample_ids[i] << ',' << labels[i] << ',' << fmt_double(post) << '\n';
  }
}

LabelFile read_labels_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  LabelFile lf;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() < 2)
      throw ParseError(path + ": row " + std::to_string(row) + " needs id,label");
    lf.sample_ids.push_back(f[0]);
    lf.labels.push_back(static_cast<int>(
        parse_long(f[1], path + ": row " + std::to_string(row))));
  }
  if (lf.labels.empty()) throw ParseError(path + ": no data rows");
  return lf;
}

void write_params_csv(const std::string& path,
                      const std::vector<std::string>& gene_ids,
                      const Vector& beta_star, const Matrix& components) {
  auto out = open_out(path);
  out << "gene_id,beta_star";
  for (Eigen::Index k = 0; k < components.cols(); ++k) out << ",beta_" << (k + 1);
  out << '\n';
  for (std::size_t j = 0; j < gene_ids.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out << gene_ids[j] << ',' << fmt_double(beta_star[jj]);
    for (Eigen::Index k = 0; k < components.cols(); ++k)
      out << ',' << fmt_double(components(jj, k));
    out << '\n';
  }
}

void write_weights_csv(const std::string& path,
                       const std::vector<std::string>& gene_ids,
                       const Vector& weights) {
  write_id_value_csv(path, "weight", gene_ids, weights);
}

ParamsFile read_params_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  const auto header = split_csv(strip_cr(line));
  if (header.size() < 2) throw ParseError(path + ": malformed header");
  const bool weights_file = header.size() == 2;
  const auto K = static_cast<Eigen::Index>(header.size() - 2);

  std::vector<std::string> ids;
  std::vector<double> base, comps;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != header.size())
      throw ParseError(path + ": row " + std::to_string(row) + " width mismatch");
    const std::string where = path + ": row " + std::to_string(row);
    ids.push_back(f[0]);
    base.push_back(parse_double(f[1], where));
    for (Eigen::Index k = 0; k < K; ++k)
      comps.push_back(parse_double(f[2 + k], where));
  }
  if (ids.empty()) throw ParseError(path + ": no data rows");

  ParamsFile pf;
  pf.gene_ids = std::move(ids);
  const auto G = static_cast<Eigen::Index>(pf.gene_ids.size());
  pf.score.resize(G);
  pf.selected.assign(pf.gene_ids.size(), 0);
  if (weights_file) {
    pf.baseline = Vector::Zero(G);
    pf.score = Eigen::Map<Vector>(base.data(), G);
    for (Eigen::Index j = 0; j < G; ++j) pf.selected[j] = pf.score[j] > 0.0 ? 1 : 0;
    return pf;
  }
  pf.baseline = Eigen::Map<Vector>(base.data(), G);
  pf.components.resize(G, K);
  for (Eigen::Index j = 0; j < G; ++j) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double b = comps[j * K + k];
      pf.components(j, k) = b;
      best = std::max(best, std::fabs(b - pf.baseline[j]));
      if (b != pf.baseline[j]) pf.selected[j] = 1;
    }
    pf.score[j] = best;
  }
  return pf;
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void write_id_value_csv(const std::string& path, const std::string& value_name,
                        const std::vector<std::string>& ids, const Vector& values) {
  auto out = open_out(path);
  out << "id," << value_name << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << fmt_double(values[static_cast<Eigen::Index>(i)]) << '\n';
}

Vector read_id_value_csv(const std::string& path,
                         const std::vector<std::string>& expected_ids) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::unordered_map<std::string, double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 2)
      throw ParseError(path + ": row " + std::to_string(row) + " needs id,value");
    values[f[0]] = parse_double(f[1], path + ": row " + std::to_string(row));
  }
  Vector out(static_cast<Eigen::Index>(expected_ids.size()));
  for (std::size_t i = 0; i < expected_ids.size(); ++i) {
    auto it = values.find(expected_ids[i]);
    if (it == values.end())
      throw ValidationError(path + ": missing value for id \"" + expected_ids[i] + "\"");
    out[static_cast<Eigen::Index>(i)] = it->second;
  }
  return out;
}

void write_path_csv(const std::string& path, const std::vector<PathEntry>& entries,
                    int chosen_index) {
  auto out = open_out(path);
  out << "lambda,loglik,penalized_loglik,q,n_selected,bic,chosen\n";
  for (std::size_t t = 0; t < entries.size(); ++t) {
    const auto& e = entries[t];
    out << fmt_double(e.lambda) << ',';
    if (e.ok) {
      out << fmt_double(e.loglik) << ',' << fmt_double(e.penalized_loglik) << ','
          << e.q << ',' << e.n_selected << ',' << fmt_double(e.bic);
    } else {
      out << "NA,NA,NA,NA,NA";
    }
    out << ',' << (static_cast<int>(t) == chosen_index ? 1 : 0) << '\n';
  }
}

void write_gap_csv(const std::string& path, const GapResult& gap) {
  auto out = open_out(path);
  out << "s,objective,gap,se,chosen\n";
  for (std::size_t i = 0; i < gap.s_grid.size(); ++i)
    out << fmt_double(gap.s_grid[i]) << ',' << fmt_double(gap.objective[i]) << ','
        << fmt_double(gap.gap[i]) << ',' << fmt_double(gap.se[i]) << ','
        << (static_cast<int>(i) == gap.chosen_index ? 1 : 0) << '\n';
}

void write_enrichment_csv(const std::string& path,
                          const std::vector<EnrichmentRow>& rows) {
  auto out = open_out(path);
  out << "set,a,b,c,d,p,fdr\n";
  for (const auto& r : rows)
    out << r.set << ',' << r.a << ',' << r.b << ',' << r.c << ',' << r.d << ','
        << fmt_double(r.p) << ',' << fmt_double(r.fdr) << '\n';
}

void write_groups_csv(const std::string& path,
                      const std::vector<std::string>& gene_ids,
                      const std::vector<std::vector<int>>& groups) {
  auto out = open_out(path);
  out << "gene_id";
  if (!groups.empty())
    for (std::size_t k = 0; k < groups[0].size(); ++k) out << ",group_" << (k + 1);
  out << '\n';
  for (std::size_t j = 0; j < gene_ids.size(); ++j) {
    out << gene_ids[j];
    for (int g : groups[j]) out << ',' << g;
    out << '\n';
  }
}

std::vector<GeneSet> read_gene_sets(const std::string& path,
                                    const std::vector<std::string>& gene_universe) {
  auto in = open_in(path);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < gene_universe.size(); ++j) index[gene_universe[j]] = j;

  std::vector<GeneSet> sets;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ": line " + std::to_string(row) +
                       " needs <name><TAB><comma-separated ids>");
    GeneSet gs;
    gs.name = line.substr(0, tab);
    gs.mask.assign(gene_universe.size(), 0);
    std::istringstream ss(line.substr(tab + 1));
    std::string id;
    while (std::getline(ss, id, ',')) {
      auto it = index.find(id);
      if (it != index.end()) gs.mask[it->second] = 1;
    }
    sets.push_back(std::move(gs));
  }
  if (sets.empty()) throw ParseError(path + ": no gene sets");
  return sets;
}

void write_truth_labels_csv(const std::string& path, const SimulatedDataset& ds) {
  auto out = open_out(path);
  out << "sample_id,label\n";
  for (std::size_t i = 0; i < ds.counts.sample_ids.size(); ++i)
    out << ds.counts.sample_ids[i] << ',' << ds.labels[i] << '\n';
}

void write_truth_genes_csv(const std::string& path, const SimulatedDataset& ds) {
  auto out = open_out(path);
  out << "gene_id,informative";
  for (Eigen::Index k = 0; k < ds.true_beta.cols(); ++k)
    out << ",true_log2_mean_" << (k + 1);
  out << '\n';
  for (std::size_t j = 0; j < ds.counts.gene_ids.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out << ds.counts.gene_ids[j] << ',' << (ds.informative_mask[j] ? 1 : 0);
    for (Eigen::Index k = 0; k < ds.true_beta.cols(); ++k)
      out << ',' << fmt_double(ds.true_beta(jj, k));
    out << '\n';
  }
}

GeneTruthFile read_truth_genes_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  GeneTruthFile tf;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() < 2)
      throw ParseError(path + ": row " + std::to_string(row) +
                       " needs gene_id,informative");
    tf.gene_ids.push_back(f[0]);
    tf.informative.push_back(
        parse_long(f[1], path + ": row " + std::to_string(row)) != 0 ? 1 : 0);
  }
  if (tf.gene_ids.empty()) throw ParseError(path + ": no data rows");
  return tf;
}

}  // namespace snbclust
