#include "snbclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace snbclust {

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw ValidationError("adjusted_rand_index: label vectors differ in length");
  if (a.empty()) throw ValidationError("adjusted_rand_index: empty labels");
  const double n = static_cast<double>(a.size());

  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> row, col;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }
  auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
  double sum_cells = 0.0, sum_row = 0.0, sum_col = 0.0;
  for (const auto& [key, v] : cells) sum_cells += choose2(v);
  for (const auto& [key, v] : row) sum_row += choose2(v);
  for (const auto& [key, v] : col) sum_col += choose2(v);

  const double total = choose2(n);
  const double expected = sum_row * sum_col / total;
  const double max_index = 0.5 * (sum_row + sum_col);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / (max_index - expected);
}

double roc_auc(const Vector& scores, const std::vector<char>& truth) {
  if (static_cast<std::size_t>(scores.size()) != truth.size())
    throw ValidationError("roc_auc: length mismatch");
  std::vector<double> pos, neg;
  for (std::size_t j = 0; j < truth.size(); ++j)
    (truth[j] ? pos : neg).push_back(scores[static_cast<Eigen::Index>(j)]);
  if (pos.empty() || neg.empty())
    throw ValidationError("roc_auc: truth must contain both classes");

  // Rank-based Mann-Whitney, ties get midranks.
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : pos) {
    const auto below = std::lower_bound(neg.begin(), neg.end(), p) - neg.begin();
    const auto upto = std::upper_bound(neg.begin(), neg.end(), p) - neg.begin();
    wins += static_cast<double>(below) + 0.5 * static_cast<double>(upto - below);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double hypergeometric_tail(long a, long b, long c, long d) {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw ValidationError("hypergeometric_tail: negative cell");
  const long total = a + b + c + d;
  const long in_set = a + c;
  const long selected = a + b;
  if (total == 0) return 1.0;
  // The support of X starts at max(0, selected + in_set - total); at or below
  // it the one-sided tail is exactly 1.
  if (a <= std::max(0L, selected + in_set - total)) return 1.0;

  auto log_choose = [](long m, long k) {
    return std::lgamma(static_cast<double>(m) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(m - k) + 1.0);
  };
  const long k_max = std::min(in_set, selected);
  const double log_denom = log_choose(total, selected);
  long double tail = 0.0L;
  for (long k = k_max; k >= a; --k) {
    const double lp = log_choose(in_set, k) + log_choose(total - in_set, selected - k) -
                      log_denom;
    tail += std::exp(static_cast<long double>(lp));
  }
  return std::min(static_cast<double>(tail), 1.0);
}

std::vector<double> benjamini_hochberg(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
  std::vector<double> adj(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double v = p[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, v);
    adj[order[r]] = running;
  }
  return adj;
}

std::vector<EnrichmentRow> fisher_enrichment(const std::vector<char>& selected,
                                             const std::vector<GeneSet>& gene_sets) {
  std::vector<EnrichmentRow> rows;
  rows.reserve(gene_sets.size());
  for (const auto& gs : gene_sets) {
    if (gs.mask.size() != selected.size())
      throw ValidationError("fisher_enrichment: gene set \"" + gs.name +
                            "\" is over a different gene universe");
    EnrichmentRow r;
    r.set = gs.name;
    for (std::size_t j = 0; j < selected.size(); ++j) {
      if (selected[j] && gs.mask[j]) ++r.a;
      else if (selected[j]) ++r.b;
      else if (gs.mask[j]) ++r.c;
      else ++r.d;
    }
    if (r.a + r.c == 0) {
      r.empty_set = true;
      r.p = 1.0;
    } else {
      r.p = hypergeometric_tail(r.a, r.b, r.c, r.d);
    }
    rows.push_back(r);
  }
  std::vector<double> ps;
  ps.reserve(rows.size());
  for (const auto& r : rows) ps.push_back(r.p);
  const auto fdr = benjamini_hochberg(ps);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].fdr = fdr[i];
  return rows;
}

Vector gene_scores(const MixtureFit& fit) {
  const auto G = fit.beta.rows();
  Vector s(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < fit.beta.cols(); ++k)
      best = std::max(best, std::fabs(fit.beta(j, k) - fit.beta_star[j]));
    s[j] = best;
  }
  return s;
}

Vector gene_scores(const GaussianMixtureFit& fit) {
  const auto G = fit.mu.rows();
  Vector s(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < fit.mu.cols(); ++k)
      best = std::max(best, std::fabs(fit.mu(j, k)));
    s[j] = best;
  }
  return s;
}

}  // namespace snbclust
