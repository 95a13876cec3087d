#include <doctest.h>

#include "oracles.hpp"

#include <snbclust/metrics.hpp>
#include <snbclust/rng.hpp>

#include <cmath>

using namespace snbclust;

TEST_CASE("ARI basics") {
  std::vector<int> a{1, 2, 3, 1, 2, 3};
  CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<int> renamed{7, 5, 9, 7, 5, 9};
  CHECK(adjusted_rand_index(a, renamed) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(adjusted_rand_index(a, std::vector<int>{1, 2}), ValidationError);
}

TEST_CASE("ARI frozen example from pair counting") {
  // Brute-force pair counting over all 15 pairs gives 12/37.
  std::vector<int> a{1, 1, 1, 2, 2, 2};
  std::vector<int> b{1, 1, 2, 2, 2, 2};
  const double oracle = oracles::pair_counting_ari(a, b);
  CHECK(oracle == doctest::Approx(12.0 / 37.0).epsilon(1e-15));
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("ARI matches pair counting on random partitions") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const int n = 4 + static_cast<int>(rng.uniform_int(12));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.uniform_int(3)) + 1;
      b[i] = static_cast<int>(rng.uniform_int(4)) + 1;
    }
    const double got = adjusted_rand_index(a, b);
    const double want = oracles::pair_counting_ari(a, b);
    CHECK(std::fabs(got - want) < 1e-12);
    CHECK(std::fabs(adjusted_rand_index(b, a) - got) < 1e-12);  // symmetry
  }
}

TEST_CASE("AUC basics") {
  Vector s(4);
  s << 0.9, 0.4, 0.35, 0.8;
  std::vector<char> truth{1, 0, 1, 0};
  CHECK(roc_auc(s, truth) == doctest::Approx(0.5).epsilon(1e-12));

  Vector sep(4);
  sep << 3, 4, 1, 2;
  std::vector<char> t2{1, 1, 0, 0};
  CHECK(roc_auc(sep, t2) == doctest::Approx(1.0).epsilon(1e-12));

  Vector flat = Vector::Constant(6, 2.0);
  std::vector<char> t3{1, 0, 1, 0, 1, 0};
  CHECK(roc_auc(flat, t3) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<char> one_class{1, 1, 1, 1};
  CHECK_THROWS_AS(roc_auc(s, one_class), ValidationError);
}

TEST_CASE("AUC matches pair enumeration and is rank-invariant") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int n = 6 + static_cast<int>(rng.uniform_int(10));
    Vector s(n);
    std::vector<double> raw(n);
    std::vector<char> truth(n);
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      raw[i] = std::round(rng.uniform(0.0, 6.0) * 4.0) / 4.0;  // force ties
      s[i] = raw[i];
      truth[i] = rng.uniform() < 0.4 ? 1 : 0;
      (truth[i] ? pos : neg) = true;
    }
    if (!pos || !neg) continue;
    const double got = roc_auc(s, truth);
    CHECK(std::fabs(got - oracles::pair_enumeration_auc(raw, truth)) < 1e-12);

    Vector transformed(n);
    for (int i = 0; i < n; ++i) transformed[i] = std::exp(2.0 * s[i]) + 1.0;
    CHECK(roc_auc(transformed, truth) == doctest::Approx(got).epsilon(1e-12));
  }
}

TEST_CASE("hypergeometric tail extremes") {
  // Selected set identical to the gene set: a single table attains the tail.
  const double p = hypergeometric_tail(10, 0, 0, 90);
  long double denom = 1.0L;
  for (int i = 0; i < 10; ++i)
    denom *= static_cast<long double>(100 - i) / static_cast<long double>(10 - i);
  CHECK(p == doctest::Approx(static_cast<double>(1.0L / denom)).epsilon(1e-9));

  // Disjoint selection: P(X >= 0) = 1.
  CHECK(hypergeometric_tail(0, 10, 10, 80) == 1.0);
}

TEST_CASE("hypergeometric tail matches direct summation") {
  CHECK(std::fabs(hypergeometric_tail(8, 2, 2, 88) -
                  oracles::hypergeom_tail_direct(8, 2, 2, 88)) < 1e-12);
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const long a = static_cast<long>(rng.uniform_int(8));
    const long b = static_cast<long>(rng.uniform_int(12));
    const long c = static_cast<long>(rng.uniform_int(8));
    const long d = static_cast<long>(rng.uniform_int(60));
    if (a + b == 0 || a + c == 0) continue;
    CHECK(std::fabs(hypergeometric_tail(a, b, c, d) -
                    oracles::hypergeom_tail_direct(a, b, c, d)) < 1e-12);
  }
}

TEST_CASE("Benjamini-Hochberg adjustment") {
  std::vector<double> p{0.01, 0.04, 0.03, 0.005};
  auto adj = benjamini_hochberg(p);
  // Sorted p: 0.005, 0.01, 0.03, 0.04 -> adjusted 0.02, 0.02, 0.04, 0.04.
  CHECK(adj[3] == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(adj[0] == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(adj[2] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(adj[1] == doctest::Approx(0.04).epsilon(1e-12));

  // Monotone non-decreasing when ordered by raw p.
  Rng rng(13);
  std::vector<double> raw(20);
  for (auto& v : raw) v = rng.uniform();
  auto a = benjamini_hochberg(raw);
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return raw[i] < raw[j]; });
  for (std::size_t r = 1; r < order.size(); ++r)
    CHECK(a[order[r]] >= a[order[r - 1]] - 1e-15);
}

TEST_CASE("fisher_enrichment flags empty sets and fills the table") {
  std::vector<char> selected{1, 1, 0, 0, 1, 0};
  GeneSet in_set{"hit", {1, 1, 1, 0, 0, 0}};
  GeneSet empty{"empty", {0, 0, 0, 0, 0, 0}};
  auto rows = fisher_enrichment(selected, {in_set, empty});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].a == 2);
  CHECK(rows[0].b == 1);
  CHECK(rows[0].c == 1);
  CHECK(rows[0].d == 2);
  CHECK(rows[0].a + rows[0].b + rows[0].c + rows[0].d == 6);
  CHECK(rows[0].p == doctest::Approx(oracles::hypergeom_tail_direct(2, 1, 1, 2))
                         .epsilon(1e-12));
  CHECK(rows[1].empty_set);
  CHECK(rows[1].p == 1.0);
}
