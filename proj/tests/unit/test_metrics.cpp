#include <doctest.h>

#include <cmath>
#include <set>

#include "generators.hpp"
#include "oracles.hpp"
#include "sdec/metrics.hpp"

using namespace sdec;

TEST_CASE("contingency tables") {
  const auto diag = contingency(Labels{0, 0, 1, 1}, Labels{0, 0, 1, 1});
  CHECK(diag.counts == std::vector<std::int64_t>{2, 0, 0, 2});
  const auto ones = contingency(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1});
  CHECK(ones.counts == std::vector<std::int64_t>{1, 1, 1, 1});
  const auto gap = contingency(Labels{0, 1}, Labels{0, 2});
  CHECK(gap.pred_clusters == 3);
  CHECK(gap.col_sums() == std::vector<std::int64_t>{1, 0, 1});
  CHECK(gap.n == 2);

  CHECK_THROWS_AS(contingency(Labels{0, 1}, Labels{0}), Error);
  CHECK_THROWS_AS(contingency(Labels{}, Labels{}), Error);
  CHECK_THROWS_AS(contingency(Labels{0, -1}, Labels{0, 0}), Error);
}

TEST_CASE("hungarian finds the minimum-cost matching") {
  const std::vector<std::int64_t> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto a = hungarian(cost, 3);
  std::int64_t total = 0;
  for (std::size_t r = 0; r < 3; ++r) total += cost[r * 3 + a[r]];
  CHECK(total == 5);
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 3);
  CHECK_THROWS_AS(hungarian(cost, 2), Error);
}

TEST_CASE("accuracy worked cases") {
  const auto swapped = accuracy(Labels{0, 0, 1, 1}, Labels{1, 1, 0, 0});
  CHECK(swapped.acc == 1.0);
  CHECK(swapped.mapping == std::vector<std::int32_t>{1, 0});
  CHECK(accuracy(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}).acc == 0.5);

  // More clusters than classes: one cluster stays unmatched.
  const auto extra = accuracy(Labels{0, 0, 1, 1}, Labels{0, 0, 1, 2});
  CHECK(extra.acc == 0.75);
  CHECK(std::count(extra.mapping.begin(), extra.mapping.end(), -1) == 1);
}

TEST_CASE("accuracy equals the brute-force permutation optimum") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = gen::between(rng, 1, 30);
    const auto kt = gen::between(rng, 1, 6), kp = gen::between(rng, 1, 6);
    const Labels y = gen::labels(rng, n, kt), c = gen::labels(rng, n, kp);
    const auto r = accuracy(y, c);
    CHECK(r.acc == oracle::brute_force_accuracy(y, c));
    // The mapping is injective and realises the reported accuracy.
    std::set<std::int32_t> used;
    std::int64_t hits = 0;
    for (std::size_t p = 0; p < r.mapping.size(); ++p) {
      if (r.mapping[p] < 0) continue;
      CHECK(used.insert(r.mapping[p]).second);
    }
    for (std::size_t i = 0; i < n; ++i) hits += r.mapping[c[i]] == y[i];
    CHECK(static_cast<double>(hits) / static_cast<double>(n) == r.acc);
  }
}

TEST_CASE("nmi worked cases") {
  CHECK(nmi(Labels{0, 0, 1, 1, 2}, Labels{1, 1, 2, 2, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nmi(Labels{0, 0, 1, 1}, Labels{0, 0, 0, 0}) == 0.0);
  CHECK(std::abs(nmi(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1})) < 1e-15);
  CHECK(nmi(Labels{3, 3, 3}, Labels{1, 1, 1}) == 1.0);
}

TEST_CASE("ari worked cases") {
  CHECK(ari(Labels{0, 1, 1, 2}, Labels{0, 1, 1, 2}) == 1.0);
  CHECK(ari(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(oracle::pairwise_ari(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(ari(Labels{0}, Labels{0}), Error);
}

TEST_CASE("ari and nmi agree with independent references") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = gen::between(rng, 2, 60);
    const Labels y = gen::labels(rng, n, gen::between(rng, 1, 6));
    const Labels c = gen::labels(rng, n, gen::between(rng, 1, 6));
    CHECK(std::abs(ari(y, c) - oracle::pairwise_ari(y, c)) < 1e-10);
    CHECK(std::abs(nmi(y, c) - oracle::reference_nmi(y, c)) < 1e-10);
  }
}

TEST_CASE("ari is exactly symmetric") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = gen::between(rng, 2, 80);
    const Labels y = gen::labels(rng, n, gen::between(rng, 1, 7));
    const Labels c = gen::labels(rng, n, gen::between(rng, 1, 7));
    CHECK(ari(y, c) == ari(c, y));
  }
}

TEST_CASE("metrics are invariant to renaming predicted clusters") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = gen::between(rng, 2, 40);
    const auto k = gen::between(rng, 1, 6);
    const Labels y = gen::labels(rng, n, gen::between(rng, 1, 6));
    const Labels c = gen::labels(rng, n, k);
    const Labels renamed = gen::permute_names(c, k, rng);
    const auto a = evaluate(y, c), b = evaluate(y, renamed);
    CHECK(a.acc == b.acc);
    CHECK(std::abs(a.nmi - b.nmi) < 1e-12);
    CHECK(std::abs(a.ari - b.ari) < 1e-12);
  }
}

TEST_CASE("metric ranges") {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = gen::between(rng, 2, 50);
    const Labels y = gen::labels(rng, n, gen::between(rng, 1, 8));
    const Labels c = gen::labels(rng, n, gen::between(rng, 1, 8));
    const auto r = evaluate(y, c);
    CHECK(r.acc >= 0.0);
    CHECK(r.acc <= 1.0);
    CHECK(r.nmi >= 0.0);
    CHECK(r.nmi <= 1.0);
    CHECK(r.ari >= -1.0);
    CHECK(r.ari <= 1.0);
  }
}

// The bound needs k_pred <= k_true: with more clusters than classes a labeling
// like y = 000111, c = 012012 scores 1/3 < 1/2.
TEST_CASE("balanced classes: accuracy is at least 1/k") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = gen::between(rng, 1, 5);
    const auto per = gen::between(rng, 1, 6);
    Labels y(k * per);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<std::int32_t>(i % k);
    const Labels c = gen::labels(rng, y.size(), gen::between(rng, 1, k));
    const double brute = oracle::brute_force_accuracy(y, c);
    CHECK(accuracy(y, c).acc == brute);
    CHECK(brute >= 1.0 / static_cast<double>(k) - 1e-15);
  }
  CHECK(accuracy(Labels{0, 0, 0, 1, 1, 1}, Labels{0, 1, 2, 0, 1, 2}).acc == doctest::Approx(1.0 / 3.0));
}
