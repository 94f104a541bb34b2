#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wsfuse/subset_select.hpp"

using namespace wsfuse;

namespace {

SimilarityKernel kernel_from_matrix(Tensor2 sim) {
  SimilarityKernel k;
  k.n = sim.rows();
  k.row_sums.assign(k.n, 0.0);
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t j = 0; j < k.n; ++j) k.row_sums[j] += sim(i, j);
  k.sim = std::move(sim);
  return k;
}

SimilarityKernel two_point_kernel() {
  return kernel_from_matrix(Tensor2(2, 2, {1.0, 0.5, 0.5, 1.0}));
}

CostVector unit_costs(std::size_t n) {
  CostVector c;
  c.cost.assign(n, 1.0);
  c.total = double(n);
  return c;
}

CostVector random_costs(std::size_t n, Rng& rng) {
  CostVector c;
  c.cost.resize(n);
  c.total = 0.0;
  for (auto& v : c.cost) {
    v = rng.uniform() < 0.1 ? 0.0 : 0.05 + 1.95 * rng.uniform();
    c.total += v;
  }
  return c;
}

}  // namespace

TEST_SUITE("subset-select") {

TEST_CASE("cosine kernel maps cosine into [0,1]") {
  Tensor2 f(4, 2, {1.0, 0.0, 2.0, 0.0, 0.0, 3.0, -1.0, 0.0});
  SimilarityKernel k = cosine_kernel(f);
  CHECK(k.sim(0, 1) == doctest::Approx(1.0));   // identical direction
  CHECK(k.sim(0, 2) == doctest::Approx(0.5));   // orthogonal
  CHECK(k.sim(0, 3) == doctest::Approx(0.0));   // antipodal
  CHECK(k.sim(2, 2) == doctest::Approx(1.0));   // unit diagonal
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(k.sim(i, j) == k.sim(j, i));
      CHECK(k.sim(i, j) >= 0.0);
      CHECK(k.sim(i, j) <= 1.0);
    }
  // cached row sums stay consistent with the matrix
  for (std::size_t j = 0; j < 4; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += k.sim(i, j);
    CHECK(std::abs(s - k.row_sums[j]) < 1e-9);
  }

  Tensor2 zero_row(2, 2, {1.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_WITH_AS(cosine_kernel(zero_row), doctest::Contains("row 1"), DomainError);
}

TEST_CASE("graphcut utility: empty set, hand value, full-set identity") {
  SimilarityKernel k = two_point_kernel();
  CHECK(graphcut_utility(std::vector<std::size_t>{}, k, 2.0) == 0.0);

  // gamma=2, S={0}: 2*(1+0.5) - 1 = 2
  std::vector<std::size_t> s0 = {0};
  CHECK(graphcut_utility(s0, k, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

  // gamma=2, S = ground set: F = sum_ij s_ij
  std::vector<std::size_t> all = {0, 1};
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) total += k.sim(i, j);
  CHECK(graphcut_utility(all, k, 2.0) == doctest::Approx(total).epsilon(1e-12));

  std::vector<std::size_t> bad = {7};
  CHECK_THROWS_AS(graphcut_utility(bad, k, 2.0), DomainError);
}

TEST_CASE("marginal gain: specializations and two-evaluation agreement") {
  SimilarityKernel k = two_point_kernel();
  // S = {}: gamma*row_sum - s_vv
  CHECK(marginal_gain(std::vector<std::size_t>{}, 0, k, 2.0) ==
        doctest::Approx(2.0 * 1.5 - 1.0).epsilon(1e-12));
  // S = {0}, v=1: 2*1.5 - 2*0.5 - 1 = 1
  std::vector<std::size_t> s0 = {0};
  CHECK(marginal_gain(s0, 1, k, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(marginal_gain(s0, 0, k, 2.0), DomainError);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(8);
    SimilarityKernel kr = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    const double gamma = 2.0 + 2.0 * rng.uniform();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t set_size = rng.uniform_index(n);
    std::vector<std::size_t> s(order.begin(), order.begin() + set_size);
    const std::size_t v = order[set_size];
    const double direct = marginal_gain(s, v, kr, gamma);
    auto with_v = s;
    with_v.push_back(v);
    const double by_difference =
        graphcut_utility(with_v, kr, gamma) - graphcut_utility(s, kr, gamma);
    CHECK(std::abs(direct - by_difference) < 1e-9);
  }
}

TEST_CASE("monotone and submodular on random instances") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(8);
    SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    const double gamma = 2.0 + 2.0 * rng.uniform();

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t small = rng.uniform_index(n - 1);
    const std::size_t large = small + rng.uniform_index(n - small - 1);
    std::vector<std::size_t> s(order.begin(), order.begin() + small);
    std::vector<std::size_t> t(order.begin(), order.begin() + large);
    const std::size_t v = order[n - 1];

    const double gain_s = marginal_gain(s, v, k, gamma);
    const double gain_t = marginal_gain(t, v, k, gamma);
    CHECK(gain_s >= -1e-9);            // monotone
    CHECK(gain_s >= gain_t - 1e-9);    // diminishing returns
  }
}

TEST_CASE("normalized costs: equal entropies, degenerate fallback, hand case") {
  // all uniform -> every cost 1
  Tensor2 uniform(3, 4, std::vector<double>(12, 0.25));
  CostVector cu = normalized_costs(uniform);
  for (double c : cu.cost) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cu.total == doctest::Approx(3.0).epsilon(1e-9));

  // all one-hot -> fallback to uniform cost 1
  Tensor2 onehot(2, 3, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  CostVector cf = normalized_costs(onehot);
  CHECK(cf.cost[0] == 1.0);
  CHECK(cf.cost[1] == 1.0);

  // H = [ln2, 0] -> costs [2, 0]
  Tensor2 mixed(2, 2, {0.5, 0.5, 1.0, 0.0});
  CostVector cm = normalized_costs(mixed);
  CHECK(cm.cost[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cm.cost[1] == doctest::Approx(0.0));
  CHECK(cm.total == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("normalized costs sum to the set size") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const std::size_t c = 2 + rng.uniform_index(5);
    Tensor2 posts = test::random_probs(n, c, rng);
    CostVector costs = normalized_costs(posts);
    CHECK(std::abs(costs.total - double(n)) < 1e-9);
  }
}

TEST_CASE("ceg saturates when the budget covers everything") {
  Rng rng(23);
  SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(8, rng));
  CostVector costs = unit_costs(8);
  SelectionResult r = ceg(k, costs, 100.0, 2.5, {RatioMode::per_cost, false});
  CHECK(r.indices.size() == 8);  // positive gains everywhere at gamma >= 2
  CHECK(r.total_cost == doctest::Approx(8.0));
}

TEST_CASE("zero-cost samples are selected before costly peers of equal gain") {
  // symmetric instance: two identical points, one free, one expensive
  SimilarityKernel k = kernel_from_matrix(Tensor2(2, 2, {1.0, 1.0, 1.0, 1.0}));
  CostVector costs;
  costs.cost = {1.5, 0.0};
  costs.total = 1.5;
  SelectionResult r = ceg(k, costs, 1.0, 2.0, {RatioMode::per_cost, false});
  REQUIRE(!r.indices.empty());
  CHECK(r.indices.front() == 1);  // ratio -> infinity under the eps floor
}

TEST_CASE("lazy and naive greedy emit identical index sequences") {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    const double gamma = 2.0 + rng.uniform();
    const double eta = 0.2 + 0.7 * rng.uniform();
    const double budget = std::max(eta * costs.total, 1e-6);
    for (RatioMode mode : {RatioMode::per_cost, RatioMode::uniform}) {
      const SelectionResult lazy = ceg(k, costs, budget, gamma, {mode, false});
      const SelectionResult naive = ceg_naive(k, costs, budget, gamma, {mode, false});
      CHECK(lazy.indices == naive.indices);
      CHECK(lazy.utility == doctest::Approx(naive.utility).epsilon(1e-12));
    }
  }
}

TEST_CASE("budget safety holds exactly") {
  Rng rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(20);
    SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    const double eta = 0.2 + 0.6 * rng.uniform();
    SelectionResult r = select_subset(k, costs, eta, 2.5);
    CHECK(r.total_cost <= r.budget);
    CHECK(r.budget == doctest::Approx(eta * costs.total).epsilon(1e-12));
    CHECK(r.variant == SelectionVariant::best);

    // reported utility matches a from-scratch recomputation
    CHECK(std::abs(r.utility - graphcut_utility(r.indices, k, 2.5)) < 1e-6);
  }
}

TEST_CASE("selection is deterministic") {
  Rng rng(41);
  SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(15, rng));
  CostVector costs = random_costs(15, rng);
  SelectionResult a = select_subset(k, costs, 0.5, 3.0);
  SelectionResult b = select_subset(k, costs, 0.5, 3.0);
  CHECK(a.indices == b.indices);
  CHECK(a.utility == b.utility);
}

TEST_CASE("brute force: singleton, hand enumeration, dominates greedy") {
  // n=1
  SimilarityKernel k1 = kernel_from_matrix(Tensor2(1, 1, {1.0}));
  auto [s1, u1] = brute_force_opt(k1, unit_costs(1), 2.0, 2.0);
  CHECK(s1 == std::vector<std::size_t>{0});
  CHECK(u1 == doctest::Approx(2.0 * 1.0 - 1.0));

  // n=3 hand-checkable: budget allows any single element; the best singleton
  // maximizes gamma*row_sum - 1
  Tensor2 sim(3, 3, {1.0, 0.2, 0.8, 0.2, 1.0, 0.4, 0.8, 0.4, 1.0});
  SimilarityKernel k3 = kernel_from_matrix(sim);
  CostVector c3 = unit_costs(3);
  auto [s3, u3] = brute_force_opt(k3, c3, 1.0, 2.0);
  // row sums: v0: 2.0, v1: 1.6, v2: 2.2 -> best singleton is {2}, F = 2*2.2-1
  CHECK(s3 == std::vector<std::size_t>{2});
  CHECK(u3 == doctest::Approx(2.0 * 2.2 - 1.0).epsilon(1e-12));

  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(8);
    SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    const double budget = std::max(0.4 * costs.total, 1e-6);
    auto [opt_set, opt_utility] = brute_force_opt(k, costs, budget, 2.0);
    (void)opt_set;
    for (RatioMode mode : {RatioMode::per_cost, RatioMode::uniform}) {
      SelectionResult greedy = ceg(k, costs, budget, 2.0, {mode, false});
      CHECK(opt_utility >= greedy.utility - 1e-9);
    }
  }

  SimilarityKernel big = kernel_from_matrix(test::random_kernel_matrix(21, rng));
  CHECK_THROWS_AS(brute_force_opt(big, unit_costs(21), 1.0, 2.0), DomainError);
}

TEST_CASE("dual-run selection clears the 0.3161 approximation bound") {
  Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(9);  // up to 12
    SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    const double eta = (trial % 2) ? 0.5 : 0.8;
    SelectionResult best = select_subset(k, costs, eta, (trial % 3) ? 2.0 : 3.0);
    auto [opt_set, opt_utility] =
        brute_force_opt(k, costs, eta * costs.total, (trial % 3) ? 2.0 : 3.0);
    (void)opt_set;
    CHECK(best.utility >= 0.3161 * opt_utility - 1e-9);
  }
}

TEST_CASE("uniform-budget flag turns the budget into a cardinality bound") {
  Rng rng(53);
  SimilarityKernel k = kernel_from_matrix(test::random_kernel_matrix(10, rng));
  CostVector costs = random_costs(10, rng);
  SelectionResult r = ceg(k, costs, 3.0, 2.0, {RatioMode::uniform, true});
  CHECK(r.indices.size() <= 3);
  CHECK(r.total_cost == doctest::Approx(double(r.indices.size())));
}

TEST_CASE("select_subset validates eta") {
  SimilarityKernel k = two_point_kernel();
  CostVector costs = unit_costs(2);
  CHECK_THROWS_AS(select_subset(k, costs, 0.0, 2.0), ConfigError);
  CHECK_THROWS_AS(select_subset(k, costs, 1.0, 2.0), ConfigError);
  CHECK_THROWS_AS(select_subset(k, costs, -0.2, 2.0), ConfigError);
}

}  // TEST_SUITE
