#include "wsfuse/subset_select.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "wsfuse/label_model.hpp"

namespace wsfuse {

namespace {
constexpr double kCostEps = 1e-9;  // per_cost ratio denominator floor
}

SimilarityKernel cosine_kernel(const Tensor2& features) {
  const std::size_t n = features.rows();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : features.row(i)) sq += v * v;
    if (sq <= 0.0) throw DomainError("cosine_kernel: zero-norm feature vector at row " + std::to_string(i));
    norms[i] = std::sqrt(sq);
  }
  SimilarityKernel kernel;
  kernel.n = n;
  kernel.sim = Tensor2(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.sim(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      auto ri = features.row(i);
      auto rj = features.row(j);
      for (std::size_t d = 0; d < ri.size(); ++d) dot += ri[d] * rj[d];
      double cosv = dot / (norms[i] * norms[j]);
      cosv = std::clamp(cosv, -1.0, 1.0);
      const double s = (1.0 + cosv) / 2.0;
      kernel.sim(i, j) = s;
      kernel.sim(j, i) = s;
    }
  }
  kernel.row_sums.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kernel.row_sums[j] += kernel.sim(i, j);
  return kernel;
}

double graphcut_utility(std::span<const std::size_t> selected, const SimilarityKernel& kernel,
                        double gamma) {
  for (std::size_t v : selected)
    if (v >= kernel.n) throw DomainError("graphcut_utility: index " + std::to_string(v) + " out of range");
  double rep = 0.0;
  for (std::size_t v : selected) rep += kernel.row_sums[v];
  double intra = 0.0;
  for (std::size_t l : selected)
    for (std::size_t m : selected) intra += kernel.sim(l, m);
  return gamma * rep - intra;
}

double marginal_gain(std::span<const std::size_t> selected, std::size_t v,
                     const SimilarityKernel& kernel, double gamma) {
  if (v >= kernel.n) throw DomainError("marginal_gain: index out of range");
  double cross = 0.0;
  for (std::size_t l : selected) {
    if (l == v) throw DomainError("marginal_gain: candidate already selected");
    cross += kernel.sim(l, v);
  }
  return gamma * kernel.row_sums[v] - 2.0 * cross - kernel.sim(v, v);
}

CostVector normalized_costs(const Tensor2& posteriors) {
  const std::size_t n = posteriors.rows();
  if (n == 0) throw DomainError("normalized_costs: empty posterior set");
  CostVector out;
  out.cost.resize(n);
  double raw_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.cost[i] = entropy(posteriors.row(i));
    raw_total += out.cost[i];
  }
  if (raw_total < 1e-12) {
    // all pseudo labels deterministic: uniform cost 1 per sample
    std::fill(out.cost.begin(), out.cost.end(), 1.0);
  } else {
    const double scale = double(n) / raw_total;
    for (double& c : out.cost) c *= scale;
  }
  out.total = 0.0;
  for (double c : out.cost) out.total += c;
  return out;
}

namespace {

struct GreedyState {
  std::vector<std::size_t> selected;
  std::vector<double> sum_sel;  // sum_{l in S} s_lv per candidate v
  std::vector<char> in_set;
  double total_cost = 0.0;

  explicit GreedyState(std::size_t n) : sum_sel(n, 0.0), in_set(n, 0) {}

  void add(std::size_t v, const SimilarityKernel& kernel, double cost) {
    selected.push_back(v);
    in_set[v] = 1;
    total_cost += cost;
    for (std::size_t u = 0; u < kernel.n; ++u) sum_sel[u] += kernel.sim(v, u);
  }

  double gain(std::size_t v, const SimilarityKernel& kernel, double gamma) const {
    return gamma * kernel.row_sums[v] - 2.0 * sum_sel[v] - kernel.sim(v, v);
  }
};

double ranking_value(double gain, double cost, RatioMode mode) {
  if (mode == RatioMode::uniform) return gain;
  return gain / std::max(cost, kCostEps);
}

double feasibility_cost(const CostVector& costs, std::size_t v, const CegOptions& options) {
  return options.unit_cost_feasibility ? 1.0 : costs.cost[v];
}

SelectionResult finish(GreedyState&& st, const SimilarityKernel& kernel, double budget,
                       double gamma, RatioMode mode) {
  SelectionResult r;
  r.indices = std::move(st.selected);
  r.utility = graphcut_utility(r.indices, kernel, gamma);
  r.total_cost = st.total_cost;
  r.budget = budget;
  r.variant = mode == RatioMode::uniform ? SelectionVariant::uniform : SelectionVariant::cost;
  return r;
}

}  // namespace

SelectionResult ceg_naive(const SimilarityKernel& kernel, const CostVector& costs, double budget,
                          double gamma, CegOptions options) {
  if (budget <= 0.0) throw ConfigError("ceg: budget must be > 0");
  if (costs.cost.size() != kernel.n) throw ShapeError("ceg: cost vector size != kernel size");
  GreedyState st(kernel.n);
  for (;;) {
    std::size_t best = kernel.n;
    double best_value = 0.0;
    for (std::size_t v = 0; v < kernel.n; ++v) {
      if (st.in_set[v]) continue;
      if (st.total_cost + feasibility_cost(costs, v, options) > budget) continue;
      const double g = st.gain(v, kernel, gamma);
      if (g <= 0.0) continue;
      const double value = ranking_value(g, costs.cost[v], options.mode);
      if (best == kernel.n || value > best_value) {
        best = v;
        best_value = value;
      }
    }
    if (best == kernel.n) break;
    st.add(best, kernel, feasibility_cost(costs, best, options));
  }
  return finish(std::move(st), kernel, budget, gamma, options.mode);
}

SelectionResult ceg(const SimilarityKernel& kernel, const CostVector& costs, double budget,
                    double gamma, CegOptions options) {
  if (budget <= 0.0) throw ConfigError("ceg: budget must be > 0");
  if (costs.cost.size() != kernel.n) throw ShapeError("ceg: cost vector size != kernel size");

  struct Entry {
    double value;
    std::size_t index;
    std::size_t round;  // |S| when value was computed
  };
  struct Cmp {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.value != b.value) return a.value < b.value;
      return a.index > b.index;  // lowest index wins ties
    }
  };

  GreedyState st(kernel.n);
  std::priority_queue<Entry, std::vector<Entry>, Cmp> queue;
  for (std::size_t v = 0; v < kernel.n; ++v) {
    const double g = st.gain(v, kernel, gamma);
    queue.push({ranking_value(g, costs.cost[v], options.mode), v, 0});
  }

  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    // infeasible now means infeasible forever: drop without reinsertion
    if (st.total_cost + feasibility_cost(costs, top.index, options) > budget) continue;
    if (top.round != st.selected.size()) {
      const double g = st.gain(top.index, kernel, gamma);
      queue.push({ranking_value(g, costs.cost[top.index], options.mode), top.index,
                  st.selected.size()});
      continue;
    }
    // fresh maximum; stale entries above it would have been upper bounds
    if (top.value <= 0.0) break;
    st.add(top.index, kernel, feasibility_cost(costs, top.index, options));
  }
  return finish(std::move(st), kernel, budget, gamma, options.mode);
}

SelectionResult select_subset(const SimilarityKernel& kernel, const CostVector& costs, double eta,
                              double gamma, SelectOptions options) {
  if (eta <= 0.0 || eta >= 1.0) throw ConfigError("select_subset: eta must lie in (0,1)");
  const double budget = eta * costs.total;
  SelectionResult by_cost = ceg(kernel, costs, budget, gamma, {RatioMode::per_cost, false});
  SelectionResult by_gain =
      ceg(kernel, costs, budget, gamma, {RatioMode::uniform, options.uniform_unit_budget});
  SelectionResult best = by_gain.utility > by_cost.utility ? std::move(by_gain) : std::move(by_cost);
  best.variant = SelectionVariant::best;
  return best;
}

std::pair<std::vector<std::size_t>, double> brute_force_opt(const SimilarityKernel& kernel,
                                                            const CostVector& costs, double budget,
                                                            double gamma) {
  const std::size_t n = kernel.n;
  if (n > 20) throw DomainError("brute_force_opt: n > 20 exceeds the enumeration guard");
  if (costs.cost.size() != n) throw ShapeError("brute_force_opt: cost vector size mismatch");

  const std::size_t masks = std::size_t(1) << n;
  // incremental utilities: F[mask] = F[mask without lowest bit] + gain
  std::vector<double> utility(masks, 0.0), cost(masks, 0.0);
  double best_utility = 0.0;  // empty set is always feasible with F = 0
  std::size_t best_mask = 0;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const std::size_t low = mask & (~mask + 1);
    const std::size_t v = static_cast<std::size_t>(__builtin_ctzll(low));
    const std::size_t rest = mask ^ low;
    double cross = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      if (rest & (std::size_t(1) << u)) cross += kernel.sim(u, v);
    utility[mask] = utility[rest] + gamma * kernel.row_sums[v] - 2.0 * cross - kernel.sim(v, v);
    cost[mask] = cost[rest] + costs.cost[v];
    if (cost[mask] <= budget && utility[mask] > best_utility) {
      best_utility = utility[mask];
      best_mask = mask;
    }
  }
  std::vector<std::size_t> set;
  for (std::size_t v = 0; v < n; ++v)
    if (best_mask & (std::size_t(1) << v)) set.push_back(v);
  return {set, best_utility};
}

}  // namespace wsfuse
