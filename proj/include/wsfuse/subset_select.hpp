#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wsfuse/tensor.hpp"

namespace wsfuse {

// Symmetric pairwise similarity over the non-abstained set, entries in [0,1],
// with cached per-column sums over the whole ground set.
struct SimilarityKernel {
  std::size_t n = 0;
  Tensor2 sim;                   // n x n
  std::vector<double> row_sums;  // row_sums[v] = sum_i sim(i, v)
};

// sim(i,j) = (1 + cos(f_i, f_j)) / 2, mapping cosine into [0,1].
// Throws DomainError naming the row when a feature vector has zero norm.
SimilarityKernel cosine_kernel(const Tensor2& features);

// F(S) = gamma * sum_{i in ground set} sum_{j in S} s_ij
//        - sum over ordered pairs (l,m) in S (including l == m) of s_lm.
// Monotone for gamma >= 2 with entries in [0,1].
double graphcut_utility(std::span<const std::size_t> selected, const SimilarityKernel& kernel,
                        double gamma);

// F(S + v) - F(S) = gamma*row_sums[v] - 2*sum_{l in S} s_lv - s_vv.
// Throws DomainError if v is already in S.
double marginal_gain(std::span<const std::size_t> selected, std::size_t v,
                     const SimilarityKernel& kernel, double gamma);

struct CostVector {
  std::vector<double> cost;
  double total = 0.0;
};

// cost_i = H_i * n / sum_j H_j over the posterior rows; falls back to uniform
// cost 1 when every pseudo label is deterministic (total entropy < 1e-12).
CostVector normalized_costs(const Tensor2& posteriors);

enum class RatioMode { per_cost, uniform };
enum class SelectionVariant { uniform, cost, best };

struct SelectionResult {
  std::vector<std::size_t> indices;  // insertion order, positions in the kernel's ground set
  double utility = 0.0;
  double total_cost = 0.0;
  double budget = 0.0;
  SelectionVariant variant = SelectionVariant::cost;
};

struct CegOptions {
  RatioMode mode = RatioMode::per_cost;
  // When true, feasibility treats every cost as 1 (budget becomes a
  // cardinality bound). Default is actual entropy costs for both modes.
  bool unit_cost_feasibility = false;
};

// Cost-effective greedy with lazy priority-queue re-evaluation. Candidates
// whose cost would exceed the budget are skipped and the scan continues;
// stops when no feasible candidate with positive gain remains. Ties break to
// the lowest index. Emits the identical sequence to ceg_naive.
SelectionResult ceg(const SimilarityKernel& kernel, const CostVector& costs, double budget,
                    double gamma, CegOptions options);

// Reference full-rescan greedy with the same contract; kept as the oracle for
// the lazy implementation.
SelectionResult ceg_naive(const SimilarityKernel& kernel, const CostVector& costs, double budget,
                          double gamma, CegOptions options);

struct SelectOptions {
  bool uniform_unit_budget = false;  // cardinality reading of the uniform run
};

// Budget = eta * total cost; runs ceg under both ratio modes and returns the
// higher-utility result (tagged best). The dual run carries the
// 0.5*(1 - 1/e) guarantee against the feasible optimum.
SelectionResult select_subset(const SimilarityKernel& kernel, const CostVector& costs, double eta,
                              double gamma, SelectOptions options = {});

// Exact maximizer by enumeration; guard n <= 20.
std::pair<std::vector<std::size_t>, double> brute_force_opt(const SimilarityKernel& kernel,
                                                            const CostVector& costs, double budget,
                                                            double gamma);

}  // namespace wsfuse
