#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsfuse/label_model.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse {

struct WeakDataset {
  Tensor2 features;       // n x d
  VoteMatrix votes;       // n x K, kAbstain for no vote
  std::vector<int> gold;  // evaluation only; empty when absent
  std::size_t n_classes = 0;
  std::string source;      // file paths or generator descriptor
  std::uint64_t seed = 0;  // provenance for synthetic data

  std::size_t n() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  bool has_gold() const { return !gold.empty(); }
};

// CSV ingestion. features: d numeric columns per row; votes: K integer
// columns with -1 = abstain; gold: one integer per line. Header rows are
// auto-detected, line endings tolerated, parsing locale-independent.
// Errors carry the offending line number.
WeakDataset load_dataset(const std::string& features_path, const std::string& votes_path,
                         const std::string& gold_path, std::size_t n_classes);

void save_dataset_csv(const WeakDataset& ds, const std::string& features_path,
                      const std::string& votes_path, const std::string& gold_path);

struct LfSpec {
  double accuracy = 0.7;    // P(vote == gold | voted)
  double propensity = 0.6;  // P(votes)
};

struct MixtureParams {
  double spread = 4.0;  // component means sit on a circle of this radius
  double stddev = 1.0;
};

// C Gaussian components in R^d; per LF and sample: vote with probability
// propensity; when voting, emit the gold class with probability accuracy,
// else a uniformly random wrong class. Bitwise reproducible given seed.
WeakDataset synth_dataset(std::size_t n_classes, std::size_t n, std::size_t dim,
                          const std::vector<LfSpec>& lfs, MixtureParams mixture,
                          std::uint64_t seed);

// empirical per-LF vote statistics (accuracy over non-abstained votes,
// coverage over all samples); needs gold labels
struct LfStats {
  double accuracy = 0.0;
  double coverage = 0.0;
};
std::vector<LfStats> lf_statistics(const WeakDataset& ds);

}  // namespace wsfuse
