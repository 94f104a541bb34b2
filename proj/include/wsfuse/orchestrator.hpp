#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsfuse/classifier.hpp"
#include "wsfuse/data_io.hpp"
#include "wsfuse/gan.hpp"
#include "wsfuse/label_model.hpp"
#include "wsfuse/metrics.hpp"
#include "wsfuse/subset_select.hpp"

namespace wsfuse {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t refresh_period = 1;  // rebuild the training subset every p epochs
  double eta = 0.8;                // entropy budget fraction
  double gamma = 3.0;              // representativeness/diversity trade-off
  double delta = 1.0;              // decay schedule rate
  double alpha = 0.7;              // CE weight in the symmetric loss
  double beta = 0.3;               // reverse-CE weight

  // the five optimizers, in their canonical order
  double lr_g_adv = 1e-4;
  double lr_d = 4e-4;
  double lr_lm = 8e-5;
  double lr_cls = 1.8e-4;
  double lr_g_guid = 1e-5;

  std::size_t batch_size = 64;
  std::size_t d_z = 8;
  std::uint64_t seed = 1;

  // network shapes (trunk's last entry is the shared feature dimension)
  std::vector<std::size_t> trunk_hidden = {64, 32};
  std::vector<std::size_t> gen_hidden = {32, 32};
  std::vector<std::size_t> acc_hidden = {256, 128, 64};

  bool uniform_unit_budget = false;  // cardinality reading of the uniform CEG run
  bool track_frechet = false;        // per-epoch frechet2d(real, generated)
  std::size_t frechet_samples = 512;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t subset_size = 0;
  double subset_utility = 0.0;
  double subset_cost = 0.0;
  double subset_budget = 0.0;
  double mean_sce = 0.0;
  double mean_lm = 0.0;
  double mean_d_loss = 0.0;
  double mean_g_adv = 0.0;
  double mean_g_guid = 0.0;
  // gold-derived diagnostics; NaN when gold labels are absent
  double lm_accuracy = 0.0;
  double lm_macro_f1 = 0.0;
  double cls_accuracy = 0.0;
  double cls_ari = 0.0;
  // NaN unless track_frechet
  double frechet = 0.0;
};

// Everything a resumed run needs: parameters, optimizer moments, epoch
// counter, RNG state, and the frozen training subset.
struct TrainState {
  TrainConfig config;
  Generator generator;
  Mlp trunk;     // shared by discriminator head, classifier head, accuracy-net input
  Mlp d_head;    // trunk_dim -> 1 sigmoid
  Mlp cls_head;  // trunk_dim -> C softmax
  LabelModel label_model;
  AdamState opt_g_adv, opt_d, opt_lm, opt_cls, opt_g_guid;
  std::size_t epoch = 0;  // epochs completed
  Rng rng{0};
  std::optional<TrainingSubset> subset;
  // selection stats from the most recent refresh; reported while frozen
  double subset_utility = 0.0;
  double subset_cost = 0.0;
  double subset_budget = 0.0;
};

TrainState init_state(const TrainConfig& config, const WeakDataset& dataset);

// Runs epochs [state.epoch, until_epoch); appends nothing to state history —
// returns the records for the epochs it ran. Fully deterministic given the
// state. Module errors are rethrown with epoch/batch context.
std::vector<EpochRecord> run_epochs(TrainState& state, const WeakDataset& dataset,
                                    std::size_t until_epoch);

struct TrainResult {
  TrainState state;
  std::vector<EpochRecord> history;
};

TrainResult train(const TrainConfig& config, const WeakDataset& dataset);

struct MetricReport {
  bool has_gold = false;
  std::size_t n = 0;
  std::size_t n_non_abstained = 0;
  double mean_posterior_entropy = 0.0;
  // gold-derived (valid only when has_gold)
  ClassificationReport label_model;     // over the non-abstained set
  double majority_vote_accuracy = 0.0;  // same evaluator, constant-accuracy baseline
  ClassificationReport classifier;      // over all samples
  double classifier_ari = 0.0;
  // optional generative-quality score
  std::optional<double> frechet;
};

// Reads gold labels (training never does); frechet_samples = 0 disables the
// generative score.
MetricReport evaluate(const TrainState& state, const WeakDataset& dataset,
                      std::size_t frechet_samples = 0);

void write_history_csv(const std::vector<EpochRecord>& history, const std::string& path);

// pseudo labels + posteriors over the non-abstained set with the current nets
struct LabelingResult {
  std::vector<std::size_t> indices;  // dataset rows (= D_t)
  Tensor2 posteriors;
  std::vector<int> labels;
};
LabelingResult label_non_abstained(const TrainState& state, const WeakDataset& dataset);

}  // namespace wsfuse
