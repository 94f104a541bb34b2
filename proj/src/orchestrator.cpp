#include "wsfuse/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace wsfuse {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// shuffled pass over a fixed pool, reshuffling on every wrap
class CyclingSampler {
 public:
  CyclingSampler(std::vector<std::size_t> pool, Rng& rng) : pool_(std::move(pool)) {
    rng.shuffle(pool_);
  }
  std::vector<std::size_t> next(std::size_t count, Rng& rng) {
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (pos_ == pool_.size()) {
        rng.shuffle(pool_);
        pos_ = 0;
      }
      out.push_back(pool_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<std::size_t> pool_;
  std::size_t pos_ = 0;
};

Tensor2 onehot_rows(std::span<const int> labels, std::size_t n_classes) {
  Tensor2 out(labels.size(), n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) out(i, std::size_t(labels[i])) = 1.0;
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (lr_g_adv <= 0 || lr_d <= 0 || lr_lm <= 0 || lr_cls <= 0 || lr_g_guid <= 0)
    throw ConfigError("TrainConfig: all learning rates must be > 0");
  if (eta <= 0.0 || eta >= 1.0) throw ConfigError("TrainConfig: eta must lie in (0,1)");
  if (gamma < 2.0) throw ConfigError("TrainConfig: gamma must be >= 2");
  if (delta <= 0.0) throw ConfigError("TrainConfig: delta must be > 0");
  if (alpha < 0.0 || beta < 0.0) throw ConfigError("TrainConfig: alpha and beta must be >= 0");
  if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be >= 1");
  if (refresh_period == 0) throw ConfigError("TrainConfig: refresh_period must be >= 1");
  if (d_z == 0) throw ConfigError("TrainConfig: d_z must be >= 1");
  if (trunk_hidden.empty()) throw ConfigError("TrainConfig: trunk needs at least one layer");
}

TrainState init_state(const TrainConfig& config, const WeakDataset& dataset) {
  config.validate();
  if (dataset.n_classes < 2) throw ConfigError("init_state: need at least 2 classes");
  if (dataset.votes.non_abstained().empty())
    throw ConfigError("init_state: no non-abstained samples (|D_t| = 0)");

  TrainState st;
  st.config = config;
  st.rng = Rng(config.seed);
  const std::size_t trunk_dim = config.trunk_hidden.back();
  // construction order is part of the determinism contract
  st.generator =
      make_generator(config.d_z, dataset.n_classes, config.gen_hidden, dataset.dim(), st.rng);
  st.trunk = make_trunk(dataset.dim(), config.trunk_hidden, st.rng);
  st.d_head = make_discriminator_head(trunk_dim, st.rng);
  st.cls_head = make_classifier_head(trunk_dim, dataset.n_classes, st.rng);
  st.label_model = make_label_model(trunk_dim, dataset.votes.n_lfs(), dataset.n_classes,
                                    config.acc_hidden, st.rng);

  st.opt_g_adv.lr = config.lr_g_adv;
  st.opt_g_adv.init(st.generator.net.param_count());
  st.opt_d.lr = config.lr_d;
  st.opt_d.init(st.trunk.param_count() + st.d_head.param_count());
  st.opt_lm.lr = config.lr_lm;
  st.opt_lm.init(st.label_model.accuracy_net.param_count() +
                 st.label_model.alignment_head.param_count());
  st.opt_cls.lr = config.lr_cls;
  st.opt_cls.init(st.trunk.param_count() + st.cls_head.param_count());
  st.opt_g_guid.lr = config.lr_g_guid;
  st.opt_g_guid.init(st.generator.net.param_count());
  return st;
}

namespace {

// per-epoch gold diagnostics; never feeds training
void fill_gold_metrics(EpochRecord& rec, const TrainState& state, const WeakDataset& dataset) {
  rec.lm_accuracy = kNan;
  rec.lm_macro_f1 = kNan;
  rec.cls_accuracy = kNan;
  rec.cls_ari = kNan;
  if (!dataset.has_gold()) return;

  const auto& dt = dataset.votes.non_abstained();
  const Tensor2 dt_feats = select_rows(dataset.features, dt);
  const Tensor2 trunk_feats = state.trunk.forward(dt_feats);
  const Tensor2 posteriors =
      posterior_batch(state.label_model, trunk_feats, dataset.votes, dt);
  std::vector<int> lm_pred(dt.size()), lm_gold(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) {
    lm_pred[i] = int(pseudo_label(posteriors.row(i)));
    lm_gold[i] = dataset.gold[dt[i]];
  }
  const auto lm_rep = classification_report(lm_pred, lm_gold, dataset.n_classes);
  rec.lm_accuracy = lm_rep.accuracy;
  rec.lm_macro_f1 = lm_rep.macro_f1;

  const std::vector<int> cls_pred =
      predict_classes(state.trunk, state.cls_head, dataset.features);
  const auto cls_rep = classification_report(cls_pred, dataset.gold, dataset.n_classes);
  rec.cls_accuracy = cls_rep.accuracy;
  rec.cls_ari = dataset.n() >= 2 ? ari(cls_pred, dataset.gold) : kNan;
}

double epoch_frechet(const TrainState& state, const WeakDataset& dataset, std::size_t epoch) {
  const std::size_t count = std::max<std::size_t>(state.config.frechet_samples, 2);
  // derived stream: depends only on (seed, epoch), so resume replays it
  Rng local(state.config.seed ^ (0x9e3779b97f4a7c15ULL + epoch * 0x100000001b3ULL));
  const LatentBatch latent = sample_latent(state.generator, count, local);
  const Tensor2 fake = generate(state.generator, latent);
  return frechet2d(dataset.features, fake);
}

struct RefreshOutcome {
  TrainingSubset subset;
  double utility = 0.0;
  double total_cost = 0.0;
  double budget = 0.0;
};

RefreshOutcome build_subset(const TrainState& state, const WeakDataset& dataset,
                            const SimilarityKernel& kernel, std::size_t epoch) {
  const auto& dt = dataset.votes.non_abstained();
  const Tensor2 dt_feats = select_rows(dataset.features, dt);
  const Tensor2 trunk_feats = state.trunk.forward(dt_feats);
  const Tensor2 posteriors = posterior_batch(state.label_model, trunk_feats, dataset.votes, dt);
  const CostVector costs = normalized_costs(posteriors);
  SelectionResult sel = select_subset(kernel, costs, state.config.eta, state.config.gamma,
                                      {state.config.uniform_unit_budget});

  RefreshOutcome out;
  out.utility = sel.utility;
  out.total_cost = sel.total_cost;
  out.budget = sel.budget;
  out.subset.created_epoch = epoch;
  out.subset.indices.reserve(sel.indices.size());
  std::vector<int> labels(sel.indices.size());
  for (std::size_t i = 0; i < sel.indices.size(); ++i) {
    out.subset.indices.push_back(dt[sel.indices[i]]);
    labels[i] = int(pseudo_label(posteriors.row(sel.indices[i])));
  }
  out.subset.onehot = onehot_rows(labels, dataset.n_classes);
  return out;
}

}  // namespace

std::vector<EpochRecord> run_epochs(TrainState& state, const WeakDataset& dataset,
                                    std::size_t until_epoch) {
  state.config.validate();
  if (dataset.n_classes < 2) throw ConfigError("run_epochs: need at least 2 classes");
  const auto& dt = dataset.votes.non_abstained();
  if (dt.empty()) throw ConfigError("run_epochs: no non-abstained samples (|D_t| = 0)");

  const SimilarityKernel kernel = cosine_kernel(select_rows(dataset.features, dt));

  std::vector<EpochRecord> records;

  for (std::size_t epoch = state.epoch; epoch < until_epoch; ++epoch) {
    try {
      state.subset = refresh_subset(epoch, state.config.refresh_period, state.subset, [&] {
        RefreshOutcome out = build_subset(state, dataset, kernel, epoch);
        state.subset_utility = out.utility;
        state.subset_cost = out.total_cost;
        state.subset_budget = out.budget;
        return out.subset;
      });

      const std::size_t n = dataset.n();
      const std::size_t batch = state.config.batch_size;
      const std::size_t n_batches = (n + batch - 1) / batch;

      std::vector<std::size_t> gan_order(n);
      for (std::size_t i = 0; i < n; ++i) gan_order[i] = i;
      state.rng.shuffle(gan_order);
      CyclingSampler lm_sampler(dt, state.rng);
      const bool have_subset = !state.subset->indices.empty();
      std::vector<std::size_t> subset_rows_pool(state.subset->indices.size());
      for (std::size_t i = 0; i < subset_rows_pool.size(); ++i) subset_rows_pool[i] = i;
      CyclingSampler cls_sampler(std::move(subset_rows_pool), state.rng);

      EpochRecord rec;
      rec.epoch = epoch;
      rec.subset_size = state.subset->indices.size();
      rec.subset_utility = state.subset_utility;
      rec.subset_cost = state.subset_cost;
      rec.subset_budget = state.subset_budget;

      for (std::size_t b = 0; b < n_batches; ++b) {
        try {
          const std::size_t begin = b * batch;
          const std::size_t count = std::min(batch, n - begin);
          std::vector<std::size_t> gan_batch(gan_order.begin() + begin,
                                             gan_order.begin() + begin + count);
          const Tensor2 real = select_rows(dataset.features, gan_batch);

          // Update order per batch: generator (adversarial then guidance),
          // discriminator, label model, classifier.
          const GanLossValues gl = gan_train_step(state.generator, state.trunk, state.d_head,
                                                  state.cls_head, state.opt_g_adv,
                                                  state.opt_g_guid, state.opt_d, real, state.rng);
          rec.mean_g_adv += gl.g_adv;
          rec.mean_g_guid += gl.g_guidance;
          rec.mean_d_loss += gl.d_loss;

          const auto lm_batch = lm_sampler.next(std::min(batch, dt.size()), state.rng);
          const Tensor2 lm_feats = select_rows(dataset.features, lm_batch);
          const Tensor2 lm_trunk_feats = state.trunk.forward(lm_feats);  // constants for l_lm
          const Tensor2 lm_cls_probs = state.cls_head.forward(lm_trunk_feats);
          const LmLossParts lp =
              lm_train_step(state.label_model, state.opt_lm, lm_trunk_feats, dataset.votes,
                            lm_batch, lm_cls_probs, epoch, state.config.delta);
          rec.mean_lm += lp.total;

          if (have_subset) {
            const std::size_t cls_count = std::min(batch, state.subset->indices.size());
            const auto rows = cls_sampler.next(cls_count, state.rng);  // subset row positions
            std::vector<std::size_t> ds_idx(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
              ds_idx[i] = state.subset->indices[rows[i]];
            const Tensor2 cls_x = select_rows(dataset.features, ds_idx);
            const Tensor2 cls_y = select_rows(state.subset->onehot, rows);
            rec.mean_sce += classifier_train_step(state.trunk, state.cls_head, state.opt_cls,
                                                  cls_x, cls_y, state.config.alpha,
                                                  state.config.beta);
          }
        } catch (const Error& e) {
          throw Error("batch " + std::to_string(b) + ": " + e.what());
        }
      }

      rec.mean_g_adv /= double(n_batches);
      rec.mean_g_guid /= double(n_batches);
      rec.mean_d_loss /= double(n_batches);
      rec.mean_lm /= double(n_batches);
      rec.mean_sce = have_subset ? rec.mean_sce / double(n_batches) : kNan;

      fill_gold_metrics(rec, state, dataset);
      rec.frechet = state.config.track_frechet ? epoch_frechet(state, dataset, epoch) : kNan;

      records.push_back(rec);
      state.epoch = epoch + 1;
    } catch (const Error& e) {
      throw Error("epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  return records;
}

TrainResult train(const TrainConfig& config, const WeakDataset& dataset) {
  TrainResult result{init_state(config, dataset), {}};
  result.history = run_epochs(result.state, dataset, config.epochs);
  return result;
}

MetricReport evaluate(const TrainState& state, const WeakDataset& dataset,
                      std::size_t frechet_samples) {
  MetricReport rep;
  rep.n = dataset.n();
  rep.has_gold = dataset.has_gold();
  const auto& dt = dataset.votes.non_abstained();
  rep.n_non_abstained = dt.size();

  if (!dt.empty()) {
    const Tensor2 dt_feats = select_rows(dataset.features, dt);
    const Tensor2 trunk_feats = state.trunk.forward(dt_feats);
    const Tensor2 posteriors = posterior_batch(state.label_model, trunk_feats, dataset.votes, dt);
    for (std::size_t i = 0; i < dt.size(); ++i)
      rep.mean_posterior_entropy += entropy(posteriors.row(i));
    rep.mean_posterior_entropy /= double(dt.size());

    if (rep.has_gold) {
      std::vector<int> lm_pred(dt.size()), mv_pred(dt.size()), dt_gold(dt.size());
      for (std::size_t i = 0; i < dt.size(); ++i) {
        lm_pred[i] = int(pseudo_label(posteriors.row(i)));
        mv_pred[i] = int(majority_vote(dataset.votes.row(dt[i]), dataset.n_classes));
        dt_gold[i] = dataset.gold[dt[i]];
      }
      rep.label_model = classification_report(lm_pred, dt_gold, dataset.n_classes);
      rep.majority_vote_accuracy =
          classification_report(mv_pred, dt_gold, dataset.n_classes).accuracy;
    }
  }

  if (rep.has_gold) {
    const std::vector<int> cls_pred =
        predict_classes(state.trunk, state.cls_head, dataset.features);
    rep.classifier = classification_report(cls_pred, dataset.gold, dataset.n_classes);
    rep.classifier_ari = dataset.n() >= 2 ? ari(cls_pred, dataset.gold) : 0.0;
  }

  if (frechet_samples >= 2) {
    Rng local(state.config.seed ^ 0xf00dULL);
    const LatentBatch latent = sample_latent(state.generator, frechet_samples, local);
    rep.frechet = frechet2d(dataset.features, generate(state.generator, latent));
  }
  return rep;
}

void write_history_csv(const std::vector<EpochRecord>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "epoch,subset_size,subset_utility,subset_cost,subset_budget,mean_sce,mean_lm,"
         "mean_d_loss,mean_g_adv,mean_g_guid,lm_accuracy,lm_macro_f1,cls_accuracy,cls_ari,"
         "frechet2d\n";
  auto cell = [&](double v) {
    if (std::isnan(v)) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : history) {
    out << r.epoch << "," << r.subset_size << "," << cell(r.subset_utility) << ","
        << cell(r.subset_cost) << "," << cell(r.subset_budget) << "," << cell(r.mean_sce) << ","
        << cell(r.mean_lm) << "," << cell(r.mean_d_loss) << "," << cell(r.mean_g_adv) << ","
        << cell(r.mean_g_guid) << "," << cell(r.lm_accuracy) << "," << cell(r.lm_macro_f1) << ","
        << cell(r.cls_accuracy) << "," << cell(r.cls_ari) << "," << cell(r.frechet) << "\n";
  }
}

LabelingResult label_non_abstained(const TrainState& state, const WeakDataset& dataset) {
  LabelingResult out;
  out.indices = dataset.votes.non_abstained();
  const Tensor2 dt_feats = select_rows(dataset.features, out.indices);
  const Tensor2 trunk_feats = state.trunk.forward(dt_feats);
  out.posteriors = posterior_batch(state.label_model, trunk_feats, dataset.votes, out.indices);
  out.labels.resize(out.indices.size());
  for (std::size_t i = 0; i < out.indices.size(); ++i)
    out.labels[i] = int(pseudo_label(out.posteriors.row(i)));
  return out;
}

}  // namespace wsfuse
