// wsfuse — weak-supervision label modeling, entropy-budgeted subset
// selection, and classifier-guided conditional generation over feature data.
//
// One subcommand per pipeline stage: synth, select, train, label, eval, gen.
// Exit codes: 0 success, 1 runtime/domain failure, 2 usage.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "wsfuse/checkpoint.hpp"
#include "wsfuse/data_io.hpp"
#include "wsfuse/orchestrator.hpp"
#include "wsfuse/subset_select.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct DatasetArgs {
  std::string features, votes, gold;
  std::size_t classes = 0;
};

void add_dataset_flags(CLI::App* cmd, DatasetArgs& args) {
  cmd->add_option("--features", args.features, "features CSV (one row per sample)")->required();
  cmd->add_option("--votes", args.votes, "votes CSV (-1 = abstain)")->required();
  cmd->add_option("--gold", args.gold, "gold labels CSV (evaluation only)");
  cmd->add_option("--classes", args.classes, "number of classes")->required();
}

std::string variant_name(wsfuse::SelectionVariant v) {
  switch (v) {
    case wsfuse::SelectionVariant::uniform: return "uniform";
    case wsfuse::SelectionVariant::cost: return "cost";
    case wsfuse::SelectionVariant::best: return "best";
  }
  return "?";
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw wsfuse::ParseError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak-supervision toolkit: label model + subset selection + conditional GAN"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; flags override file values");
  app.allow_config_extras(false);

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic weak-supervision benchmark");
  struct {
    std::size_t classes = 4, n = 1000, dim = 2, lfs = 8;
    std::vector<double> acc{0.7}, prop{0.6};
    double spread = 4.0, stddev = 1.0;
    std::uint64_t seed = 1;
    std::string out;
  } synth;
  synth_cmd->add_option("--classes", synth.classes, "number of classes");
  synth_cmd->add_option("--n", synth.n, "number of samples");
  synth_cmd->add_option("--dim", synth.dim, "feature dimension");
  synth_cmd->add_option("--lfs", synth.lfs, "number of label functions");
  synth_cmd->add_option("--acc", synth.acc, "LF accuracy (one value, or one per LF)");
  synth_cmd->add_option("--prop", synth.prop, "LF propensity (one value, or one per LF)");
  synth_cmd->add_option("--spread", synth.spread, "mixture mean radius");
  synth_cmd->add_option("--stddev", synth.stddev, "mixture component stddev");
  synth_cmd->add_option("--seed", synth.seed, "rng seed");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();

  // ---- select ----
  auto* select_cmd = app.add_subcommand("select", "entropy-budgeted submodular subset selection");
  DatasetArgs select_data;
  add_dataset_flags(select_cmd, select_data);
  struct {
    double eta = 0.8, gamma = 3.0;
    std::string checkpoint, ratio_mode = "best", uniform_budget = "entropy", out;
    std::uint64_t seed = 1;
    bool oracle = false;
  } select;
  select_cmd->add_option("--eta", select.eta, "budget fraction of total entropy, in (0,1)");
  select_cmd->add_option("--gamma", select.gamma, "graph-cut trade-off, >= 2");
  select_cmd->add_option("--checkpoint", select.checkpoint,
                         "trained model for posteriors (fresh init when omitted)");
  select_cmd->add_option("--ratio-mode", select.ratio_mode, "best | per_cost | uniform")
      ->check(CLI::IsMember({"best", "per_cost", "uniform"}));
  select_cmd->add_option("--uniform-budget", select.uniform_budget,
                         "uniform-run feasibility: entropy costs or unit (cardinality)")
      ->check(CLI::IsMember({"entropy", "unit"}));
  select_cmd->add_flag("--oracle", select.oracle,
                       "also report the brute-force optimum (|D_t| <= 20)");
  select_cmd->add_option("--seed", select.seed, "rng seed for the fresh label model");
  select_cmd->add_option("--out", select.out, "output JSON record")->required();

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "run the full co-training loop");
  DatasetArgs train_data;
  add_dataset_flags(train_cmd, train_data);
  wsfuse::TrainConfig cfg;
  std::string train_out, train_history, train_resume, train_uniform_budget = "entropy";
  train_cmd->add_option("--epochs", cfg.epochs, "training epochs");
  train_cmd->add_option("--refresh-period", cfg.refresh_period, "subset refresh period p");
  train_cmd->add_option("--eta", cfg.eta, "entropy budget fraction");
  train_cmd->add_option("--gamma", cfg.gamma, "graph-cut trade-off");
  train_cmd->add_option("--delta", cfg.delta, "decay schedule rate");
  train_cmd->add_option("--alpha", cfg.alpha, "CE weight");
  train_cmd->add_option("--beta", cfg.beta, "reverse-CE weight");
  train_cmd->add_option("--lr-g-adv", cfg.lr_g_adv, "generator adversarial lr");
  train_cmd->add_option("--lr-d", cfg.lr_d, "discriminator lr");
  train_cmd->add_option("--lr-lm", cfg.lr_lm, "label-model lr");
  train_cmd->add_option("--lr-cls", cfg.lr_cls, "classifier lr");
  train_cmd->add_option("--lr-g-guid", cfg.lr_g_guid, "generator guidance lr");
  train_cmd->add_option("--batch-size", cfg.batch_size, "batch size");
  train_cmd->add_option("--dz", cfg.d_z, "latent dimension");
  train_cmd->add_option("--seed", cfg.seed, "rng seed");
  train_cmd->add_option("--trunk-hidden", cfg.trunk_hidden, "trunk layer widths");
  train_cmd->add_option("--gen-hidden", cfg.gen_hidden, "generator hidden widths");
  train_cmd->add_option("--acc-hidden", cfg.acc_hidden, "accuracy-net hidden widths");
  train_cmd->add_option("--uniform-budget", train_uniform_budget,
                        "uniform-run feasibility: entropy or unit")
      ->check(CLI::IsMember({"entropy", "unit"}));
  train_cmd->add_flag("--track-frechet", cfg.track_frechet, "record frechet2d per epoch");
  train_cmd->add_option("--frechet-samples", cfg.frechet_samples, "samples for frechet2d");
  train_cmd->add_option("--out", train_out, "checkpoint output path")->required();
  train_cmd->add_option("--history", train_history, "per-epoch history CSV");
  train_cmd->add_option("--resume", train_resume, "resume from checkpoint (then --epochs is the total)");

  // ---- label ----
  auto* label_cmd = app.add_subcommand("label", "pseudo labels over the non-abstained set");
  DatasetArgs label_data;
  add_dataset_flags(label_cmd, label_data);
  struct {
    std::string checkpoint, out;
    std::uint64_t seed = 1;
  } label;
  label_cmd->add_option("--checkpoint", label.checkpoint, "trained model (fresh init when omitted)");
  label_cmd->add_option("--seed", label.seed, "rng seed for the fresh label model");
  label_cmd->add_option("--out", label.out, "output CSV")->required();

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "metric report from a checkpoint");
  DatasetArgs eval_data;
  add_dataset_flags(eval_cmd, eval_data);
  struct {
    std::string checkpoint, out;
    std::size_t frechet_samples = 0;
  } eval_args;
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "trained model")->required();
  eval_cmd->add_option("--frechet-samples", eval_args.frechet_samples,
                       "generated samples for frechet2d (0 disables)");
  eval_cmd->add_option("--out", eval_args.out, "report JSON path");

  // ---- gen ----
  auto* gen_cmd = app.add_subcommand("gen", "sample the conditional generator");
  struct {
    std::string checkpoint, out;
    std::size_t cls = 0, n = 100;
    std::uint64_t seed = 1;
  } gen_args;
  gen_cmd->add_option("--checkpoint", gen_args.checkpoint, "trained model")->required();
  gen_cmd->add_option("--class", gen_args.cls, "conditioning class")->required();
  gen_cmd->add_option("--n", gen_args.n, "number of samples");
  gen_cmd->add_option("--seed", gen_args.seed, "rng seed");
  gen_cmd->add_option("--out", gen_args.out, "output CSV (class, features...)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth_cmd) {
      auto broadcast = [&](std::vector<double> v, const char* what) {
        if (v.size() == 1) v.assign(synth.lfs, v[0]);
        if (v.size() != synth.lfs)
          throw wsfuse::ConfigError(std::string(what) + ": expected 1 or " +
                                    std::to_string(synth.lfs) + " values");
        return v;
      };
      const auto accs = broadcast(synth.acc, "--acc");
      const auto props = broadcast(synth.prop, "--prop");
      std::vector<wsfuse::LfSpec> lfs(synth.lfs);
      for (std::size_t k = 0; k < synth.lfs; ++k) lfs[k] = {accs[k], props[k]};

      wsfuse::WeakDataset ds = wsfuse::synth_dataset(
          synth.classes, synth.n, synth.dim, lfs, {synth.spread, synth.stddev}, synth.seed);
      fs::create_directories(synth.out);
      const auto base = fs::path(synth.out);
      wsfuse::save_dataset_csv(ds, (base / "features.csv").string(),
                               (base / "votes.csv").string(), (base / "gold.csv").string());
      const auto stats = wsfuse::lf_statistics(ds);
      std::cout << "wrote " << ds.n() << " samples, " << ds.votes.n_lfs() << " LFs, |D_t| = "
                << ds.votes.non_abstained().size() << "\n";
      for (std::size_t k = 0; k < stats.size(); ++k)
        std::cout << "lf" << k << ": empirical accuracy " << stats[k].accuracy << ", coverage "
                  << stats[k].coverage << "\n";
    } else if (*select_cmd) {
      wsfuse::WeakDataset ds = wsfuse::load_dataset(select_data.features, select_data.votes,
                                                    select_data.gold, select_data.classes);
      const auto& dt = ds.votes.non_abstained();
      if (dt.empty()) throw wsfuse::ConfigError("no non-abstained samples (|D_t| = 0)");

      wsfuse::TrainState state;
      if (!select.checkpoint.empty()) {
        state = wsfuse::load_checkpoint(select.checkpoint);
      } else {
        wsfuse::TrainConfig fresh;
        fresh.seed = select.seed;
        fresh.eta = select.eta;
        fresh.gamma = select.gamma;
        state = wsfuse::init_state(fresh, ds);
      }

      const wsfuse::Tensor2 dt_feats = wsfuse::select_rows(ds.features, dt);
      const wsfuse::SimilarityKernel kernel = wsfuse::cosine_kernel(dt_feats);
      const wsfuse::Tensor2 trunk_feats = state.trunk.forward(dt_feats);
      const wsfuse::Tensor2 posteriors =
          wsfuse::posterior_batch(state.label_model, trunk_feats, ds.votes, dt);
      const wsfuse::CostVector costs = wsfuse::normalized_costs(posteriors);
      const bool unit_budget = select.uniform_budget == "unit";

      wsfuse::SelectionResult result;
      if (select.ratio_mode == "best") {
        result = wsfuse::select_subset(kernel, costs, select.eta, select.gamma, {unit_budget});
      } else {
        const double budget = select.eta * costs.total;
        const wsfuse::RatioMode mode = select.ratio_mode == "uniform"
                                           ? wsfuse::RatioMode::uniform
                                           : wsfuse::RatioMode::per_cost;
        result = wsfuse::ceg(kernel, costs, budget, select.gamma,
                             {mode, mode == wsfuse::RatioMode::uniform && unit_budget});
      }

      json record;
      json indices = json::array();
      for (std::size_t pos : result.indices) indices.push_back(dt[pos]);
      record["indices"] = indices;
      record["utility"] = result.utility;
      record["total_cost"] = result.total_cost;
      record["budget"] = result.budget;
      record["variant"] = variant_name(result.variant);
      record["gamma"] = select.gamma;
      record["eta"] = select.eta;
      record["seed"] = select.seed;
      record["n_non_abstained"] = dt.size();

      if (select.oracle) {
        auto [opt_set, opt_utility] =
            wsfuse::brute_force_opt(kernel, costs, select.eta * costs.total, select.gamma);
        (void)opt_set;
        record["oracle_utility"] = opt_utility;
        record["achieved_ratio"] = opt_utility > 0 ? result.utility / opt_utility : 1.0;
        std::cout << "OPT = " << opt_utility << ", achieved ratio = "
                  << (opt_utility > 0 ? result.utility / opt_utility : 1.0) << "\n";
      }
      write_json(record, select.out);
      std::cout << "selected " << result.indices.size() << "/" << dt.size() << " samples, utility "
                << result.utility << ", cost " << result.total_cost << " <= budget "
                << result.budget << "\n";
    } else if (*train_cmd) {
      cfg.uniform_unit_budget = train_uniform_budget == "unit";
      wsfuse::WeakDataset ds = wsfuse::load_dataset(train_data.features, train_data.votes,
                                                    train_data.gold, train_data.classes);
      wsfuse::TrainState state;
      std::vector<wsfuse::EpochRecord> history;
      if (!train_resume.empty()) {
        state = wsfuse::load_checkpoint(train_resume);
        history = wsfuse::run_epochs(state, ds, cfg.epochs);
      } else {
        state = wsfuse::init_state(cfg, ds);
        history = wsfuse::run_epochs(state, ds, cfg.epochs);
      }
      wsfuse::save_checkpoint(state, train_out);
      if (!train_history.empty()) wsfuse::write_history_csv(history, train_history);
      if (!history.empty()) {
        const auto& last = history.back();
        std::cout << "trained to epoch " << state.epoch << "; subset " << last.subset_size
                  << ", mean sce " << last.mean_sce << ", mean lm " << last.mean_lm;
        if (!std::isnan(last.lm_accuracy))
          std::cout << ", lm accuracy " << last.lm_accuracy;
        std::cout << "\n";
      } else {
        std::cout << "no epochs run (already at target)\n";
      }
    } else if (*label_cmd) {
      wsfuse::WeakDataset ds = wsfuse::load_dataset(label_data.features, label_data.votes,
                                                    label_data.gold, label_data.classes);
      if (ds.votes.non_abstained().empty())
        throw wsfuse::ConfigError("no non-abstained samples (|D_t| = 0)");
      wsfuse::TrainState state;
      if (!label.checkpoint.empty()) {
        state = wsfuse::load_checkpoint(label.checkpoint);
      } else {
        wsfuse::TrainConfig fresh;
        fresh.seed = label.seed;
        state = wsfuse::init_state(fresh, ds);
      }
      const wsfuse::LabelingResult result = wsfuse::label_non_abstained(state, ds);
      std::ofstream out(label.out);
      if (!out) throw wsfuse::ParseError("cannot write " + label.out);
      out << "index,pseudo";
      for (std::size_t c = 0; c < ds.n_classes; ++c) out << ",p" << c;
      out << "\n";
      char buf[40];
      for (std::size_t i = 0; i < result.indices.size(); ++i) {
        out << result.indices[i] << "," << result.labels[i];
        for (std::size_t c = 0; c < ds.n_classes; ++c) {
          std::snprintf(buf, sizeof(buf), "%.17g", result.posteriors(i, c));
          out << "," << buf;
        }
        out << "\n";
      }
      std::cout << "labeled " << result.indices.size() << " samples\n";
    } else if (*eval_cmd) {
      wsfuse::WeakDataset ds = wsfuse::load_dataset(eval_data.features, eval_data.votes,
                                                    eval_data.gold, eval_data.classes);
      wsfuse::TrainState state = wsfuse::load_checkpoint(eval_args.checkpoint);
      wsfuse::MetricReport rep = wsfuse::evaluate(state, ds, eval_args.frechet_samples);

      json j;
      j["n"] = rep.n;
      j["n_non_abstained"] = rep.n_non_abstained;
      j["mean_posterior_entropy"] = rep.mean_posterior_entropy;
      j["has_gold"] = rep.has_gold;
      if (rep.has_gold) {
        auto report_json = [](const wsfuse::ClassificationReport& r) {
          json out;
          out["accuracy"] = r.accuracy;
          out["macro_precision"] = r.macro_precision;
          out["macro_recall"] = r.macro_recall;
          out["macro_f1"] = r.macro_f1;
          out["per_class_precision"] = r.precision;
          out["per_class_recall"] = r.recall;
          out["per_class_f1"] = r.f1;
          out["support"] = r.support;
          return out;
        };
        j["label_model"] = report_json(rep.label_model);
        j["majority_vote_accuracy"] = rep.majority_vote_accuracy;
        j["classifier"] = report_json(rep.classifier);
        j["classifier_ari"] = rep.classifier_ari;
      }
      if (rep.frechet) j["frechet2d"] = *rep.frechet;
      if (!eval_args.out.empty()) write_json(j, eval_args.out);

      std::cout << "n = " << rep.n << ", |D_t| = " << rep.n_non_abstained
                << ", mean posterior entropy = " << rep.mean_posterior_entropy << "\n";
      if (rep.has_gold) {
        std::cout << "label model: accuracy " << rep.label_model.accuracy << ", macro-F1 "
                  << rep.label_model.macro_f1 << " (majority vote " << rep.majority_vote_accuracy
                  << ")\n";
        std::cout << "classifier: accuracy " << rep.classifier.accuracy << ", ARI "
                  << rep.classifier_ari << "\n";
      } else {
        std::cout << "no gold labels: supervised metrics omitted\n";
      }
      if (rep.frechet) std::cout << "frechet2d = " << *rep.frechet << "\n";
    } else if (*gen_cmd) {
      wsfuse::TrainState state = wsfuse::load_checkpoint(gen_args.checkpoint);
      wsfuse::Rng rng(gen_args.seed);
      const wsfuse::Tensor2 samples =
          wsfuse::sample(state.generator, gen_args.cls, gen_args.n, rng);
      std::ofstream out(gen_args.out);
      if (!out) throw wsfuse::ParseError("cannot write " + gen_args.out);
      out << "class";
      for (std::size_t j = 0; j < samples.cols(); ++j) out << ",f" << j;
      out << "\n";
      char buf[40];
      for (std::size_t i = 0; i < samples.rows(); ++i) {
        out << gen_args.cls;
        for (std::size_t j = 0; j < samples.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g", samples(i, j));
          out << "," << buf;
        }
        out << "\n";
      }
      std::cout << "wrote " << samples.rows() << " samples of class " << gen_args.cls << "\n";
    }
  } catch (const wsfuse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
