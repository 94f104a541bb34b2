// Acceptance suite: the project's exit criteria, one pass/fail line each.
// Returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wsfuse/checkpoint.hpp"
#include "wsfuse/classifier.hpp"
#include "wsfuse/data_io.hpp"
#include "wsfuse/gan.hpp"
#include "wsfuse/label_model.hpp"
#include "wsfuse/metrics.hpp"
#include "wsfuse/orchestrator.hpp"
#include "wsfuse/subset_select.hpp"

using namespace wsfuse;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SimilarityKernel kernel_from_matrix(Tensor2 sim) {
  SimilarityKernel k;
  k.n = sim.rows();
  k.row_sums.assign(k.n, 0.0);
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t j = 0; j < k.n; ++j) k.row_sums[j] += sim(i, j);
  k.sim = std::move(sim);
  return k;
}

CostVector random_costs(std::size_t n, Rng& rng) {
  CostVector c;
  c.cost.resize(n);
  c.total = 0.0;
  for (auto& v : c.cost) {
    v = rng.uniform() < 0.15 ? 0.0 : 0.05 + 1.95 * rng.uniform();
    c.total += v;
  }
  return c;
}

// ---------------------------------------------------------------------------
// 1. dual-run approximation bound against exhaustive enumeration
Outcome criterion_bound() {
  const auto start = Clock::now();
  Rng rng(1001);
  const double etas[] = {0.3, 0.5, 0.8};
  const double gammas[] = {2.0, 3.0};
  int trials = 0, ok = 0;
  double worst_ratio = 1e9;
  for (int t = 0; t < 240; ++t) {
    const std::size_t n = 4 + rng.uniform_index(9);  // 4..12
    SimilarityKernel kernel = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    if (costs.total <= 0.0) continue;
    const double eta = etas[t % 3];
    const double gamma = gammas[t % 2];
    SelectionResult best = select_subset(kernel, costs, eta, gamma);
    auto [opt_set, opt_utility] = brute_force_opt(kernel, costs, eta * costs.total, gamma);
    (void)opt_set;
    ++trials;
    if (best.utility >= 0.3161 * opt_utility - 1e-9) ++ok;
    if (opt_utility > 0) worst_ratio = std::min(worst_ratio, best.utility / opt_utility);
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << ok << "/" << trials << " trials >= 0.3161*OPT, worst ratio " << worst_ratio << ", "
         << elapsed << " s";
  return {trials >= 200 && ok == trials && elapsed < 60.0, detail.str()};
}

// 2. Monotonicity and diminishing returns of the graph-cut gain
Outcome criterion_submodular() {
  Rng rng(2002);
  int violations = 0;
  int triples = 0;
  while (triples < 10000) {
    const std::size_t n = 4 + rng.uniform_index(12);
    SimilarityKernel kernel = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    const double gamma = 2.0 + 2.0 * rng.uniform();
    for (int inner = 0; inner < 40 && triples < 10000; ++inner) {
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      rng.shuffle(order);
      const std::size_t small = rng.uniform_index(n - 1);
      const std::size_t large = small + rng.uniform_index(n - small - 1);
      std::vector<std::size_t> s(order.begin(), order.begin() + small);
      std::vector<std::size_t> t_set(order.begin(), order.begin() + large);
      const std::size_t v = order[n - 1];
      const double gain_s = marginal_gain(s, v, kernel, gamma);
      const double gain_t = marginal_gain(t_set, v, kernel, gamma);
      if (gain_s < -1e-9) ++violations;               // monotone gain
      if (gain_s < gain_t - 1e-9) ++violations;       // diminishing returns
      ++triples;
    }
  }
  std::ostringstream detail;
  detail << triples << " (S subset of T, v) triples, " << violations << " violations";
  return {violations == 0, detail.str()};
}

// 3. Lazy priority-queue greedy emits the naive scan's exact sequence
Outcome criterion_lazy() {
  Rng rng(3003);
  int instances = 0, matches = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.uniform_index(199);  // up to 200
    SimilarityKernel kernel = kernel_from_matrix(test::random_kernel_matrix(n, rng));
    CostVector costs = random_costs(n, rng);
    if (costs.total <= 0.0) costs = CostVector{std::vector<double>(n, 1.0), double(n)};
    const double gamma = 2.0 + rng.uniform();
    const double budget = std::max((0.2 + 0.6 * rng.uniform()) * costs.total, 1e-6);
    bool same = true;
    for (RatioMode mode : {RatioMode::per_cost, RatioMode::uniform}) {
      const SelectionResult lazy = ceg(kernel, costs, budget, gamma, {mode, false});
      const SelectionResult naive = ceg_naive(kernel, costs, budget, gamma, {mode, false});
      same = same && lazy.indices == naive.indices;
    }
    ++instances;
    if (same) ++matches;
  }
  std::ostringstream detail;
  detail << matches << "/" << instances << " instances identical under both ratio modes";
  return {matches == instances, detail.str()};
}

// 4. Constant-accuracy posterior argmax reduces to majority vote
Outcome criterion_majority() {
  Rng rng(4004);
  int ok = 0;
  const int rows = 1000;
  for (int t = 0; t < rows; ++t) {
    const std::size_t k = 1 + rng.uniform_index(10);
    const std::size_t c = 2 + rng.uniform_index(5);
    std::vector<int> row(k);
    for (auto& v : row)
      v = rng.uniform() < 0.3 ? kAbstain : int(rng.uniform_index(c));
    const double a = 0.05 + 0.9 * rng.uniform();
    std::vector<double> acc(k, a);
    const auto posterior = label_posterior(row, acc, c);
    // independent oracle: straight vote counting with the same tie-break
    std::vector<int> counts(c, 0);
    for (int v : row)
      if (v >= 0) counts[std::size_t(v)]++;
    std::size_t mv = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (counts[j] > counts[mv]) mv = j;
    if (pseudo_label(posterior) == mv) ++ok;
  }
  std::ostringstream detail;
  detail << ok << "/" << rows << " rows match majority vote with identical tie-breaks";
  return {ok == rows, detail.str()};
}

// 5. Central finite differences over every loss, 20 seeds
Outcome criterion_gradients() {
  double worst = 0.0;
  int checks = 0, ok = 0;
  auto record = [&](double err) {
    worst = std::max(worst, err);
    ++checks;
    if (err <= 1e-4) ++ok;
  };

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 7919);
    const std::size_t d = 3, c = 3, k = 3, batch = 4;

    Generator gen = make_generator(2, c, {5}, d, rng);
    Mlp trunk = make_trunk(d, {6}, rng);
    Mlp d_head = make_discriminator_head(6, rng);
    Mlp cls_head = make_classifier_head(6, c, rng);
    LabelModel lm = make_label_model(6, k, c, {5}, rng);
    // evaluate at a generic parameter point: fresh nets have zero biases,
    // which parks relu kinks exactly where near-zero generator outputs land
    // and central differences stop meaning anything there
    for (Mlp* net : {&gen.net, &trunk, &d_head, &cls_head, &lm.accuracy_net,
                     &lm.alignment_head}) {
      auto p = net->params();
      for (auto& v : p) v += 0.05 * rng.normal();
      net->set_params(p);
    }

    const Tensor2 x = test::random_tensor(batch, d, rng);
    Tensor2 onehot(batch, c);
    for (std::size_t i = 0; i < batch; ++i) onehot(i, rng.uniform_index(c)) = 1.0;

    // symmetric cross-entropy through trunk + classifier head
    {
      const std::size_t tn = trunk.param_count();
      std::vector<double> analytic(tn + cls_head.param_count(), 0.0);
      classifier_loss_grads(trunk, cls_head, x, onehot, 0.7, 0.3, analytic);
      auto loss_at = [&](std::span<const double> p) {
        Mlp pt = trunk, ph = cls_head;
        pt.set_params(p.subspan(0, tn));
        ph.set_params(p.subspan(tn));
        return classifier_loss_grads(pt, ph, x, onehot, 0.7, 0.3, {});
      };
      std::vector<double> point = trunk.params();
      auto hp = cls_head.params();
      point.insert(point.end(), hp.begin(), hp.end());
      record(test::rel_grad_err(analytic, test::fd_grad(loss_at, point)));
    }

    // discriminator, adversarial, and guidance losses
    {
      const LatentBatch latent = sample_latent(gen, batch, rng);
      const Tensor2 fake = generate(gen, latent);
      const std::size_t tn = trunk.param_count();
      std::vector<double> analytic(tn + d_head.param_count(), 0.0);
      d_loss_grads(x, fake, trunk, d_head, analytic);
      auto loss_at = [&](std::span<const double> p) {
        Mlp pt = trunk, ph = d_head;
        pt.set_params(p.subspan(0, tn));
        ph.set_params(p.subspan(tn));
        return d_loss_grads(x, fake, pt, ph, {});
      };
      std::vector<double> point = trunk.params();
      auto hp = d_head.params();
      point.insert(point.end(), hp.begin(), hp.end());
      record(test::rel_grad_err(analytic, test::fd_grad(loss_at, point)));

      std::vector<double> g_adv(gen.net.param_count(), 0.0);
      g_adv_loss_grads(gen, latent, trunk, d_head, g_adv);
      auto adv_at = [&](std::span<const double> p) {
        Generator pg = gen;
        pg.net.set_params(p);
        return g_adv_loss_grads(pg, latent, trunk, d_head, {});
      };
      record(test::rel_grad_err(g_adv, test::fd_grad(adv_at, gen.net.params())));

      std::vector<double> g_guid(gen.net.param_count(), 0.0);
      g_guidance_loss_grads(gen, latent, trunk, cls_head, g_guid);
      auto guid_at = [&](std::span<const double> p) {
        Generator pg = gen;
        pg.net.set_params(p);
        return g_guidance_loss_grads(pg, latent, trunk, cls_head, {});
      };
      record(test::rel_grad_err(g_guid, test::fd_grad(guid_at, gen.net.params())));
    }

    // alignment + decay through accuracy net and alignment head
    {
      const Tensor2 feats = test::random_tensor(batch, 6, rng);
      const Tensor2 probs = test::random_probs(batch, c, rng);
      std::vector<int> votes_data;
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = 0; j < k; ++j)
          votes_data.push_back(rng.uniform() < 0.25 ? kAbstain : int(rng.uniform_index(c)));
      VoteMatrix votes(batch, k, votes_data, c);
      std::vector<std::size_t> rows(batch);
      for (std::size_t i = 0; i < batch; ++i) rows[i] = i;

      const std::size_t an = lm.accuracy_net.param_count();
      std::vector<double> analytic(an + lm.alignment_head.param_count(), 0.0);
      lm_loss_grads(lm, feats, votes, rows, probs, 3, 1.0, 1.0, analytic);
      auto loss_at = [&](std::span<const double> p) {
        LabelModel probe = lm;
        probe.accuracy_net.set_params(p.subspan(0, an));
        probe.alignment_head.set_params(p.subspan(an));
        return lm_loss_grads(probe, feats, votes, rows, probs, 3, 1.0, 1.0, {}).total;
      };
      std::vector<double> point = lm.accuracy_net.params();
      auto hp = lm.alignment_head.params();
      point.insert(point.end(), hp.begin(), hp.end());
      record(test::rel_grad_err(analytic, test::fd_grad(loss_at, point)));
    }
  }

  std::ostringstream detail;
  detail << ok << "/" << checks << " gradient checks (sce, gan, alignment+decay), worst rel err "
         << worst;
  return {ok == checks, detail.str()};
}

// shared runs for criteria 6 and 8
struct BenchmarkRuns {
  std::vector<double> lm_acc, mv_acc, ari_first, ari_last;
  double slowest_run_s = 0.0;
};

BenchmarkRuns run_benchmark() {
  BenchmarkRuns out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    WeakDataset ds = synth_dataset(4, 1000, 2,
                                   std::vector<LfSpec>(8, LfSpec{0.7, 0.6}), {}, 100 + seed);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = seed;
    const auto start = Clock::now();
    TrainResult run = train(cfg, ds);
    out.slowest_run_s = std::max(out.slowest_run_s, seconds_since(start));

    MetricReport rep = evaluate(run.state, ds);
    out.lm_acc.push_back(rep.label_model.accuracy);
    out.mv_acc.push_back(rep.majority_vote_accuracy);
    out.ari_first.push_back(run.history.front().cls_ari);
    out.ari_last.push_back(run.history.back().cls_ari);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// 6. Trained label model matches or beats majority vote on D_t
Outcome criterion_label_model(const BenchmarkRuns& runs) {
  std::ostringstream detail;
  detail << "mean lm accuracy " << mean(runs.lm_acc) << " vs majority vote " << mean(runs.mv_acc)
         << " (per seed:";
  for (std::size_t i = 0; i < runs.lm_acc.size(); ++i)
    detail << " " << runs.lm_acc[i] << "/" << runs.mv_acc[i];
  detail << "), slowest 50-epoch run " << runs.slowest_run_s << " s";
  const bool pass =
      mean(runs.lm_acc) >= mean(runs.mv_acc) && runs.slowest_run_s < 600.0;
  return {pass, detail.str()};
}

// 7. Symmetric CE resists 30% symmetric pseudo-label noise at least as well as CE
Outcome criterion_sce() {
  std::vector<double> sce_acc, ce_acc;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(9000 + seed);
    // separable two-cluster toy set, train/test split; capacity and step
    // budget sized so plain CE has room to memorize the flipped labels
    const std::size_t n_train = 400, n_test = 400;
    auto draw = [&](std::size_t n, Tensor2& x, std::vector<int>& y) {
      x = Tensor2(n, 2);
      y.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int cls = int(rng.uniform_index(2));
        y[i] = cls;
        x(i, 0) = (cls == 0 ? -2.5 : 2.5) + rng.normal();
        x(i, 1) = rng.normal();
      }
    };
    Tensor2 x_train, x_test;
    std::vector<int> y_train, y_test;
    draw(n_train, x_train, y_train);
    draw(n_test, x_test, y_test);

    // 30% symmetric noise on the training pseudo labels
    std::vector<int> noisy = y_train;
    for (auto& y : noisy)
      if (rng.uniform() < 0.3) y = 1 - y;
    Tensor2 onehot(n_train, 2);
    for (std::size_t i = 0; i < n_train; ++i) onehot(i, std::size_t(noisy[i])) = 1.0;

    auto train_arm = [&](double alpha, double beta) {
      Rng arm_rng(777 * seed);  // paired initialization
      Mlp trunk = make_trunk(2, {64, 32}, arm_rng);
      Mlp head = make_classifier_head(32, 2, arm_rng);
      AdamState opt;
      opt.lr = 1e-3;
      Rng batch_rng(31 * seed);  // paired batch order
      for (int step = 0; step < 20000; ++step) {
        std::vector<std::size_t> batch(64);
        for (auto& b : batch) b = batch_rng.uniform_index(n_train);
        classifier_train_step(trunk, head, opt, select_rows(x_train, batch),
                              select_rows(onehot, batch), alpha, beta);
      }
      const auto pred = predict_classes(trunk, head, x_test);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < n_test; ++i)
        if (pred[i] == y_test[i]) ++correct;
      return double(correct) / double(n_test);
    };

    sce_acc.push_back(train_arm(0.7, 0.3));
    ce_acc.push_back(train_arm(0.7, 0.0));
  }
  std::ostringstream detail;
  detail << "mean test accuracy: sce " << mean(sce_acc) << " vs ce-only " << mean(ce_acc)
         << " (per seed:";
  for (std::size_t i = 0; i < sce_acc.size(); ++i)
    detail << " " << sce_acc[i] << "/" << ce_acc[i];
  detail << ")";
  return {mean(sce_acc) >= mean(ce_acc), detail.str()};
}

// 8. Classifier ARI improves from the first to the last epoch
Outcome criterion_ari(const BenchmarkRuns& runs) {
  std::ostringstream detail;
  detail << "mean ARI: final " << mean(runs.ari_last) << " vs epoch-0 " << mean(runs.ari_first);
  return {mean(runs.ari_last) > mean(runs.ari_first), detail.str()};
}

// 9. Conditional fidelity of the guided generator + frechet improvement
Outcome criterion_fidelity() {
  int fidelity_ok = 0, frechet_ok = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    WeakDataset ds = synth_dataset(2, 512, 2, std::vector<LfSpec>(4, LfSpec{0.85, 0.7}),
                                   {2.5, 0.5}, 500 + seed);
    TrainConfig cfg;
    cfg.epochs = 150;
    cfg.seed = seed;
    cfg.batch_size = 32;
    cfg.track_frechet = true;
    cfg.frechet_samples = 512;
    // desk-scale guidance weight: the default 1e-5 assumes a ~150k-step
    // generator schedule; at ~2.4k steps the conditional term needs parity
    // with the adversarial rate or the two modes collapse into one
    cfg.lr_g_guid = 1e-4;
    TrainResult run = train(cfg, ds);

    // probe classifier trained on the real labeled data, independent of the
    // pipeline under test
    Rng probe_rng(4242 + seed);
    Mlp probe_trunk = make_trunk(2, {16}, probe_rng);
    Mlp probe_head = make_classifier_head(16, 2, probe_rng);
    Tensor2 onehot(ds.n(), 2);
    for (std::size_t i = 0; i < ds.n(); ++i) onehot(i, std::size_t(ds.gold[i])) = 1.0;
    AdamState opt;
    opt.lr = 5e-3;
    for (int step = 0; step < 300; ++step)
      classifier_train_step(probe_trunk, probe_head, opt, ds.features, onehot, 1.0, 0.0);

    double min_fidelity = 1.0;
    for (std::size_t cls = 0; cls < 2; ++cls) {
      Rng sample_rng(900 + seed * 10 + cls);
      const Tensor2 xs = sample(run.state.generator, cls, 250, sample_rng);
      const auto pred = predict_classes(probe_trunk, probe_head, xs);
      std::size_t hit = 0;
      for (int p : pred)
        if (std::size_t(p) == cls) ++hit;
      min_fidelity = std::min(min_fidelity, double(hit) / double(pred.size()));
    }
    const double fr_early = run.history[1].frechet;
    const double fr_final = run.history.back().frechet;
    if (min_fidelity >= 0.8) ++fidelity_ok;
    if (fr_final < fr_early) ++frechet_ok;
    per_seed << " [seed " << seed << ": fidelity " << min_fidelity << ", frechet " << fr_early
             << " -> " << fr_final << "]";
  }
  std::ostringstream detail;
  detail << fidelity_ok << "/5 seeds with per-class fidelity >= 0.8, " << frechet_ok
         << "/5 with final frechet2d < epoch-1;" << per_seed.str();
  return {fidelity_ok >= 3 && frechet_ok >= 3, detail.str()};
}

// 10. Bitwise determinism and exact resume
Outcome criterion_determinism() {
  WeakDataset ds = synth_dataset(3, 400, 2, std::vector<LfSpec>(5, LfSpec{0.75, 0.6}), {}, 77);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 32;
  cfg.trunk_hidden = {16, 12};
  cfg.gen_hidden = {16};
  cfg.acc_hidden = {32};
  cfg.seed = 5;
  cfg.track_frechet = true;
  cfg.frechet_samples = 64;

  TrainResult a = train(cfg, ds);
  TrainResult b = train(cfg, ds);

  auto same_records = [](const EpochRecord& r, const EpochRecord& s) {
    auto eq = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
    return r.epoch == s.epoch && r.subset_size == s.subset_size &&
           eq(r.subset_utility, s.subset_utility) && eq(r.subset_cost, s.subset_cost) &&
           eq(r.mean_sce, s.mean_sce) && eq(r.mean_lm, s.mean_lm) &&
           eq(r.mean_d_loss, s.mean_d_loss) && eq(r.mean_g_adv, s.mean_g_adv) &&
           eq(r.mean_g_guid, s.mean_g_guid) && eq(r.lm_accuracy, s.lm_accuracy) &&
           eq(r.cls_accuracy, s.cls_accuracy) && eq(r.cls_ari, s.cls_ari) &&
           eq(r.frechet, s.frechet);
  };
  bool identical = a.history.size() == b.history.size();
  for (std::size_t i = 0; identical && i < a.history.size(); ++i)
    identical = same_records(a.history[i], b.history[i]);
  identical = identical && a.state.trunk.params() == b.state.trunk.params();

  // train 5 + checkpointed resume 5 vs straight 10
  TrainConfig half = cfg;
  half.epochs = 5;
  TrainResult first = train(half, ds);
  const std::string path =
      (std::filesystem::temp_directory_path() / "wsfuse_acceptance_resume.ckpt").string();
  save_checkpoint(first.state, path);
  TrainState resumed = load_checkpoint(path);
  auto rest = run_epochs(resumed, ds, 10);
  std::filesystem::remove(path);

  bool resume_ok = first.history.size() + rest.size() == a.history.size();
  for (std::size_t i = 0; resume_ok && i < first.history.size(); ++i)
    resume_ok = same_records(first.history[i], a.history[i]);
  for (std::size_t i = 0; resume_ok && i < rest.size(); ++i)
    resume_ok = same_records(rest[i], a.history[first.history.size() + i]);
  resume_ok = resume_ok && resumed.trunk.params() == a.state.trunk.params() &&
              resumed.generator.net.params() == a.state.generator.net.params() &&
              resumed.rng.state() == a.state.rng.state();

  std::ostringstream detail;
  detail << (identical ? "replay bitwise-identical" : "replay diverged") << "; "
         << (resume_ok ? "train-5+resume-5 equals train-10" : "resume diverged");
  return {identical && resume_ok, detail.str()};
}

// 11. Entropy cost normalization, budget safety, degenerate fallback
Outcome criterion_entropy() {
  Rng rng(1111);
  bool sums_ok = true, budget_ok = true;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_index(60);
    const std::size_t c = 2 + rng.uniform_index(5);
    Tensor2 posts = test::random_probs(n, c, rng);
    CostVector costs = normalized_costs(posts);
    if (std::abs(costs.total - double(n)) > 1e-9) sums_ok = false;
    if (n >= 2) {
      SimilarityKernel kernel = kernel_from_matrix(test::random_kernel_matrix(n, rng));
      const double eta = 0.2 + 0.7 * rng.uniform();
      SelectionResult r = select_subset(kernel, costs, eta, 2.5);
      if (r.total_cost > r.budget) budget_ok = false;
      if (r.budget != eta * costs.total) budget_ok = false;
    }
  }

  // all-one-hot posteriors: the uniform-cost fallback
  Tensor2 onehot(6, 3);
  for (std::size_t i = 0; i < 6; ++i) onehot(i, i % 3) = 1.0;
  CostVector fallback = normalized_costs(onehot);
  bool fallback_ok = true;
  for (double cst : fallback.cost) fallback_ok = fallback_ok && cst == 1.0;
  fallback_ok = fallback_ok && std::abs(fallback.total - 6.0) < 1e-9;

  std::ostringstream detail;
  detail << (sums_ok ? "cost sums == |D_t|" : "cost sums off") << "; "
         << (budget_ok ? "total_cost <= eta*sum(costs) on every selection" : "budget violated")
         << "; " << (fallback_ok ? "one-hot fallback uniform" : "fallback broken");
  return {sums_ok && budget_ok && fallback_ok, detail.str()};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome outcome;
    double seconds;
  };
  std::vector<Entry> results;

  auto timed = [&](int id, const char* name, auto&& fn) {
    const auto start = Clock::now();
    Outcome o = fn();
    results.push_back({id, name, std::move(o), seconds_since(start)});
  };

  timed(1, "approximation bound (dual-run CEG vs exhaustive optimum)", criterion_bound);
  timed(2, "graph-cut monotonicity and submodularity", criterion_submodular);
  timed(3, "lazy greedy equals naive greedy", criterion_lazy);
  timed(4, "majority-vote reduction of the posterior argmax", criterion_majority);
  timed(5, "finite-difference gradient checks over all losses", criterion_gradients);

  const auto bench_start = Clock::now();
  BenchmarkRuns runs = run_benchmark();
  const double bench_seconds = seconds_since(bench_start);
  timed(6, "label model matches or beats majority vote", [&] { return criterion_label_model(runs); });
  timed(7, "symmetric CE robustness under 30% label noise", criterion_sce);
  timed(8, "classifier ARI improves over training", [&] { return criterion_ari(runs); });
  timed(9, "conditional fidelity and frechet improvement", criterion_fidelity);
  timed(10, "bitwise determinism and exact resume", criterion_determinism);
  timed(11, "entropy cost plumbing and budget safety", criterion_entropy);

  // fold the shared benchmark time into criterion 6's line
  for (auto& e : results)
    if (e.id == 6) e.seconds += bench_seconds;

  int failures = 0;
  for (const auto& e : results) {
    std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", e.outcome.pass ? "PASS" : "FAIL", e.id,
                e.name, e.outcome.detail.c_str(), e.seconds);
    if (!e.outcome.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}
