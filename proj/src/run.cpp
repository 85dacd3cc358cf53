#include "pinnlab/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pinnlab/errors.hpp"
#include "pinnlab/pool.hpp"
#include "pinnlab/rng.hpp"

namespace pinnlab::runner {
namespace {

using analysis::EpochRow;
using analysis::RunRecord;
using analysis::RunStatus;
using model::DataSlice;
using model::LossBreakdown;
using optim::OptimizerKind;
using optim::Params;

void fisher_yates(std::vector<std::uint32_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

// Owns everything one training run touches; nothing is shared between runs.
class Trainer {
 public:
  explicit Trainer(const ExperimentConfig& cfg)
      : cfg_(cfg),
        arch_(arch_layers(cfg.arch)),
        problem_{cfg.beta},
        data_(model::sample_dataset(problem_, cfg.data_seed, cfg.sampling)),
        evaluator_(arch_, problem_),
        bounce_rng_(cfg.init_seed, Rng::Stream::kBbiBounce),
        shuffle_rng_(cfg.init_seed, Rng::Stream::kAdamShuffle) {
    train_ = data_.train();
    test_ = data_.test();
  }

  RunRecord run() {
    RunRecord rec;
    rec.config = cfg_;
    params_ = model::init_params(arch_, cfg_.init_seed);
    try {
      record_epoch(rec, 0);
    } catch (const DivergenceError&) {
      rec.status = RunStatus::kDiverged;
      return rec;
    }
    if (cfg_.epochs == 0) return rec;
    init_optimizer();
    double prev_train = rec.rows.back().train.total;
    for (int e = 1; e <= cfg_.epochs; ++e) {
      try {
        step_epoch();
        record_epoch(rec, e);
      } catch (const DivergenceError&) {
        rec.status = RunStatus::kDiverged;
        return rec;
      }
      // An LBFGS run also ends once an epoch stops changing the training
      // objective by more than the optimizer's own change tolerance, applied
      // here at the epoch cadence; without this the run idles at its floor
      // for the rest of the budget.
      const double cur_train = rec.rows.back().train.total;
      if (cfg_.optimizer.kind == OptimizerKind::kLbfgs &&
          std::abs(cur_train - prev_train) <
              cfg_.optimizer.lbfgs.tolerance_change)
        lbfgs_done_ = true;
      prev_train = cur_train;
      if (lbfgs_done_) {
        rec.status = RunStatus::kConverged;
        break;
      }
    }
    return rec;
  }

 private:
  double lr() const { return cfg_.optimizer.learning_rate; }

  void guard(double loss_total) const {
    if (loss_total > cfg_.divergence_guard)
      throw DivergenceError("loss exceeded the divergence guard", loss_total);
  }

  optim::LossGrad guarded_closure() {
    return [this](const Params& p, Params& g) {
      const LossBreakdown lb = evaluator_.eval_grad(p, train_, g);
      guard(lb.total);
      return lb.total;
    };
  }

  void init_optimizer() {
    switch (cfg_.optimizer.kind) {
      case OptimizerKind::kGd:
      case OptimizerKind::kLbfgs:
        break;
      case OptimizerKind::kAdam:
        init_adam_partition();
        break;
      case OptimizerKind::kBbi:
        bbi_ = optim::bbi_init(params_, guarded_closure(), cfg_.optimizer.bbi);
        break;
    }
  }

  void init_adam_partition() {
    const auto fill = [](std::vector<std::uint32_t>& idx, std::size_t n) {
      idx.resize(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    };
    fill(ic_idx_, data_.ic_train);
    fill(bulk_idx_, data_.bulk_train);
    fill(bc_idx_, data_.bc_train);
    const auto total = static_cast<double>(data_.train_size());
    const auto smallest = static_cast<long>(
        std::min({data_.ic_train, data_.bulk_train, data_.bc_train}));
    n_batches_ = static_cast<int>(std::clamp<long>(
        std::llround(total / cfg_.optimizer.adam.minibatch_size), 1, smallest));
  }

  // Contiguous chunk [start, start+count) of a shuffled index array for
  // batch b out of nb, sizes as even as possible.
  static std::pair<std::size_t, std::size_t> chunk(std::size_t n, int nb, int b) {
    const std::size_t base = n / nb;
    const std::size_t rem = n % nb;
    const auto ub = static_cast<std::size_t>(b);
    const std::size_t start = ub * base + std::min(ub, rem);
    return {start, base + (ub < rem ? 1 : 0)};
  }

  void step_epoch() {
    switch (cfg_.optimizer.kind) {
      case OptimizerKind::kGd: {
        const LossBreakdown lb = evaluator_.eval_grad(params_, train_, grad_);
        guard(lb.total);
        params_ = optim::gd_step(params_, grad_, lr());
        break;
      }
      case OptimizerKind::kAdam:
        step_adam_epoch();
        break;
      case OptimizerKind::kLbfgs: {
        optim::LbfgsResult res =
            optim::lbfgs_epoch(lbfgs_, std::move(params_), guarded_closure(),
                               lr(), cfg_.optimizer.lbfgs);
        params_ = std::move(res.params);
        if (res.status != optim::LbfgsStatus::kMaxIter) lbfgs_done_ = true;
        break;
      }
      case OptimizerKind::kBbi: {
        const LossBreakdown lb = evaluator_.eval_grad(params_, train_, grad_);
        guard(lb.total);
        params_ = optim::bbi_advance(bbi_, params_, grad_, lb.total, lr(),
                                     cfg_.optimizer.bbi, bounce_rng_);
        break;
      }
    }
  }

  void step_adam_epoch() {
    fisher_yates(ic_idx_, shuffle_rng_);
    fisher_yates(bulk_idx_, shuffle_rng_);
    fisher_yates(bc_idx_, shuffle_rng_);
    for (int b = 0; b < n_batches_; ++b) {
      const auto [ic_start, ic_count] = chunk(ic_idx_.size(), n_batches_, b);
      const auto [bulk_start, bulk_count] = chunk(bulk_idx_.size(), n_batches_, b);
      const auto [bc_start, bc_count] = chunk(bc_idx_.size(), n_batches_, b);
      ic_scratch_.clear();
      for (std::size_t i = 0; i < ic_count; ++i)
        ic_scratch_.push_back(data_.ic[ic_idx_[ic_start + i]]);
      bulk_scratch_.clear();
      for (std::size_t i = 0; i < bulk_count; ++i)
        bulk_scratch_.push_back(data_.bulk[bulk_idx_[bulk_start + i]]);
      bc_scratch_.clear();
      for (std::size_t i = 0; i < bc_count; ++i)
        bc_scratch_.push_back(data_.bc_times[bc_idx_[bc_start + i]]);
      const DataSlice batch{ic_scratch_, bulk_scratch_, bc_scratch_};
      const LossBreakdown lb = evaluator_.eval_grad(params_, batch, grad_);
      guard(lb.total);
      params_ = optim::adam_step(adam_, params_, grad_, lr(),
                                 cfg_.optimizer.adam);
    }
  }

  void record_epoch(RunRecord& rec, int epoch) {
    EpochRow row;
    row.epoch = epoch;
    row.train = evaluator_.eval(params_, train_);
    row.test = evaluator_.eval(params_, test_);
    row.mse = model::grid_mse(arch_, params_, problem_, cfg_.sampling.grid_nx,
                              cfg_.sampling.grid_nt);
    guard(row.train.total);
    row.curvature = tracker_.push(params_);
    rec.rows.push_back(std::move(row));
  }

  ExperimentConfig cfg_;
  model::MlpArchitecture arch_;
  model::AdvectionProblem problem_;
  model::TrainingSet data_;
  model::PinnLossEvaluator evaluator_;
  Rng bounce_rng_;
  Rng shuffle_rng_;
  DataSlice train_;
  DataSlice test_;
  Params params_;
  Params grad_;
  geom::CurvatureTracker tracker_;
  optim::AdamState adam_;
  optim::LbfgsState lbfgs_;
  optim::BbiState bbi_;
  bool lbfgs_done_ = false;
  std::vector<std::uint32_t> ic_idx_, bulk_idx_, bc_idx_;
  std::vector<model::Point> ic_scratch_, bulk_scratch_;
  std::vector<double> bc_scratch_;
  int n_batches_ = 1;
};

double final_test_loss(const RunRecord& rec) {
  if (rec.status == RunStatus::kDiverged || rec.rows.empty())
    return std::numeric_limits<double>::infinity();
  return rec.rows.back().test.total;
}

}  // namespace

RunRecord run_single(const ExperimentConfig& config) {
  config.validate();
  Trainer trainer(config);
  return trainer.run();
}

std::vector<RunRecord> run_batch(const ExperimentConfig& config, int n_seeds,
                                 int n_threads) {
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  config.validate();
  std::vector<RunRecord> out(static_cast<std::size_t>(n_seeds));
  parallel_for(out.size(), n_threads, [&](std::size_t i) {
    ExperimentConfig c = config;
    c.init_seed = config.init_seed + i;
    out[i] = run_single(c);
  });
  return out;
}

GridResult grid_search(const GridSearchSpec& spec, const ExperimentConfig& base,
                       int n_threads) {
  if (spec.candidates.empty())
    throw ConfigError("grid search needs at least one candidate");
  for (double lr : spec.candidates)
    if (!(lr > 0.0)) throw ConfigError("grid candidates must be positive");
  if (spec.trials < 1) throw ConfigError("grid trials must be >= 1");
  if (spec.epochs < 0) throw ConfigError("grid epochs must be >= 0");

  const std::size_t nc = spec.candidates.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  std::vector<double> losses(nc * nt);
  std::vector<char> diverged(nc * nt, 0);
  parallel_for(nc * nt, n_threads, [&](std::size_t j) {
    ExperimentConfig c = base;
    c.optimizer.learning_rate = spec.candidates[j / nt];
    c.epochs = spec.epochs;
    c.init_seed = base.init_seed + (j % nt);
    const RunRecord rec = run_single(c);
    losses[j] = final_test_loss(rec);
    diverged[j] = rec.status == RunStatus::kDiverged ? 1 : 0;
  });

  GridResult result;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    GridCandidate cand;
    cand.lr = spec.candidates[ci];
    double acc = 0.0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      acc += losses[ci * nt + ti];
      cand.n_diverged += diverged[ci * nt + ti];
    }
    cand.mean_final_test_loss = acc / static_cast<double>(nt);
    result.table.push_back(cand);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const GridCandidate& cand : result.table) {
    if (std::isfinite(cand.mean_final_test_loss) &&
        cand.mean_final_test_loss < best) {
      best = cand.mean_final_test_loss;
      result.best_lr = cand.lr;
    }
  }
  return result;
}

}  // namespace pinnlab::runner
