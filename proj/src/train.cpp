#include "leaklab/train.hpp"

#include <cmath>

#include "leaklab/linalg.hpp"
#include "leaklab/metrics.hpp"

namespace leaklab {

namespace {

std::vector<Index> hidden_for(Arch arch, const std::vector<Index>& hidden) {
  std::size_t want = arch == Arch::linear ? 0 : (arch == Arch::mlp1 ? 1 : 2);
  if (hidden.size() == want) return hidden;
  if (arch == Arch::linear) return {};
  throw ShapeMismatch("training: hidden width count does not match arch");
}

TrainResult run_adam(RngState& rng, const Matrix& X, const Matrix& targets,
                     const std::vector<int>& y_train, double tau, int c, Arch arch,
                     const std::vector<Index>& hidden, const TrainConfig& cfg,
                     const EvalSets& eval) {
  const double n = static_cast<double>(X.rows());
  TrainResult res;
  res.model = init_params(rng, arch, X.cols(), hidden_for(arch, hidden),
                          static_cast<Index>(c), cfg.bias);
  AdamState state = AdamState::init(res.model, cfg.lr, cfg.weight_decay);
  state.beta1 = cfg.beta1;
  state.beta2 = cfg.beta2;
  state.eps = cfg.eps;

  auto record = [&](int step, double mean_loss) {
    TracePoint tp;
    tp.step = step;
    tp.loss = mean_loss;
    tp.acc_train = accuracy(res.model, X, y_train);
    if (eval.X_test && eval.y_test) tp.acc_test = accuracy(res.model, *eval.X_test, *eval.y_test);
    if (eval.X_val && eval.y_val) tp.acc_val = accuracy(res.model, *eval.X_val, *eval.y_val);
    res.trace.push_back(tp);
    return tp;
  };

  for (int step = 1; step <= cfg.steps; ++step) {
    double loss = 0.0;
    Gradients g = backward_ce(res.model, X, targets, tau, &loss);
    if (!std::isfinite(loss)) throw DivergedTraining("training: non-finite loss");
    // mean reduction over the batch
    for (auto& dW : g.dW) dW /= n;
    for (auto& db : g.db) db /= n;
    adam_step(res.model, g, state);
    res.steps_run = step;

    if (step % cfg.record_every == 0 || step == cfg.steps) {
      TracePoint tp = record(step, loss / n);
      if (cfg.early_stop && tp.acc_train >= 1.0 && tp.loss < cfg.stop_loss) break;
    }
  }
  return res;
}

}  // namespace

TrainResult train_teacher(RngState& rng, const Matrix& X, const std::vector<int>& labels,
                          int c, Arch arch, const std::vector<Index>& hidden,
                          const TrainConfig& cfg, const EvalSets& eval) {
  if (cfg.steps < 1) throw std::invalid_argument("train_teacher: steps must be >= 1");
  return run_adam(rng, X, one_hot(labels, c), labels, 1.0, c, arch, hidden, cfg, eval);
}

TrainResult train_student(RngState& rng, const Matrix& X, const SoftLabelSet& soft,
                          const std::vector<int>& y_train, int c, Arch arch,
                          const std::vector<Index>& hidden, const TrainConfig& cfg,
                          const EvalSets& eval) {
  if (soft.probs.rows() != X.rows())
    throw ShapeMismatch("train_student: soft label row count != |student train set|");
  return run_adam(rng, X, soft.probs, y_train, soft.tau, c, arch, hidden, cfg, eval);
}

Model pinv_student(const Matrix& X_train, const Matrix& teacher_logits, double rank_tol) {
  // W_hat solves min ||X W^T - Z||_F with minimum norm; stored as c x d
  Matrix Wt = least_squares_min_norm(X_train, teacher_logits, rank_tol);  // d x c
  Model m;
  m.arch = Arch::linear;
  m.widths = {X_train.cols(), teacher_logits.cols()};
  Layer layer;
  layer.W = Wt.transpose();
  layer.b = Vector::Zero(teacher_logits.cols());
  layer.has_bias = false;
  m.layers.push_back(std::move(layer));
  return m;
}

}  // namespace leaklab
