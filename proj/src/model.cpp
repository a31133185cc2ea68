#include "leaklab/model.hpp"

#include <cmath>

#include "leaklab/linalg.hpp"
#include "leaklab/softlabels.hpp"

namespace leaklab {

const char* arch_name(Arch a) {
  switch (a) {
    case Arch::linear: return "linear";
    case Arch::mlp1: return "mlp1";
    case Arch::mlp2: return "mlp2";
  }
  return "?";
}

Arch arch_from_name(const std::string& s) {
  if (s == "linear") return Arch::linear;
  if (s == "mlp1") return Arch::mlp1;
  if (s == "mlp2") return Arch::mlp2;
  throw std::invalid_argument("unknown arch: " + s);
}

Model init_params(RngState& rng, Arch arch, Index d, const std::vector<Index>& hidden,
                  Index c, bool bias) {
  std::size_t n_hidden = arch == Arch::linear ? 0 : (arch == Arch::mlp1 ? 1 : 2);
  if (hidden.size() != n_hidden)
    throw ShapeMismatch("init_params: hidden width count does not match arch");

  Model m;
  m.arch = arch;
  m.widths.push_back(d);
  for (Index p : hidden) m.widths.push_back(p);
  m.widths.push_back(c);

  for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
    Index fan_in = m.widths[l];
    Index fan_out = m.widths[l + 1];
    Layer layer;
    layer.W = gaussian_matrix(rng, fan_out, fan_in) / std::sqrt(static_cast<double>(fan_in));
    layer.has_bias = bias && arch != Arch::linear;
    layer.b = Vector::Zero(fan_out);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

namespace {

// forward pass keeping post-activation values per layer (A[0] = X)
std::vector<Matrix> forward_cached(const Model& model, const Matrix& X) {
  if (X.cols() != model.input_dim())
    throw ShapeMismatch("forward_logits: input dimension mismatch");
  std::vector<Matrix> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(X);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    Matrix z = acts.back() * layer.W.transpose();
    if (layer.has_bias) z.rowwise() += layer.b.transpose();
    if (l + 1 < model.layers.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  return acts;
}

}  // namespace

Matrix forward_logits(const Model& model, const Matrix& X) {
  return forward_cached(model, X).back();
}

double ce_loss(const Model& model, const Matrix& X, const Matrix& targets, double tau) {
  Matrix P = softmax_rows(forward_logits(model, X), tau);
  // clip the log argument; rows with zero target weight contribute nothing
  double loss = -(targets.array() * P.array().max(1e-300).log()).sum();
  if (!std::isfinite(loss)) throw NumericalFailure("ce_loss: non-finite loss");
  return loss;
}

Gradients backward_ce(const Model& model, const Matrix& X, const Matrix& targets,
                      double tau, double* loss_out) {
  if (targets.rows() != X.rows() || targets.cols() != model.output_dim())
    throw ShapeMismatch("backward_ce: target shape mismatch");
  std::vector<Matrix> acts = forward_cached(model, X);
  const Matrix& Z = acts.back();
  Matrix P = softmax_rows(Z, tau);

  if (loss_out) {
    *loss_out = -(targets.array() * P.array().max(1e-300).log()).sum();
    if (!std::isfinite(*loss_out)) throw NumericalFailure("backward_ce: non-finite loss");
  }

  Vector S = targets.rowwise().sum();
  Matrix G = (P.array().colwise() * S.array()).matrix() - targets;
  G /= tau;

  Gradients g;
  g.dW.resize(model.layers.size());
  g.db.resize(model.layers.size());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    g.dW[l] = G.transpose() * acts[l];
    g.db[l] = G.colwise().sum();
    if (l > 0) {
      G = G * model.layers[l].W;
      // acts[l] is post-ReLU; mask where the unit was inactive
      G = ((acts[l].array() > 0.0).cast<double>() * G.array()).matrix();
    }
  }
  return g;
}

AdamState AdamState::init(const Model& model, double lr, double weight_decay) {
  AdamState s;
  s.lr = lr;
  s.weight_decay = weight_decay;
  for (const Layer& layer : model.layers) {
    s.mW.push_back(Matrix::Zero(layer.W.rows(), layer.W.cols()));
    s.vW.push_back(Matrix::Zero(layer.W.rows(), layer.W.cols()));
    s.mb.push_back(Vector::Zero(layer.b.size()));
    s.vb.push_back(Vector::Zero(layer.b.size()));
  }
  return s;
}

namespace {

template <typename T>
void adam_update(T& theta, const T& grad, T& m, T& v, const AdamState& s, double bc1, double bc2) {
  if (s.weight_decay > 0.0) theta -= (s.lr * s.weight_decay) * theta;
  m = s.beta1 * m + (1.0 - s.beta1) * grad;
  v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  theta.array() -= s.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.eps);
}

}  // namespace

void adam_step(Model& model, const Gradients& grads, AdamState& state) {
  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    adam_update(model.layers[l].W, grads.dW[l], state.mW[l], state.vW[l], state, bc1, bc2);
    if (model.layers[l].has_bias)
      adam_update(model.layers[l].b, grads.db[l], state.mb[l], state.vb[l], state, bc1, bc2);
  }
}

Vector flatten_params(const Model& model) {
  Index total = 0;
  for (const Layer& layer : model.layers)
    total += layer.W.size() + (layer.has_bias ? layer.b.size() : 0);
  Vector theta(total);
  Index off = 0;
  for (const Layer& layer : model.layers) {
    theta.segment(off, layer.W.size()) =
        Eigen::Map<const Vector>(layer.W.data(), layer.W.size());
    off += layer.W.size();
    if (layer.has_bias) {
      theta.segment(off, layer.b.size()) = layer.b;
      off += layer.b.size();
    }
  }
  return theta;
}

void set_params(Model& model, const Vector& theta) {
  Index off = 0;
  for (Layer& layer : model.layers) {
    Eigen::Map<Vector>(layer.W.data(), layer.W.size()) = theta.segment(off, layer.W.size());
    off += layer.W.size();
    if (layer.has_bias) {
      layer.b = theta.segment(off, layer.b.size());
      off += layer.b.size();
    }
  }
}

Matrix one_hot(const std::vector<int>& labels, int c) {
  Matrix T = Matrix::Zero(static_cast<Index>(labels.size()), c);
  for (std::size_t i = 0; i < labels.size(); ++i)
    T(static_cast<Index>(i), labels[i]) = 1.0;
  return T;
}

}  // namespace leaklab
