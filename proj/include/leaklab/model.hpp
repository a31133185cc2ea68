#pragma once

#include <string>
#include <vector>

#include "leaklab/rng.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

enum class Arch { linear, mlp1, mlp2 };

const char* arch_name(Arch a);
Arch arch_from_name(const std::string& s);

struct Layer {
  Matrix W;  // out x in
  Vector b;  // size out; unused when has_bias is false
  bool has_bias = false;
};

struct Model {
  Arch arch = Arch::linear;
  std::vector<Layer> layers;
  std::vector<Index> widths;  // (d, hidden..., c)

  Index input_dim() const { return widths.front(); }
  Index output_dim() const { return widths.back(); }
};

struct Gradients {
  std::vector<Matrix> dW;
  std::vector<Vector> db;
};

// weights i.i.d. N(0, 1/fan_in), biases zero; linear models carry no bias
// unless asked for
Model init_params(RngState& rng, Arch arch, Index d, const std::vector<Index>& hidden,
                  Index c, bool bias = true);

// linear: Z = X W^T (+ b); MLPs: affine / ReLU alternation, affine readout
Matrix forward_logits(const Model& model, const Matrix& X);

// L = -sum_mu sum_k (targets)_mu,k log sigma_tau(z_mu)_k  (sum over samples)
double ce_loss(const Model& model, const Matrix& X, const Matrix& targets, double tau);

// Gradients of ce_loss w.r.t. all parameters. Per-sample logit gradient is
// (S * sigma_tau(z) - target) / tau with S the target row sum.
Gradients backward_ce(const Model& model, const Matrix& X, const Matrix& targets,
                      double tau, double* loss_out = nullptr);

struct AdamState {
  std::vector<Matrix> mW, vW;
  std::vector<Vector> mb, vb;
  long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  static AdamState init(const Model& model, double lr = 1e-3, double weight_decay = 0.0);
};

// Standard Adam with bias correction; decoupled weight decay applied as
// theta <- theta - lr * wd * theta before the moment update.
void adam_step(Model& model, const Gradients& grads, AdamState& state);

// parameter-vector view, used by the finite-difference oracle
Vector flatten_params(const Model& model);
void set_params(Model& model, const Vector& theta);

Matrix one_hot(const std::vector<int>& labels, int c);

}  // namespace leaklab
