#include "leaklab/softlabels.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace leaklab {

std::string Transform::tag() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::shuffled_within_class: return "shuffle";
    case Kind::smallest_k_zeroed: return "topk:" + std::to_string(k);
    case Kind::class_column_zeroed: return "zerocol:" + std::to_string(cls);
  }
  return "?";
}

Transform Transform::parse(const std::string& s) {
  Transform t;
  if (s.empty() || s == "none") return t;
  if (s == "shuffle") {
    t.kind = Kind::shuffled_within_class;
    return t;
  }
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    std::string head = s.substr(0, colon);
    int arg = std::stoi(s.substr(colon + 1));
    if (head == "topk") {
      t.kind = Kind::smallest_k_zeroed;
      t.k = arg;
      return t;
    }
    if (head == "zerocol") {
      t.kind = Kind::class_column_zeroed;
      t.cls = arg;
      return t;
    }
  }
  throw std::invalid_argument("unknown transform: " + s);
}

Vector softmax_with_temperature(const Vector& z, double tau) {
  Vector e = ((z.array() - z.maxCoeff()) / tau).exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& Z, double tau) {
  Matrix P(Z.rows(), Z.cols());
  for (Index i = 0; i < Z.rows(); ++i)
    P.row(i) = softmax_with_temperature(Z.row(i).transpose(), tau).transpose();
  return P;
}

SoftLabelSet make_soft_labels(const Model& teacher, const Matrix& X, double tau) {
  SoftLabelSet s;
  s.probs = softmax_rows(forward_logits(teacher, X), tau);
  s.tau = tau;
  return s;
}

SoftLabelSet shuffle_within_class(RngState& rng, const SoftLabelSet& soft,
                                  const std::vector<int>& labels) {
  SoftLabelSet out = soft;
  out.transform.kind = Transform::Kind::shuffled_within_class;
  std::map<int, std::vector<Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<Index>(i));
  for (auto& [cls, members] : by_class) {
    std::vector<Index> donors(members);
    rng.shuffle(donors);
    for (std::size_t i = 0; i < members.size(); ++i)
      out.probs.row(members[i]) = soft.probs.row(donors[i]);
  }
  return out;
}

SoftLabelSet ablate_smallest_k(const SoftLabelSet& soft, int k) {
  const Index c = soft.probs.cols();
  if (k < 0 || k >= c) throw std::invalid_argument("ablate_smallest_k: k out of range");
  SoftLabelSet out = soft;
  out.transform.kind = Transform::Kind::smallest_k_zeroed;
  out.transform.k = k;
  std::vector<Index> order(static_cast<std::size_t>(c));
  for (Index i = 0; i < soft.probs.rows(); ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    // ascending by value, ties by lower class index
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return soft.probs(i, a) < soft.probs(i, b);
    });
    for (int j = 0; j < k; ++j) out.probs(i, order[static_cast<std::size_t>(j)]) = 0.0;
  }
  return out;
}

SoftLabelSet zero_class_column(const SoftLabelSet& soft, int cls,
                               const std::vector<int>& labels) {
  if (cls < 0 || cls >= soft.probs.cols())
    throw std::invalid_argument("zero_class_column: class out of range");
  SoftLabelSet out = soft;
  out.transform.kind = Transform::Kind::class_column_zeroed;
  out.transform.cls = cls;
  for (Index i = 0; i < out.probs.rows(); ++i)
    if (labels[static_cast<std::size_t>(i)] != cls) out.probs(i, cls) = 0.0;
  return out;
}

SoftLabelSet apply_transform(RngState& rng, const SoftLabelSet& soft, const Transform& t,
                             const std::vector<int>& labels) {
  switch (t.kind) {
    case Transform::Kind::none: return soft;
    case Transform::Kind::shuffled_within_class: return shuffle_within_class(rng, soft, labels);
    case Transform::Kind::smallest_k_zeroed: return ablate_smallest_k(soft, t.k);
    case Transform::Kind::class_column_zeroed: return zero_class_column(soft, t.cls, labels);
  }
  return soft;
}

}  // namespace leaklab
