#include "leaklab/metrics.hpp"

#include <cmath>
#include <limits>

namespace leaklab {

Index argmax_row(const Matrix& Z, Index row) {
  Index best = 0;
  for (Index j = 1; j < Z.cols(); ++j)
    if (Z(row, j) > Z(row, best)) best = j;
  return best;
}

double accuracy_logits(const Matrix& Z, const std::vector<int>& labels) {
  if (Z.rows() == 0) throw ShapeMismatch("accuracy: empty input");
  Index hits = 0;
  for (Index i = 0; i < Z.rows(); ++i)
    if (argmax_row(Z, i) == labels[static_cast<std::size_t>(i)]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(Z.rows());
}

double accuracy(const Model& model, const Matrix& X, const std::vector<int>& labels) {
  return accuracy_logits(forward_logits(model, X), labels);
}

double match_accuracy(const Model& student, const Model& teacher, const Matrix& X) {
  Matrix Zs = forward_logits(student, X);
  Matrix Zt = forward_logits(teacher, X);
  if (Zs.cols() != Zt.cols()) throw ShapeMismatch("match_accuracy: class count mismatch");
  Index hits = 0;
  for (Index i = 0; i < X.rows(); ++i)
    if (argmax_row(Zs, i) == argmax_row(Zt, i)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(X.rows());
}

double logit_mse_vs(const Matrix& Zs, const Matrix& Zt) {
  if (Zs.rows() != Zt.rows() || Zs.cols() != Zt.cols())
    throw ShapeMismatch("logit_mse: shape mismatch");
  return (Zs - Zt).squaredNorm() / static_cast<double>(Zs.rows());
}

double logit_mse(const Model& student, const Model& teacher, const Matrix& X) {
  return logit_mse_vs(forward_logits(student, X), forward_logits(teacher, X));
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::trivial_leakage: return "trivial_leakage";
    case Regime::weak_leakage_memorizing: return "weak_leakage_memorizing";
    case Regime::weak_leakage_nonmemorizing: return "weak_leakage_nonmemorizing";
    case Regime::full_recovery: return "full_recovery";
    case Regime::teacher_fail_student_matches: return "teacher_fail_student_matches";
    case Regime::teacher_fail_no_match: return "teacher_fail_no_match";
  }
  return "?";
}

Regime regime_from_name(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == regime_name(static_cast<Regime>(i))) return static_cast<Regime>(i);
  throw std::invalid_argument("unknown regime: " + s);
}

Regime classify_regime(const MetricsRecord& rec, const RegimeCutoffs& cut) {
  if (rec.acc_T_star < cut.fit) {
    return rec.mse_test < cut.mse ? Regime::teacher_fail_student_matches
                                  : Regime::teacher_fail_no_match;
  }
  if (rec.acc_S_test >= cut.fit) return Regime::full_recovery;
  if (rec.acc_S_train >= cut.fit && rec.acc_S_test >= cut.weak)
    return Regime::weak_leakage_memorizing;
  if (rec.acc_S_train < cut.fit && rec.acc_S_test >= cut.weak)
    return Regime::weak_leakage_nonmemorizing;
  return Regime::trivial_leakage;
}

ThresholdEstimate estimate_threshold(const std::vector<std::pair<double, double>>& curve,
                                     double cutoff, CrossDirection direction) {
  if (curve.size() < 2) throw InvalidCurve("estimate_threshold: need at least 2 points");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!std::isfinite(curve[i].first) || !std::isfinite(curve[i].second))
      throw InvalidCurve("estimate_threshold: non-finite curve point");
    if (i > 0 && curve[i].first <= curve[i - 1].first)
      throw InvalidCurve("estimate_threshold: alphas not strictly increasing");
  }

  ThresholdEstimate est;
  auto crossed_at = [&](double v) {
    return direction == CrossDirection::falling ? v <= cutoff : v >= cutoff;
  };

  if (crossed_at(curve.front().second)) {
    est.crossed = true;
    est.alpha_star = curve.front().first;
    return est;
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto [a0, v0] = curve[i - 1];
    const auto [a1, v1] = curve[i];
    if (crossed_at(v1)) {
      est.crossed = true;
      est.alpha_star = v1 == v0 ? a1 : a0 + (a1 - a0) * (cutoff - v0) / (v1 - v0);
      return est;
    }
  }
  est.crossed = false;
  est.alpha_star = std::numeric_limits<double>::quiet_NaN();
  return est;
}

MeanSem mean_sem(const std::vector<double>& xs) {
  MeanSem r;
  r.n = static_cast<int>(xs.size());
  if (r.n == 0) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / r.n;
  if (r.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sem = std::sqrt(ss / (r.n - 1)) / std::sqrt(static_cast<double>(r.n));
  }
  return r;
}

}  // namespace leaklab
