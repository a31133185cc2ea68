#include <doctest.h>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "leaklab/linalg.hpp"
#include "leaklab/metrics.hpp"
#include "leaklab/model.hpp"

using namespace leaklab;

namespace {

MetricsRecord rec(double acc_T, double acc_S_train, double acc_S_test, double mse_test) {
  MetricsRecord r;
  r.acc_T_star = acc_T;
  r.acc_S_train = acc_S_train;
  r.acc_S_test = acc_S_test;
  r.mse_test = mse_test;
  return r;
}

}  // namespace

TEST_CASE("argmax breaks ties toward the lower class index") {
  Matrix Z(2, 3);
  Z << 1.0, 1.0, 0.5,
       0.0, 2.0, 2.0;
  CHECK(argmax_row(Z, 0) == 0);
  CHECK(argmax_row(Z, 1) == 1);
}

TEST_CASE("accuracy on logits") {
  Matrix Z(4, 2);
  Z << 1.0, 0.0,
       0.0, 1.0,
       3.0, 2.0,
       -1.0, -2.0;
  std::vector<int> y = {0, 1, 1, 0};
  CHECK(accuracy_logits(Z, y) == doctest::Approx(0.75));
  CHECK_THROWS_AS(accuracy_logits(Matrix(0, 2), {}), ShapeMismatch);
}

TEST_CASE("logit mse is mean over samples of the squared row distance") {
  Matrix A(2, 2), B(2, 2);
  A << 1.0, 2.0, 3.0, 4.0;
  B << 1.0, 2.0, 3.0, 1.0;
  // single differing entry: (4 - 1)^2 / 2 rows = 4.5
  CHECK(logit_mse_vs(A, B) == doctest::Approx(4.5));
  CHECK_THROWS_AS(logit_mse_vs(A, Matrix(2, 3)), ShapeMismatch);
}

TEST_CASE("regime classification covers all six regimes") {
  // teacher fit, student fit everywhere -> full recovery
  CHECK(classify_regime(rec(1.0, 1.0, 0.995, 0.0)) == Regime::full_recovery);
  // teacher fit, student memorizes train, generalizes weakly
  CHECK(classify_regime(rec(1.0, 1.0, 0.7, 1.0)) == Regime::weak_leakage_memorizing);
  // teacher fit, student does not memorize but still beats the weak cutoff
  CHECK(classify_regime(rec(1.0, 0.9, 0.6, 1.0)) == Regime::weak_leakage_nonmemorizing);
  // teacher fit, student near chance
  CHECK(classify_regime(rec(1.0, 0.8, 0.3, 1.0)) == Regime::trivial_leakage);
  CHECK(classify_regime(rec(1.0, 1.0, 0.5, 1.0)) == Regime::trivial_leakage);
  // teacher underfits, student still matches its logits
  CHECK(classify_regime(rec(0.9, 1.0, 1.0, 0.01)) == Regime::teacher_fail_student_matches);
  // teacher underfits and the student does not track it
  CHECK(classify_regime(rec(0.9, 1.0, 1.0, 5.0)) == Regime::teacher_fail_no_match);

  // boundary behavior: cutoffs are inclusive on the fit side
  CHECK(classify_regime(rec(0.99, 0.99, 0.99, 1.0)) == Regime::full_recovery);
  CHECK(classify_regime(rec(0.99, 0.99, 0.55, 1.0)) == Regime::weak_leakage_memorizing);
}

TEST_CASE("regime names round-trip") {
  for (int i = 0; i < 6; ++i) {
    Regime r = static_cast<Regime>(i);
    CHECK(regime_from_name(regime_name(r)) == r);
  }
  CHECK_THROWS(regime_from_name("nope"));
}

TEST_CASE("threshold estimation interpolates the first crossing") {
  // falling through 0.99 between (2, 1.0) and (3, 0.9): alpha* = 2.1
  std::vector<std::pair<double, double>> curve = {{1.0, 1.0}, {2.0, 1.0}, {3.0, 0.9}};
  ThresholdEstimate est = estimate_threshold(curve, 0.99, CrossDirection::falling);
  CHECK(est.crossed);
  CHECK(est.alpha_star == doctest::Approx(2.1).epsilon(1e-12));

  // rising crossing
  std::vector<std::pair<double, double>> up = {{0.5, 0.2}, {1.0, 0.4}, {1.5, 0.8}};
  ThresholdEstimate r = estimate_threshold(up, 0.6, CrossDirection::rising);
  CHECK(r.crossed);
  CHECK(r.alpha_star == doctest::Approx(1.25).epsilon(1e-12));

  // crossed at the first point: report that alpha
  std::vector<std::pair<double, double>> low = {{1.0, 0.5}, {2.0, 0.4}};
  ThresholdEstimate f = estimate_threshold(low, 0.99, CrossDirection::falling);
  CHECK(f.crossed);
  CHECK(f.alpha_star == 1.0);

  // never crossed
  std::vector<std::pair<double, double>> flat = {{1.0, 1.0}, {2.0, 1.0}};
  ThresholdEstimate n = estimate_threshold(flat, 0.99, CrossDirection::falling);
  CHECK_FALSE(n.crossed);
  CHECK(std::isnan(n.alpha_star));
}

TEST_CASE("threshold estimation validates its input") {
  CHECK_THROWS_AS(estimate_threshold({{1.0, 1.0}}, 0.5, CrossDirection::falling),
                  InvalidCurve);
  CHECK_THROWS_AS(
      estimate_threshold({{2.0, 1.0}, {1.0, 0.5}}, 0.5, CrossDirection::falling),
      InvalidCurve);
  CHECK_THROWS_AS(
      estimate_threshold({{1.0, 1.0}, {1.0, 0.5}}, 0.5, CrossDirection::falling),
      InvalidCurve);
  double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(
      estimate_threshold({{1.0, nan}, {2.0, 0.5}}, 0.5, CrossDirection::falling),
      InvalidCurve);
}

TEST_CASE("mean and standard error") {
  MeanSem m = mean_sem({1.0, 2.0, 3.0});
  CHECK(m.mean == doctest::Approx(2.0));
  // sample std = 1, sem = 1/sqrt(3)
  CHECK(m.sem == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(m.n == 3);

  MeanSem one = mean_sem({5.0});
  CHECK(one.mean == 5.0);
  CHECK(one.sem == 0.0);

  MeanSem none = mean_sem({});
  CHECK(none.n == 0);
}
