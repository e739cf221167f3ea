#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "botdetect/calibration.hpp"
#include "botdetect/errors.hpp"

using namespace botdetect;

namespace {

FeatureMatrix dense_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return FeatureMatrix(std::move(m));
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("scores at the smoothed-target log-odds are reproduced exactly") {
  // With s = logit(target), the maximum-likelihood sigmoid is a=-1, b=0 and
  // calibrated outputs equal the targets.
  const std::size_t n_pos = 12, n_neg = 8;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);
  std::vector<double> scores;
  Labels labels;
  for (std::size_t i = 0; i < n_pos; ++i) {
    scores.push_back(std::log(t_pos / (1 - t_pos)));
    labels.push_back(1);
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    scores.push_back(std::log(t_neg / (1 - t_neg)));
    labels.push_back(0);
  }
  const auto platt = platt_fit(scores, labels);
  CHECK(platt.apply(scores.front()) == doctest::Approx(t_pos).epsilon(1e-6));
  CHECK(platt.apply(scores.back()) == doctest::Approx(t_neg).epsilon(1e-6));
}

TEST_CASE("calibrated map is monotone in the raw score") {
  std::vector<double> scores;
  Labels labels;
  for (int i = 0; i < 20; ++i) {
    scores.push_back(i < 10 ? 0.9 : 0.1);
    labels.push_back(i < 10 ? 1 : 0);
  }
  const auto platt = platt_fit(scores, labels);
  CHECK(platt.a < 0.0);
  CHECK(platt.apply(0.9) > platt.apply(0.1));
}

TEST_CASE("platt_fit input validation") {
  CHECK_THROWS_AS(platt_fit({0.5, 0.6}, {1, 1}), Error);          // single class
  CHECK_THROWS_AS(platt_fit({0.5}, {1, 0}), Error);               // length mismatch
  CHECK_THROWS_AS(platt_fit({}, {}), Error);                      // empty
  CHECK_THROWS_AS(platt_fit({0.5, std::nan("")}, {1, 0}), Error); // non-finite
}

TEST_CASE("mean absolute calibration error stays small on logistic data") {
  // Labels drawn from P(bot|s) = sigmoid(s); the fitted map should recover
  // that curve within 0.05 mean absolute error.
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> score_dist(0.0, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = 2000;
  std::vector<double> scores(n);
  Labels labels(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = score_dist(rng);
    const double p = 1.0 / (1.0 + std::exp(-scores[i]));
    labels[i] = coin(rng) < p ? 1 : 0;
  }
  const auto platt = platt_fit(scores, labels);
  double mace = 0;
  for (int i = 0; i < n; ++i) {
    const double truth = 1.0 / (1.0 + std::exp(-scores[i]));
    mace += std::abs(platt.apply(scores[i]) - truth);
  }
  mace /= n;
  CHECK(mace <= 0.05);
  CHECK(platt.a < 0.0);  // strictly monotone increasing map
}

TEST_CASE("affine raw-score changes leave the calibrated ranking intact") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores;
  Labels labels;
  for (int i = 0; i < 60; ++i) {
    const int y = static_cast<int>(rng() % 2);
    scores.push_back(0.3 * u(rng) + (y == 1 ? 0.5 : 0.1));
    labels.push_back(y);
  }
  const auto base = platt_fit(scores, labels);
  std::vector<double> shifted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) shifted[i] = 3.5 * scores[i] - 0.7;
  const auto moved = platt_fit(shifted, labels);

  std::vector<std::size_t> order_a(scores.size()), order_b(scores.size());
  std::iota(order_a.begin(), order_a.end(), 0);
  order_b = order_a;
  std::stable_sort(order_a.begin(), order_a.end(), [&](std::size_t i, std::size_t j) {
    return base.apply(scores[i]) < base.apply(scores[j]);
  });
  std::stable_sort(order_b.begin(), order_b.end(), [&](std::size_t i, std::size_t j) {
    return moved.apply(shifted[i]) < moved.apply(shifted[j]);
  });
  CHECK(order_a == order_b);
}

TEST_CASE("calibrated_fit with one fold degenerates to fit-on-all") {
  const auto X = dense_matrix({{0}, {1}, {2}, {10}, {11}, {12}});
  const Labels y = {0, 0, 0, 1, 1, 1};
  LearnerParams params = default_params(LearnerKind::decision_tree);
  params.min_samples_leaf = 1;
  const auto fc = calibrated_fit(LearnerKind::decision_tree, X, y, params, 1);
  CHECK(fc.members.size() == 1);
  const auto p = calibrated_predict(fc, vec1(11));
  CHECK(p.first > p.second);
}

TEST_CASE("member count equals the fold count") {
  std::vector<std::vector<double>> rows;
  Labels y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({i < 20 ? 0.0 + i % 5 : 10.0 + i % 5});
    y.push_back(i < 20 ? 0 : 1);
  }
  LearnerParams params = default_params(LearnerKind::decision_tree);
  params.min_samples_leaf = 1;
  const auto fc =
      calibrated_fit(LearnerKind::decision_tree, dense_matrix(rows), y, params, 5);
  CHECK(fc.members.size() == 5);
}

TEST_CASE("too few samples for the fold count") {
  const auto X = dense_matrix({{0}, {1}, {2}});
  CHECK_THROWS_AS(calibrated_fit(LearnerKind::decision_tree, X, {0, 1, 0},
                                 default_params(LearnerKind::decision_tree), 5),
                  Error);
}

TEST_CASE("held-out bots score above one half on a separable fixture") {
  std::mt19937_64 rng(15);
  std::vector<std::vector<double>> rows;
  Labels y;
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    rows.push_back({(label == 1 ? 20.0 : 0.0) + static_cast<double>(rng() % 5)});
    y.push_back(label);
  }
  LearnerParams params = default_params(LearnerKind::decision_tree);
  params.min_samples_leaf = 1;
  const auto fc =
      calibrated_fit(LearnerKind::decision_tree, dense_matrix(rows), y, params, 5);

  for (int i = 0; i < 30; ++i) {
    const double x = 20.0 + static_cast<double>(rng() % 5);  // unseen bot-like
    CHECK(calibrated_predict(fc, vec1(x)).first > 0.5);
  }
}

TEST_CASE("calibrated outputs are a mean over members that sums to one") {
  // Two handcrafted members with calibrated outputs 0.6 and 0.8: sigmoids
  // solved so a single (1,1) leaf maps to the target exactly.
  auto make_member = [](double target) {
    CalibratedMember member;
    member.learner.kind = LearnerKind::decision_tree;
    member.learner.feature_count = 1;
    Tree tree;
    TreeNode leaf;
    leaf.n_bot = 1;
    leaf.n_human = 1;  // raw score 0.5
    tree.nodes.push_back(leaf);
    member.learner.trees.push_back(tree);
    member.platt.a = -1.0;
    member.platt.b = 0.5 + std::log((1.0 - target) / target);
    return member;
  };
  FieldClassifier fc;
  fc.field = FieldKind::username;
  fc.kind = LearnerKind::decision_tree;
  fc.feature_count = 1;
  fc.members.push_back(make_member(0.6));
  fc.members.push_back(make_member(0.8));

  const auto p = calibrated_predict(fc, vec1(0.0));
  CHECK(p.first == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(p.second == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p.first + p.second == doctest::Approx(1.0).epsilon(1e-12));

  // Single member passes its calibrated output through.
  FieldClassifier solo;
  solo.feature_count = 1;
  solo.members.push_back(make_member(0.6));
  CHECK(calibrated_predict(solo, vec1(0.0)).first == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("calibrated_predict validates dimensions") {
  const auto X = dense_matrix({{0}, {1}, {10}, {11}});
  const Labels y = {0, 0, 1, 1};
  LearnerParams params = default_params(LearnerKind::decision_tree);
  params.min_samples_leaf = 1;
  const auto fc = calibrated_fit(LearnerKind::decision_tree, X, y, params, 1);
  Eigen::VectorXd wrong(2);
  wrong << 1, 2;
  CHECK_THROWS_AS(calibrated_predict(fc, wrong), Error);
}
