//
// Copyright 2026 The OraclePriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "oraclepriv/learners.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oraclepriv/core.hpp"
#include "oraclepriv/dists.hpp"
#include "oraclepriv/oracle.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {
namespace {

LabeledDataset LinearData(int n, Rng& rng) {
  LabeledDataset d;
  for (int i = 0; i < n; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    FeaturePoint x = MakePoint({r * std::cos(a), r * std::sin(a)});
    double y = std::min(1.0, std::max(-1.0, 0.8 * x.coords[0] - 0.3 * x.coords[1] +
                                                0.05 * rng.Normal()));
    d.points.emplace_back(x, y);
  }
  return d;
}

PublicSample BallPublic(int m, Rng& rng) {
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < m; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    pts.push_back(MakePoint({r * std::cos(a), r * std::sin(a)}));
  }
  return MakePublicSample(std::move(pts));
}

TEST(FtplTest, NoPerturbationMatchesPlainErm) {
  Rng rng(11001);
  LabeledDataset d = LinearData(40, rng);
  PublicSample pub = BallPublic(8, rng);
  Hyperparams hp;
  hp.eta = 0.0;
  hp.gamma = 0.0;
  hp.J = 1;
  LearnerOutput out = FtplLearn(d, pub, LinearBallClass(2), LossKind::kAbsolute,
                                hp, NoiseSpec{NoiseKind::kGaussianStd}, Rng(1));
  ObjectiveSpec obj;
  obj.loss_terms = internal::PrivateLossTerms(d, LossKind::kAbsolute);
  Predictor erm = Erm(LinearBallClass(2), obj).minimizer;
  std::vector<double> a = EvaluateOn(out.fhat, pub);
  std::vector<double> b = EvaluateOn(erm, pub);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-4);
  EXPECT_EQ(out.oracle_calls, 2);
}

TEST(FtplTest, IdenticalFrozenPathsAverageToTheFirstSolution) {
  Rng rng(11002);
  LabeledDataset d = LinearData(30, rng);
  PublicSample pub = BallPublic(6, rng);
  GpPath path = DrawGpPath(pub, Rng(5));
  std::vector<GpPath> once = {path};
  std::vector<GpPath> thrice = {path, path, path};
  Hyperparams hp;
  hp.eta = 1.0;
  hp.gamma = 0.0;
  LearnerOutput a = FtplLearnWithPaths(d, pub, LinearBallClass(2),
                                       LossKind::kAbsolute, hp,
                                       NoiseSpec{NoiseKind::kGaussianStd}, once,
                                       Rng(7));
  LearnerOutput b = FtplLearnWithPaths(d, pub, LinearBallClass(2),
                                       LossKind::kAbsolute, hp,
                                       NoiseSpec{NoiseKind::kGaussianStd}, thrice,
                                       Rng(7));
  for (size_t i = 0; i < a.fbar.params.size(); ++i) {
    EXPECT_NEAR(a.fbar.params[i], b.fbar.params[i], 1e-9);
  }
  EXPECT_EQ(b.oracle_calls, 4);
}

TEST(FtplTest, RejectsNonConvexClass) {
  Rng rng(11003);
  LabeledDataset d;
  d.points.emplace_back(MakePoint({0.5}), 1.0);
  PublicSample pub = MakePublicSample({MakePoint({0.4})});
  Hyperparams hp;
  EXPECT_THROW(FtplLearn(d, pub, Threshold1dClass(), LossKind::kZeroOne, hp,
                         NoiseSpec{NoiseKind::kGaussianStd}, rng),
               SolverError);
}

TEST(FtrlTest, NoPerturbationMatchesPlainErm) {
  Rng rng(11004);
  LabeledDataset d = LinearData(40, rng);
  PublicSample pub = BallPublic(8, rng);
  Hyperparams hp;
  hp.eta = 0.0;
  hp.gamma = 0.0;
  LearnerOutput out = FtrlLearn(d, pub, LinearBallClass(2), LossKind::kAbsolute,
                                hp, NoiseSpec{NoiseKind::kGaussianStd}, Rng(2));
  ObjectiveSpec obj;
  obj.loss_terms = internal::PrivateLossTerms(d, LossKind::kAbsolute);
  Predictor erm = Erm(LinearBallClass(2), obj).minimizer;
  std::vector<double> a = EvaluateOn(out.fhat, pub);
  std::vector<double> b = EvaluateOn(erm, pub);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-4);
  EXPECT_EQ(out.oracle_calls, 2);
}

// Lemma-level stability: ||fbar - fbar'||_m <= 2 / sqrt(eta n) on every one
// of 200 neighboring pairs.
TEST(FtrlTest, StabilityBoundHoldsOnRandomPairs) {
  Rng rng(11005);
  const double kEta = 4.0;
  const int kN = 100;
  double bound = 2.0 / std::sqrt(kEta * kN);
  for (int trial = 0; trial < 200; ++trial) {
    Rng trng = rng.Substream(static_cast<uint64_t>(trial));
    LabeledDataset d = LinearData(kN, trng);
    LabeledDataset dp = d;
    size_t idx = static_cast<size_t>(trng.UniformInt(0, kN - 1));
    double a = trng.Uniform() * 6.283185307179586;
    double r = trng.UniformOpen();
    dp.points[idx] = {MakePoint({r * std::cos(a), r * std::sin(a)}),
                      trng.Uniform() * 2.0 - 1.0};
    PublicSample pub = BallPublic(16, trng);
    auto solve = [&](const LabeledDataset& data) {
      ObjectiveSpec obj;
      obj.loss_terms = internal::PrivateLossTerms(data, LossKind::kAbsolute);
      obj.ridge_term = RidgeTerm{pub, kEta};
      return Erm(LinearBallClass(2), obj);
    };
    ErmResult fa = solve(d);
    ErmResult fb = solve(dp);
    std::vector<double> va = EvaluateOn(fa.minimizer, pub);
    std::vector<double> vb = EvaluateOn(fb.minimizer, pub);
    for (size_t i = 0; i < va.size(); ++i) va[i] -= vb[i];
    EXPECT_LE(EmpiricalNorm(va),
              bound + 2.0 * std::max(fa.tolerance, fb.tolerance))
        << "trial " << trial;
  }
}

TEST(RrspmTest, NoiseScaleExamples) {
  EXPECT_DOUBLE_EQ(RrspmNoiseScale(4, PrivacyBudget{1.0, 0.0},
                                   NoiseKind::kLaplaceStd),
                   8.0);
  double g = RrspmNoiseScale(9, PrivacyBudget{0.5, 0.01}, NoiseKind::kGaussianStd);
  EXPECT_NEAR(g, 2.0 * std::sqrt(9.0 * std::log(100.0)) / 0.5, 1e-12);
  EXPECT_THROW(RrspmNoiseScale(4, PrivacyBudget{1.0, 0.0}, NoiseKind::kGaussianStd),
               std::invalid_argument);
}

TEST(RrspmTest, FrozenZeroNoiseRealizableHasZeroEmpiricalError) {
  Rng rng(11006);
  Predictor fstar{Threshold1dClass(), {0.45}};
  LabeledDataset d;
  for (int i = 0; i < 24; ++i) {
    FeaturePoint x = MakePoint({rng.Uniform()});
    d.points.emplace_back(x, Evaluate(fstar, x));
  }
  PublicSample pub = DrawPublic(UniformInterval(), 6, rng.Substream(1));
  std::vector<uint8_t> ytilde(pub.m_total(), 0);
  std::vector<double> xi(pub.m_total(), 0.0);
  LearnerOutput out = RrspmLearnWithNoise(d, pub, Threshold1dClass(), ytilde, xi, 0);
  for (const auto& [x, y] : d.points) {
    EXPECT_EQ(Evaluate(out.fbar, x), y);
  }
  EXPECT_EQ(out.oracle_calls, 2);
}

TEST(RrspmTest, RequiresBinaryTaskAndUnanchoredSample) {
  Rng rng(11007);
  LabeledDataset d;
  d.points.emplace_back(MakePoint({0.5}), 1.0);
  PublicSample pub = DrawPublic(UniformInterval(), 4, rng);
  PublicSample anchored = AnchorAugment(pub, 0.5);
  EXPECT_THROW(RrspmLearn(d, anchored, Threshold1dClass(), PrivacyBudget{1.0, 0.0},
                          NoiseKind::kLaplaceStd, rng),
               std::invalid_argument);
  LabeledDataset bad;
  bad.points.emplace_back(MakePoint({0.5}), 0.25);
  EXPECT_THROW(RrspmLearn(bad, pub, Threshold1dClass(), PrivacyBudget{1.0, 0.0},
                          NoiseKind::kLaplaceStd, rng),
               std::invalid_argument);
}

TEST(LearnerTest, ReproducibleUnderFixedSeed) {
  Rng data_rng(11008);
  LabeledDataset d = LinearData(30, data_rng);
  PublicSample pub = BallPublic(8, data_rng);
  Hyperparams hp;
  hp.eta = 1.0;
  hp.gamma = 0.1;
  hp.J = 3;
  LearnerOutput a = FtplLearn(d, pub, LinearBallClass(2), LossKind::kAbsolute,
                              hp, NoiseSpec{NoiseKind::kGaussianStd}, Rng(99));
  LearnerOutput b = FtplLearn(d, pub, LinearBallClass(2), LossKind::kAbsolute,
                              hp, NoiseSpec{NoiseKind::kGaussianStd}, Rng(99));
  EXPECT_EQ(a.fhat.params, b.fhat.params);
  EXPECT_EQ(a.fbar_public_values, b.fbar_public_values);
  EXPECT_EQ(a.rng_seed, b.rng_seed);
}

// Averaging concentrates: doubling J never pushes the mean coupled stability
// distance above its one-sided 95% CI at smaller J.
TEST(FtplTest, AveragingConcentratesStability) {
  Rng rng(11009);
  const int kTrials = 60;
  const double kEta = 2.0;
  PublicSample pub = BallPublic(8, rng);
  LabeledDataset d = LinearData(50, rng);
  LabeledDataset dp = d;
  dp.points[7] = {MakePoint({0.4, -0.2}), -0.9};
  auto mean_distance = [&](size_t J, uint64_t seed) {
    double total = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      Rng trng = Rng(seed).Substream(static_cast<uint64_t>(t));
      std::vector<GpPath> paths;
      for (size_t j = 0; j < J; ++j) {
        paths.push_back(DrawGpPath(pub, trng.Substream(j)));
      }
      Hyperparams hp;
      hp.eta = kEta;
      hp.gamma = 0.0;
      LearnerOutput a = FtplLearnWithPaths(d, pub, LinearBallClass(2),
                                           LossKind::kAbsolute, hp,
                                           NoiseSpec{NoiseKind::kGaussianStd},
                                           paths, trng);
      LearnerOutput b = FtplLearnWithPaths(dp, pub, LinearBallClass(2),
                                           LossKind::kAbsolute, hp,
                                           NoiseSpec{NoiseKind::kGaussianStd},
                                           paths, trng);
      std::vector<double> va = a.fbar_public_values;
      for (size_t i = 0; i < va.size(); ++i) va[i] -= b.fbar_public_values[i];
      total += EmpiricalNorm(va);
    }
    return total / kTrials;
  };
  double mean1 = mean_distance(1, 42);
  double mean2 = mean_distance(2, 43);
  double mean4 = mean_distance(4, 44);
  // One-sided slack: distances live in [0, 2], se <= 2 / sqrt(trials).
  double slack = 1.645 * 2.0 / std::sqrt(static_cast<double>(kTrials));
  EXPECT_LE(mean2, mean1 + slack);
  EXPECT_LE(mean4, mean2 + slack);
}

TEST(HyperparamsCalcTest, RrspmPureExample) {
  Hyperparams hp = HyperparamsCalc(TheoremKind::kRrspmPure, 0.5, 0.1, 1.0, 0.0,
                                   1.0, 1.0, 1.0, 1.0);
  // m = (1 + ln 10) / 0.25 = 13.21 -> 14.
  EXPECT_EQ(hp.m, 14u);
  EXPECT_GE(hp.n, 1u);
  EXPECT_EQ(hp.budget.delta, 0.0);
}

TEST(HyperparamsCalcTest, HalvingAlphaNeverShrinksSampleSizes) {
  for (TheoremKind theorem :
       {TheoremKind::kGeneralFull, TheoremKind::kFtrlFullGaussian,
        TheoremKind::kFtrlFullLaplace, TheoremKind::kRrspmPure,
        TheoremKind::kRrspmApprox}) {
    Hyperparams coarse = HyperparamsCalc(theorem, 0.2, 0.05, 1.0, 0.01, 0.8,
                                         1.0, 2.0, 1.0);
    Hyperparams fine = HyperparamsCalc(theorem, 0.1, 0.05, 1.0, 0.01, 0.8,
                                       1.0, 2.0, 1.0);
    EXPECT_GE(fine.m, coarse.m);
    EXPECT_GE(fine.n, coarse.n);
    EXPECT_GE(fine.J, coarse.J);
  }
}

TEST(HyperparamsCalcTest, LaplaceNeedsMoreSamplesThanGaussianAtSmallAlpha) {
  Hyperparams lap = HyperparamsCalc(TheoremKind::kFtrlFullLaplace, 0.02, 0.05,
                                    1.0, 0.0, 1.0, 1.0, 2.0, 1.0);
  Hyperparams gauss = HyperparamsCalc(TheoremKind::kFtrlFullGaussian, 0.02, 0.05,
                                      1.0, 0.01, 1.0, 1.0, 2.0, 1.0);
  EXPECT_GT(lap.n, gauss.n);
}

TEST(HyperparamsCalcTest, GaussianTheoremsRequireDelta) {
  EXPECT_THROW(HyperparamsCalc(TheoremKind::kFtrlFullGaussian, 0.1, 0.05, 1.0,
                               0.0, 1.0, 1.0, 1.0, 1.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace oraclepriv
