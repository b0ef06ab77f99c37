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

#include "oraclepriv/audit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oraclepriv/core.hpp"
#include "oraclepriv/dists.hpp"
#include "oraclepriv/learners.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {
namespace {

LabeledDataset RandomBinaryThresholdData(int n, Rng& rng) {
  LabeledDataset d;
  for (int i = 0; i < n; ++i) {
    d.points.emplace_back(MakePoint({rng.Uniform()}),
                          rng.NextU64() & 1 ? 1.0 : 0.0);
  }
  return d;
}

NeighborPair RandomThresholdPair(int n, Rng& rng) {
  LabeledDataset d = RandomBinaryThresholdData(n, rng);
  size_t idx = static_cast<size_t>(rng.UniformInt(0, n - 1));
  return MakeNeighborPair(d, idx, MakePoint({rng.Uniform()}),
                          rng.NextU64() & 1 ? 1.0 : 0.0);
}

TEST(PsiMapTest, AgreementShiftsUp) {
  std::vector<double> xi = {0.5, -1.0, 2.0};
  std::vector<uint8_t> labels = {1, 0, 1};
  std::vector<double> out = PsiMap(xi, labels, labels);
  EXPECT_EQ(out, (std::vector<double>{2.5, 1.0, 4.0}));
}

TEST(PsiMapTest, DisagreementShiftsDown) {
  std::vector<double> xi = {0.5, -1.0, 2.0};
  std::vector<uint8_t> labels = {1, 0, 1};
  std::vector<uint8_t> flipped = {0, 1, 0};
  std::vector<double> out = PsiMap(xi, labels, flipped);
  EXPECT_EQ(out, (std::vector<double>{-1.5, -3.0, 0.0}));
}

TEST(PsiMapTest, ComplementedPatternInverts) {
  Rng rng(12001);
  std::vector<double> xi = {0.3, -0.7, 1.4, 0.0};
  std::vector<uint8_t> labels = {1, 1, 0, 0};
  std::vector<uint8_t> ytilde = {1, 0, 0, 1};
  std::vector<uint8_t> complemented(4);
  for (int i = 0; i < 4; ++i) complemented[i] = 1 - labels[i];
  std::vector<double> forward = PsiMap(xi, labels, ytilde);
  std::vector<double> back = PsiMap(forward, complemented, ytilde);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back[i], xi[i], 1e-15);
}

TEST(PsiCouplingTest, ThresholdInstanceHasNoViolations) {
  Rng rng(12002);
  NeighborPair pair = RandomThresholdPair(5, rng);
  PublicSample pub = DrawPublic(UniformInterval(), 2, rng.Substream(1));
  std::vector<uint8_t> ytilde = {1, 0};
  AuditReport r = PsiCouplingTest(pair, pub, ytilde, Threshold1dClass(), 2000,
                                  1.0, rng.Substream(2));
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.estimate, 0.0);
  EXPECT_EQ(r.trials, 2000);
}

TEST(PsiCouplingTest, HalfspaceInstanceHasNoViolations) {
  Rng rng(12003);
  LabeledDataset d;
  for (int i = 0; i < 6; ++i) {
    d.points.emplace_back(MakePoint({rng.Normal(), rng.Normal()}),
                          rng.NextU64() & 1 ? 1.0 : 0.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 2, MakePoint({rng.Normal(), rng.Normal()}), 1.0);
  std::vector<FeaturePoint> pub_pts = {MakePoint({0.2, -0.4}), MakePoint({-0.7, 0.3}),
                                       MakePoint({0.5, 0.6})};
  PublicSample pub = MakePublicSample(pub_pts);
  std::vector<uint8_t> ytilde = {0, 1, 1};
  AuditReport r = PsiCouplingTest(pair, pub, ytilde, HalfspaceClass(2), 2000,
                                  1.0, rng.Substream(9));
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.estimate, 0.0);
}

TEST(PsiCouplingTest, DegenerateIdenticalPairStillCouples) {
  Rng rng(12004);
  LabeledDataset d = RandomBinaryThresholdData(5, rng);
  NeighborPair pair = MakeNeighborPair(d, 1, d.points[1].first, d.points[1].second);
  PublicSample pub = DrawPublic(UniformInterval(), 2, rng.Substream(1));
  std::vector<uint8_t> ytilde = {0, 0};
  AuditReport r = PsiCouplingTest(pair, pub, ytilde, Threshold1dClass(), 1000,
                                  1.0, rng.Substream(2));
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(LaplaceShiftRatioTest, IdenticalVectorsGiveOne) {
  EXPECT_DOUBLE_EQ(LaplaceShiftRatio({0.4, -0.2}, {0.4, -0.2}, 4.0), 1.0);
}

TEST(LaplaceShiftRatioTest, SingleCoordinateExample) {
  // m = 1, eps = 1, scale = 2: moving 0 -> 2 costs exactly e^{-1}.
  EXPECT_NEAR(LaplaceShiftRatio({0.0}, {2.0}, 2.0), std::exp(-1.0), 1e-15);
}

TEST(LaplaceShiftRatioTest, OversizedShiftRejected) {
  EXPECT_THROW(LaplaceShiftRatio({0.0}, {2.5}, 2.0), std::invalid_argument);
}

TEST(LaplaceShiftRatioTest, PsiShiftedPairsStayWithinBudget) {
  Rng rng(12005);
  const size_t kM = 4;
  const double kEps = 0.5;
  double scale = 2.0 * static_cast<double>(kM) / kEps;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> xi(kM);
    for (auto& x : xi) x = scale * rng.Laplace();
    std::vector<uint8_t> labels(kM), ytilde(kM);
    for (auto& v : labels) v = rng.NextU64() & 1;
    for (auto& v : ytilde) v = rng.NextU64() & 1;
    double ratio = LaplaceShiftRatio(xi, PsiMap(xi, labels, ytilde), scale);
    EXPECT_GE(ratio, std::exp(-kEps) - 1e-12);
    EXPECT_LE(ratio, std::exp(kEps) + 1e-12);
  }
}

TEST(FtrlStabilityCheckTest, IdenticalPairHasZeroDistance) {
  Rng rng(12006);
  LabeledDataset d;
  for (int i = 0; i < 20; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                          rng.Uniform() * 2.0 - 1.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 3, d.points[3].first, d.points[3].second);
  std::vector<FeaturePoint> pub_pts;
  for (int i = 0; i < 6; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    pub_pts.push_back(MakePoint({r * std::cos(a), r * std::sin(a)}));
  }
  PublicSample pub = MakePublicSample(pub_pts);
  AuditReport r = FtrlStabilityCheck(pair, pub, LinearBallClass(2),
                                     LossKind::kAbsolute, 4.0);
  EXPECT_EQ(r.estimate, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(FtrlStabilityCheckTest, SixteenfoldEtaHalvesTheWorstDistance) {
  Rng rng(12007);
  const int kPairs = 60;
  std::vector<double> dist_lo(kPairs), dist_hi(kPairs);
  for (int p = 0; p < kPairs; ++p) {
    Rng prng = rng.Substream(static_cast<uint64_t>(p));
    LabeledDataset d;
    for (int i = 0; i < 40; ++i) {
      double a = prng.Uniform() * 6.283185307179586;
      double r = prng.UniformOpen();
      d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                            prng.Uniform() * 2.0 - 1.0);
    }
    double a = prng.Uniform() * 6.283185307179586;
    NeighborPair pair = MakeNeighborPair(
        d, 0, MakePoint({0.9 * std::cos(a), 0.9 * std::sin(a)}),
        prng.Uniform() < 0.5 ? -1.0 : 1.0);
    std::vector<FeaturePoint> pub_pts;
    for (int i = 0; i < 8; ++i) {
      double b = prng.Uniform() * 6.283185307179586;
      double r = prng.UniformOpen();
      pub_pts.push_back(MakePoint({r * std::cos(b), r * std::sin(b)}));
    }
    PublicSample pub = MakePublicSample(pub_pts);
    dist_lo[p] = FtrlStabilityCheck(pair, pub, LinearBallClass(2),
                                    LossKind::kAbsolute, 2.0)
                     .estimate;
    dist_hi[p] = FtrlStabilityCheck(pair, pub, LinearBallClass(2),
                                    LossKind::kAbsolute, 32.0)
                     .estimate;
  }
  Rng boot(12008);
  int good = 0;
  const int kBatches = 100;
  for (int b = 0; b < kBatches; ++b) {
    double max_lo = 0.0, max_hi = 0.0;
    for (int i = 0; i < kPairs; ++i) {
      int j = static_cast<int>(boot.UniformInt(0, kPairs - 1));
      max_lo = std::max(max_lo, dist_lo[j]);
      max_hi = std::max(max_hi, dist_hi[j]);
    }
    if (max_hi <= 0.5 * max_lo + 1e-6) ++good;
  }
  EXPECT_GE(good, 95);
}

TEST(FtplTailBoundTest, DirectSubstitution) {
  // 8 * 1.2 / (0.5^4 * 0.64 * 1e3) = 0.24.
  EXPECT_NEAR(FtplTailBound(0.5, 1.0, 0.64, 1000.0, 1.2), 0.24, 1e-12);
}

TEST(GaussianComplexityTest, AllAnchorSampleIsCenteredAtZero) {
  PublicSample pub;
  pub.points = {MakeAnchor(1), MakeAnchor(1), MakeAnchor(1), MakeAnchor(1)};
  pub.m_real = 0;
  pub.m_anchor = 4;
  AuditReport r = GaussianComplexityEstimate(Threshold1dClass(), pub, 400, Rng(12009));
  EXPECT_LE(r.ci_low, 0.0);
  EXPECT_GE(r.ci_high, 0.0);
}

// Exhaustive-labeling oracle for thresholds: the supremum over the m+1
// monotone labelings, computed by sorted suffix sums.
double ThresholdSupOracle(const PublicSample& pub, Rng& rng) {
  std::vector<double> xs;
  for (const auto& p : pub.points) xs.push_back(p.coords[0]);
  std::vector<size_t> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<double> xi(xs.size());
  for (auto& x : xi) x = rng.Normal();
  double best = 0.0;  // the all-zero labeling
  double suffix = 0.0;
  for (size_t c = xs.size(); c-- > 0;) {
    suffix += xi[order[c]];
    best = std::max(best, suffix);
  }
  return best / std::sqrt(static_cast<double>(xs.size()));
}

TEST(GaussianComplexityTest, ThresholdMatchesExhaustiveLabelingOracle) {
  Rng rng(12010);
  PublicSample pub = DrawPublic(UniformInterval(), 8, rng.Substream(1));
  AuditReport r = GaussianComplexityEstimate(Threshold1dClass(), pub, 800,
                                             rng.Substream(2));
  std::vector<double> oracle_sups;
  Rng orng = rng.Substream(3);
  for (int t = 0; t < 800; ++t) oracle_sups.push_back(ThresholdSupOracle(pub, orng));
  Interval oracle_ci = MeanCi(oracle_sups);
  EXPECT_LE(r.ci_low, oracle_ci.high);
  EXPECT_GE(r.ci_high, oracle_ci.low);
}

TEST(FtplTailCheckTest, BoundsHoldOnASmallInstance) {
  Rng rng(12011);
  LabeledDataset d;
  for (int i = 0; i < 50; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                          rng.Uniform() * 2.0 - 1.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 0, MakePoint({0.5, -0.5}), 1.0);
  std::vector<FeaturePoint> pub_pts;
  for (int i = 0; i < 6; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    pub_pts.push_back(MakePoint({r * std::cos(a), r * std::sin(a)}));
  }
  PublicSample pub = AnchorAugment(MakePublicSample(pub_pts), 2.0 / 3.0);
  // eta large enough that the rho = 0.3 bound is nontrivial yet passable.
  std::vector<AuditReport> reports =
      FtplTailCheck(pair, pub, LinearBallClass(2), LossKind::kAbsolute, 400.0,
                    {0.3, 0.5}, 1500, rng.Substream(17));
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::kPass) << r.quantity << " freq " << r.estimate
                                         << " bound " << r.bound;
  }
}

TEST(RrspmPrivacyAuditTest, IdenticalPairRatiosAreConsistentWithOne) {
  Rng rng(12012);
  LabeledDataset d = RandomBinaryThresholdData(4, rng);
  NeighborPair pair = MakeNeighborPair(d, 0, d.points[0].first, d.points[0].second);
  PublicSample pub = MakePublicSample({MakePoint({0.3}), MakePoint({0.7})});
  std::vector<uint8_t> ytilde = {1, 0};
  RrspmAuditOptions opt;
  opt.epsilon_audit = 1.0;
  opt.epsilon_mechanism = 1.0;
  opt.trials = 40000;
  std::vector<AuditReport> reports =
      RrspmPrivacyAudit(pair, pub, ytilde, Threshold1dClass(), opt, rng.Substream(3));
  long resolved = 0;
  for (const auto& r : reports) {
    if (r.quantity == "rrspm_probability_total") {
      EXPECT_EQ(r.verdict, Verdict::kPass);
      continue;
    }
    if (r.verdict == Verdict::kInconclusive) continue;
    ++resolved;
    EXPECT_EQ(r.verdict, Verdict::kPass);
    EXPECT_LE(r.ci_low, 1.05);
    EXPECT_GE(r.ci_high, 0.95);
  }
  EXPECT_GE(resolved, 1);
}

TEST(WorstCasePairTest, ReturnsAValidSingleSwapNeighbor) {
  Rng rng(12013);
  LabeledDataset d = RandomBinaryThresholdData(4, rng);
  PublicSample pub = MakePublicSample({MakePoint({0.3}), MakePoint({0.7})});
  std::vector<uint8_t> ytilde = {1, 0};
  std::vector<FeaturePoint> candidates = {MakePoint({0.1}), MakePoint({0.5}),
                                          MakePoint({0.9})};
  NeighborPair pair = WorstCasePair(d, candidates, pub, ytilde, Threshold1dClass(),
                                    4.0, NoiseKind::kLaplaceStd, rng.Substream(1),
                                    4000);
  EXPECT_EQ(pair.D.n(), pair.Dprime.n());
  int diffs = 0;
  for (size_t i = 0; i < pair.D.n(); ++i) {
    if (pair.D.points[i].first.coords != pair.Dprime.points[i].first.coords ||
        pair.D.points[i].second != pair.Dprime.points[i].second) {
      ++diffs;
    }
  }
  EXPECT_LE(diffs, 1);
  for (size_t i = 0; i < pair.D.n(); ++i) {
    if (i != pair.swapped_index) {
      EXPECT_EQ(pair.D.points[i].first.coords, pair.Dprime.points[i].first.coords);
    }
  }
}

TEST(ExcessRiskTest, OptimalPredictorScoresNearZero) {
  Rng rng(12014);
  SmoothTarget target = MakeSmoothTarget(UniformInterval(), {1.0}, 1.0);
  Predictor fstar{Threshold1dClass(), {0.5}};
  LabelModel labels = RealizableLabels(fstar, 0.0);
  AuditReport r = ExcessRiskEstimate(fstar, Threshold1dClass(), target, labels,
                                     LossKind::kZeroOne, 2000, 0.05, rng);
  EXPECT_LE(r.ci_low, 1e-9);
  EXPECT_GE(r.ci_high, -1e-9);
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(ExcessRiskTest, ConstantZeroAgainstNoisyLabels) {
  Rng rng(12015);
  SmoothTarget target = MakeSmoothTarget(UniformInterval(), {1.0}, 1.0);
  Predictor fstar{Threshold1dClass(), {0.5}};
  LabelModel labels = RealizableLabels(fstar, 0.45);
  Predictor constant_zero{Threshold1dClass(), {2.0}};
  AuditReport r = ExcessRiskEstimate(constant_zero, Threshold1dClass(), target,
                                     labels, LossKind::kZeroOne, 20000, 0.5, rng);
  // Constant zero errs on the y = 1 half; the baseline errs about flip_rate.
  EXPECT_NEAR(r.estimate, 0.5 - 0.45, 0.02);
}

TEST(NormComparisonTest, ViolationFrequencyNonIncreasingInSampleSize) {
  NormComparisonOptions opt;
  std::vector<double> freqs;
  for (size_t m : {16u, 64u, 256u}) {
    AuditReport r = NormComparisonCheck(Threshold1dClass(), UniformInterval(), m,
                                        400, opt, Rng(12016 + m));
    EXPECT_EQ(r.verdict, Verdict::kPass) << "m = " << m;
    freqs.push_back(r.estimate);
  }
  EXPECT_GE(freqs[0] + 1e-12, freqs[1]);
  EXPECT_GE(freqs[1] + 1e-12, freqs[2]);
}

TEST(NormComparisonTest, LinearBallOverTheUnitBall) {
  NormComparisonOptions opt;
  AuditReport r = NormComparisonCheck(LinearBallClass(2), UniformBall(2), 32,
                                      200, opt, Rng(12017));
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(ContinuousPrivacyTest, NoiseDominatedLearnerShowsNoLeak) {
  Rng rng(12018);
  LabeledDataset d;
  for (int i = 0; i < 20; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                          rng.Uniform() * 2.0 - 1.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 0, MakePoint({0.8, 0.1}), -1.0);
  std::vector<FeaturePoint> pub_pts = {MakePoint({0.4, 0.2}), MakePoint({-0.3, 0.6}),
                                       MakePoint({0.1, -0.7})};
  PublicSample pub = MakePublicSample(pub_pts);
  Hyperparams hp;
  hp.eta = 2.0;
  hp.gamma = 1000.0;
  auto learner = [&](const LabeledDataset& data, Rng r) {
    return FtrlLearn(data, pub, LinearBallClass(2), LossKind::kAbsolute, hp,
                     NoiseSpec{NoiseKind::kGaussianStd}, r);
  };
  AuditReport r = ContinuousPrivacyAudit(learner, pair, pub, 2, 4000, 1.0,
                                         rng.Substream(5));
  EXPECT_EQ(r.ci_low, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(ContinuousPrivacyTest, IdenticalPairShowsNoLeak) {
  Rng rng(12019);
  LabeledDataset d;
  for (int i = 0; i < 20; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                          rng.Uniform() * 2.0 - 1.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 3, d.points[3].first, d.points[3].second);
  std::vector<FeaturePoint> pub_pts = {MakePoint({0.4, 0.2}), MakePoint({-0.3, 0.6})};
  PublicSample pub = MakePublicSample(pub_pts);
  Hyperparams hp;
  hp.eta = 4.0;
  hp.gamma = 0.3;
  auto learner = [&](const LabeledDataset& data, Rng r) {
    return FtrlLearn(data, pub, LinearBallClass(2), LossKind::kAbsolute, hp,
                     NoiseSpec{NoiseKind::kGaussianStd}, r);
  };
  AuditReport r = ContinuousPrivacyAudit(learner, pair, pub, 2, 4000, 1.0,
                                         rng.Substream(5));
  EXPECT_EQ(r.ci_low, 0.0);
}

TEST(ContinuousPrivacyTest, FtrlStaysWithinItsComputedBudget) {
  Rng rng(12020);
  LabeledDataset d;
  const int kN = 100;
  for (int i = 0; i < kN; ++i) {
    double a = rng.Uniform() * 6.283185307179586;
    double r = rng.UniformOpen();
    d.points.emplace_back(MakePoint({r * std::cos(a), r * std::sin(a)}),
                          rng.Uniform() * 2.0 - 1.0);
  }
  NeighborPair pair = MakeNeighborPair(d, 0, MakePoint({0.9, 0.0}), 1.0);
  std::vector<FeaturePoint> pub_pts = {MakePoint({0.4, 0.2}), MakePoint({-0.3, 0.6}),
                                       MakePoint({0.1, -0.7}), MakePoint({0.5, 0.5})};
  PublicSample pub = MakePublicSample(pub_pts);
  Hyperparams hp;
  hp.eta = 4.0;
  const double kDelta = 0.1;
  double rho = 2.0 / std::sqrt(hp.eta * kN);
  // Solve for gamma so the stability calculus lands on epsilon = 1.
  NoiseSpec spec{NoiseKind::kGaussianStd};
  double lo = 0.1, hi = 10.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (PrivacyFromStability(pub.m_total(), mid, rho, kDelta, spec) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  hp.gamma = hi;
  auto learner = [&](const LabeledDataset& data, Rng r) {
    return FtrlLearn(data, pub, LinearBallClass(2), LossKind::kAbsolute, hp,
                     NoiseSpec{NoiseKind::kGaussianStd}, r);
  };
  AuditReport r = ContinuousPrivacyAudit(learner, pair, pub, 2, 10000, 1.0,
                                         rng.Substream(5));
  EXPECT_EQ(r.verdict, Verdict::kPass) << "eps_hat upper " << r.ci_high;
}

}  // namespace
}  // namespace oraclepriv
