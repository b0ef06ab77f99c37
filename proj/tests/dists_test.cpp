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

#include "oraclepriv/dists.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oraclepriv/core.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {
namespace {

TEST(DrawPublicTest, UniformIntervalMean) {
  PublicSample pub = DrawPublic(UniformInterval(), 100000, Rng(10001));
  double mean = 0.0;
  for (const auto& p : pub.points) mean += p.coords[0];
  mean /= static_cast<double>(pub.m_total());
  EXPECT_GE(mean, 0.497);
  EXPECT_LE(mean, 0.503);
  EXPECT_EQ(pub.m_anchor, 0u);
}

TEST(DrawPublicTest, UniformGridAtomFrequencies) {
  PublicSample pub = DrawPublic(UniformGrid(4), 100000, Rng(10002));
  std::vector<long> counts(4, 0);
  for (const auto& p : pub.points) {
    ++counts[static_cast<size_t>(p.coords[0] * 4.0)];
  }
  for (long c : counts) {
    EXPECT_NEAR(static_cast<double>(c) / 100000.0, 0.25, 0.01);
  }
}

TEST(DrawPublicTest, FixedSeedGivesIdenticalSamples) {
  PublicSample a = DrawPublic(UniformInterval(), 50, Rng(10003));
  PublicSample b = DrawPublic(UniformInterval(), 50, Rng(10003));
  for (size_t i = 0; i < a.m_total(); ++i) {
    EXPECT_EQ(a.points[i].coords, b.points[i].coords);
  }
}

TEST(DrawPublicTest, BallSamplesStayInBall) {
  PublicSample pub = DrawPublic(UniformBall(3), 5000, Rng(10004));
  for (const auto& p : pub.points) {
    double n2 = 0.0;
    for (double c : p.coords) n2 += c * c;
    EXPECT_LE(n2, 1.0 + 1e-12);
  }
}

TEST(DensityRatioBoundTest, UnitWeightIsOne) {
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {1.0}, 1.0);
  EXPECT_DOUBLE_EQ(DensityRatioBound(t), 1.0);
}

TEST(DensityRatioBoundTest, TwoPieceExample) {
  // Weight 2 on [0,1/2], 1 on (1/2,1]: normalized max density 2/(3/2) = 4/3.
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {2.0, 1.0}, 0.5);
  EXPECT_NEAR(DensityRatioBound(t), 4.0 / 3.0, 1e-12);
  EXPECT_LE(DensityRatioBound(t), 1.0 / t.sigma);
}

TEST(DensityRatioBoundTest, ThreePieceExample) {
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {3.0, 1.0, 1.0}, 0.5);
  EXPECT_NEAR(DensityRatioBound(t), 1.8, 1e-12);
}

TEST(DensityRatioBoundTest, ViolatingSigmaRejected) {
  EXPECT_THROW(MakeSmoothTarget(UniformInterval(), {10.0, 1.0}, 0.9),
               std::invalid_argument);
}

TEST(DrawPrivateTest, SigmaOneKeepsBaseLaw) {
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {1.0}, 1.0);
  LabelModel labels = RealizableLabels(Predictor{Threshold1dClass(), {0.5}}, 0.0);
  LabeledDataset d = DrawPrivate(t, labels, 100000, Rng(10005));
  double mean = 0.0;
  for (const auto& [x, y] : d.points) mean += x.coords[0];
  mean /= static_cast<double>(d.n());
  EXPECT_NEAR(mean, 0.5, 0.005);
}

TEST(DrawPrivateTest, ReweightedMassMatchesAnalytic) {
  // Density 2 on [0,1/2] and 1 on (1/2,1] normalizes to masses 2/3 and 1/3.
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {2.0, 1.0}, 0.5);
  LabelModel labels = RealizableLabels(Predictor{Threshold1dClass(), {0.5}}, 0.0);
  LabeledDataset d = DrawPrivate(t, labels, 100000, Rng(10006));
  long left = 0;
  for (const auto& [x, y] : d.points) {
    if (x.coords[0] <= 0.5) ++left;
  }
  EXPECT_NEAR(static_cast<double>(left) / static_cast<double>(d.n()), 2.0 / 3.0, 0.01);
}

TEST(DrawPrivateTest, PiecewiseMassesWithinThreeStandardErrors) {
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {3.0, 1.0, 1.0}, 0.5);
  LabelModel labels = RealizableLabels(Predictor{Threshold1dClass(), {0.5}}, 0.0);
  const size_t kN = 100000;
  LabeledDataset d = DrawPrivate(t, labels, kN, Rng(10007));
  std::vector<long> counts(3, 0);
  for (const auto& [x, y] : d.points) {
    size_t piece = std::min<size_t>(2, static_cast<size_t>(x.coords[0] * 3.0));
    ++counts[piece];
  }
  std::vector<double> expected = {3.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0};
  for (size_t i = 0; i < 3; ++i) {
    double p = static_cast<double>(counts[i]) / kN;
    double se = std::sqrt(expected[i] * (1 - expected[i]) / kN);
    EXPECT_NEAR(p, expected[i], 3.0 * se) << "piece " << i;
  }
}

TEST(DrawPrivateTest, NoiselessRealizableLabels) {
  SmoothTarget t = MakeSmoothTarget(UniformInterval(), {1.0}, 1.0);
  Predictor fstar{Threshold1dClass(), {0.5}};
  LabelModel labels = RealizableLabels(fstar, 0.0);
  LabeledDataset d = DrawPrivate(t, labels, 2000, Rng(10008));
  for (const auto& [x, y] : d.points) {
    EXPECT_EQ(y, Evaluate(fstar, x));
  }
}

TEST(DrawPrivateTest, AgnosticLabelsClampToSignedRange) {
  SmoothTarget t = MakeSmoothTarget(UniformBall(2), {1.0}, 1.0);
  LabelModel labels = AgnosticLinearLabels({0.9, 0.9}, 0.5);
  LabeledDataset d = DrawPrivate(t, labels, 5000, Rng(10009));
  for (const auto& [x, y] : d.points) {
    EXPECT_GE(y, -1.0);
    EXPECT_LE(y, 1.0);
  }
}

TEST(MuNormTest, ThresholdClosedForms) {
  Predictor f{Threshold1dClass(), {0.25}};
  EXPECT_NEAR(MuNormSquared(f, UniformInterval()), 0.75, 1e-12);
  // Grid(4) atoms 0.125, 0.375, 0.625, 0.875: three at or above 0.25.
  EXPECT_NEAR(MuNormSquared(f, UniformGrid(4)), 0.75, 1e-12);
  Predictor low{Threshold1dClass(), {-1.0}};
  EXPECT_DOUBLE_EQ(MuNormSquared(low, UniformInterval()), 1.0);
}

TEST(MuNormTest, LinearBallClosedFormMatchesMonteCarlo) {
  Predictor f{LinearBallClass(3), {0.3, -0.5, 0.2}};
  double exact = MuNormSquared(f, UniformBall(3));
  Rng rng(10010);
  double mc = 0.0;
  const int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    FeaturePoint x = DrawFrom(UniformBall(3), rng);
    double v = Evaluate(f, x);
    mc += v * v;
  }
  mc /= kDraws;
  EXPECT_NEAR(mc, exact, 0.02 * exact + 1e-4);
}

}  // namespace
}  // namespace oraclepriv
