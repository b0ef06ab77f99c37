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

#ifndef ORACLEPRIV_CORE_H_
#define ORACLEPRIV_CORE_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oraclepriv/rng.hpp"

namespace oraclepriv {

// A point of the feature space.  Anchor points are distinguished inputs on
// which every predictor of the active class evaluates to exactly 1; they are
// a flag rather than a coordinate so every class satisfies the contract.
struct FeaturePoint {
  std::vector<double> coords;
  bool is_anchor = false;
};

inline FeaturePoint MakePoint(std::vector<double> coords) {
  return FeaturePoint{std::move(coords), false};
}
inline FeaturePoint MakeAnchor(int dim) {
  return FeaturePoint{std::vector<double>(static_cast<size_t>(dim), 0.0), true};
}

// The private sample D: n labeled examples.  Labels live in [-1,1] for
// regression tasks and {0,1} for classification; anchor points are not
// allowed among private data.
struct LabeledDataset {
  std::vector<std::pair<FeaturePoint, double>> points;
  size_t n() const { return points.size(); }
};

// The public unlabeled sample; anchor copies, when present, appear last.
struct PublicSample {
  std::vector<FeaturePoint> points;
  size_t m_real = 0;
  size_t m_anchor = 0;
  size_t m_total() const { return points.size(); }
};

inline PublicSample MakePublicSample(std::vector<FeaturePoint> pts) {
  PublicSample pub;
  pub.m_real = pts.size();
  pub.m_anchor = 0;
  pub.points = std::move(pts);
  return pub;
}

enum class ClassKind { kThreshold1d, kHalfspace, kLinearBall };
enum class OutputRange { kBinary, kSignedUnit };

// Description of the active function class.
//  threshold1d: x -> 1{x >= t},           dim = 1, binary.
//  halfspace:   x -> 1{<w,x> + b >= 0},   dim <= 3, binary.
//  linear_ball: x -> <w,x>, ||w|| <= 1,   inputs in the unit ball, signed.
struct FunctionClassDesc {
  ClassKind kind = ClassKind::kThreshold1d;
  int dim = 1;
  OutputRange output_range = OutputRange::kBinary;
};

inline FunctionClassDesc Threshold1dClass() {
  return FunctionClassDesc{ClassKind::kThreshold1d, 1, OutputRange::kBinary};
}
inline FunctionClassDesc HalfspaceClass(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("halfspace dim must be in [1,3]");
  return FunctionClassDesc{ClassKind::kHalfspace, dim, OutputRange::kBinary};
}
inline FunctionClassDesc LinearBallClass(int dim) {
  if (dim < 1) throw std::invalid_argument("linear_ball dim must be >= 1");
  return FunctionClassDesc{ClassKind::kLinearBall, dim, OutputRange::kSignedUnit};
}

// A parameterized member of the class.
//  threshold1d: params = {t}
//  halfspace:   params = {w_1..w_d, b}
//  linear_ball: params = {w_1..w_d} with ||w||_2 <= 1
struct Predictor {
  FunctionClassDesc cls;
  std::vector<double> params;
};

inline size_t ExpectedParamCount(const FunctionClassDesc& cls) {
  switch (cls.kind) {
    case ClassKind::kThreshold1d: return 1;
    case ClassKind::kHalfspace: return static_cast<size_t>(cls.dim) + 1;
    case ClassKind::kLinearBall: return static_cast<size_t>(cls.dim);
  }
  return 0;
}

// Evaluates f on a single point.  Anchors evaluate to 1 for every member.
inline double Evaluate(const Predictor& f, const FeaturePoint& x) {
  if (x.is_anchor) return 1.0;
  if (x.coords.size() != static_cast<size_t>(f.cls.dim)) {
    throw std::invalid_argument("point dimension does not match class dim");
  }
  switch (f.cls.kind) {
    case ClassKind::kThreshold1d:
      return x.coords[0] >= f.params[0] ? 1.0 : 0.0;
    case ClassKind::kHalfspace: {
      double s = f.params[static_cast<size_t>(f.cls.dim)];
      for (int i = 0; i < f.cls.dim; ++i) s += f.params[static_cast<size_t>(i)] * x.coords[static_cast<size_t>(i)];
      return s >= 0.0 ? 1.0 : 0.0;
    }
    case ClassKind::kLinearBall: {
      double s = 0.0;
      for (int i = 0; i < f.cls.dim; ++i) s += f.params[static_cast<size_t>(i)] * x.coords[static_cast<size_t>(i)];
      return s;
    }
  }
  return 0.0;
}

inline std::vector<double> EvaluateOn(const Predictor& f,
                                      const std::vector<FeaturePoint>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(Evaluate(f, p));
  return out;
}

inline std::vector<double> EvaluateOn(const Predictor& f, const PublicSample& pub) {
  return EvaluateOn(f, pub.points);
}

// Empirical L2 norm on m points: sqrt(m^{-1} sum v_i^2).  Kahan-compensated
// single pass.
inline double EmpiricalNorm(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty public sample");
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    double term = v * v - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return std::sqrt(sum / static_cast<double>(values.size()));
}

// One sample path of the canonical Gaussian process: m_total independent
// standard normal draws against a fixed public sample.
struct GpPath {
  std::vector<double> xi;
  uint64_t seed = 0;
};

inline GpPath DrawGpPath(const PublicSample& pub, Rng rng) {
  GpPath path;
  path.seed = rng.key();
  path.xi.resize(pub.m_total());
  for (auto& x : path.xi) x = rng.Normal();
  return path;
}

// omega_m(f) = m^{-1/2} sum_i xi_i f(Z_i), applied to precomputed values.
inline double GpFunctional(const GpPath& path, const std::vector<double>& values) {
  if (path.xi.size() != values.size()) {
    throw std::invalid_argument("gp path length does not match value count");
  }
  double sum = 0.0, comp = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double term = path.xi[i] * values[i] - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return sum / std::sqrt(static_cast<double>(values.size()));
}

// Appends anchor copies until m_anchor / m_total reaches `fraction` (rounded
// up).  fraction = 2/3 reproduces the 1:2 anchor reweighting that floors
// inf_f ||f||_m at sqrt(fraction).
inline PublicSample AnchorAugment(const PublicSample& pub, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("anchor fraction must lie in [0, 1)");
  }
  PublicSample out = pub;
  if (fraction == 0.0 || pub.m_total() == 0) return out;
  double t0 = static_cast<double>(pub.m_total());
  double a0 = static_cast<double>(pub.m_anchor);
  double need = (fraction * t0 - a0) / (1.0 - fraction);
  long k = static_cast<long>(std::ceil(need - 1e-12));
  if (k <= 0) return out;
  int dim = static_cast<int>(pub.points.front().coords.size());
  for (long i = 0; i < k; ++i) out.points.push_back(MakeAnchor(dim));
  out.m_anchor = pub.m_anchor + static_cast<size_t>(k);
  return out;
}

// Loss kinds.  zero_one applies to binary tasks; the other three are convex
// in the prediction with declared Lipschitz constants 1, 2, 1 on [-1,1].
enum class LossKind { kZeroOne, kAbsolute, kSquared, kHingeClipped };

inline bool LossIsConvex(LossKind kind) { return kind != LossKind::kZeroOne; }

inline double LossLipschitz(LossKind kind) {
  switch (kind) {
    case LossKind::kZeroOne: return 1.0;
    case LossKind::kAbsolute: return 1.0;
    case LossKind::kSquared: return 2.0;
    case LossKind::kHingeClipped: return 1.0;
  }
  return 1.0;
}

inline double LossValue(LossKind kind, double pred, double label) {
  switch (kind) {
    case LossKind::kZeroOne:
      return std::fabs(pred - label) > 0.5 ? 1.0 : 0.0;
    case LossKind::kAbsolute:
      return std::fabs(pred - label);
    case LossKind::kSquared:
      return (pred - label) * (pred - label);
    case LossKind::kHingeClipped: {
      double h = (1.0 - label * pred) / 2.0;
      if (h < 0.0) return 0.0;
      if (h > 1.0) return 1.0;
      return h;
    }
  }
  return 0.0;
}

// Subgradient of the loss in the prediction argument.
inline double LossSubgradient(LossKind kind, double pred, double label) {
  switch (kind) {
    case LossKind::kZeroOne:
      throw std::invalid_argument("zero_one loss has no subgradient");
    case LossKind::kAbsolute:
      return pred > label ? 1.0 : (pred < label ? -1.0 : 0.0);
    case LossKind::kSquared:
      return 2.0 * (pred - label);
    case LossKind::kHingeClipped: {
      double h = (1.0 - label * pred) / 2.0;
      if (h <= 0.0 || h >= 1.0) return 0.0;
      return -label / 2.0;
    }
  }
  return 0.0;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_CORE_H_
