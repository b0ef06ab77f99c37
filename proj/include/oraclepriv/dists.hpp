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

#ifndef ORACLEPRIV_DISTS_H_
#define ORACLEPRIV_DISTS_H_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "oraclepriv/core.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {

// The public base measure mu.
//  uniform_interval: Uniform[0,1], dim 1.
//  uniform_grid(k):  k equally spaced atoms (i+1/2)/k on [0,1], dim 1.
//  uniform_ball(d):  uniform on the Euclidean unit ball in R^d.
struct BaseDist {
  enum class Kind { kUniformInterval, kUniformGrid, kUniformBall };
  Kind kind = Kind::kUniformInterval;
  int grid_k = 0;
  int dim = 1;
};

inline BaseDist UniformInterval() { return BaseDist{BaseDist::Kind::kUniformInterval, 0, 1}; }
inline BaseDist UniformGrid(int k) {
  if (k < 1) throw std::invalid_argument("grid needs at least one atom");
  return BaseDist{BaseDist::Kind::kUniformGrid, k, 1};
}
inline BaseDist UniformBall(int dim) {
  if (dim < 1) throw std::invalid_argument("ball dim must be >= 1");
  return BaseDist{BaseDist::Kind::kUniformBall, 0, dim};
}

inline FeaturePoint DrawFrom(const BaseDist& base, Rng& rng) {
  switch (base.kind) {
    case BaseDist::Kind::kUniformInterval:
      return MakePoint({rng.Uniform()});
    case BaseDist::Kind::kUniformGrid: {
      int64_t i = rng.UniformInt(0, base.grid_k - 1);
      return MakePoint({(static_cast<double>(i) + 0.5) / base.grid_k});
    }
    case BaseDist::Kind::kUniformBall: {
      std::vector<double> x(static_cast<size_t>(base.dim));
      double norm2 = 0.0;
      for (auto& c : x) {
        c = rng.Normal();
        norm2 += c * c;
      }
      double norm = std::sqrt(norm2);
      double r = std::pow(rng.UniformOpen(), 1.0 / base.dim);
      if (norm > 0.0) {
        for (auto& c : x) c *= r / norm;
      }
      return MakePoint(std::move(x));
    }
  }
  return MakePoint({0.0});
}

// A sigma-smooth target marginal nu_x: the base measure reweighted by a
// piecewise-constant function.  Pieces are equal-width cells of the natural
// coordinate of the base (position for interval/grid, radius for the ball),
// so the density ratio against mu is exactly computable.
struct SmoothTarget {
  BaseDist base;
  std::vector<double> weights;  // one per piece, all > 0
  double sigma = 1.0;
};

namespace internal {

inline size_t PieceIndex(const SmoothTarget& t, const FeaturePoint& x) {
  size_t k = t.weights.size();
  double coord = 0.0;
  if (t.base.kind == BaseDist::Kind::kUniformBall) {
    double s = 0.0;
    for (double c : x.coords) s += c * c;
    coord = std::sqrt(s);
  } else {
    coord = x.coords[0];
  }
  double clamped = std::min(std::max(coord, 0.0), 1.0);
  size_t i = static_cast<size_t>(clamped * static_cast<double>(k));
  return i >= k ? k - 1 : i;
}

// mu-mass of each piece.
inline std::vector<double> PieceMasses(const SmoothTarget& t) {
  size_t k = t.weights.size();
  std::vector<double> mass(k, 0.0);
  switch (t.base.kind) {
    case BaseDist::Kind::kUniformInterval:
      for (size_t i = 0; i < k; ++i) mass[i] = 1.0 / static_cast<double>(k);
      break;
    case BaseDist::Kind::kUniformGrid: {
      for (int a = 0; a < t.base.grid_k; ++a) {
        FeaturePoint p = MakePoint({(a + 0.5) / t.base.grid_k});
        mass[PieceIndex(t, p)] += 1.0 / t.base.grid_k;
      }
      break;
    }
    case BaseDist::Kind::kUniformBall: {
      double prev = 0.0;
      for (size_t i = 0; i < k; ++i) {
        double r = static_cast<double>(i + 1) / static_cast<double>(k);
        double cur = std::pow(r, t.base.dim);
        mass[i] = cur - prev;
        prev = cur;
      }
      break;
    }
  }
  return mass;
}

inline double NormalizingConstant(const SmoothTarget& t) {
  std::vector<double> mass = PieceMasses(t);
  double z = 0.0;
  for (size_t i = 0; i < t.weights.size(); ++i) z += t.weights[i] * mass[i];
  return z;
}

}  // namespace internal

// Exact sup of d nu_x / d mu over the pieces.
inline double DensityRatioBound(const SmoothTarget& target) {
  double z = internal::NormalizingConstant(target);
  double mx = 0.0;
  for (double w : target.weights) mx = std::max(mx, w);
  return mx / z;
}

inline SmoothTarget MakeSmoothTarget(BaseDist base, std::vector<double> weights,
                                     double sigma) {
  if (weights.empty()) throw std::invalid_argument("need at least one weight piece");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be positive and finite");
    }
  }
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("sigma must lie in (0, 1]");
  }
  SmoothTarget t{std::move(base), std::move(weights), sigma};
  if (DensityRatioBound(t) > 1.0 / sigma + 1e-12) {
    throw std::invalid_argument("weight pieces violate the declared sigma");
  }
  return t;
}

// Label models.
//  realizable:      y = f*(x), flipped with probability flip_rate (binary).
//  agnostic_linear: y = clamp(<w*, x> + N(0, noise_sd), -1, 1).
struct LabelModel {
  enum class Kind { kRealizable, kAgnosticLinear };
  Kind kind = Kind::kRealizable;
  Predictor fstar;             // realizable
  double flip_rate = 0.0;      // realizable, in [0, 0.5)
  std::vector<double> wstar;   // agnostic_linear
  double noise_sd = 0.0;       // agnostic_linear
};

inline LabelModel RealizableLabels(Predictor fstar, double flip_rate) {
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) {
    throw std::invalid_argument("flip_rate must lie in [0, 0.5)");
  }
  LabelModel m;
  m.kind = LabelModel::Kind::kRealizable;
  m.fstar = std::move(fstar);
  m.flip_rate = flip_rate;
  return m;
}

inline LabelModel AgnosticLinearLabels(std::vector<double> wstar, double noise_sd) {
  LabelModel m;
  m.kind = LabelModel::Kind::kAgnosticLinear;
  m.wstar = std::move(wstar);
  m.noise_sd = noise_sd;
  return m;
}

inline double DrawLabel(const LabelModel& model, const FeaturePoint& x, Rng& rng) {
  if (model.kind == LabelModel::Kind::kRealizable) {
    double y = Evaluate(model.fstar, x);
    if (model.flip_rate > 0.0 && rng.Uniform() < model.flip_rate) y = 1.0 - y;
    return y;
  }
  double s = 0.0;
  for (size_t i = 0; i < model.wstar.size(); ++i) s += model.wstar[i] * x.coords[i];
  s += model.noise_sd * rng.Normal();
  return std::min(1.0, std::max(-1.0, s));
}

// m i.i.d. draws from mu; no anchors.
inline PublicSample DrawPublic(const BaseDist& base, size_t m, Rng rng) {
  if (m == 0) throw std::invalid_argument("public sample must be nonempty");
  std::vector<FeaturePoint> pts;
  pts.reserve(m);
  for (size_t i = 0; i < m; ++i) pts.push_back(DrawFrom(base, rng));
  return MakePublicSample(std::move(pts));
}

// n labeled examples with features from nu_x by rejection sampling against
// mu (acceptance proportional to the weight piece, so the acceptance rate is
// at least sigma) and labels from the model.
inline LabeledDataset DrawPrivate(const SmoothTarget& target,
                                  const LabelModel& labels, size_t n, Rng rng) {
  if (n == 0) throw std::invalid_argument("private sample must be nonempty");
  double wmax = 0.0;
  for (double w : target.weights) wmax = std::max(wmax, w);
  LabeledDataset out;
  out.points.reserve(n);
  while (out.points.size() < n) {
    FeaturePoint x = DrawFrom(target.base, rng);
    double w = target.weights[internal::PieceIndex(target, x)];
    if (rng.Uniform() * wmax <= w) {
      double y = DrawLabel(labels, x, rng);
      out.points.emplace_back(std::move(x), y);
    }
  }
  return out;
}

// Closed-form ||f||_mu^2 for the (class, base) pairs the audits support.
inline double MuNormSquared(const Predictor& f, const BaseDist& base) {
  if (f.cls.kind == ClassKind::kThreshold1d) {
    double t = f.params[0];
    if (base.kind == BaseDist::Kind::kUniformInterval) {
      return std::min(1.0, std::max(0.0, 1.0 - t));
    }
    if (base.kind == BaseDist::Kind::kUniformGrid) {
      int count = 0;
      for (int a = 0; a < base.grid_k; ++a) {
        if ((a + 0.5) / base.grid_k >= t) ++count;
      }
      return static_cast<double>(count) / base.grid_k;
    }
  }
  if (f.cls.kind == ClassKind::kLinearBall &&
      base.kind == BaseDist::Kind::kUniformBall) {
    // E[<w,X>^2] over the uniform ball = ||w||^2 / (d + 2).
    double n2 = 0.0;
    for (double w : f.params) n2 += w * w;
    return n2 / (base.dim + 2.0);
  }
  throw std::invalid_argument("no closed-form mu-norm for this class/base pair");
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_DISTS_H_
