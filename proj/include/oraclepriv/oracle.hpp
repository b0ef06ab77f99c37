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

#ifndef ORACLEPRIV_ORACLE_H_
#define ORACLEPRIV_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oraclepriv/core.hpp"

namespace oraclepriv {

// Thrown when an ERM instance exceeds the enumerable scale or violates a
// solver precondition.  The CLI maps it to exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// One weighted loss term.  Weights may be negative (Laplace-weighted public
// examples); negative weights are rejected for the convex solver.
struct LossTerm {
  FeaturePoint point;
  double label = 0.0;
  double weight = 1.0;
  LossKind loss = LossKind::kZeroOne;
};

struct GpTerm {
  GpPath path;
  PublicSample pub;
  double eta = 0.0;
};

struct RidgeTerm {
  PublicSample pub;
  double eta = 0.0;
};

struct DistanceTerm {
  PublicSample pub;
  std::vector<double> target;
};

// Composite objective over the function class: weighted losses, a Gaussian
// process linear term eta * omega_m(f), a ridge term eta * ||f||_m^2, and a
// squared distance ||f - target||_m^2.  The single currency the oracle
// consumes.
struct ObjectiveSpec {
  std::vector<LossTerm> loss_terms;
  std::optional<GpTerm> gp_term;
  std::optional<RidgeTerm> ridge_term;
  std::optional<DistanceTerm> distance_term;
};

struct ErmResult {
  Predictor minimizer;
  double objective_value = 0.0;
  double tolerance = 0.0;  // 0 for exact solvers
  int oracle_calls = 1;
};

namespace internal {

// ---------------------------------------------------------------------------
// Dichotomy enumeration for threshold1d and halfspace classes.
//
// Halfspaces with bias over R^d are lifted to homogeneous halfspaces over
// R^{d+1} via z = (x, 1).  The realizable labelings are exactly the sign
// patterns of the open cells of the central hyperplane arrangement
// { v : <v, z_i> = 0 }: since every lifted point has positive last
// coordinate, any labeling with boundary points resolved to 1 by the >= 0
// convention is also realized by a nearby open cell.  Cells are enumerated
// by their extreme rays (null vectors of (D-1)-subsets) plus a recursive
// sweep of the sub-arrangement orthogonal to each ray.
// ---------------------------------------------------------------------------

struct Dichotomy {
  Predictor witness;
  std::vector<uint8_t> labels;  // over the non-anchor points, in input order
};

inline double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double Norm2(const std::vector<double>& a) { return std::sqrt(Dot(a, a)); }

// Null vector of D-1 row vectors in R^D via cofactor expansion, D in {2,3,4}.
// Returns empty when the rows are rank deficient.
inline std::vector<double> NullVector(const std::vector<std::vector<double>>& rows,
                                      size_t D) {
  auto det2 = [](double a, double b, double c, double d) { return a * d - b * c; };
  std::vector<double> v;
  if (D == 2) {
    const auto& a = rows[0];
    v = {-a[1], a[0]};
  } else if (D == 3) {
    const auto& a = rows[0];
    const auto& b = rows[1];
    v = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
         a[0] * b[1] - a[1] * b[0]};
  } else if (D == 4) {
    const auto& a = rows[0];
    const auto& b = rows[1];
    const auto& c = rows[2];
    v.resize(4);
    for (size_t k = 0; k < 4; ++k) {
      // 3x3 minor skipping column k, with alternating sign.
      double m[3][3];
      size_t cc = 0;
      for (size_t j = 0; j < 4; ++j) {
        if (j == k) continue;
        m[0][cc] = a[j];
        m[1][cc] = b[j];
        m[2][cc] = c[j];
        ++cc;
      }
      double det = m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
                   m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
                   m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
      v[k] = (k % 2 == 0 ? 1.0 : -1.0) * det;
    }
  }
  double scale = 0.0;
  for (const auto& r : rows) scale = std::max(scale, Norm2(r));
  if (scale == 0.0) scale = 1.0;
  double p = 1.0;
  for (size_t i = 0; i + 1 < D; ++i) p *= scale;
  if (Norm2(v) <= 1e-11 * p) return {};
  return v;
}

// Representative directions of every open cell of the central arrangement
// {z^perp : z in zs} inside R^dim, dim <= 4.  `zs` must span R^dim.
inline void ArrangementCellReps(const std::vector<std::vector<double>>& zs,
                                size_t dim, std::vector<std::vector<double>>* out,
                                size_t max_reps) {
  auto guard = [&]() {
    if (out->size() > max_reps) {
      throw SolverError("instance too large for halfspace enumeration");
    }
  };
  if (dim == 1) {
    out->push_back({1.0});
    out->push_back({-1.0});
    guard();
    return;
  }
  if (dim == 2) {
    // Cells are angular sectors between the lines z^perp.
    std::vector<double> angles;
    for (const auto& z : zs) {
      if (Norm2(z) <= 1e-13) continue;
      double a = std::atan2(z[0], -z[1]);  // direction of the line z^perp
      angles.push_back(a);
      angles.push_back(a > 0 ? a - 3.14159265358979323846 : a + 3.14159265358979323846);
    }
    if (angles.empty()) {
      out->push_back({1.0, 0.0});
      return;
    }
    std::sort(angles.begin(), angles.end());
    size_t k = angles.size();
    for (size_t i = 0; i < k; ++i) {
      double a0 = angles[i];
      double a1 = (i + 1 < k) ? angles[i + 1] : angles[0] + 2.0 * 3.14159265358979323846;
      if (a1 - a0 <= 1e-13) continue;
      double mid = 0.5 * (a0 + a1);
      out->push_back({std::cos(mid), std::sin(mid)});
    }
    guard();
    return;
  }
  // dim >= 3: every open cell is a pointed cone whose closure contains an
  // extreme ray lying on dim-1 independent hyperplanes.  For each such ray,
  // the cells adjacent to it are reached by perturbing into the cells of the
  // sub-arrangement of the z's orthogonal to the ray, enumerated recursively
  // inside the ray's orthogonal complement.
  size_t n = zs.size();
  // Iterate over all (dim-1)-subsets of zs lexicographically.
  std::vector<size_t> c(dim - 1);
  for (size_t i = 0; i < dim - 1; ++i) c[i] = i;
  if (n < dim - 1) return;
  while (true) {
    std::vector<std::vector<double>> rows;
    rows.reserve(dim - 1);
    for (size_t i = 0; i < dim - 1; ++i) rows.push_back(zs[c[i]]);
    std::vector<double> ray = NullVector(rows, dim);
    if (!ray.empty()) {
      double rn = Norm2(ray);
      for (auto& x : ray) x /= rn;
      for (int sign = 0; sign < 2; ++sign) {
        std::vector<double> r = ray;
        if (sign == 1) {
          for (auto& x : r) x = -x;
        }
        // Split z's into those orthogonal to the ray and the rest.
        std::vector<std::vector<double>> ortho;
        double min_abs = 1e300;
        for (const auto& z : zs) {
          double d = Dot(z, r);
          double zn = Norm2(z);
          if (zn <= 1e-13) continue;
          if (std::fabs(d) <= 1e-10 * zn) {
            ortho.push_back(z);
          } else {
            min_abs = std::min(min_abs, std::fabs(d) / zn);
          }
        }
        if (ortho.empty()) {
          out->push_back(r);
          guard();
          continue;
        }
        // Orthonormal basis of the complement of r (dim-1 vectors).
        std::vector<std::vector<double>> basis;
        for (size_t e = 0; e < dim && basis.size() < dim - 1; ++e) {
          std::vector<double> b(dim, 0.0);
          b[e] = 1.0;
          double dr = Dot(b, r);
          for (size_t j = 0; j < dim; ++j) b[j] -= dr * r[j];
          for (const auto& q : basis) {
            double dq = Dot(b, q);
            for (size_t j = 0; j < dim; ++j) b[j] -= dq * q[j];
          }
          double bn = Norm2(b);
          if (bn > 1e-8) {
            for (auto& x : b) x /= bn;
            basis.push_back(b);
          }
        }
        // Project the orthogonal z's into complement coordinates and recurse.
        std::vector<std::vector<double>> proj;
        proj.reserve(ortho.size());
        for (const auto& z : ortho) {
          std::vector<double> p(dim - 1);
          for (size_t j = 0; j + 1 < dim; ++j) p[j] = Dot(z, basis[j]);
          proj.push_back(std::move(p));
        }
        std::vector<std::vector<double>> sub;
        ArrangementCellReps(proj, dim - 1, &sub, max_reps);
        double eps = (min_abs >= 1e300) ? 1.0 : 0.5 * min_abs;
        for (const auto& s : sub) {
          std::vector<double> v = r;
          for (size_t j = 0; j + 1 < dim; ++j) {
            for (size_t kk = 0; kk < dim; ++kk) v[kk] += eps * s[j] * basis[j][kk];
          }
          out->push_back(std::move(v));
        }
        guard();
      }
    }
    // Next combination.
    size_t i = dim - 1;
    while (i > 0) {
      --i;
      if (c[i] != i + n - (dim - 1)) {
        ++c[i];
        for (size_t j = i + 1; j < dim - 1; ++j) c[j] = c[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
    if (dim - 1 == 0) return;
  }
}

// Reduces lifted vectors to the coordinates of their span and enumerates cell
// representatives there, mapping them back.  Handles rank-deficient inputs
// (duplicated or collinear points).
inline std::vector<std::vector<double>> CellRepresentatives(
    const std::vector<std::vector<double>>& zs, size_t D, size_t max_reps) {
  // Orthonormal basis of span(zs) by Gram-Schmidt.
  std::vector<std::vector<double>> basis;
  for (const auto& z : zs) {
    std::vector<double> b = z;
    for (const auto& q : basis) {
      double d = Dot(b, q);
      for (size_t j = 0; j < D; ++j) b[j] -= d * q[j];
    }
    double bn = Norm2(b);
    if (bn > 1e-9 * std::max(1.0, Norm2(z))) {
      for (auto& x : b) x /= bn;
      basis.push_back(b);
      if (basis.size() == D) break;
    }
  }
  size_t r = basis.size();
  std::vector<std::vector<double>> reps;
  if (r == 0) {
    reps.push_back(std::vector<double>(D, 0.0));
    reps.back()[D - 1] = 1.0;
    return reps;
  }
  std::vector<std::vector<double>> coords;
  coords.reserve(zs.size());
  for (const auto& z : zs) {
    std::vector<double> p(r);
    for (size_t j = 0; j < r; ++j) p[j] = Dot(z, basis[j]);
    coords.push_back(std::move(p));
  }
  std::vector<std::vector<double>> sub;
  ArrangementCellReps(coords, r, &sub, max_reps);
  reps.reserve(sub.size());
  for (const auto& s : sub) {
    std::vector<double> v(D, 0.0);
    for (size_t j = 0; j < r; ++j) {
      for (size_t k = 0; k < D; ++k) v[k] += s[j] * basis[j][k];
    }
    reps.push_back(std::move(v));
  }
  return reps;
}

}  // namespace internal

// All distinct labelings the class induces on `pts` (anchors must not be
// passed here), each with a witness predictor, in a canonical deterministic
// order.  Exact for threshold1d and halfspace.
inline std::vector<internal::Dichotomy> EnumerateDichotomies(
    const FunctionClassDesc& cls, const std::vector<FeaturePoint>& pts) {
  std::vector<internal::Dichotomy> out;
  auto push_unique = [&](Predictor witness, std::vector<uint8_t> labels,
                         std::map<std::vector<uint8_t>, bool>* seen) {
    if (seen->count(labels)) return;
    (*seen)[labels] = true;
    out.push_back(internal::Dichotomy{std::move(witness), std::move(labels)});
  };
  std::map<std::vector<uint8_t>, bool> seen;

  if (cls.kind == ClassKind::kThreshold1d) {
    std::vector<double> xs;
    xs.reserve(pts.size());
    for (const auto& p : pts) {
      if (p.is_anchor) throw std::invalid_argument("anchors not enumerable");
      xs.push_back(p.coords.at(0));
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> candidates;
    if (sorted.empty()) {
      candidates.push_back(0.0);
    } else {
      candidates.push_back(sorted.front() - 1.0);  // the -inf candidate
      for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
      }
      candidates.push_back(sorted.back() + 1.0);
    }
    for (double t : candidates) {
      Predictor f{cls, {t}};
      std::vector<uint8_t> labels(xs.size());
      for (size_t i = 0; i < xs.size(); ++i) labels[i] = xs[i] >= t ? 1 : 0;
      push_unique(std::move(f), std::move(labels), &seen);
    }
    return out;
  }

  if (cls.kind == ClassKind::kHalfspace) {
    size_t d = static_cast<size_t>(cls.dim);
    size_t D = d + 1;
    if (pts.size() > 48) {
      throw SolverError("instance too large for halfspace enumeration");
    }
    std::vector<std::vector<double>> zs;
    zs.reserve(pts.size());
    for (const auto& p : pts) {
      if (p.is_anchor) throw std::invalid_argument("anchors not enumerable");
      if (p.coords.size() != d) {
        throw std::invalid_argument("point dimension does not match class dim");
      }
      std::vector<double> z = p.coords;
      z.push_back(1.0);
      zs.push_back(std::move(z));
    }
    std::vector<std::vector<double>> reps =
        internal::CellRepresentatives(zs, D, 4000000);
    for (const auto& v : reps) {
      std::vector<uint8_t> labels(zs.size());
      for (size_t i = 0; i < zs.size(); ++i) {
        labels[i] = internal::Dot(v, zs[i]) >= 0.0 ? 1 : 0;
      }
      Predictor f{cls, v};
      push_unique(std::move(f), std::move(labels), &seen);
    }
    return out;
  }
  throw std::invalid_argument("class is not enumerable");
}

namespace internal {

// Union of all points the objective touches, with bookkeeping for slicing a
// joint labeling back into per-term values.  Anchor points are excluded from
// enumeration and contribute the constant value 1.
struct ObjectivePoints {
  std::vector<FeaturePoint> enum_pts;     // non-anchor points, deduplicated
  std::vector<long> loss_slot;            // per loss term: index or -1 (anchor)
  std::vector<std::vector<long>> gp_slot, ridge_slot, dist_slot;  // per pub point
};

inline ObjectivePoints CollectPoints(const ObjectiveSpec& obj) {
  ObjectivePoints pts;
  std::map<std::vector<double>, long> index;
  auto slot_of = [&](const FeaturePoint& p) -> long {
    if (p.is_anchor) return -1;
    auto it = index.find(p.coords);
    if (it != index.end()) return it->second;
    long s = static_cast<long>(pts.enum_pts.size());
    index[p.coords] = s;
    pts.enum_pts.push_back(p);
    return s;
  };
  for (const auto& t : obj.loss_terms) pts.loss_slot.push_back(slot_of(t.point));
  auto pub_slots = [&](const PublicSample& pub) {
    std::vector<long> slots;
    slots.reserve(pub.m_total());
    for (const auto& p : pub.points) slots.push_back(slot_of(p));
    return slots;
  };
  if (obj.gp_term) pts.gp_slot.push_back(pub_slots(obj.gp_term->pub));
  if (obj.ridge_term) pts.ridge_slot.push_back(pub_slots(obj.ridge_term->pub));
  if (obj.distance_term) pts.dist_slot.push_back(pub_slots(obj.distance_term->pub));
  return pts;
}

// Objective value given the joint labeling on the enumerated points.
inline double ObjectiveValueFromLabels(const ObjectiveSpec& obj,
                                       const ObjectivePoints& pts,
                                       const std::vector<uint8_t>& labels) {
  auto value_at = [&](long slot) -> double {
    return slot < 0 ? 1.0 : static_cast<double>(labels[static_cast<size_t>(slot)]);
  };
  double total = 0.0;
  for (size_t i = 0; i < obj.loss_terms.size(); ++i) {
    const auto& t = obj.loss_terms[i];
    total += t.weight * LossValue(t.loss, value_at(pts.loss_slot[i]), t.label);
  }
  if (obj.gp_term) {
    const auto& g = *obj.gp_term;
    const auto& slots = pts.gp_slot[0];
    double s = 0.0;
    for (size_t j = 0; j < slots.size(); ++j) s += g.path.xi[j] * value_at(slots[j]);
    total += g.eta * s / std::sqrt(static_cast<double>(slots.size()));
  }
  if (obj.ridge_term) {
    const auto& r = *obj.ridge_term;
    const auto& slots = pts.ridge_slot[0];
    double s = 0.0;
    for (long slot : slots) {
      double v = value_at(slot);
      s += v * v;
    }
    total += r.eta * s / static_cast<double>(slots.size());
  }
  if (obj.distance_term) {
    const auto& dt = *obj.distance_term;
    const auto& slots = pts.dist_slot[0];
    double s = 0.0;
    for (size_t j = 0; j < slots.size(); ++j) {
      double v = value_at(slots[j]) - dt.target[j];
      s += v * v;
    }
    total += s / static_cast<double>(slots.size());
  }
  return total;
}

// Threshold sweep in O(T + k log k): every objective term is additive per
// point and takes one of two values there (label 1 or 0), so each canonical
// candidate is a suffix/prefix sum over the sorted coordinates.
inline ErmResult ErmThresholdSweep(const FunctionClassDesc& cls,
                                   const ObjectiveSpec& obj,
                                   const ObjectivePoints& pts) {
  size_t k = pts.enum_pts.size();
  std::vector<double> when_one(k, 0.0), when_zero(k, 0.0);
  double constant = 0.0;
  auto credit = [&](long slot, double v1, double v0) {
    if (slot < 0) {
      constant += v1;  // anchors always evaluate to 1
    } else {
      when_one[static_cast<size_t>(slot)] += v1;
      when_zero[static_cast<size_t>(slot)] += v0;
    }
  };
  for (size_t i = 0; i < obj.loss_terms.size(); ++i) {
    const auto& t = obj.loss_terms[i];
    credit(pts.loss_slot[i], t.weight * LossValue(t.loss, 1.0, t.label),
           t.weight * LossValue(t.loss, 0.0, t.label));
  }
  if (obj.gp_term) {
    const auto& g = *obj.gp_term;
    double scale = g.eta / std::sqrt(static_cast<double>(g.pub.m_total()));
    for (size_t j = 0; j < pts.gp_slot[0].size(); ++j) {
      credit(pts.gp_slot[0][j], scale * g.path.xi[j], 0.0);
    }
  }
  if (obj.ridge_term) {
    double scale = obj.ridge_term->eta /
                   static_cast<double>(obj.ridge_term->pub.m_total());
    for (long slot : pts.ridge_slot[0]) credit(slot, scale, 0.0);
  }
  if (obj.distance_term) {
    const auto& dt = *obj.distance_term;
    double scale = 1.0 / static_cast<double>(dt.pub.m_total());
    for (size_t j = 0; j < pts.dist_slot[0].size(); ++j) {
      double tj = dt.target[j];
      credit(pts.dist_slot[0][j], scale * (1.0 - tj) * (1.0 - tj),
             scale * tj * tj);
    }
  }
  ErmResult res;
  res.tolerance = 0.0;
  res.oracle_calls = 1;
  if (k == 0) {
    res.minimizer = Predictor{cls, {0.0}};
    res.objective_value = constant;
    return res;
  }
  std::vector<size_t> order(k);
  for (size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return pts.enum_pts[a].coords[0] < pts.enum_pts[b].coords[0];
  });
  // suffix[c] = sum of when_one over ranks >= c.
  std::vector<double> suffix(k + 1, 0.0);
  for (size_t c = k; c-- > 0;) suffix[c] = suffix[c + 1] + when_one[order[c]];
  double best_val = 0.0, best_t = 0.0;
  double prefix = 0.0;
  for (size_t c = 0; c <= k; ++c) {
    double val = constant + prefix + suffix[c];
    double t;
    if (c == 0) {
      t = pts.enum_pts[order[0]].coords[0] - 1.0;
    } else if (c == k) {
      t = pts.enum_pts[order[k - 1]].coords[0] + 1.0;
    } else {
      t = 0.5 * (pts.enum_pts[order[c - 1]].coords[0] +
                 pts.enum_pts[order[c]].coords[0]);
    }
    if (c == 0 || val < best_val) {
      best_val = val;
      best_t = t;
    }
    if (c < k) prefix += when_zero[order[c]];
  }
  res.minimizer = Predictor{cls, {best_t}};
  res.objective_value = best_val;
  return res;
}

// ---------------------------------------------------------------------------
// Convex solver for linear_ball: minimize the composite objective over
// ||w||_2 <= 1 with the ellipsoid method (bisection on the subgradient when
// dim == 1).  Certifies the declared optimality gap; robust to the
// nondifferentiable absolute and clipped-hinge losses.
// ---------------------------------------------------------------------------

struct BallObjective {
  const ObjectiveSpec* obj;
  int dim;

  double Value(const std::vector<double>& w) const {
    double total = 0.0;
    auto eval = [&](const FeaturePoint& p) -> double {
      if (p.is_anchor) return 1.0;
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += w[static_cast<size_t>(i)] * p.coords[static_cast<size_t>(i)];
      return s;
    };
    for (const auto& t : obj->loss_terms) {
      total += t.weight * LossValue(t.loss, eval(t.point), t.label);
    }
    if (obj->gp_term) {
      const auto& g = *obj->gp_term;
      double s = 0.0;
      for (size_t j = 0; j < g.pub.points.size(); ++j) s += g.path.xi[j] * eval(g.pub.points[j]);
      total += g.eta * s / std::sqrt(static_cast<double>(g.pub.points.size()));
    }
    if (obj->ridge_term) {
      const auto& r = *obj->ridge_term;
      double s = 0.0;
      for (const auto& p : r.pub.points) {
        double v = eval(p);
        s += v * v;
      }
      total += r.eta * s / static_cast<double>(r.pub.points.size());
    }
    if (obj->distance_term) {
      const auto& dt = *obj->distance_term;
      double s = 0.0;
      for (size_t j = 0; j < dt.pub.points.size(); ++j) {
        double v = eval(dt.pub.points[j]) - dt.target[j];
        s += v * v;
      }
      total += s / static_cast<double>(dt.pub.points.size());
    }
    return total;
  }

  std::vector<double> Subgradient(const std::vector<double>& w) const {
    std::vector<double> g(static_cast<size_t>(dim), 0.0);
    auto eval = [&](const FeaturePoint& p) -> double {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += w[static_cast<size_t>(i)] * p.coords[static_cast<size_t>(i)];
      return s;
    };
    auto add = [&](const FeaturePoint& p, double coef) {
      if (p.is_anchor) return;
      for (int i = 0; i < dim; ++i) g[static_cast<size_t>(i)] += coef * p.coords[static_cast<size_t>(i)];
    };
    for (const auto& t : obj->loss_terms) {
      if (t.point.is_anchor) continue;
      add(t.point, t.weight * LossSubgradient(t.loss, eval(t.point), t.label));
    }
    if (obj->gp_term) {
      const auto& gt = *obj->gp_term;
      double scale = gt.eta / std::sqrt(static_cast<double>(gt.pub.points.size()));
      for (size_t j = 0; j < gt.pub.points.size(); ++j) add(gt.pub.points[j], scale * gt.path.xi[j]);
    }
    if (obj->ridge_term) {
      const auto& r = *obj->ridge_term;
      double scale = 2.0 * r.eta / static_cast<double>(r.pub.points.size());
      for (const auto& p : r.pub.points) {
        if (p.is_anchor) continue;
        add(p, scale * eval(p));
      }
    }
    if (obj->distance_term) {
      const auto& dt = *obj->distance_term;
      double scale = 2.0 / static_cast<double>(dt.pub.points.size());
      for (size_t j = 0; j < dt.pub.points.size(); ++j) {
        const auto& p = dt.pub.points[j];
        if (p.is_anchor) continue;
        add(p, scale * (eval(p) - dt.target[j]));
      }
    }
    return g;
  }

  // A priori bound on the subgradient norm over the ball.
  double GradBound() const {
    double G = 0.0;
    for (const auto& t : obj->loss_terms) {
      if (t.point.is_anchor) continue;
      double xn = Norm2(t.point.coords);
      double lip = LossLipschitz(t.loss);
      if (t.loss == LossKind::kSquared) lip = 2.0 * (xn + std::fabs(t.label));
      G += std::fabs(t.weight) * lip * xn;
    }
    if (obj->gp_term) {
      const auto& g = *obj->gp_term;
      double s = 0.0;
      for (size_t j = 0; j < g.pub.points.size(); ++j) {
        if (g.pub.points[j].is_anchor) continue;
        s += std::fabs(g.path.xi[j]) * Norm2(g.pub.points[j].coords);
      }
      G += std::fabs(g.eta) * s / std::sqrt(static_cast<double>(g.pub.points.size()));
    }
    if (obj->ridge_term) {
      const auto& r = *obj->ridge_term;
      double s = 0.0;
      for (const auto& p : r.pub.points) {
        if (p.is_anchor) continue;
        double xn = Norm2(p.coords);
        s += xn * xn;
      }
      G += 2.0 * std::fabs(r.eta) * s / static_cast<double>(r.pub.points.size());
    }
    if (obj->distance_term) {
      const auto& dt = *obj->distance_term;
      double s = 0.0;
      for (size_t j = 0; j < dt.pub.points.size(); ++j) {
        const auto& p = dt.pub.points[j];
        if (p.is_anchor) continue;
        double xn = Norm2(p.coords);
        s += xn * (xn + std::fabs(dt.target[j]));
      }
      G += 2.0 * s / static_cast<double>(dt.pub.points.size());
    }
    return G;
  }
};

inline std::pair<std::vector<double>, double> SolveBall1d(const BallObjective& f,
                                                          double tol) {
  // Bisection on the subgradient of a convex function on [-1, 1].
  double lo = -1.0, hi = 1.0;
  auto grad = [&](double w) { return f.Subgradient({w})[0]; };
  if (grad(lo) >= 0.0) return {{lo}, 0.0};
  if (grad(hi) <= 0.0) return {{hi}, 0.0};
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (grad(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  (void)tol;
  double w = 0.5 * (lo + hi);
  return {{w}, 0.0};
}

inline std::pair<std::vector<double>, double> SolveBallEllipsoid(
    const BallObjective& f, double tol) {
  int d = f.dim;
  if (d == 1) return SolveBall1d(f, tol);
  size_t n = static_cast<size_t>(d);
  double G = std::max(f.GradBound(), 1e-9);
  double target = std::max(tol, 1e-10);
  double steps_per_half = 2.0 * d * (d + 1);
  int K = static_cast<int>(std::ceil(steps_per_half * std::log(4.0 * G / target))) + 16;
  K = std::min(K, 60000);

  std::vector<double> c(n, 0.0);
  std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) P[i][i] = 1.0;

  std::vector<double> best(n, 0.0);
  double best_val = f.Value(best);

  for (int it = 0; it < K; ++it) {
    std::vector<double> g;
    double cn = Norm2(c);
    if (cn > 1.0) {
      g = c;  // feasibility cut
    } else {
      g = f.Subgradient(c);
      double val = f.Value(c);
      if (val < best_val) {
        best_val = val;
        best = c;
      }
      if (Norm2(g) <= 1e-14) break;
    }
    // Pg and the normalizer sqrt(g' P g).
    std::vector<double> Pg(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) Pg[i] += P[i][j] * g[j];
    }
    double gPg = Dot(g, Pg);
    if (gPg <= 0.0 || !std::isfinite(gPg)) break;
    double denom = std::sqrt(gPg);
    double nd = static_cast<double>(d);
    for (size_t i = 0; i < n; ++i) c[i] -= Pg[i] / ((nd + 1.0) * denom);
    double scale = nd * nd / (nd * nd - 1.0);
    double coef = 2.0 / ((nd + 1.0) * gPg);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        P[i][j] = scale * (P[i][j] - coef * Pg[i] * Pg[j]);
      }
    }
    // Keep P symmetric against drift.
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        double s = 0.5 * (P[i][j] + P[j][i]);
        P[i][j] = s;
        P[j][i] = s;
      }
    }
  }
  // Project the incumbent onto the ball (it is feasible by construction, but
  // guard against rounding).
  double bn = Norm2(best);
  if (bn > 1.0) {
    for (auto& x : best) x /= bn;
  }
  return {best, target};
}

}  // namespace internal

// The ERM oracle: returns an exact minimizer for threshold1d and halfspace,
// and a tolerance-certified minimizer for linear_ball.
inline ErmResult Erm(const FunctionClassDesc& cls, const ObjectiveSpec& obj,
                     double tol = 1e-6) {
  if (obj.distance_term &&
      obj.distance_term->target.size() != obj.distance_term->pub.m_total()) {
    throw std::invalid_argument("distance target length does not match sample");
  }
  if (obj.gp_term && obj.gp_term->path.xi.size() != obj.gp_term->pub.m_total()) {
    throw std::invalid_argument("gp path length does not match sample");
  }
  if (cls.kind == ClassKind::kLinearBall) {
    for (const auto& t : obj.loss_terms) {
      if (!LossIsConvex(t.loss)) {
        throw SolverError("non-convex loss requested for linear_ball");
      }
      if (t.weight < 0.0) {
        throw SolverError("negative loss weights not supported for linear_ball");
      }
    }
    internal::BallObjective f{&obj, cls.dim};
    auto [w, gap] = internal::SolveBallEllipsoid(f, tol);
    ErmResult res;
    res.minimizer = Predictor{cls, w};
    res.objective_value = f.Value(w);
    res.tolerance = gap;
    res.oracle_calls = 1;
    return res;
  }
  // Enumerable classes: evaluate the objective on every realizable joint
  // labeling; ties go to the lowest-index candidate.
  internal::ObjectivePoints pts = internal::CollectPoints(obj);
  if (cls.kind == ClassKind::kThreshold1d) {
    return internal::ErmThresholdSweep(cls, obj, pts);
  }
  std::vector<internal::Dichotomy> dichotomies =
      EnumerateDichotomies(cls, pts.enum_pts);
  ErmResult res;
  bool first = true;
  for (const auto& d : dichotomies) {
    double val = internal::ObjectiveValueFromLabels(obj, pts, d.labels);
    if (first || val < res.objective_value) {
      first = false;
      res.objective_value = val;
      res.minimizer = d.witness;
    }
  }
  if (first) throw SolverError("objective touches no points");
  res.tolerance = 0.0;
  res.oracle_calls = 1;
  return res;
}

// sup_{f in F} omega_m(f) for one path, via ERM on the negated GP term.
inline double ErmMaximizeGp(const FunctionClassDesc& cls, const GpPath& path,
                            const PublicSample& pub, double tol = 1e-6) {
  ObjectiveSpec obj;
  obj.gp_term = GpTerm{path, pub, -1.0};
  return -Erm(cls, obj, tol).objective_value;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_ORACLE_H_
