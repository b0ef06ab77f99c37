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

#ifndef ORACLEPRIV_MECH_H_
#define ORACLEPRIV_MECH_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oraclepriv/core.hpp"
#include "oraclepriv/oracle.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {

// Noise is always drawn at unit scale; the scale enters through gamma inside
// the perturbation target f_bar + gamma * zeta.
enum class NoiseKind { kGaussianStd, kLaplaceStd };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussianStd;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;  // 0 only with Laplace-based mechanisms
};

inline std::vector<double> SampleNoise(const NoiseSpec& spec, size_t m, Rng& rng) {
  if (m == 0) throw std::invalid_argument("noise vector must be nonempty");
  std::vector<double> zeta(m);
  for (auto& z : zeta) {
    z = spec.kind == NoiseKind::kGaussianStd ? rng.Normal() : rng.Laplace();
  }
  return zeta;
}

struct PerturbResult {
  Predictor fhat;
  std::vector<double> fhat_public_values;  // learning metrics need these
  std::vector<double> target;              // f_bar values + gamma * zeta
  double solver_tolerance = 0.0;
};

// Output perturbation: minimize ||f - f_bar - gamma * zeta||_m^2 over the
// class via the ERM oracle.  gamma = 0 is a pure rounding onto the class.
inline PerturbResult Perturb(const Predictor& fbar, const NoiseSpec& spec,
                             double gamma, const PublicSample& pub,
                             const FunctionClassDesc& cls, Rng& rng,
                             double tol = 1e-6) {
  if (pub.m_total() == 0) throw std::invalid_argument("empty public sample");
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument("gamma must be finite and nonnegative");
  }
  std::vector<double> target = EvaluateOn(fbar, pub);
  if (gamma > 0.0) {
    std::vector<double> zeta = SampleNoise(spec, pub.m_total(), rng);
    for (size_t i = 0; i < target.size(); ++i) target[i] += gamma * zeta[i];
  }
  ObjectiveSpec obj;
  obj.distance_term = DistanceTerm{pub, target};
  ErmResult res = Erm(cls, obj, tol);
  PerturbResult out;
  out.fhat = res.minimizer;
  out.fhat_public_values = EvaluateOn(res.minimizer, pub);
  out.target = std::move(target);
  out.solver_tolerance = res.tolerance;
  return out;
}

// Privacy cost of Perturb applied to a rho-stable base learner:
//   Gaussian: eps = m/(2 gamma^2) * (1 + gamma * sqrt(log(1/delta))) * rho
//   Laplace:  eps = m^{3/2} / gamma * rho
inline double PrivacyFromStability(size_t m, double gamma, double rho,
                                   double budget_delta, const NoiseSpec& spec) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
  double md = static_cast<double>(m);
  if (spec.kind == NoiseKind::kGaussianStd) {
    if (budget_delta <= 0.0) {
      throw std::invalid_argument("gaussian mechanism requires delta > 0");
    }
    return md / (2.0 * gamma * gamma) *
           (1.0 + gamma * std::sqrt(std::log(1.0 / budget_delta))) * rho;
  }
  return std::pow(md, 1.5) / gamma * rho;
}

// Discretization of continuous public-point value vectors for privacy
// audits: sign pattern plus a 16-cell quantization of each coordinate of
// [-1,1].  Post-processing only shrinks privacy loss, so bin-level ratio
// estimates lower-bound epsilon.
inline uint64_t DiscretizeValues(const std::vector<double>& values, int bins = 16) {
  uint64_t key = 0xcbf29ce484222325ULL;
  for (double v : values) {
    double clamped = v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
    int cell = static_cast<int>((clamped + 1.0) / 2.0 * bins);
    if (cell >= bins) cell = bins - 1;
    if (cell < 0) cell = 0;
    uint64_t word = static_cast<uint64_t>(cell) * 2 + (v >= 0.0 ? 1 : 0);
    key ^= word + 0x9e3779b97f4a7c15ULL;
    key *= 0x100000001b3ULL;
  }
  return key;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_MECH_H_
