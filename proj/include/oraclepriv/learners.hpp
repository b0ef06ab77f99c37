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

#ifndef ORACLEPRIV_LEARNERS_H_
#define ORACLEPRIV_LEARNERS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oraclepriv/core.hpp"
#include "oraclepriv/mech.hpp"
#include "oraclepriv/oracle.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {

// Every tuned symbol of the theorems in one bag.  d is the complexity proxy
// (sqrt(d) ~ worst-case Gaussian complexity).
struct Hyperparams {
  double eta = 0.0;
  double gamma = 0.0;
  size_t m = 1;
  size_t J = 1;
  size_t n = 1;
  PrivacyBudget budget;
  double alpha = 0.1;
  double beta = 0.05;
  double sigma = 1.0;
  double lambda = 1.0;
  double d = 1.0;
};

struct LearnerOutput {
  Predictor fhat;
  Predictor fbar;                          // pre-perturbation member
  std::vector<double> fbar_public_values;  // pre-perturbation values on the pub
  int oracle_calls = 0;
  uint64_t rng_seed = 0;
};

namespace internal {

inline std::vector<LossTerm> PrivateLossTerms(const LabeledDataset& data,
                                              LossKind loss) {
  std::vector<LossTerm> terms;
  terms.reserve(data.n());
  for (const auto& [x, y] : data.points) {
    terms.push_back(LossTerm{x, y, 1.0, loss});
  }
  return terms;
}

}  // namespace internal

// Follow-the-perturbed-leader learner over frozen GP paths; the public entry
// point draws the paths.  Restricted to linear_ball, where averaging the
// parameters equals averaging the functions.
inline LearnerOutput FtplLearnWithPaths(const LabeledDataset& data,
                                        const PublicSample& pub,
                                        const FunctionClassDesc& cls,
                                        LossKind loss, const Hyperparams& hp,
                                        const NoiseSpec& spec,
                                        const std::vector<GpPath>& paths,
                                        Rng rng, double tol = 1e-6) {
  if (cls.kind != ClassKind::kLinearBall) {
    throw SolverError("ftpl requires the convex linear_ball class");
  }
  if (!LossIsConvex(loss)) throw SolverError("ftpl requires a convex loss");
  if (paths.empty()) throw std::invalid_argument("J must be at least 1");
  std::vector<double> wbar(static_cast<size_t>(cls.dim), 0.0);
  for (const auto& path : paths) {
    ObjectiveSpec obj;
    obj.loss_terms = internal::PrivateLossTerms(data, loss);
    obj.gp_term = GpTerm{path, pub, hp.eta};
    ErmResult res = Erm(cls, obj, tol);
    for (size_t i = 0; i < wbar.size(); ++i) {
      wbar[i] += res.minimizer.params[i] / static_cast<double>(paths.size());
    }
  }
  Predictor fbar{cls, wbar};
  LearnerOutput out;
  out.fbar = fbar;
  out.fbar_public_values = EvaluateOn(fbar, pub);
  Rng perturb_rng = rng.Substream(RoleTag("perturb"));
  out.fhat = Perturb(fbar, spec, hp.gamma, pub, cls, perturb_rng, tol).fhat;
  out.oracle_calls = static_cast<int>(paths.size()) + 1;
  out.rng_seed = rng.key();
  return out;
}

inline LearnerOutput FtplLearn(const LabeledDataset& data, const PublicSample& pub,
                               const FunctionClassDesc& cls, LossKind loss,
                               const Hyperparams& hp, const NoiseSpec& spec,
                               Rng rng, double tol = 1e-6) {
  if (hp.J < 1) throw std::invalid_argument("J must be at least 1");
  std::vector<GpPath> paths;
  paths.reserve(hp.J);
  for (size_t j = 0; j < hp.J; ++j) {
    paths.push_back(DrawGpPath(pub, rng.Substream(RoleTag("gp_path"), j)));
  }
  return FtplLearnWithPaths(data, pub, cls, loss, hp, spec, paths, rng, tol);
}

// Follow-the-regularized-leader learner: one ERM against the empirical loss
// plus eta * ||f||_m^2, then output perturbation.
inline LearnerOutput FtrlLearn(const LabeledDataset& data, const PublicSample& pub,
                               const FunctionClassDesc& cls, LossKind loss,
                               const Hyperparams& hp, const NoiseSpec& spec,
                               Rng rng, double tol = 1e-6) {
  if (cls.kind != ClassKind::kLinearBall) {
    throw SolverError("ftrl requires the convex linear_ball class");
  }
  if (!LossIsConvex(loss)) throw SolverError("ftrl requires a convex loss");
  ObjectiveSpec obj;
  obj.loss_terms = internal::PrivateLossTerms(data, loss);
  obj.ridge_term = RidgeTerm{pub, hp.eta};
  ErmResult res = Erm(cls, obj, tol);
  LearnerOutput out;
  out.fbar = res.minimizer;
  out.fbar_public_values = EvaluateOn(res.minimizer, pub);
  Rng perturb_rng = rng.Substream(RoleTag("perturb"));
  out.fhat = Perturb(res.minimizer, spec, hp.gamma, pub, cls, perturb_rng, tol).fhat;
  out.oracle_calls = 2;
  out.rng_seed = rng.key();
  return out;
}

// Noise scale of the RRSPM objective perturbation weights.
//   Laplace:  Lap(2m / eps)
//   Gaussian: N(0, C sqrt(m log(1/delta)) / eps), C = 2 by default.
inline double RrspmNoiseScale(size_t m, const PrivacyBudget& budget,
                              NoiseKind kind, double gaussian_constant = 2.0) {
  double md = static_cast<double>(m);
  if (kind == NoiseKind::kLaplaceStd) {
    return 2.0 * md / budget.epsilon;
  }
  if (budget.delta <= 0.0) {
    throw std::invalid_argument("gaussian rrspm requires delta > 0");
  }
  return gaussian_constant * std::sqrt(md * std::log(1.0 / budget.delta)) /
         budget.epsilon;
}

// RRSPM with the randomness frozen: pseudo-labels Ytilde and noise weights xi
// are supplied by the caller.  The public entry point draws both.
inline LearnerOutput RrspmLearnWithNoise(const LabeledDataset& data,
                                         const PublicSample& pub,
                                         const FunctionClassDesc& cls,
                                         const std::vector<uint8_t>& ytilde,
                                         const std::vector<double>& xi,
                                         uint64_t seed) {
  if (cls.kind == ClassKind::kLinearBall) {
    throw SolverError("rrspm requires a binary classification class");
  }
  if (pub.m_anchor != 0) {
    throw std::invalid_argument("rrspm takes an unanchored public sample");
  }
  if (ytilde.size() != pub.m_total() || xi.size() != pub.m_total()) {
    throw std::invalid_argument("pseudo-label or weight length mismatch");
  }
  for (const auto& [x, y] : data.points) {
    if (y != 0.0 && y != 1.0) {
      throw std::invalid_argument("rrspm requires {0,1} labels");
    }
  }
  ObjectiveSpec obj;
  obj.loss_terms = internal::PrivateLossTerms(data, LossKind::kZeroOne);
  for (size_t i = 0; i < pub.m_total(); ++i) {
    obj.loss_terms.push_back(LossTerm{pub.points[i],
                                      static_cast<double>(ytilde[i]), xi[i],
                                      LossKind::kZeroOne});
  }
  ErmResult res = Erm(cls, obj);
  LearnerOutput out;
  out.fbar = res.minimizer;
  out.fbar_public_values = EvaluateOn(res.minimizer, pub);
  NoiseSpec unused{NoiseKind::kGaussianStd};
  Rng dummy(seed);
  out.fhat = Perturb(res.minimizer, unused, 0.0, pub, cls, dummy).fhat;
  out.oracle_calls = 2;
  out.rng_seed = seed;
  return out;
}

inline LearnerOutput RrspmLearn(const LabeledDataset& data, const PublicSample& pub,
                                const FunctionClassDesc& cls,
                                const PrivacyBudget& budget, NoiseKind noise_kind,
                                Rng rng, double gaussian_constant = 2.0) {
  std::vector<uint8_t> ytilde(pub.m_total());
  Rng label_rng = rng.Substream(RoleTag("pseudo_labels"));
  for (auto& y : ytilde) y = label_rng.NextU64() & 1 ? 1 : 0;
  double scale = RrspmNoiseScale(pub.m_total(), budget, noise_kind, gaussian_constant);
  Rng noise_rng = rng.Substream(RoleTag("rrspm_noise"));
  std::vector<double> xi(pub.m_total());
  for (auto& x : xi) {
    x = scale * (noise_kind == NoiseKind::kLaplaceStd ? noise_rng.Laplace()
                                                      : noise_rng.Normal());
  }
  return RrspmLearnWithNoise(data, pub, cls, ytilde, xi, rng.key());
}

// ---------------------------------------------------------------------------
// Hyperparameter calculators.  The theorems fix only the shape of each
// formula; the caller supplies the leading constant.
// ---------------------------------------------------------------------------

enum class TheoremKind {
  kGeneralFull,
  kFtrlFullGaussian,
  kFtrlFullLaplace,
  kRrspmPure,
  kRrspmApprox,
};

inline TheoremKind TheoremFromName(const std::string& name) {
  if (name == "general_full") return TheoremKind::kGeneralFull;
  if (name == "ftrl_full_gaussian") return TheoremKind::kFtrlFullGaussian;
  if (name == "ftrl_full_laplace") return TheoremKind::kFtrlFullLaplace;
  if (name == "rrspm_pure") return TheoremKind::kRrspmPure;
  if (name == "rrspm_approx") return TheoremKind::kRrspmApprox;
  throw std::invalid_argument("unknown theorem: " + name);
}

inline Hyperparams HyperparamsCalc(TheoremKind theorem, double alpha, double beta,
                                   double epsilon, double delta, double sigma,
                                   double lambda, double d, double constant) {
  if (!(alpha > 0.0 && beta > 0.0 && beta < 1.0 && epsilon > 0.0 && sigma > 0.0 &&
        sigma <= 1.0 && lambda > 0.0 && d > 0.0 && constant > 0.0)) {
    throw std::invalid_argument("hyperparameter inputs must be positive");
  }
  bool needs_delta = theorem == TheoremKind::kGeneralFull ||
                     theorem == TheoremKind::kFtrlFullGaussian ||
                     theorem == TheoremKind::kRrspmApprox;
  if (needs_delta && !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("this theorem requires delta in (0, 1)");
  }
  double Lb = std::log(1.0 / beta);
  double Ld = needs_delta ? std::log(1.0 / delta) : 0.0;
  auto count = [](double v) {
    // The alpha^-14-style formulas overflow size_t for small alpha; saturate.
    double c = std::max(1.0, std::ceil(v));
    return static_cast<size_t>(std::min(c, 9.0e18));
  };
  Hyperparams hp;
  hp.alpha = alpha;
  hp.beta = beta;
  hp.sigma = sigma;
  hp.lambda = lambda;
  hp.d = d;
  hp.budget = PrivacyBudget{epsilon, needs_delta ? delta : 0.0};
  const double c = constant;
  switch (theorem) {
    case TheoremKind::kGeneralFull: {
      hp.gamma = c * sigma * alpha / (lambda * std::sqrt(Lb));
      hp.eta = c * alpha / std::sqrt(d);
      hp.m = count(c * std::max(d, Lb) * lambda * lambda / (sigma * sigma * alpha * alpha));
      double j1 = d * Lb / (alpha * alpha);
      double j2 = std::pow(lambda, 8) * d * d * std::pow(Lb, 4) * Ld /
                  (std::pow(sigma, 8) * std::pow(alpha, 8) * epsilon * epsilon);
      double j3 = d * d * std::pow(lambda, 6) * std::pow(Lb, 3) * Ld * Ld /
                  (std::pow(sigma, 6) * std::pow(alpha, 6) * epsilon * epsilon);
      hp.J = count(c * std::max({j1, j2, j3}));
      double n1 = std::pow(lambda, 12) * std::pow(d, 5) * std::pow(Lb, 6) /
                  (std::pow(sigma, 12) * std::pow(epsilon, 3) * std::pow(alpha, 14));
      double n2 = std::pow(d, 5) * std::pow(lambda, 9) * std::pow(Lb, 4.5) *
                  std::pow(Ld, 1.5) /
                  (std::pow(sigma, 9) * std::pow(epsilon, 3) * std::pow(alpha, 10));
      hp.n = count(c * std::max(n1, n2));
      break;
    }
    case TheoremKind::kFtrlFullGaussian: {
      hp.gamma = c * sigma * alpha / (lambda * std::sqrt(Lb));
      hp.eta = c * alpha;
      hp.m = count(c * std::max(d, Lb) * lambda * lambda / (sigma * sigma * alpha * alpha));
      double n1 = std::pow(lambda, 5) * d * Lb * Lb /
                  (epsilon * std::pow(sigma, 4) * std::pow(alpha, 5));
      double n2 = std::pow(lambda, 4) * d * std::pow(Lb, 1.5) * std::sqrt(Ld) /
                  (epsilon * std::pow(sigma, 3) * std::pow(alpha, 4));
      hp.n = count(c * std::max(n1, n2));
      hp.J = 1;
      break;
    }
    case TheoremKind::kFtrlFullLaplace: {
      hp.gamma = c * alpha * alpha * sigma /
                 (lambda * lambda * std::min(d * std::sqrt(Lb), Lb));
      hp.eta = c * alpha;
      hp.m = count(c * std::max(d, Lb) * lambda * lambda / (sigma * sigma * alpha * alpha));
      hp.n = count(c * std::pow(lambda, 6) / (std::pow(sigma, 5) * epsilon * std::pow(alpha, 6)) *
                   std::max(d * d * std::sqrt(Lb), std::pow(Lb, 2.5)));
      hp.J = 1;
      break;
    }
    case TheoremKind::kRrspmPure: {
      hp.m = count(c * (d + Lb) / (alpha * alpha * sigma * sigma));
      hp.n = count(c * d * d * std::log(d + 2.0) * Lb /
                   (std::pow(alpha, 5) * std::pow(sigma, 4) * epsilon));
      hp.J = 1;
      break;
    }
    case TheoremKind::kRrspmApprox: {
      hp.m = count(c * (d + Lb) / (alpha * alpha * sigma * sigma));
      hp.n = count(c * d * d * std::log(d + 2.0) * Lb * std::sqrt(Ld) /
                   (std::pow(alpha, 4) * std::pow(sigma, 4) * epsilon));
      hp.J = 1;
      break;
    }
  }
  return hp;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_LEARNERS_H_
