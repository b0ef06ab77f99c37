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

#ifndef ORACLEPRIV_AUDIT_H_
#define ORACLEPRIV_AUDIT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oraclepriv/core.hpp"
#include "oraclepriv/dists.hpp"
#include "oraclepriv/learners.hpp"
#include "oraclepriv/mech.hpp"
#include "oraclepriv/oracle.hpp"
#include "oraclepriv/rng.hpp"
#include "oraclepriv/stats.hpp"

namespace oraclepriv {

// Two datasets of equal size differing in exactly one element.
struct NeighborPair {
  LabeledDataset D;
  LabeledDataset Dprime;
  size_t swapped_index = 0;
};

inline NeighborPair MakeNeighborPair(const LabeledDataset& base, size_t index,
                                     FeaturePoint replacement, double new_label) {
  if (index >= base.n()) throw std::invalid_argument("swap index out of range");
  NeighborPair pair;
  pair.D = base;
  pair.Dprime = base;
  pair.Dprime.points[index] = {std::move(replacement), new_label};
  pair.swapped_index = index;
  return pair;
}

enum class Verdict { kPass, kFail, kInconclusive };

inline const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// One audited quantity: its estimate, confidence interval, the theoretical
// bound (including declared slack), and the one-sided verdict.
struct AuditReport {
  std::string quantity;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
  long trials = 0;
  Verdict verdict = Verdict::kInconclusive;
};

inline AuditReport MakeReport(std::string quantity, double estimate, Interval ci,
                              double bound, long trials) {
  AuditReport r;
  r.quantity = std::move(quantity);
  r.estimate = estimate;
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.bound = bound;
  r.trials = trials;
  r.verdict = ci.high <= bound ? Verdict::kPass : Verdict::kFail;
  return r;
}

// ---------------------------------------------------------------------------
// FTRL stability: ||fbar - fbar'||_m <= 2 / sqrt(eta n), deterministic per
// pair, with 2x the solver tolerance as declared slack.
// ---------------------------------------------------------------------------
inline AuditReport FtrlStabilityCheck(const NeighborPair& pair,
                                      const PublicSample& pub,
                                      const FunctionClassDesc& cls, LossKind loss,
                                      double eta, double tol = 1e-6) {
  auto solve = [&](const LabeledDataset& data) {
    ObjectiveSpec obj;
    obj.loss_terms = internal::PrivateLossTerms(data, loss);
    obj.ridge_term = RidgeTerm{pub, eta};
    return Erm(cls, obj, tol);
  };
  ErmResult a = solve(pair.D);
  ErmResult b = solve(pair.Dprime);
  std::vector<double> va = EvaluateOn(a.minimizer, pub);
  std::vector<double> vb = EvaluateOn(b.minimizer, pub);
  for (size_t i = 0; i < va.size(); ++i) va[i] -= vb[i];
  double dist = EmpiricalNorm(va);
  double bound = 2.0 / std::sqrt(eta * static_cast<double>(pair.D.n())) +
                 2.0 * std::max(a.tolerance, b.tolerance);
  return MakeReport("ftrl_stability", dist, Interval{dist, dist}, bound, 1);
}

// Minimum empirical norm over sampled class members; the kappa of the
// anti-concentration bound, measured rather than assumed.
inline double MeasureKappaSquared(const FunctionClassDesc& cls,
                                  const PublicSample& pub, int samples, Rng rng) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Predictor& f) {
    double nm = EmpiricalNorm(EvaluateOn(f, pub));
    best = std::min(best, nm * nm);
  };
  if (cls.kind == ClassKind::kLinearBall) {
    consider(Predictor{cls, std::vector<double>(static_cast<size_t>(cls.dim), 0.0)});
    for (int s = 0; s < samples; ++s) {
      std::vector<double> w(static_cast<size_t>(cls.dim));
      double n2 = 0.0;
      for (auto& x : w) {
        x = rng.Normal();
        n2 += x * x;
      }
      double r = std::pow(rng.UniformOpen(), 1.0 / cls.dim);
      for (auto& x : w) x *= n2 > 0 ? r / std::sqrt(n2) : 0.0;
      consider(Predictor{cls, w});
    }
  } else {
    std::vector<FeaturePoint> non_anchor;
    for (const auto& p : pub.points) {
      if (!p.is_anchor) non_anchor.push_back(p);
    }
    for (const auto& d : EnumerateDichotomies(cls, non_anchor)) consider(d.witness);
  }
  return best;
}

// The anti-concentration tail bound 8 tau / (rho^4 kappa^2 eta) * E[sup w].
inline double FtplTailBound(double rho, double tau, double kappa_sq, double eta,
                            double sup_omega_mean) {
  return 8.0 * tau / (std::pow(rho, 4) * kappa_sq * eta) * sup_omega_mean;
}

// Mean of sup_f omega_m(f) over i.i.d. GP paths, with a normal-approximation
// confidence interval.
inline AuditReport GaussianComplexityEstimate(const FunctionClassDesc& cls,
                                              const PublicSample& pub, int trials,
                                              Rng rng, double tol = 1e-6) {
  if (trials < 100) throw std::invalid_argument("need at least 100 paths");
  std::vector<double> sups;
  sups.reserve(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    GpPath path = DrawGpPath(pub, rng.Substream(RoleTag("gc_path"), static_cast<uint64_t>(t)));
    sups.push_back(ErmMaximizeGp(cls, path, pub, tol));
  }
  MeanStats s = Summarize(sups);
  Interval ci = MeanCi(sups);
  AuditReport r = MakeReport("gaussian_complexity", s.mean, ci,
                             std::numeric_limits<double>::infinity(), trials);
  r.verdict = Verdict::kPass;
  return r;
}

// Coupled FTPL tail frequencies against the anti-concentration bound, one
// report per rho.  Both objectives share the per-trial GP path.
inline std::vector<AuditReport> FtplTailCheck(
    const NeighborPair& pair, const PublicSample& pub, const FunctionClassDesc& cls,
    LossKind loss, double eta, const std::vector<double>& rho_grid, int trials,
    Rng rng, double tol = 1e-6) {
  if (trials < 1000) throw std::invalid_argument("underpowered tail check");
  double kappa_sq =
      MeasureKappaSquared(cls, pub, 1000, rng.Substream(RoleTag("kappa")));
  AuditReport complexity = GaussianComplexityEstimate(
      cls, pub, 500, rng.Substream(RoleTag("complexity")), tol);
  double sup_mean = complexity.estimate;
  std::vector<long> exceed(rho_grid.size(), 0);
  for (int t = 0; t < trials; ++t) {
    GpPath path = DrawGpPath(pub, rng.Substream(RoleTag("tail_path"), static_cast<uint64_t>(t)));
    auto solve = [&](const LabeledDataset& data) {
      ObjectiveSpec obj;
      obj.loss_terms = internal::PrivateLossTerms(data, loss);
      obj.gp_term = GpTerm{path, pub, eta};
      return Erm(cls, obj, tol).minimizer;
    };
    std::vector<double> va = EvaluateOn(solve(pair.D), pub);
    std::vector<double> vb = EvaluateOn(solve(pair.Dprime), pub);
    for (size_t i = 0; i < va.size(); ++i) va[i] -= vb[i];
    double dist = EmpiricalNorm(va);
    for (size_t r = 0; r < rho_grid.size(); ++r) {
      if (dist > rho_grid[r]) ++exceed[r];
    }
  }
  std::vector<AuditReport> reports;
  for (size_t r = 0; r < rho_grid.size(); ++r) {
    double freq = static_cast<double>(exceed[r]) / trials;
    Interval ci = ClopperPearson(exceed[r], trials);
    double bound = FtplTailBound(rho_grid[r], 1.0, kappa_sq, eta, sup_mean);
    reports.push_back(MakeReport("ftpl_tail_rho_" + std::to_string(rho_grid[r]),
                                 freq, ci, bound, trials));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// RRSPM projection machinery.
// ---------------------------------------------------------------------------

// The projection of the class onto the public points: each realizable public
// labeling v together with c_v(D) = min { private loss of f : f|pub = v }.
struct ProjectedLabeling {
  std::vector<uint8_t> labels;       // on the public points
  std::vector<uint8_t> disagreement; // vs Ytilde
  double cost_d = 0.0;               // c_v(D)
  double cost_dprime = 0.0;          // c_v(D')
};

inline std::vector<ProjectedLabeling> ProjectClass(
    const FunctionClassDesc& cls, const NeighborPair& pair,
    const PublicSample& pub, const std::vector<uint8_t>& ytilde) {
  if (pub.m_anchor != 0) throw std::invalid_argument("projection needs an unanchored sample");
  // Joint labelings over private-union-public points, then group by the
  // public slice and keep the minimum private cost per group.
  std::vector<FeaturePoint> joint;
  for (const auto& [x, y] : pair.D.points) joint.push_back(x);
  size_t n = pair.D.n();
  size_t offset_dprime = joint.size();
  joint.push_back(pair.Dprime.points[pair.swapped_index].first);
  size_t offset_pub = joint.size();
  for (const auto& p : pub.points) joint.push_back(p);

  std::map<std::vector<uint8_t>, ProjectedLabeling> groups;
  for (const auto& d : EnumerateDichotomies(cls, joint)) {
    std::vector<uint8_t> v(d.labels.begin() + static_cast<long>(offset_pub), d.labels.end());
    double cost_d = 0.0, cost_dp = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double pred = static_cast<double>(d.labels[i]);
      double cd = LossValue(LossKind::kZeroOne, pred, pair.D.points[i].second);
      cost_d += cd;
      if (i == pair.swapped_index) {
        double predp = static_cast<double>(d.labels[offset_dprime]);
        cost_dp += LossValue(LossKind::kZeroOne, predp,
                             pair.Dprime.points[i].second);
      } else {
        cost_dp += cd;
      }
    }
    auto it = groups.find(v);
    if (it == groups.end()) {
      ProjectedLabeling pl;
      pl.labels = v;
      pl.disagreement.resize(v.size());
      for (size_t i = 0; i < v.size(); ++i) pl.disagreement[i] = v[i] != ytilde[i];
      pl.cost_d = cost_d;
      pl.cost_dprime = cost_dp;
      groups.emplace(std::move(v), std::move(pl));
    } else {
      it->second.cost_d = std::min(it->second.cost_d, cost_d);
      it->second.cost_dprime = std::min(it->second.cost_dprime, cost_dp);
    }
  }
  std::vector<ProjectedLabeling> out;
  out.reserve(groups.size());
  for (auto& [k, v] : groups) out.push_back(std::move(v));
  return out;
}

// Winner of the perturbed projected ERM: argmin_v c_v + <xi, a_v>.  Returns
// -1 on a tie (excluded by re-draw upstream; continuous noise gives ties
// probability zero).
inline long ProjectedWinner(const std::vector<ProjectedLabeling>& proj,
                            const std::vector<double>& xi, bool use_dprime) {
  long best = -1;
  double best_score = 0.0;
  bool tie = false;
  for (size_t v = 0; v < proj.size(); ++v) {
    double score = use_dprime ? proj[v].cost_dprime : proj[v].cost_d;
    for (size_t i = 0; i < xi.size(); ++i) {
      if (proj[v].disagreement[i]) score += xi[i];
    }
    if (best < 0 || score < best_score) {
      best = static_cast<long>(v);
      best_score = score;
      tie = false;
    } else if (score == best_score) {
      tie = true;
    }
  }
  return tie ? -1 : best;
}

// The per-coordinate +-2 noise shift that couples minimizers across
// neighboring datasets: Psi(xi)_i = xi_i + 2 (1 - 2 * 1{f(Z_i) != Ytilde_i}).
inline std::vector<double> PsiMap(const std::vector<double>& xi,
                                  const std::vector<uint8_t>& f_labels,
                                  const std::vector<uint8_t>& ytilde) {
  if (xi.size() != f_labels.size() || xi.size() != ytilde.size()) {
    throw std::invalid_argument("psi_map length mismatch");
  }
  std::vector<double> out(xi.size());
  for (size_t i = 0; i < xi.size(); ++i) {
    double disagree = f_labels[i] != ytilde[i] ? 1.0 : 0.0;
    out[i] = xi[i] + 2.0 * (1.0 - 2.0 * disagree);
  }
  return out;
}

// Coupling test: when xi crowns v on D, Psi_v(xi) must crown v on D'.
inline AuditReport PsiCouplingTest(const NeighborPair& pair, const PublicSample& pub,
                                   const std::vector<uint8_t>& ytilde,
                                   const FunctionClassDesc& cls, int trials,
                                   double epsilon, Rng rng) {
  std::vector<ProjectedLabeling> proj = ProjectClass(cls, pair, pub, ytilde);
  double scale = 2.0 * static_cast<double>(pub.m_total()) / epsilon;
  long violations = 0;
  long done = 0;
  Rng noise = rng.Substream(RoleTag("psi_noise"));
  int redraw_budget = 16 * trials;
  while (done < trials && redraw_budget-- > 0) {
    std::vector<double> xi(pub.m_total());
    for (auto& x : xi) x = scale * noise.Laplace();
    long winner = ProjectedWinner(proj, xi, false);
    if (winner < 0) continue;  // tie: re-draw
    std::vector<double> shifted =
        PsiMap(xi, proj[static_cast<size_t>(winner)].labels, ytilde);
    long winner_prime = ProjectedWinner(proj, shifted, true);
    if (winner_prime != winner) ++violations;
    ++done;
  }
  double freq = done > 0 ? static_cast<double>(violations) / done : 1.0;
  Interval ci = done > 0 ? ClopperPearson(violations, done) : Interval{1.0, 1.0};
  AuditReport r = MakeReport("psi_coupling_violations", freq, ci, 0.0, done);
  r.verdict = violations == 0 && done == trials ? Verdict::kPass : Verdict::kFail;
  return r;
}

// Exact Laplace density ratio for a shifted noise vector; each coordinate
// shift must be at most 2 in magnitude.  At scale 2m/eps the ratio lies in
// [e^{-eps}, e^{eps}].
inline double LaplaceShiftRatio(const std::vector<double>& xi,
                                const std::vector<double>& xi_shifted,
                                double scale) {
  if (xi.size() != xi_shifted.size()) {
    throw std::invalid_argument("shift ratio length mismatch");
  }
  double log_ratio = 0.0;
  for (size_t i = 0; i < xi.size(); ++i) {
    if (std::fabs(xi[i] - xi_shifted[i]) > 2.0 + 1e-12) {
      throw std::invalid_argument("per-coordinate shift exceeds 2");
    }
    log_ratio += (std::fabs(xi[i]) - std::fabs(xi_shifted[i])) / scale;
  }
  return std::exp(log_ratio);
}

// ---------------------------------------------------------------------------
// RRSPM projection privacy: Monte Carlo winner frequencies per labeling,
// ratio confidence intervals against e^eps (Laplace) or the
// (e^eps, delta) inequality (Gaussian).
// ---------------------------------------------------------------------------
struct RrspmAuditOptions {
  double epsilon_audit = 1.0;       // budget the audit checks against
  double epsilon_mechanism = 1.0;   // budget the mechanism is calibrated to
  double delta = 0.0;
  NoiseKind noise_kind = NoiseKind::kLaplaceStd;
  long trials = 100000;
  double gaussian_constant = 2.0;
  double min_probability = 1e-4;    // labelings below this stay inconclusive
};

inline std::vector<AuditReport> RrspmPrivacyAudit(
    const NeighborPair& pair, const PublicSample& pub,
    const std::vector<uint8_t>& ytilde, const FunctionClassDesc& cls,
    const RrspmAuditOptions& opt, Rng rng) {
  std::vector<ProjectedLabeling> proj = ProjectClass(cls, pair, pub, ytilde);
  if (proj.size() > 64) throw std::invalid_argument("projection not enumerable");
  PrivacyBudget mech_budget{opt.epsilon_mechanism, opt.delta};
  double scale = RrspmNoiseScale(pub.m_total(), mech_budget, opt.noise_kind,
                                 opt.gaussian_constant);
  std::vector<long> wins_d(proj.size(), 0), wins_dp(proj.size(), 0);
  long done_d = 0, done_dp = 0;
  for (int side = 0; side < 2; ++side) {
    Rng noise = rng.Substream(RoleTag(side == 0 ? "audit_noise_d" : "audit_noise_dp"));
    auto& wins = side == 0 ? wins_d : wins_dp;
    auto& done = side == 0 ? done_d : done_dp;
    long budget = 16 * opt.trials;
    while (done < opt.trials && budget-- > 0) {
      std::vector<double> xi(pub.m_total());
      for (auto& x : xi) {
        x = scale * (opt.noise_kind == NoiseKind::kLaplaceStd ? noise.Laplace()
                                                              : noise.Normal());
      }
      long w = ProjectedWinner(proj, xi, side == 1);
      if (w < 0) continue;
      ++wins[static_cast<size_t>(w)];
      ++done;
    }
  }
  double bound = std::exp(opt.epsilon_audit);
  std::vector<AuditReport> reports;
  for (size_t v = 0; v < proj.size(); ++v) {
    Interval p = ClopperPearson(wins_d[v], done_d);
    Interval q = ClopperPearson(wins_dp[v], done_dp);
    std::string name = "rrspm_ratio_v" + std::to_string(v);
    double p_hat = static_cast<double>(wins_d[v]) / done_d;
    double q_hat = static_cast<double>(wins_dp[v]) / done_dp;
    AuditReport r;
    r.quantity = name;
    r.trials = done_d + done_dp;
    r.bound = bound;
    if (p.low <= opt.min_probability || q.low <= opt.min_probability) {
      // Too little mass to resolve a ratio at this trial budget.
      r.estimate = 0.0;
      r.ci_low = 0.0;
      r.ci_high = 0.0;
      r.verdict = Verdict::kInconclusive;
      reports.push_back(std::move(r));
      continue;
    }
    if (opt.noise_kind == NoiseKind::kLaplaceStd) {
      // Symmetric pure-DP check: both directions against e^eps.
      double est = std::max(p_hat / q_hat, q_hat / p_hat);
      double hi = std::max(p.high / q.low, q.high / p.low);
      double lo = std::max(p.low / q.high, q.low / p.high);
      r.estimate = est;
      r.ci_low = lo;
      r.ci_high = hi;
      r.verdict = hi <= bound ? Verdict::kPass : Verdict::kFail;
    } else {
      // Approximate-DP inequality P(v|D) <= e^eps P(v|D') + delta, both ways.
      double slack1 = p.high - (bound * q.low + opt.delta);
      double slack2 = q.high - (bound * p.low + opt.delta);
      double worst = std::max(slack1, slack2);
      r.estimate = std::max(p_hat - (bound * q_hat + opt.delta),
                            q_hat - (bound * p_hat + opt.delta));
      r.ci_low = worst;
      r.ci_high = worst;
      r.bound = 0.0;
      r.verdict = worst <= 0.0 ? Verdict::kPass : Verdict::kFail;
    }
    reports.push_back(std::move(r));
  }
  // Sanity row: winner frequencies must sum to one.
  AuditReport total;
  total.quantity = "rrspm_probability_total";
  total.estimate = 1.0;
  total.ci_low = 1.0;
  total.ci_high = 1.0;
  total.bound = 1.0;
  total.trials = done_d + done_dp;
  total.verdict = (done_d == opt.trials && done_dp == opt.trials)
                      ? Verdict::kPass
                      : Verdict::kFail;
  reports.push_back(std::move(total));
  return reports;
}

// Searches swaps (index, replacement point, label) for the neighboring pair
// that maximizes the worst per-labeling winner-probability ratio under the
// mechanism's noise, estimated by a small common-random-numbers Monte Carlo.
// Privacy audits should stress the mechanism, not average over it.
inline NeighborPair WorstCasePair(const LabeledDataset& base,
                                  const std::vector<FeaturePoint>& candidates,
                                  const PublicSample& pub,
                                  const std::vector<uint8_t>& ytilde,
                                  const FunctionClassDesc& cls,
                                  double noise_scale, NoiseKind noise_kind,
                                  Rng rng, int probe_trials = 20000,
                                  double* score_out = nullptr) {
  size_t m = pub.m_total();
  std::vector<double> noise(static_cast<size_t>(probe_trials) * m);
  for (auto& x : noise) {
    x = noise_scale *
        (noise_kind == NoiseKind::kLaplaceStd ? rng.Laplace() : rng.Normal());
  }
  NeighborPair best;
  double best_score = -1.0;
  std::vector<double> xi(m);
  for (size_t index = 0; index < base.n(); ++index) {
    for (const auto& cand : candidates) {
      for (double label : {0.0, 1.0}) {
        NeighborPair p = MakeNeighborPair(base, index, cand, label);
        std::vector<ProjectedLabeling> proj = ProjectClass(cls, p, pub, ytilde);
        std::vector<long> wins_d(proj.size(), 0), wins_dp(proj.size(), 0);
        long done = 0;
        for (int t = 0; t < probe_trials; ++t) {
          for (size_t i = 0; i < m; ++i) xi[i] = noise[static_cast<size_t>(t) * m + i];
          long wa = ProjectedWinner(proj, xi, false);
          long wb = ProjectedWinner(proj, xi, true);
          if (wa < 0 || wb < 0) continue;
          ++wins_d[static_cast<size_t>(wa)];
          ++wins_dp[static_cast<size_t>(wb)];
          ++done;
        }
        if (done == 0) continue;
        double score = 0.0;
        long floor = std::max<long>(20, done / 200);
        for (size_t v = 0; v < proj.size(); ++v) {
          if (wins_d[v] < floor || wins_dp[v] < floor) continue;
          double ratio = static_cast<double>(wins_d[v]) / wins_dp[v];
          score = std::max({score, ratio, 1.0 / ratio});
        }
        if (score > best_score) {
          best_score = score;
          best = std::move(p);
        }
      }
    }
  }
  if (score_out != nullptr) *score_out = best_score;
  return best;
}

// The full worst-case instance for an RRSPM privacy audit: the pseudo-label
// pattern is searched as well (the projection lemma holds for every fixed
// Ytilde, so the audit may pick the most stressing one).
struct RrspmAuditInstance {
  NeighborPair pair;
  std::vector<uint8_t> ytilde;
};

inline RrspmAuditInstance WorstCaseRrspmInstance(
    const LabeledDataset& base, const std::vector<FeaturePoint>& candidates,
    const PublicSample& pub, const FunctionClassDesc& cls, double noise_scale,
    NoiseKind noise_kind, Rng rng, int probe_trials = 20000) {
  size_t m = pub.m_total();
  std::vector<std::vector<uint8_t>> patterns;
  if (m <= 4) {
    for (uint64_t mask = 0; mask < (1ULL << m); ++mask) {
      std::vector<uint8_t> yt(m);
      for (size_t i = 0; i < m; ++i) yt[i] = (mask >> i) & 1;
      patterns.push_back(std::move(yt));
    }
  } else {
    Rng yrng = rng.Substream(RoleTag("ytilde_probe"));
    for (int k = 0; k < 8; ++k) {
      std::vector<uint8_t> yt(m);
      for (auto& y : yt) y = yrng.NextU64() & 1;
      patterns.push_back(std::move(yt));
    }
  }
  RrspmAuditInstance best;
  double best_score = -1.0;
  for (size_t p = 0; p < patterns.size(); ++p) {
    double score = 0.0;
    NeighborPair pair =
        WorstCasePair(base, candidates, pub, patterns[p], cls, noise_scale,
                      noise_kind, rng.Substream(RoleTag("wc_pair"), p),
                      probe_trials, &score);
    if (score > best_score) {
      best_score = score;
      best = RrspmAuditInstance{std::move(pair), patterns[p]};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Excess risk against a non-private ERM baseline on a fresh sample.
// ---------------------------------------------------------------------------
inline AuditReport ExcessRiskEstimate(const Predictor& fhat,
                                      const FunctionClassDesc& cls,
                                      const SmoothTarget& target,
                                      const LabelModel& labels, LossKind loss,
                                      size_t test_n, double bound, Rng rng,
                                      double tol = 1e-6) {
  LabeledDataset test =
      DrawPrivate(target, labels, test_n, rng.Substream(RoleTag("test_data")));
  LabeledDataset train = DrawPrivate(target, labels, 10 * test_n,
                                     rng.Substream(RoleTag("baseline_data")));
  ObjectiveSpec obj;
  obj.loss_terms = internal::PrivateLossTerms(train, loss);
  Predictor fbest = Erm(cls, obj, tol).minimizer;
  std::vector<double> diffs;
  diffs.reserve(test.n());
  for (const auto& [x, y] : test.points) {
    diffs.push_back(LossValue(loss, Evaluate(fhat, x), y) -
                    LossValue(loss, Evaluate(fbest, x), y));
  }
  MeanStats s = Summarize(diffs);
  Interval ci = MeanCi(diffs);
  return MakeReport("excess_risk", s.mean, ci, bound,
                    static_cast<long>(test.n()));
}

// ---------------------------------------------------------------------------
// Norm comparison ||f||_mu <= 2 ||f||_m + c (G_hat + sqrt(log 1/beta)) / sqrt m.
// ---------------------------------------------------------------------------
struct NormComparisonOptions {
  double beta = 0.05;
  double slack_constant = 8.0;
  int complexity_paths = 200;
};

inline AuditReport NormComparisonCheck(const FunctionClassDesc& cls,
                                       const BaseDist& base, size_t m, int trials,
                                       const NormComparisonOptions& opt, Rng rng) {
  PublicSample ref = DrawPublic(base, m, rng.Substream(RoleTag("norm_ref")));
  AuditReport complexity = GaussianComplexityEstimate(
      cls, ref, opt.complexity_paths, rng.Substream(RoleTag("norm_complexity")));
  double slack = opt.slack_constant *
                 (complexity.estimate + std::sqrt(std::log(1.0 / opt.beta))) /
                 std::sqrt(static_cast<double>(m));
  long violations = 0;
  Rng sample_rng = rng.Substream(RoleTag("norm_trials"));
  for (int t = 0; t < trials; ++t) {
    PublicSample pub = DrawPublic(base, m, sample_rng.Substream(2 * static_cast<uint64_t>(t)));
    Rng frng = sample_rng.Substream(2 * static_cast<uint64_t>(t) + 1);
    Predictor f;
    if (cls.kind == ClassKind::kThreshold1d) {
      f = Predictor{cls, {frng.Uniform() * 1.2 - 0.1}};
    } else if (cls.kind == ClassKind::kLinearBall) {
      std::vector<double> w(static_cast<size_t>(cls.dim));
      double n2 = 0.0;
      for (auto& x : w) {
        x = frng.Normal();
        n2 += x * x;
      }
      double r = std::pow(frng.UniformOpen(), 1.0 / cls.dim);
      for (auto& x : w) x *= n2 > 0 ? r / std::sqrt(n2) : 0.0;
      f = Predictor{cls, w};
    } else {
      throw std::invalid_argument("norm comparison supports threshold1d and linear_ball");
    }
    double mu_norm = std::sqrt(MuNormSquared(f, base));
    double emp_norm = EmpiricalNorm(EvaluateOn(f, pub));
    if (mu_norm > 2.0 * emp_norm + slack) ++violations;
  }
  double freq = static_cast<double>(violations) / trials;
  Interval ci = ClopperPearson(violations, trials);
  return MakeReport("norm_comparison_m" + std::to_string(m), freq, ci, opt.beta,
                    trials);
}

// ---------------------------------------------------------------------------
// Post-processing epsilon lower bound for the continuous-output learners:
// bin the output's public values and compare bin frequencies.
// ---------------------------------------------------------------------------
inline AuditReport ContinuousPrivacyAudit(
    const std::function<LearnerOutput(const LabeledDataset&, Rng)>& learner,
    const NeighborPair& pair, const PublicSample& pub, int bins, int trials,
    double epsilon_budget, Rng rng) {
  if (trials < 1000) throw std::invalid_argument("underpowered privacy audit");
  std::map<uint64_t, std::pair<long, long>> counts;
  for (int side = 0; side < 2; ++side) {
    const LabeledDataset& data = side == 0 ? pair.D : pair.Dprime;
    Rng side_rng = rng.Substream(RoleTag(side == 0 ? "cont_d" : "cont_dp"));
    for (int t = 0; t < trials; ++t) {
      LearnerOutput out = learner(data, side_rng.Substream(static_cast<uint64_t>(t)));
      std::vector<double> values = EvaluateOn(out.fhat, pub);
      uint64_t key = DiscretizeValues(values, bins);
      auto& c = counts[key];
      if (side == 0) {
        ++c.first;
      } else {
        ++c.second;
      }
    }
  }
  double eps_hat = 0.0;
  double eps_hi = 0.0;
  double eps_lo = 0.0;
  long considered = 0;
  for (const auto& [key, c] : counts) {
    if (c.first < 10 || c.second < 10) continue;
    ++considered;
    Interval p = ClopperPearson(c.first, trials);
    Interval q = ClopperPearson(c.second, trials);
    double p_hat = static_cast<double>(c.first) / trials;
    double q_hat = static_cast<double>(c.second) / trials;
    double point = std::fabs(std::log(p_hat / q_hat));
    double hi = std::max(std::log(p.high / q.low), std::log(q.high / p.low));
    double lo = std::max({std::log(p.low / q.high), std::log(q.low / p.high), 0.0});
    if (point > eps_hat) eps_hat = point;
    if (hi > eps_hi) eps_hi = hi;
    if (lo > eps_lo) eps_lo = lo;
  }
  AuditReport r;
  r.quantity = "epsilon_lower_bound";
  r.estimate = eps_hat;
  r.ci_low = eps_lo;
  r.ci_high = eps_hi;
  r.bound = epsilon_budget;
  r.trials = 2L * trials;
  r.verdict = considered == 0
                  ? Verdict::kInconclusive
                  : (eps_hi <= epsilon_budget ? Verdict::kPass : Verdict::kFail);
  return r;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_AUDIT_H_
